//! Feasibility regions over the `(p, t = |r|^2)` plane.

mod render;

pub use render::{emit_csv, emit_svg, CSV_HEADER};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bayes::analytic::{bayes_rule_solution, BOUNDARY_TOL, S_SINGULAR_TOL};
use crate::bayes::{bayes_residual, gamel_report, is_unscathed, FeasibilityReport, InverseRecord};
use crate::channel::{choi_from_jam, is_cptp, BlochState, PauliChannel};
use crate::error::{Error, Result};
use crate::mat::pauli_reconstruct;
use crate::sampling::random_bloch_state;

/// Feasibility tolerance used by the scans.
pub const SCAN_TOL: f64 = 1e-9;
/// Grid size for the monotonicity check that precedes bisection.
pub const CHI_GRID: usize = 201;
const DIRECTION_TOL: f64 = 1e-12;
const THREE_ENTRY_MIN_RADIUS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Depolarizing,
    Bb84,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Depolarizing => "depolarizing",
            Family::Bb84 => "bb84",
        }
    }

    pub fn channel(self, p: f64) -> Result<PauliChannel> {
        match self {
            Family::Depolarizing => PauliChannel::depolarizing(p),
            Family::Bb84 => PauliChannel::bb84(p),
        }
    }

    pub fn default_direction(self) -> [f64; 3] {
        match self {
            Family::Depolarizing => [1.0, 0.0, 0.0],
            Family::Bb84 => [3f64.sqrt().recip(); 3],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    p_axis: Vec<f64>,
    t_axis: Vec<f64>,
    direction: [f64; 3],
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} axis is empty")));
    }
    if axis.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidGrid(format!("{name} axis leaves [0, 1]")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(format!("{name} axis is not strictly increasing")));
    }
    Ok(())
}

impl ScanGrid {
    pub fn new(p_axis: Vec<f64>, t_axis: Vec<f64>, direction: [f64; 3]) -> Result<Self> {
        check_axis("p", &p_axis)?;
        check_axis("t", &t_axis)?;
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > DIRECTION_TOL {
            return Err(Error::InvalidGrid(format!("direction has norm {norm}, expected 1")));
        }
        Ok(ScanGrid { p_axis, t_axis, direction })
    }

    /// `resolution` equally spaced points on `[0, 1]` along both axes.
    pub fn uniform(resolution: usize, direction: [f64; 3]) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidGrid(format!("resolution {resolution} < 2")));
        }
        let axis: Vec<f64> = (0..resolution).map(|k| k as f64 / (resolution - 1) as f64).collect();
        ScanGrid::new(axis.clone(), axis, direction)
    }

    pub fn p_axis(&self) -> &[f64] {
        &self.p_axis
    }

    pub fn t_axis(&self) -> &[f64] {
        &self.t_axis
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.p_axis.len() * self.t_axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn state(&self, t: f64) -> Result<BlochState> {
        BlochState::new(self.direction.map(|d| d * t.sqrt()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureTag {
    /// First violated inequality (1, 2 or 3).
    Condition(usize),
    /// Some `|lambda_i| = 1` and the state is not unscathed.
    NotUnscathed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionCell {
    pub p: f64,
    pub t: f64,
    pub feasible: bool,
    pub slack: [f64; 3],
    pub witness: Option<FailureTag>,
}

/// Feasibility report of the analytic candidate, or of the adjoint when `S`
/// is too close to 1 for the closed form.
pub fn candidate_report(p: &PauliChannel, s: &BlochState, tol: f64) -> Result<FeasibilityReport> {
    let lambda = p.lambda();
    let r = s.r();
    let s_value: f64 = (0..3).map(|i| (lambda[i] * r[i]).powi(2)).sum();
    if s_value < 1.0 - S_SINGULAR_TOL {
        let (a, _) = bayes_rule_solution(lambda, r)?;
        gamel_report(&choi_from_jam(&pauli_reconstruct(&a.scaled(0.5))), tol)
    } else {
        gamel_report(&p.rep().choi(), tol)
    }
}

/// Verdict for one `(channel, state)` pair. Channels with some `|lambda_i| = 1`
/// are decided by the unscathed classification.
pub fn evaluate_cell(p: &PauliChannel, s: &BlochState, tol: f64) -> Result<(bool, FeasibilityReport, Option<FailureTag>)> {
    let report = candidate_report(p, s, tol)?;
    let on_boundary = p.lambda().iter().any(|l| l.abs() >= 1.0 - BOUNDARY_TOL);
    if on_boundary {
        let ok = is_unscathed(p, s).is_some();
        return Ok((ok, report, (!ok).then_some(FailureTag::NotUnscathed)));
    }
    let witness = report.failed_conditions().first().map(|&k| FailureTag::Condition(k));
    Ok((report.feasible, report, witness))
}

fn scan_family(family: Family, grid: &ScanGrid, tol: f64) -> Result<Vec<RegionCell>> {
    let pairs: Vec<(f64, f64)> = grid.p_axis.iter().flat_map(|&p| grid.t_axis.iter().map(move |&t| (p, t))).collect();
    pairs
        .par_iter()
        .map(|&(p, t)| {
            let channel = family.channel(p)?;
            let state = grid.state(t)?;
            let (feasible, report, witness) = evaluate_cell(&channel, &state, tol)?;
            Ok(RegionCell { p, t, feasible, slack: report.slack, witness })
        })
        .collect()
}

/// Depolarizing channel `lambda = 1 - 4p/3`; cells ordered with `p` outer.
pub fn scan_depolarizing(grid: &ScanGrid, tol: f64) -> Result<Vec<RegionCell>> {
    scan_family(Family::Depolarizing, grid, tol)
}

/// BB84 channel `(q^2, pq, p^2, pq)`; cells ordered with `p` outer.
pub fn scan_bb84(grid: &ScanGrid, tol: f64) -> Result<Vec<RegionCell>> {
    scan_family(Family::Bb84, grid, tol)
}

/// Closed forms for the depolarizing inverse at `t = |r|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepolarizingQuantities {
    pub norm_v2: f64,
    pub norm_r2: f64,
    pub norm_rv2: f64,
    pub det_r: f64,
    pub norm_adj_r2: f64,
}

pub fn depolarizing_quantities(lambda: f64, t: f64) -> Result<DepolarizingQuantities> {
    if !(lambda > -1.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("lambda = {lambda} outside (-1, 1)")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    let s = lambda * lambda * t;
    if s >= 1.0 {
        return Err(Error::Domain(format!("lambda^2 t = {s} >= 1")));
    }
    let l2 = lambda * lambda;
    let d = 1.0 - s;
    Ok(DepolarizingQuantities {
        norm_v2: (1.0 - l2).powi(2) * t / d.powi(2),
        norm_r2: l2 / d.powi(2) * ((2.0 * l2 * l2 + 1.0) * t * t - 2.0 * (2.0 * l2 + 1.0) * t + 3.0),
        norm_rv2: l2 * (1.0 - l2).powi(2) * (1.0 - t).powi(2) * t / d.powi(4),
        det_r: lambda.powi(3) * (t - 1.0) / d,
        norm_adj_r2: l2 * l2 / d.powi(2) * (2.0 * (1.0 - t).powi(2) + d * d),
    })
}

/// Depolarizing feasibility at `(p, t)` along the first Bloch axis.
pub fn depolarizing_feasible(p: f64, t: f64, tol: f64) -> Result<bool> {
    let channel = PauliChannel::depolarizing(p)?;
    let state = BlochState::new([t.sqrt(), 0.0, 0.0])?;
    Ok(evaluate_cell(&channel, &state, tol)?.0)
}

/// Largest `t` with a depolarizing inverse at `p`, to absolute accuracy `tol`.
/// Feasibility is first checked to be monotone on a grid; otherwise the
/// largest feasible grid value is reported through `MonotonicityViolated`.
pub fn boundary_chi(p: f64, tol: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} outside (0, 1)")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("bisection tolerance {tol} must be positive")));
    }
    let ts: Vec<f64> = (0..CHI_GRID).map(|k| k as f64 / (CHI_GRID - 1) as f64).collect();
    let verdicts = ts.iter().map(|&t| depolarizing_feasible(p, t, SCAN_TOL)).collect::<Result<Vec<bool>>>()?;
    let grid_max = ts.iter().zip(&verdicts).filter(|(_, &ok)| ok).map(|(&t, _)| t).fold(0.0, f64::max);
    let first_bad = verdicts.iter().position(|ok| !ok);
    let Some(first_bad) = first_bad else {
        return Ok(1.0);
    };
    if verdicts[first_bad..].iter().any(|&ok| ok) || first_bad == 0 {
        return Err(Error::MonotonicityViolated { p, grid_max });
    }
    let (mut lo, mut hi) = (ts[first_bad - 1], ts[first_bad]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if depolarizing_feasible(p, mid, SCAN_TOL)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeEntryHit {
    pub p: [f64; 4],
    pub r: [f64; 3],
    pub slack: [f64; 3],
    pub residual: f64,
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeEntrySummary {
    pub resolution: usize,
    pub seed: u64,
    pub channels: usize,
    pub samples_per_channel: usize,
    pub evaluated: usize,
    /// Channels whose inverse at the maximally mixed state passed the test.
    pub center_feasible: usize,
    /// Feasible cells with `|r| > 1e-6`, each re-checked through the residual
    /// and CPTP tests.
    pub hits: Vec<ThreeEntryHit>,
}

impl ThreeEntrySummary {
    pub fn confirmed_hits(&self) -> usize {
        self.hits.iter().filter(|h| h.confirmed).count()
    }
}

/// Probability vectors with exactly three nonzero entries on a simplex grid
/// of step `1 / resolution`.
pub fn three_entry_channels(resolution: usize) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    for zero in 0..4 {
        for a in 1..resolution {
            for b in 1..resolution - a {
                let c = resolution - a - b;
                let mut weights = [a, b, c].into_iter();
                let p: [f64; 4] = std::array::from_fn(|i| {
                    if i == zero {
                        0.0
                    } else {
                        weights.next().expect("three weights") as f64 / resolution as f64
                    }
                });
                out.push(p);
            }
        }
    }
    out
}

pub fn scan_three_entry(resolution: usize, samples: usize, seed: u64, tol: f64) -> Result<ThreeEntrySummary> {
    if resolution < 8 {
        return Err(Error::InvalidGrid(format!("three-entry resolution {resolution} < 8")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<BlochState> = (0..samples).map(|_| random_bloch_state(&mut rng)).collect();
    let channels = three_entry_channels(resolution);

    let per_channel = channels
        .par_iter()
        .map(|&probs| -> Result<(bool, Vec<ThreeEntryHit>)> {
            let p = PauliChannel::new(probs)?;
            let center = evaluate_cell(&p, &BlochState::maximally_mixed(), tol)?.0;
            let mut hits = Vec::new();
            for s in &states {
                let (feasible, report, _) = evaluate_cell(&p, s, tol)?;
                if feasible && s.norm() > THREE_ENTRY_MIN_RADIUS {
                    hits.push(confirm_hit(&p, s, report, tol)?);
                }
            }
            Ok((center, hits))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ThreeEntrySummary {
        resolution,
        seed,
        channels: channels.len(),
        samples_per_channel: samples,
        evaluated: channels.len() * samples,
        center_feasible: per_channel.iter().filter(|(c, _)| *c).count(),
        hits: per_channel.into_iter().flat_map(|(_, h)| h).collect(),
    })
}

fn confirm_hit(p: &PauliChannel, s: &BlochState, report: FeasibilityReport, tol: f64) -> Result<ThreeEntryHit> {
    let record: InverseRecord = crate::bayes::analytic_inverse(p, s, tol)?;
    let candidate = record.channel();
    let residual = bayes_residual(&p.rep(), s, &candidate);
    Ok(ThreeEntryHit {
        p: p.p(),
        r: s.r(),
        slack: report.slack,
        residual,
        confirmed: residual <= tol.max(1e-10) && is_cptp(&candidate, tol),
    })
}
