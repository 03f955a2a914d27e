use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qubit_retro::bayes::{
    adjoint_is_inverse, bayes_residual, direct_residuals, is_unscathed, kraus_from_choi, two_time_projector,
    FeasibilityReport, InverseRecord, InverseRoute, NoInverse, NoInverseReason,
};
use qubit_retro::channel::{apply, choi_min_eigenvalue, is_cptp, unital_to_pauli, BlochState, ChannelRep};
use qubit_retro::scan::{
    boundary_chi, emit_csv, emit_svg, scan_bb84, scan_depolarizing, scan_three_entry, Family, RegionCell, ScanGrid,
};
use qubit_retro::schema::{complex_rows, parse_channel, parse_state, ChannelSpec, Complex, StateSpec};
use qubit_retro::{bayesian_inverse, Error};
use serde::Serialize;
use serde_json::json;

use crate::output::{coeffs, complex_matrix, num, real_matrix, write_bytes, write_json};
use crate::{
    thread_pool, RunConfig, ScanFamily, DEFAULT_RESOLUTION, DEFAULT_THREE_ENTRY_RESOLUTION,
    DEFAULT_THREE_ENTRY_SAMPLES, EXIT_INPUT, EXIT_NOT_CPTP, EXIT_NO_INVERSE, EXIT_OK,
};

const CHI_TABLE_TOL: f64 = 1e-10;
const DISCARD_TOL: f64 = 1e-12;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_channel(path: &Path) -> Result<ChannelRep> {
    parse_channel(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_state(path: &Path) -> Result<BlochState> {
    parse_state(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn channel_and_state(cfg: &RunConfig) -> Result<(ChannelRep, BlochState)> {
    let channel = load_channel(cfg.require(&cfg.channel, "channel")?)?;
    let state = load_state(cfg.require(&cfg.state, "state")?)?;
    Ok((channel, state))
}

fn kraus_json(ops: &[qubit_retro::mat::CMat2]) -> Vec<Vec<Complex>> {
    ops.iter().map(|k| k.0.iter().flatten().map(|z| [z.re, z.im]).collect()).collect()
}

fn print_report(out: &mut dyn Write, report: &FeasibilityReport) -> Result<()> {
    writeln!(out, "feasibility slacks (>= 0 required):")?;
    for (k, s) in report.slack.iter().enumerate() {
        writeln!(out, "  condition {}: {}", k + 1, num(*s))?;
    }
    writeln!(out, "eta = {}  det R = {}", num(report.eta), num(report.det_r))?;
    Ok(())
}

#[derive(Serialize)]
struct InvertJson<'a> {
    verdict: &'static str,
    tol: f64,
    channel: ChannelSpec,
    state: StateSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    inverse: Option<ChannelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    route: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unique: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<[[f64; 4]; 4]>,
    #[serde(skip_serializing_if = "Option::is_none", rename = "S")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kraus: Option<Vec<Vec<Complex>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a FeasibilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed_conditions: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<serde_json::Value>,
}

fn route_name(route: InverseRoute) -> &'static str {
    match route {
        InverseRoute::Adjoint => "adjoint",
        InverseRoute::Analytic => "analytic",
    }
}

pub fn cmd_invert(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let (e, s) = channel_and_state(cfg)?;
    match bayesian_inverse(&e, &s, cfg.tol) {
        Ok(record) => invert_found(cfg, out, &e, &s, &record),
        Err(Error::NoInverse(detail)) => invert_missing(cfg, out, &e, &s, &detail),
        Err(other) => Err(other.into()),
    }
}

fn invert_found(cfg: &RunConfig, out: &mut dyn Write, e: &ChannelRep, s: &BlochState, rec: &InverseRecord) -> Result<u8> {
    let inverse = rec.channel();
    let residual = bayes_residual(e, s, &inverse);
    writeln!(out, "verdict: Bayesian inverse found ({} route)", route_name(rec.route))?;
    if !rec.unique {
        writeln!(out, "note: E(rho) is singular; this is one of several solutions")?;
    }
    let block = inverse.ptm().block();
    if block.iter().flatten().all(|x| x.abs() <= DISCARD_TOL) {
        writeln!(out, "note: inverse discards its input and prepares rho")?;
    }
    coeffs(out, &rec.a)?;
    writeln!(out, "S = {}", num(rec.s))?;
    print_report(out, &rec.report)?;
    writeln!(out, "Kraus operators ({}):", rec.kraus.len())?;
    for (k, op) in rec.kraus.iter().enumerate() {
        complex_matrix(out, &format!("  K{k}"), op)?;
    }
    writeln!(out, "Bayes-rule residual: {}", num(residual))?;

    if let Some(dir) = &cfg.out {
        let spec = ChannelSpec::from_channel(&inverse);
        let body = InvertJson {
            verdict: "inverse",
            tol: cfg.tol,
            channel: ChannelSpec::from_channel(e),
            state: StateSpec::from_state(s),
            inverse: Some(spec.clone()),
            route: Some(route_name(rec.route)),
            unique: Some(rec.unique),
            a: Some(rec.a.0),
            s: Some(rec.s),
            kraus: Some(kraus_json(&rec.kraus)),
            residual: Some(residual),
            report: Some(&rec.report),
            failed_conditions: None,
            witness: None,
        };
        let report = write_json(dir, "invert.json", &body)?;
        let inv = write_json(dir, "inverse.json", &spec)?;
        writeln!(out, "wrote {} and {}", report.display(), inv.display())?;
    }
    Ok(EXIT_OK)
}

fn invert_missing(cfg: &RunConfig, out: &mut dyn Write, e: &ChannelRep, s: &BlochState, detail: &NoInverse) -> Result<u8> {
    writeln!(out, "verdict: no Bayesian inverse")?;
    writeln!(out, "{detail}")?;
    let (report, failed, witness) = match &detail.reason {
        NoInverseReason::Infeasible(report) => {
            print_report(out, report)?;
            (Some(report), Some(report.failed_conditions()), None)
        }
        NoInverseReason::NotUnscathed { pauli, frame_state, direct_residuals } => {
            writeln!(out, "unscathed witness: Pauli probabilities {:?}", pauli.p())?;
            writeln!(out, "  state in the Pauli frame: {:?}", frame_state.r())?;
            for (k, d) in direct_residuals.iter().enumerate() {
                writeln!(out, "  max |P(rho) - s{k} rho s{k}| = {}", num(*d))?;
            }
            let w = json!({
                "pauli": pauli.p(),
                "frame_state": frame_state.r(),
                "direct_residuals": direct_residuals,
            });
            (None, None, Some(w))
        }
    };
    if let Some(dir) = &cfg.out {
        let body = InvertJson {
            verdict: "no-inverse",
            tol: cfg.tol,
            channel: ChannelSpec::from_channel(e),
            state: StateSpec::from_state(s),
            inverse: None,
            route: None,
            unique: None,
            a: None,
            s: None,
            kraus: None,
            residual: None,
            report,
            failed_conditions: failed,
            witness,
        };
        let path = write_json(dir, "invert.json", &body)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(EXIT_NO_INVERSE)
}

pub fn cmd_unscathed(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let (e, s) = channel_and_state(cfg)?;
    let decomposition = unital_to_pauli(&e)?;
    let frame = decomposition.frame_state(&s)?;
    let p = decomposition.pauli;
    let index = is_unscathed(&p, &frame);
    let residuals = direct_residuals(&p, &frame);
    writeln!(out, "Pauli probabilities: {:?}", p.p())?;
    writeln!(out, "state in the Pauli frame: {:?}", frame.r())?;
    match index {
        Some(k) => writeln!(out, "unscathed: yes (P(rho) = s{k} rho s{k})")?,
        None => writeln!(out, "unscathed: no")?,
    }
    for (k, d) in residuals.iter().enumerate() {
        writeln!(out, "  max |P(rho) - s{k} rho s{k}| = {}", num(*d))?;
    }
    writeln!(out, "adjoint is a Bayesian inverse: {}", adjoint_is_inverse(&p, &frame))?;
    if let Some(dir) = &cfg.out {
        let body = json!({
            "pauli": p.p(),
            "frame_state": frame.r(),
            "unscathed": index,
            "direct_residuals": residuals,
        });
        let path = write_json(dir, "unscathed.json", &body)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let (e, s) = channel_and_state(cfg)?;
    let f = load_channel(cfg.require(&cfg.inverse, "inverse")?)?;
    if !is_cptp(&f, cfg.tol) {
        writeln!(
            out,
            "candidate inverse is not CPTP (min Choi eigenvalue {}, trace deviation {})",
            num(choi_min_eigenvalue(&f)),
            num(f.ptm().tp_deviation())
        )?;
        return Ok(EXIT_NOT_CPTP);
    }
    let later = apply(&e, &s)?;
    let mut forward = [[0.0; 3]; 3];
    let mut reversed = [[0.0; 3]; 3];
    for a in 1..=3 {
        for b in 1..=3 {
            forward[a - 1][b - 1] = two_time_projector(&s, &e, a, b)?;
            reversed[a - 1][b - 1] = two_time_projector(&later, &f, b, a)?;
        }
    }
    let discrepancy = (0..3)
        .flat_map(|a| (0..3).map(move |b| (a, b)))
        .map(|(a, b)| (forward[a][b] - reversed[a][b]).abs())
        .fold(0.0, f64::max);
    let residual = bayes_residual(&e, &s, &f);
    let ok = discrepancy <= cfg.tol;

    real_matrix(out, "forward <s_a, s_b> (rho, E)", &forward)?;
    real_matrix(out, "reversed <s_b, s_a> (E(rho), F)", &reversed)?;
    writeln!(out, "max discrepancy: {}", num(discrepancy))?;
    writeln!(out, "Bayes-rule residual: {}", num(residual))?;
    writeln!(out, "verdict: {}", if ok { "time-reversal symmetric" } else { "asymmetric" })?;
    if let Some(dir) = &cfg.out {
        let body = json!({
            "forward": forward,
            "reversed": reversed,
            "max_discrepancy": discrepancy,
            "residual": residual,
            "tol": cfg.tol,
            "symmetric": ok,
        });
        let path = write_json(dir, "verify.json", &body)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_INPUT })
}

pub fn cmd_kraus(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let e = load_channel(cfg.require(&cfg.channel, "channel")?)?;
    let choi = e.choi();
    let ops = kraus_from_choi(&choi, cfg.tol)?;
    complex_matrix(out, "Choi matrix", &choi)?;
    writeln!(out, "Kraus operators ({}):", ops.len())?;
    for (k, op) in ops.iter().enumerate() {
        complex_matrix(out, &format!("  K{k}"), op)?;
    }
    if let Some(dir) = &cfg.out {
        let body = json!({ "choi": complex_rows(&choi), "kraus": kraus_json(&ops) });
        let path = write_json(dir, "kraus.json", &body)?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Cells of a depolarizing or BB84 scan at the given resolution.
pub fn scan_cells(family: Family, resolution: usize, tol: f64) -> Result<Vec<RegionCell>> {
    let grid = ScanGrid::uniform(resolution, family.default_direction())?;
    let cells = thread_pool()?.install(|| match family {
        Family::Depolarizing => scan_depolarizing(&grid, tol),
        Family::Bb84 => scan_bb84(&grid, tol),
    })?;
    Ok(cells)
}

pub fn cmd_scan(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let family = match cfg.family {
        Some(ScanFamily::Depolarizing) => Family::Depolarizing,
        Some(ScanFamily::Bb84) => Family::Bb84,
        Some(ScanFamily::ThreeEntry) => return cmd_three_entry(cfg, out),
        None => bail!("scan requires --family (depolarizing, bb84 or three-entry)"),
    };
    let resolution = cfg.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let cells = scan_cells(family, resolution, cfg.tol)?;

    let dir = out_dir(cfg);
    let stem = format!("{}_{resolution}", family.name());
    let mut csv = Vec::new();
    emit_csv(&cells, &mut csv)?;
    let csv_path = write_bytes(&dir, &format!("{stem}.csv"), &csv)?;
    let mut svg = Vec::new();
    emit_svg(&cells, &format!("{} feasibility region", family.name()), &mut svg)?;
    let svg_path = write_bytes(&dir, &format!("{stem}.svg"), &svg)?;

    let feasible = cells.iter().filter(|c| c.feasible).count();
    writeln!(out, "family: {}  resolution: {resolution}  cells: {}", family.name(), cells.len())?;
    writeln!(out, "feasible fraction: {:.6}", feasible as f64 / cells.len() as f64)?;
    if family == Family::Depolarizing {
        writeln!(out, "chi(p), largest |r|^2 with an inverse:")?;
        for k in 1..20 {
            let p = k as f64 * 0.05;
            match boundary_chi(p, CHI_TABLE_TOL) {
                Ok(chi) => writeln!(out, "  p = {p:.2}  chi = {chi:.10}")?,
                Err(Error::MonotonicityViolated { grid_max, .. }) => {
                    writeln!(out, "  p = {p:.2}  chi ~ {grid_max:.10} (not monotone; grid maximum)")?
                }
                Err(other) => return Err(other.into()),
            }
        }
    }
    writeln!(out, "wrote {} and {}", csv_path.display(), svg_path.display())?;
    Ok(EXIT_OK)
}

pub fn cmd_three_entry(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let resolution = cfg.resolution.unwrap_or(DEFAULT_THREE_ENTRY_RESOLUTION);
    let samples = cfg.samples.unwrap_or(DEFAULT_THREE_ENTRY_SAMPLES);
    let summary = thread_pool()?.install(|| scan_three_entry(resolution, samples, cfg.seed, cfg.tol))?;

    let mut csv = String::from("p0,p1,p2,p3,r1,r2,r3,slack1,slack2,slack3,residual,confirmed\n");
    for h in &summary.hits {
        let fields: Vec<String> = h
            .p
            .iter()
            .chain(&h.r)
            .chain(&h.slack)
            .chain(std::iter::once(&h.residual))
            .map(|x| num(*x))
            .collect();
        csv.push_str(&format!("{},{}\n", fields.join(","), u8::from(h.confirmed)));
    }
    let dir = out_dir(cfg);
    let csv_path = write_bytes(&dir, &format!("three-entry_{resolution}.csv"), csv.as_bytes())?;

    writeln!(out, "channels: {}  samples per channel: {}  seed: {}", summary.channels, summary.samples_per_channel, summary.seed)?;
    writeln!(out, "evaluated (channel, state) pairs: {}", summary.evaluated)?;
    writeln!(out, "maximally mixed state feasible for {} of {} channels", summary.center_feasible, summary.channels)?;
    writeln!(out, "feasible non-central cells: {}  confirmed: {}", summary.hits.len(), summary.confirmed_hits())?;
    writeln!(out, "wrote {}", csv_path.display())?;
    Ok(EXIT_OK)
}
