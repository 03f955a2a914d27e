//! Bayesian inverses of unital qubit channels.
//!
//! A channel `F` is a Bayesian inverse of `E` at state `rho` when
//! `{E(rho) (x) 1, J[F]} = {1 (x) rho, J[E^dag]}` and `F` is CPTP. For Pauli
//! channels with all `|lambda_i| < 1` the equation has a closed-form solution
//! whose positivity is decided by [`gamel_report`]; on the boundary the only
//! candidate is the adjoint, which works iff the state is unscathed. General
//! unital channels are reduced to the Pauli case by [`unital_to_pauli`] and
//! the answer is carried back with [`transport_inverse`].

pub mod analytic;
pub mod anticommutator;
pub mod gamel;
pub mod kraus;
pub mod star;
pub mod unscathed;

use std::fmt;

pub use analytic::{analytic_inverse, bayes_rule_solution};
pub use anticommutator::{solve_anticommutator, AnticommutatorSolution};
pub use gamel::{gamel_quantities, gamel_report, FeasibilityReport, GamelQuantities};
pub use kraus::kraus_from_choi;
pub use star::{
    bayes_residual, bayes_rule_sides, star_product, two_time_expectation, two_time_projector, PseudoDensityMatrix,
};
pub use unscathed::{adjoint_is_inverse, direct_residuals, is_unscathed, unscathed_by_evaluation};

use crate::channel::{
    is_cptp, transport_inverse, unital_to_pauli, BlochState, ChannelRep, PauliChannel, PauliDecomposition,
};
use crate::error::{Error, Result};
use crate::mat::{herm_eig, pauli_expand, CMat2, CMat4, PauliCoeffs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseRoute {
    /// Boundary case: the adjoint at an unscathed state.
    Adjoint,
    Analytic,
}

#[derive(Clone, Debug)]
pub struct InverseRecord {
    /// Pauli coefficients of `J[F]` scaled so that `a_00 = 1`.
    pub a: PauliCoeffs,
    /// `sum lambda_i^2 r_i^2` of the Pauli channel in its own frame.
    pub s: f64,
    pub jam: CMat4,
    pub choi: CMat4,
    pub kraus: Vec<CMat2>,
    pub report: FeasibilityReport,
    pub route: InverseRoute,
    /// False when `E(rho)` is singular and the Bayes rule has other solutions.
    pub unique: bool,
}

impl InverseRecord {
    pub fn channel(&self) -> ChannelRep {
        ChannelRep::Choi(self.choi)
    }
}

#[derive(Clone, Debug)]
pub enum NoInverseReason {
    Infeasible(FeasibilityReport),
    NotUnscathed { pauli: PauliChannel, frame_state: BlochState, direct_residuals: [f64; 4] },
}

#[derive(Clone, Debug)]
pub struct NoInverse {
    pub reason: NoInverseReason,
    pub decomposition: Option<PauliDecomposition>,
}

impl fmt::Display for NoInverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            NoInverseReason::Infeasible(report) => write!(
                f,
                "no Bayesian inverse: feasibility condition(s) {:?} fail (slacks {:.6e}, {:.6e}, {:.6e})",
                report.failed_conditions(),
                report.slack[0],
                report.slack[1],
                report.slack[2]
            ),
            NoInverseReason::NotUnscathed { pauli, frame_state, direct_residuals } => write!(
                f,
                "no Bayesian inverse: channel with probabilities {:?} has an eigenvalue of modulus 1 and state {:?} is not unscathed (min |P(rho) - s rho s| = {:.3e})",
                pauli.p(),
                frame_state.r(),
                direct_residuals.iter().copied().fold(f64::INFINITY, f64::min)
            ),
        }
    }
}

fn no_inverse(reason: NoInverseReason) -> Error {
    Error::NoInverse(Box::new(NoInverse { reason, decomposition: None }))
}

fn output_full_rank(out: &CMat2) -> Result<bool> {
    Ok(herm_eig(out)?.min() > analytic::RANK_TOL)
}

/// Bayesian inverse of a Pauli channel, choosing the adjoint route when some
/// `|lambda_i|` reaches 1.
pub fn pauli_bayesian_inverse(p: &PauliChannel, s: &BlochState, tol: f64) -> Result<InverseRecord> {
    let lambda = p.lambda();
    let on_boundary = lambda.iter().any(|l| l.abs() >= 1.0 - analytic::BOUNDARY_TOL);
    if !on_boundary {
        let record = analytic_inverse(p, s, tol)?;
        if !record.report.feasible {
            return Err(no_inverse(NoInverseReason::Infeasible(record.report)));
        }
        return Ok(record);
    }
    if is_unscathed(p, s).is_none() {
        return Err(no_inverse(NoInverseReason::NotUnscathed {
            pauli: *p,
            frame_state: *s,
            direct_residuals: direct_residuals(p, s),
        }));
    }
    let ch = p.rep();
    let jam = ch.jamiolkowski();
    let choi = ch.choi();
    let r = s.r();
    Ok(InverseRecord {
        a: pauli_expand(&jam).scaled(2.0),
        s: (0..3).map(|i| (lambda[i] * r[i]).powi(2)).sum(),
        jam,
        choi,
        kraus: kraus_from_choi(&choi, tol)?,
        report: gamel_report(&choi, tol)?,
        route: InverseRoute::Adjoint,
        unique: output_full_rank(&p.apply_bloch(s).matrix())?,
    })
}

/// Bayesian inverse of a unital CPTP qubit channel at state `s`. The result
/// is certified CPTP (Choi eigenvalues `>= -tol`) with a Bayes-rule residual
/// of at most `max(tol, 1e-12)`.
pub fn bayesian_inverse(e: &ChannelRep, s: &BlochState, tol: f64) -> Result<InverseRecord> {
    let decomposition = unital_to_pauli(e)?;
    let frame = decomposition.frame_state(s)?;
    let inner = match pauli_bayesian_inverse(&decomposition.pauli, &frame, tol) {
        Ok(record) => record,
        Err(Error::NoInverse(mut detail)) => {
            detail.decomposition = Some(decomposition);
            return Err(Error::NoInverse(detail));
        }
        Err(other) => return Err(other),
    };

    let f = transport_inverse(&decomposition.u, &decomposition.v, &inner.channel());
    let choi = f.choi().hermitian_part();
    let jam = f.jamiolkowski().hermitian_part();
    let record = InverseRecord {
        a: pauli_expand(&jam).scaled(2.0),
        s: inner.s,
        jam,
        choi,
        kraus: kraus_from_choi(&choi, tol)?,
        report: gamel_report(&choi, tol)?,
        route: inner.route,
        unique: output_full_rank(&e.apply_operator(&s.matrix()))?,
    };

    let candidate = record.channel();
    if !is_cptp(&candidate, tol) {
        return Err(Error::Certification(format!(
            "constructed inverse is not CPTP (min Choi eigenvalue {:e})",
            crate::channel::choi_min_eigenvalue(&candidate)
        )));
    }
    let residual = bayes_residual(e, s, &candidate);
    if residual > tol.max(1e-12) {
        return Err(Error::Certification(format!("Bayes-rule residual {residual:e} exceeds {tol:e}")));
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::adjoint;
    use crate::sampling::{random_bloch_state, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn off_axis_state_of_two_entry_channel_has_no_inverse() {
        let e = PauliChannel::new([0.5, 0.5, 0.0, 0.0]).unwrap().rep();
        let s = BlochState::new([0.0, 0.4, 0.3]).unwrap();
        match bayesian_inverse(&e, &s, 1e-9) {
            Err(Error::NoInverse(detail)) => {
                assert!(matches!(detail.reason, NoInverseReason::NotUnscathed { .. }));
                assert!(detail.decomposition.is_some());
            }
            other => panic!("expected NoInverse, got {other:?}"),
        }
    }

    #[test]
    fn completely_depolarizing_gives_discard_and_prepare() {
        let mut rng = ChaCha8Rng::seed_from_u64(80);
        let e = PauliChannel::depolarizing(0.75).unwrap().rep();
        for _ in 0..20 {
            let s = random_bloch_state(&mut rng);
            let f = bayesian_inverse(&e, &s, 1e-9).unwrap().channel();
            let probe = random_bloch_state(&mut rng);
            assert!(f.apply_operator(&probe.matrix()).max_abs_diff(&s.matrix()) < 1e-12);
        }
    }

    #[test]
    fn unitary_inverse_is_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for _ in 0..20 {
            let e = ChannelRep::unitary(random_unitary(&mut rng));
            let s = random_bloch_state(&mut rng);
            let rec = bayesian_inverse(&e, &s, 1e-9).unwrap();
            assert_eq!(rec.route, InverseRoute::Adjoint);
            assert!(rec.channel().ptm().max_abs_diff(&adjoint(&e).ptm()) < 1e-10);
            assert!(bayes_residual(&e, &s, &rec.channel()) < 1e-12);
        }
    }

    #[test]
    fn infeasible_report_names_failed_condition() {
        let e = PauliChannel::depolarizing(0.05).unwrap().rep();
        let s = BlochState::new([0.99, 0.0, 0.0]).unwrap();
        match bayesian_inverse(&e, &s, 1e-9) {
            Err(Error::NoInverse(detail)) => match detail.reason {
                NoInverseReason::Infeasible(report) => {
                    assert!(!report.failed_conditions().is_empty());
                    assert!(detail.to_string().contains("feasibility"));
                }
                other => panic!("unexpected reason {other:?}"),
            },
            other => panic!("expected NoInverse, got {other:?}"),
        }
    }
}
