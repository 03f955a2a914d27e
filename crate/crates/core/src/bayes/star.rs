//! Pseudo-density matrices, two-time expectation values and the Bayes-rule
//! residual.

use crate::channel::{adjoint, BlochState, ChannelRep};
use crate::error::{Error, Result};
use crate::mat::{anticommutator, herm_eig, pauli_product, tensor, CMat2, CMat4, PAULI};

/// Hermitian, unit-trace two-time operator `N * w = {w (x) 1, J[N]} / 2`.
/// Not necessarily positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PseudoDensityMatrix(CMat4);

impl PseudoDensityMatrix {
    pub fn matrix(&self) -> &CMat4 {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        Ok(herm_eig(&self.0)?.values)
    }

    /// Marginal on the second (later) time.
    pub fn later_marginal(&self) -> CMat2 {
        crate::mat::partial_trace_first(&self.0)
    }
}

pub fn star_product(ch: &ChannelRep, s: &BlochState) -> PseudoDensityMatrix {
    let rho_first = tensor(&s.matrix(), &CMat2::identity());
    let m = anticommutator(&rho_first, &ch.jamiolkowski()).scale(0.5);
    PseudoDensityMatrix(m.hermitian_part())
}

fn check_index(index: usize, min: usize) -> Result<()> {
    if (min..=3).contains(&index) {
        Ok(())
    } else {
        Err(Error::InvalidPauliIndex { index, min })
    }
}

/// `<sigma_i, sigma_j> = Tr(pdm (sigma_i (x) sigma_j))`, `i, j in {1, 2, 3}`.
pub fn two_time_expectation(pdm: &PseudoDensityMatrix, i: usize, j: usize) -> Result<f64> {
    check_index(i, 1)?;
    check_index(j, 1)?;
    Ok(pdm.0.trace_product(&pauli_product(i, j)).re)
}

/// Sequential-measurement expectation from the measurement projectors:
/// `Tr(E(P+ rho P+) sigma_b) - Tr(E(P- rho P-) sigma_b)` with `P+-` the
/// eigenprojectors of `sigma_a`. Index 0 is allowed (then `P- = 0`).
pub fn two_time_projector(s: &BlochState, ch: &ChannelRep, a: usize, b: usize) -> Result<f64> {
    check_index(a, 0)?;
    check_index(b, 0)?;
    let id = CMat2::identity();
    let plus = (id + PAULI[a]).scale(0.5);
    let minus = (id - PAULI[a]).scale(0.5);
    let rho = s.matrix();
    let branch = |proj: &CMat2| ch.apply_operator(&(*proj * rho * *proj)).trace_product(&PAULI[b]).re;
    Ok(branch(&plus) - branch(&minus))
}

/// Both sides of the quantum Bayes rule,
/// `({E(rho) (x) 1, J[F]}, {1 (x) rho, J[E^dag]})`.
pub fn bayes_rule_sides(e: &ChannelRep, s: &BlochState, f: &ChannelRep) -> (CMat4, CMat4) {
    let rho = s.matrix();
    let id = CMat2::identity();
    let lhs = anticommutator(&tensor(&e.apply_operator(&rho), &id), &f.jamiolkowski());
    let rhs = anticommutator(&tensor(&id, &rho), &adjoint(e).jamiolkowski());
    (lhs, rhs)
}

/// Max-entry difference between the two sides of the Bayes rule.
pub fn bayes_residual(e: &ChannelRep, s: &BlochState, f: &ChannelRep) -> f64 {
    let (lhs, rhs) = bayes_rule_sides(e, s, f);
    lhs.max_abs_diff(&rhs)
}
