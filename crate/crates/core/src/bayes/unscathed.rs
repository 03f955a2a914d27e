//! Unscathed states: `P(rho) = sigma rho sigma` for some Pauli `sigma`.

use crate::channel::{BlochState, PauliChannel};
use crate::mat::PAULI;

/// Entries below this count as zero for the support / axis classification.
pub const SUPPORT_EPS: f64 = 1e-12;
/// Tolerance for direct evaluation of `P(rho) = sigma rho sigma`.
pub const UNSCATHED_TOL: f64 = 1e-10;

/// Smallest Pauli index `k` with `P(rho) = sigma_k rho sigma_k`, decided from
/// the support of the probability vector and the nonzero Bloch axes:
///
/// * `rho = 1/2`: always index 0.
/// * one nonzero `p_m` (unitary channel): every state is unscathed.
/// * two nonzero entries `{p_0, p_i}` or `{p_j, p_k}`: exactly the states on
///   axis `i` (resp. the axis complementary to `j, k`).
/// * three or more nonzero entries: only the maximally mixed state.
pub fn is_unscathed(p: &PauliChannel, s: &BlochState) -> Option<usize> {
    let r = s.r();
    let axes: Vec<usize> = (1..=3).filter(|&i| r[i - 1].abs() > SUPPORT_EPS).collect();
    if axes.is_empty() {
        return Some(0);
    }
    let support = p.support(SUPPORT_EPS);
    match support.as_slice() {
        [0] => Some(0),
        &[m] => {
            if axes == [m] {
                Some(0)
            } else if axes.contains(&m) {
                Some(m)
            } else {
                (1..=3).find(|k| !axes.contains(k))
            }
        }
        &[0, i] => (axes == [i]).then_some(0),
        &[j, k] => {
            let l = 6 - j - k;
            (axes == [l]).then_some(j.min(k))
        }
        _ => None,
    }
}

/// `max |P(rho) - sigma_k rho sigma_k|` for each `k`, computed on matrices.
pub fn direct_residuals(p: &PauliChannel, s: &BlochState) -> [f64; 4] {
    let rho = s.matrix();
    let out = p.rep().apply_operator(&rho);
    std::array::from_fn(|k| out.max_abs_diff(&(PAULI[k] * rho * PAULI[k])))
}

/// Smallest index whose direct residual is within [`UNSCATHED_TOL`].
pub fn unscathed_by_evaluation(p: &PauliChannel, s: &BlochState) -> Option<usize> {
    direct_residuals(p, s).iter().position(|&d| d <= UNSCATHED_TOL)
}

/// Whether `P^dag = P` is a Bayesian inverse of `P` at `rho`.
pub fn adjoint_is_inverse(p: &PauliChannel, s: &BlochState) -> bool {
    is_unscathed(p, s).is_some()
}
