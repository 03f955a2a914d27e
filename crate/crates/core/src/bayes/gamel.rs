//! Positivity of a trace-preserving qubit channel's Choi matrix through three
//! scalar inequalities on its Pauli block form.
//!
//! With `w_ij = Tr[C (sigma_i (x) sigma_j)] / Tr C` the normalized Choi
//! operator has block form `[[1, v^T], [0, R]]`. It is positive iff
//!
//! ```text
//! 3 - eta                                          >= 0
//! 1 - 2 det R - eta                                >= 0
//! (eta - 1)^2 - 8 det R - 4 (|Rv|^2 + |adj R|^2)   >= 0
//! ```
//!
//! with `eta = |v|^2 + |R|^2`. The three left-hand sides equal `8 e2`, `16 e3`
//! and `256 e4`, the elementary symmetric polynomials of the normalized
//! spectrum, so they have different degrees in the eigenvalues. The verdict is
//! therefore taken on `(v, R)` contracted towards the maximally mixed point by
//! `1 / (1 + 4 tol / Tr C)`, which is exactly `min eig(C) >= -tol`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat::{pauli_product, CMat4, EIG_HERMITIAN_TOL};

const MARGINAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub v: [f64; 3],
    pub r: [[f64; 3]; 3],
    pub eta: f64,
    pub det_r: f64,
    pub norm_rv2: f64,
    pub norm_adj_r2: f64,
    /// Left-hand sides of the three inequalities at the raw `(v, R)`.
    pub slack: [f64; 3],
    /// The same at the tolerance-contracted `(v, R)`; decides `feasible`.
    pub regularized_slack: [f64; 3],
    pub tol: f64,
    pub feasible: bool,
}

impl FeasibilityReport {
    /// 1-based indices of the inequalities that fail.
    pub fn failed_conditions(&self) -> Vec<usize> {
        (0..3).filter(|&k| self.regularized_slack[k] < 0.0).map(|k| k + 1).collect()
    }

    pub fn min_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `eta, det R, |Rv|^2, |adj R|^2` and the three slacks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GamelQuantities {
    pub eta: f64,
    pub det_r: f64,
    pub norm_rv2: f64,
    pub norm_adj_r2: f64,
    pub slack: [f64; 3],
}

pub fn gamel_quantities(v: &[f64; 3], r: &[[f64; 3]; 3]) -> GamelQuantities {
    let norm_v2: f64 = v.iter().map(|x| x * x).sum();
    let norm_r2: f64 = r.iter().flatten().map(|x| x * x).sum();
    let eta = norm_v2 + norm_r2;
    let det_r = det3(r);
    let rv: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| r[i][j] * v[j]).sum());
    let norm_rv2: f64 = rv.iter().map(|x| x * x).sum();
    let norm_adj_r2: f64 = adjugate3(r).iter().flatten().map(|x| x * x).sum();
    let slack = [
        3.0 - eta,
        1.0 - 2.0 * det_r - eta,
        (eta - 1.0).powi(2) - 8.0 * det_r - 4.0 * (norm_rv2 + norm_adj_r2),
    ];
    GamelQuantities { eta, det_r, norm_rv2, norm_adj_r2, slack }
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Transposed cofactor matrix.
pub fn adjugate3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let cofactor = |i: usize, j: usize| {
        let rows: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let cols: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
        if (i + j).is_multiple_of(2) {
            minor
        } else {
            -minor
        }
    };
    std::array::from_fn(|i| std::array::from_fn(|j| cofactor(j, i)))
}

/// Feasibility report for a candidate Choi matrix (any positive trace; the
/// block form is read after normalizing by `Tr C`).
pub fn gamel_report(choi: &CMat4, tol: f64) -> Result<FeasibilityReport> {
    let deviation = choi.hermitian_deviation();
    if !choi.is_finite() || deviation > EIG_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = choi.trace().re;
    if trace <= 0.0 {
        return Err(Error::InvalidChannel(format!("Choi trace {trace} is not positive")));
    }
    let w = |i: usize, j: usize| choi.trace_product(&pauli_product(i, j)).re / trace;
    let marginal = (1..4).map(|i| w(i, 0).abs()).fold(0.0, f64::max);
    if marginal > MARGINAL_TOL {
        return Err(Error::InvalidChannel(format!(
            "Choi input marginal is not maximally mixed (deviation {marginal:e}); channel is not trace preserving"
        )));
    }
    let v: [f64; 3] = std::array::from_fn(|j| w(0, j + 1));
    let r: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| w(i + 1, j + 1)));

    let raw = gamel_quantities(&v, &r);
    let contraction = 1.0 / (1.0 + 4.0 * tol / trace);
    let v_reg = v.map(|x| x * contraction);
    let r_reg = r.map(|row| row.map(|x| x * contraction));
    let regularized_slack = gamel_quantities(&v_reg, &r_reg).slack;
    let feasible = regularized_slack.iter().all(|&s| s >= 0.0);

    Ok(FeasibilityReport {
        v,
        r,
        eta: raw.eta,
        det_r: raw.det_r,
        norm_rv2: raw.norm_rv2,
        norm_adj_r2: raw.norm_adj_r2,
        slack: raw.slack,
        regularized_slack,
        tol,
        feasible,
    })
}
