use crate::error::{Error, Result};
use crate::mat::{herm_eig, CMat2, CMat4};

pub const KRAUS_RANK_TOL: f64 = 1e-12;
const RENORMALIZE_WINDOW: f64 = 1e-6;

/// Kraus operators from the Choi eigendecomposition, ordered by descending
/// eigenvalue. Eigenvectors are reshaped as `K[a][i] = sqrt(mu) phi[2 i + a]`.
/// When dropping tiny negative eigenvalues leaves `sum K^dag K` within 1e-6 of
/// the identity, the set is renormalized by `G^(-1/2)`.
pub fn kraus_from_choi(choi: &CMat4, tol: f64) -> Result<Vec<CMat2>> {
    let eig = herm_eig(choi)?;
    if eig.min() < -tol {
        return Err(Error::NotPsd { min_eigenvalue: eig.min() });
    }
    let mut ops: Vec<CMat2> = (0..4)
        .rev()
        .filter(|&k| eig.values[k] > KRAUS_RANK_TOL)
        .map(|k| {
            let phi = eig.vector(k);
            let root = eig.values[k].sqrt();
            CMat2::from_fn(|a, i| phi[2 * i + a] * root)
        })
        .collect();

    let gram = ops.iter().fold(CMat2::zeros(), |acc, k| acc + k.dagger() * *k);
    let deviation = gram.max_abs_diff(&CMat2::identity());
    if deviation > 0.0 && deviation <= RENORMALIZE_WINDOW {
        let inv_root = herm_eig(&gram.hermitian_part())?.reconstruct_with(|x| 1.0 / x.sqrt());
        ops = ops.into_iter().map(|k| k * inv_root).collect();
    }
    Ok(ops)
}
