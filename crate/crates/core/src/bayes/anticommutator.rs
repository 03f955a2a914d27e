//! Generic solver for `{M (x) 1, X} = B` on a qubit pair.

use crate::error::{Error, Result};
use crate::mat::{herm_eig, tensor, CMat2, CMat4, EIG_HERMITIAN_TOL};

const PAIR_TOL: f64 = 1e-12;
const BLOCK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnticommutatorSolution {
    pub x: CMat4,
    /// False when `m_k + m_l` vanishes for some pair; that block is set to 0.
    pub unique: bool,
}

pub fn solve_anticommutator(m: &CMat2, b: &CMat4) -> Result<AnticommutatorSolution> {
    let deviation = m.hermitian_deviation();
    if deviation > EIG_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = herm_eig(m)?;
    if eig.min() < -PAIR_TOL {
        return Err(Error::NotPsd { min_eigenvalue: eig.min() });
    }
    let w = tensor(&eig.vectors, &CMat2::identity());
    let bt = w.dagger() * *b * w;
    let mut xt = CMat4::zeros();
    let mut unique = true;
    for k in 0..2 {
        for l in 0..2 {
            let sum = eig.values[k] + eig.values[l];
            let block = (0..2).flat_map(|a| (0..2).map(move |c| (a, c)));
            if sum <= PAIR_TOL {
                let magnitude = block.clone().map(|(a, c)| bt[(2 * k + a, 2 * l + c)].norm()).fold(0.0, f64::max);
                if magnitude > BLOCK_TOL {
                    return Err(Error::RankDeficient { k, l, magnitude });
                }
                unique = false;
                continue;
            }
            for (a, c) in block {
                xt[(2 * k + a, 2 * l + c)] = bt[(2 * k + a, 2 * l + c)] / sum;
            }
        }
    }
    Ok(AnticommutatorSolution { x: w * xt * w.dagger(), unique })
}
