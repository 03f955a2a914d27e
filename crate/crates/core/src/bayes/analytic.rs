use crate::bayes::gamel::gamel_report;
use crate::bayes::{kraus_from_choi, InverseRecord, InverseRoute};
use crate::channel::{choi_from_jam, BlochState, PauliChannel};
use crate::error::{Error, Result};
use crate::mat::{herm_eig, pauli_reconstruct, PauliCoeffs};

pub const S_SINGULAR_TOL: f64 = 1e-12;
pub const BOUNDARY_TOL: f64 = 1e-12;
pub const RANK_TOL: f64 = 1e-12;

/// Coefficients of the Jamiolkowski operator solving the Bayes rule for a
/// Pauli channel with eigenvalues `lambda` at Bloch vector `r`, normalized so
/// that `a_00 = 1`. Returns `(a, S)` with `S = sum lambda_i^2 r_i^2`.
pub fn bayes_rule_solution(lambda: [f64; 3], r: [f64; 3]) -> Result<(PauliCoeffs, f64)> {
    let s: f64 = (0..3).map(|i| (lambda[i] * r[i]).powi(2)).sum();
    if s >= 1.0 - S_SINGULAR_TOL {
        return Err(Error::SingularS { s });
    }
    let mut a = [[0.0; 4]; 4];
    a[0][0] = 1.0;
    for j in 1..=3 {
        a[0][j] = r[j - 1] * (1.0 - lambda[j - 1].powi(2)) / (1.0 - s);
    }
    for i in 1..=3 {
        for j in 1..=3 {
            let diag = if i == j { lambda[i - 1] } else { 0.0 };
            a[i][j] = diag - lambda[i - 1] * r[i - 1] * a[0][j];
        }
    }
    Ok((PauliCoeffs(a), s))
}

/// Analytic inverse of a Pauli channel with all `|lambda_i| < 1`.
pub fn analytic_inverse(p: &PauliChannel, s: &BlochState, tol: f64) -> Result<InverseRecord> {
    let lambda = p.lambda();
    if let Some(index) = lambda.iter().position(|l| l.abs() >= 1.0 - BOUNDARY_TOL) {
        return Err(Error::EigenvalueOnBoundary { index: index + 1, lambda: lambda[index] });
    }
    let (a, s_value) = bayes_rule_solution(lambda, s.r())?;
    let jam = pauli_reconstruct(&a.scaled(0.5));
    let choi = choi_from_jam(&jam);
    let report = gamel_report(&choi, tol)?;
    let kraus = if report.feasible { kraus_from_choi(&choi, tol)? } else { Vec::new() };
    let out = p.apply_bloch(s).matrix();
    let unique = herm_eig(&out)?.min() > RANK_TOL;
    Ok(InverseRecord { a, s: s_value, jam, choi, kraus, report, route: InverseRoute::Analytic, unique })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::bayes_residual;
    use crate::sampling::{random_bloch_state, random_pauli_channel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn completely_depolarizing_gives_discard_and_prepare() {
        let p = PauliChannel::depolarizing(0.75).unwrap();
        let s = BlochState::new([0.6, 0.0, 0.0]).unwrap();
        let rec = analytic_inverse(&p, &s, 1e-9).unwrap();
        let mut want = [[0.0; 4]; 4];
        want[0][0] = 1.0;
        want[0][1] = 0.6;
        assert!(rec.a.max_abs_diff(&PauliCoeffs(want)) < 1e-15);
        assert!(rec.report.feasible);
        let any = BlochState::new([0.1, -0.5, 0.2]).unwrap();
        let out = rec.channel().apply_operator(&any.matrix());
        assert!(out.max_abs_diff(&s.matrix()) < 1e-14);
    }

    #[test]
    fn maximally_mixed_gives_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for _ in 0..20 {
            let p = random_pauli_channel(&mut rng);
            let rec = analytic_inverse(&p, &BlochState::maximally_mixed(), 1e-9).unwrap();
            let l = p.lambda();
            for i in 0..4 {
                for j in 0..4 {
                    let want = match (i, j) {
                        (0, 0) => 1.0,
                        (i, j) if i == j => l[i - 1],
                        _ => 0.0,
                    };
                    assert!((rec.a[(i, j)] - want).abs() < 1e-15);
                }
            }
            assert!(rec.unique);
        }
    }

    #[test]
    fn residual_vanishes_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let mut feasible = 0;
        for _ in 0..300 {
            let p = random_pauli_channel(&mut rng);
            let s = random_bloch_state(&mut rng);
            let rec = analytic_inverse(&p, &s, 1e-9).unwrap();
            assert!(bayes_residual(&p.rep(), &s, &rec.channel()) <= 1e-10);
            if rec.report.feasible {
                feasible += 1;
                assert!(!rec.kraus.is_empty());
            } else {
                assert!(rec.kraus.is_empty());
            }
        }
        assert!(feasible > 0);
    }

    #[test]
    fn boundary_and_singular_errors() {
        let unitary = PauliChannel::new([0.0, 1.0, 0.0, 0.0]).unwrap();
        let s = BlochState::new([0.3, 0.0, 0.0]).unwrap();
        assert!(matches!(analytic_inverse(&unitary, &s, 1e-9), Err(Error::EigenvalueOnBoundary { .. })));
        assert!(matches!(bayes_rule_solution([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]), Err(Error::SingularS { .. })));
    }
}
