//! Fixed-size complex matrix algebra for one- and two-qubit operators.
//!
//! Everything here works on stack-allocated `N x N` arrays, with `N` equal
//! to 2 (single qubit) or 4 (two qubits). Two-qubit indices are ordered as
//! `2 * i + a`, where `i` labels the first tensor factor and `a` the second.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Hermiticity threshold for matrices asserted Hermitian by construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Hermiticity threshold accepted by [`herm_eig`].
pub const EIG_HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense complex `N x N` matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

/// The Pauli matrices `sigma_0 = 1, sigma_1 = X, sigma_2 = Y, sigma_3 = Z`.
pub const PAULI: [CMat2; 4] = [
    CMat([[ONE, ZERO], [ZERO, ONE]]),
    CMat([[ZERO, ONE], [ONE, ZERO]]),
    CMat([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]]),
    CMat([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]),
];

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(values: [f64; N]) -> Self {
        Self::from_fn(|i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// `|u><v|`
    pub fn outer(u: &[C64; N], v: &[C64; N]) -> Self {
        Self::from_fn(|i, j| u[i] * v[j].conj())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_c(C64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn column(&self, j: usize) -> [C64; N] {
        std::array::from_fn(|i| self.0[i][j])
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        std::array::from_fn(|i| (0..N).map(|k| self.0[i][k] * v[k]).sum())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max |M - M^dag|` over entries.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.dagger())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Hermitian part `(M + M^dag) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.dagger()).scale(0.5)
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let mut acc = ZERO;
        for i in 0..N {
            for k in 0..N {
                acc += self.0[i][k] * other.0[k][i];
            }
        }
        acc
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl<const N: usize> Mul<f64> for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Mul<C64> for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        self.scale_c(rhs)
    }
}

/// Kronecker product `A (x) B`, with `A` on the first factor.
pub fn tensor(a: &CMat2, b: &CMat2) -> CMat4 {
    CMat4::from_fn(|r, c| a.0[r / 2][c / 2] * b.0[r % 2][c % 2])
}

/// `AB + BA`
pub fn anticommutator<const N: usize>(a: &CMat<N>, b: &CMat<N>) -> CMat<N> {
    *a * *b + *b * *a
}

/// The two-qubit swap `sum_ij |i><j| (x) |j><i|`.
pub fn swap_matrix() -> CMat4 {
    CMat4::from_fn(|r, c| {
        let (i, a) = (r / 2, r % 2);
        let (j, b) = (c / 2, c % 2);
        if i == b && a == j {
            ONE
        } else {
            ZERO
        }
    })
}

/// Tensor factor selector for two-qubit operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

impl TryFrom<usize> for Subsystem {
    type Error = Error;

    fn try_from(index: usize) -> Result<Self> {
        match index {
            0 => Ok(Subsystem::First),
            1 => Ok(Subsystem::Second),
            other => Err(Error::InvalidSubsystem(other)),
        }
    }
}

/// Transpose of one tensor factor. An involution that preserves the trace.
pub fn partial_transpose(m: &CMat4, subsystem: Subsystem) -> CMat4 {
    CMat4::from_fn(|r, c| {
        let (i, a) = (r / 2, r % 2);
        let (j, b) = (c / 2, c % 2);
        match subsystem {
            Subsystem::First => m.0[2 * j + a][2 * i + b],
            Subsystem::Second => m.0[2 * i + b][2 * j + a],
        }
    })
}

/// Partial trace over the first factor.
pub fn partial_trace_first(m: &CMat4) -> CMat2 {
    CMat2::from_fn(|a, b| m.0[a][b] + m.0[2 + a][2 + b])
}

/// Partial trace over the second factor.
pub fn partial_trace_second(m: &CMat4) -> CMat2 {
    CMat2::from_fn(|i, j| m.0[2 * i][2 * j] + m.0[2 * i + 1][2 * j + 1])
}

/// Real coefficients `a_ij` of a two-qubit operator in the basis
/// `sigma_i (x) sigma_j`, with `M = sum a_ij sigma_i (x) sigma_j`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PauliCoeffs(pub [[f64; 4]; 4]);

impl PauliCoeffs {
    /// Coefficients rescaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        PauliCoeffs(self.0.map(|row| row.map(|x| x * factor)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for PauliCoeffs {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

/// `sigma_i (x) sigma_j`
pub fn pauli_product(i: usize, j: usize) -> CMat4 {
    tensor(&PAULI[i], &PAULI[j])
}

/// Complex coefficients `Tr[M (sigma_i (x) sigma_j)] / 4`.
pub fn pauli_expand_complex(m: &CMat4) -> [[C64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = m.trace_product(&pauli_product(i, j)) * 0.25;
        }
    }
    out
}

/// Real parts of [`pauli_expand_complex`]; exact for Hermitian input.
pub fn pauli_expand(m: &CMat4) -> PauliCoeffs {
    PauliCoeffs(pauli_expand_complex(m).map(|row| row.map(|z| z.re)))
}

pub fn pauli_reconstruct(coeffs: &PauliCoeffs) -> CMat4 {
    let mut m = CMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let a = coeffs.0[i][j];
            if a != 0.0 {
                m = m + pauli_product(i, j).scale(a);
            }
        }
    }
    m
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct Eigen<const N: usize> {
    /// Ascending.
    pub values: [f64; N],
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: CMat<N>,
}

impl<const N: usize> Eigen<N> {
    pub fn vector(&self, k: usize) -> [C64; N] {
        self.vectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[N - 1]
    }

    /// `sum_k f(mu_k) |v_k><v_k|`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat<N> {
        let mut m = CMat::<N>::zeros();
        for k in 0..N {
            let v = self.vector(k);
            m = m + CMat::outer(&v, &v).scale(f(self.values[k]));
        }
        m
    }

    pub fn reconstruct(&self) -> CMat<N> {
        self.reconstruct_with(|x| x)
    }
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq` and then applies
/// a real Givens rotation, so the accumulated transform stays unitary and the
/// eigenvectors come out orthonormal, including inside degenerate clusters.
pub fn herm_eig<const N: usize>(m: &CMat<N>) -> Result<Eigen<N>> {
    let deviation = m.hermitian_deviation();
    if !m.is_finite() || deviation > EIG_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = m.hermitian_part();
    let mut v = CMat::<N>::identity();
    let scale = a.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > JACOBI_OFF_TOL * scale {
        return Err(Error::EigenNoConvergence);
    }

    let mut order: [usize; N] = std::array::from_fn(|k| k);
    order.sort_by(|&x, &y| a.0[x][x].re.total_cmp(&a.0[y][y].re));
    let values = order.map(|k| a.0[k][k].re);
    let vectors = CMat::from_fn(|i, j| v.0[i][order[j]]);
    Ok(Eigen { values, vectors })
}

fn off_diagonal_norm<const N: usize>(a: &CMat<N>) -> f64 {
    let mut acc = 0.0;
    for p in 0..N {
        for q in (p + 1)..N {
            acc += a.0[p][q].norm_sqr();
        }
    }
    acc.sqrt()
}

fn rotate<const N: usize>(a: &mut CMat<N>, v: &mut CMat<N>, p: usize, q: usize) {
    let b = a.0[p][q];
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return;
    }
    let phase = b / abs_b;
    let theta = (a.0[q][q].re - a.0[p][p].re) / (2.0 * abs_b);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // G restricted to (p, q): [[c, s], [-s conj(phase), c conj(phase)]]
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    for k in 0..N {
        let (akp, akq) = (a.0[k][p], a.0[k][q]);
        a.0[k][p] = akp * g_pp + akq * g_qp;
        a.0[k][q] = akp * g_pq + akq * g_qq;
    }
    for k in 0..N {
        let (apk, aqk) = (a.0[p][k], a.0[q][k]);
        a.0[p][k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a.0[q][k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a.0[p][q] = ZERO;
    a.0[q][p] = ZERO;
    a.0[p][p] = C64::new(a.0[p][p].re, 0.0);
    a.0[q][q] = C64::new(a.0[q][q].re, 0.0);

    for k in 0..N {
        let (vkp, vkq) = (v.0[k][p], v.0[k][q]);
        v.0[k][p] = vkp * g_pp + vkq * g_qp;
        v.0[k][q] = vkp * g_pq + vkq * g_qq;
    }
}
