//! Qubit channels: states, Pauli channels, the four interconvertible channel
//! representations, CPTP checks, and the reduction of unital channels to
//! Pauli channels up to unitary pre- and post-processing.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;

use crate::bayes::kraus_from_choi;
use crate::error::{Error, Result};
use crate::mat::{herm_eig, partial_transpose, CMat2, CMat4, Subsystem, I, ONE, PAULI, ZERO};

/// Bloch-ball slack for state validation.
pub const STATE_TOL: f64 = 1e-12;
/// Tolerance for probability-vector normalization.
pub const PROB_TOL: f64 = 1e-12;
/// Tolerance for trace preservation / unitality of a PTM.
pub const TP_TOL: f64 = 1e-10;
/// CPTP tolerance used when a unital channel is decomposed.
pub const DECOMPOSE_CPTP_TOL: f64 = 1e-9;

const FA_SLACK: f64 = 1e-12;
const APPLY_BALL_TOL: f64 = 1e-10;
const DIAGONAL_TOL: f64 = 1e-12;
const CLAMP_TOL: f64 = 1e-8;

/// Single-qubit state `rho = (1 + r . sigma) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochState {
    r: [f64; 3],
}

impl BlochState {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > 1.0 + STATE_TOL {
            return Err(Error::InvalidState { norm });
        }
        Ok(BlochState { r })
    }

    pub fn maximally_mixed() -> Self {
        BlochState { r: [0.0; 3] }
    }

    pub fn r(&self) -> [f64; 3] {
        self.r
    }

    /// `t = |r|^2`
    pub fn norm_sqr(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `Tr(rho^2) = (1 + |r|^2) / 2`
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.norm_sqr())
    }

    pub fn matrix(&self) -> CMat2 {
        let [x, y, z] = self.r;
        PAULI[0].scale(0.5) + PAULI[1].scale(0.5 * x) + PAULI[2].scale(0.5 * y) + PAULI[3].scale(0.5 * z)
    }

    /// Bloch vector `r_i = Tr(rho sigma_i)` of a unit-trace operator.
    pub fn from_matrix(m: &CMat2) -> Result<Self> {
        let r = bloch_components(m);
        Self::new(r)
    }
}

fn bloch_components(m: &CMat2) -> [f64; 3] {
    std::array::from_fn(|i| m.trace_product(&PAULI[i + 1]).re)
}

/// Real 4x4 Pauli transfer matrix `T_ij = Tr[sigma_i N(sigma_j)] / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ptm(pub [[f64; 4]; 4]);

impl Ptm {
    pub fn identity() -> Self {
        Ptm::diag([1.0; 4])
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        Ptm(m)
    }

    pub fn transpose(&self) -> Self {
        Ptm(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn mul(&self, rhs: &Ptm) -> Ptm {
        Ptm(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }

    pub fn max_abs_diff(&self, other: &Ptm) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }

    /// Lower-right 3x3 block acting on Bloch vectors.
    pub fn block(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i + 1][j + 1]))
    }

    /// Deviation of row 0 from `(1, 0, 0, 0)`.
    pub fn tp_deviation(&self) -> f64 {
        let row = self.0[0];
        (row[0] - 1.0).abs().max(row[1].abs()).max(row[2].abs()).max(row[3].abs())
    }

    /// Worst entry of column 0 deviating from `(1, 0, 0, 0)^T`, as `(row, deviation)`.
    pub fn unital_deviation(&self) -> (usize, f64) {
        (0..4)
            .map(|i| {
                let target = if i == 0 { 1.0 } else { 0.0 };
                (i, (self.0[i][0] - target).abs())
            })
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }
}

/// Pauli channel `P(w) = sum_i p_i sigma_i w sigma_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliChannel {
    p: [f64; 4],
}

impl PauliChannel {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite() || *x < -PROB_TOL) {
            return Err(Error::InvalidProbabilities(format!("{p:?} has a negative or non-finite entry")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidProbabilities(format!("{p:?} sums to {sum}")));
        }
        Ok(PauliChannel { p: p.map(|x| x.max(0.0)) })
    }

    pub fn identity() -> Self {
        PauliChannel { p: [1.0, 0.0, 0.0, 0.0] }
    }

    /// `D_p(w) = (1 - p) w + (p / 3) sum_i sigma_i w sigma_i`, with `lambda = 1 - 4p/3`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("depolarizing parameter {p} not in [0, 1]")));
        }
        Self::new([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
    }

    /// `E_{p,q}(w) = q^2 w + pq X w X + p^2 Y w Y + pq Z w Z`, `q = 1 - p`.
    pub fn bb84(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("BB84 parameter {p} not in [0, 1]")));
        }
        let q = 1.0 - p;
        Self::new([q * q, p * q, p * p, p * q])
    }

    /// Inverts `lambda_i = p_0 + p_i - p_j - p_k`. Entries within `1e-8` below
    /// zero are clamped and the vector renormalized.
    pub fn from_lambda(lambda: [f64; 3]) -> Result<Self> {
        let [l1, l2, l3] = lambda;
        let raw = [
            (1.0 + l1 + l2 + l3) / 4.0,
            (1.0 + l1 - l2 - l3) / 4.0,
            (1.0 - l1 + l2 - l3) / 4.0,
            (1.0 - l1 - l2 + l3) / 4.0,
        ];
        if raw.iter().any(|x| !x.is_finite() || *x < -CLAMP_TOL) {
            return Err(Error::InvalidProbabilities(format!(
                "lambda {lambda:?} lies outside the Fujiwara-Algoet set (p = {raw:?})"
            )));
        }
        let clamped = raw.map(|x| x.max(0.0));
        let sum: f64 = clamped.iter().sum();
        Ok(PauliChannel { p: clamped.map(|x| x / sum) })
    }

    pub fn p(&self) -> [f64; 4] {
        self.p
    }

    /// Eigenvalues `lambda_i` with `P(sigma_i) = lambda_i sigma_i`.
    pub fn lambda(&self) -> [f64; 3] {
        let [p0, p1, p2, p3] = self.p;
        [p0 + p1 - p2 - p3, p0 + p2 - p1 - p3, p0 + p3 - p1 - p2]
    }

    /// Indices with `p_i > eps`.
    pub fn support(&self, eps: f64) -> Vec<usize> {
        (0..4).filter(|&i| self.p[i] > eps).collect()
    }

    pub fn ptm(&self) -> Ptm {
        let [l1, l2, l3] = self.lambda();
        Ptm::diag([1.0, l1, l2, l3])
    }

    pub fn rep(&self) -> ChannelRep {
        ChannelRep::Ptm(self.ptm())
    }

    /// `r_i -> lambda_i r_i`
    pub fn apply_bloch(&self, s: &BlochState) -> BlochState {
        let l = self.lambda();
        let r = s.r();
        BlochState { r: std::array::from_fn(|i| l[i] * r[i]) }
    }
}

/// A qubit channel in one of four representations.
///
/// Two-qubit operators use the index order `2 i + a` with `i` on the first
/// factor. The Choi matrix is `sum_ij |i><j| (x) N(|i><j|)` and the
/// Jamiolkowski operator is `sum_ij |i><j| (x) N(|j><i|) = (id (x) N)(SWAP)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelRep {
    Kraus(Vec<CMat2>),
    Choi(CMat4),
    Jamiolkowski(CMat4),
    Ptm(Ptm),
}

impl ChannelRep {
    pub fn identity() -> Self {
        ChannelRep::Kraus(vec![CMat2::identity()])
    }

    /// `w -> U w U^dag`
    pub fn unitary(u: CMat2) -> Self {
        ChannelRep::Kraus(vec![u])
    }

    pub fn pauli(p: &PauliChannel) -> Self {
        p.rep()
    }

    /// Action on an arbitrary (not necessarily Hermitian) operator.
    pub fn apply_operator(&self, x: &CMat2) -> CMat2 {
        match self {
            ChannelRep::Kraus(ops) => ops
                .iter()
                .fold(CMat2::zeros(), |acc, k| acc + *k * *x * k.dagger()),
            ChannelRep::Choi(c) => CMat2::from_fn(|a, b| {
                let mut acc = ZERO;
                for i in 0..2 {
                    for j in 0..2 {
                        acc += x.0[i][j] * c.0[2 * i + a][2 * j + b];
                    }
                }
                acc
            }),
            ChannelRep::Jamiolkowski(jm) => CMat2::from_fn(|a, b| {
                let mut acc = ZERO;
                for i in 0..2 {
                    for j in 0..2 {
                        acc += x.0[j][i] * jm.0[2 * i + a][2 * j + b];
                    }
                }
                acc
            }),
            ChannelRep::Ptm(t) => {
                let coeffs: [C64; 4] = std::array::from_fn(|j| x.trace_product(&PAULI[j]) * 0.5);
                (0..4).fold(CMat2::zeros(), |acc, i| {
                    let yi: C64 = (0..4).map(|j| coeffs[j] * t.0[i][j]).sum();
                    acc + PAULI[i].scale_c(yi)
                })
            }
        }
    }

    pub fn choi(&self) -> CMat4 {
        match self {
            ChannelRep::Choi(c) => *c,
            ChannelRep::Jamiolkowski(jm) => choi_from_jam(jm),
            _ => operator_from_action(|i, j| self.apply_operator(&unit(i, j))),
        }
    }

    pub fn jamiolkowski(&self) -> CMat4 {
        match self {
            ChannelRep::Jamiolkowski(jm) => *jm,
            ChannelRep::Choi(c) => jam_from_choi(c),
            _ => operator_from_action(|i, j| self.apply_operator(&unit(j, i))),
        }
    }

    pub fn ptm(&self) -> Ptm {
        match self {
            ChannelRep::Ptm(t) => *t,
            _ => Ptm(std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    0.5 * self.apply_operator(&PAULI[j]).trace_product(&PAULI[i]).re
                })
            })),
        }
    }

    /// Kraus operators; non-Kraus representations go through the Choi
    /// eigendecomposition.
    pub fn kraus(&self, tol: f64) -> Result<Vec<CMat2>> {
        match self {
            ChannelRep::Kraus(ops) => Ok(ops.clone()),
            _ => kraus_from_choi(&self.choi(), tol),
        }
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.ptm().unital_deviation().1 <= tol
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.ptm().tp_deviation() <= tol
    }
}

fn unit(i: usize, j: usize) -> CMat2 {
    let mut m = CMat2::zeros();
    m.0[i][j] = ONE;
    m
}

/// `sum_ij |i><j| (x) f(i, j)`
fn operator_from_action(f: impl Fn(usize, usize) -> CMat2) -> CMat4 {
    let mut out = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let block = f(i, j);
            for a in 0..2 {
                for b in 0..2 {
                    out.0[2 * i + a][2 * j + b] = block.0[a][b];
                }
            }
        }
    }
    out
}

/// `J[N] = (id (x) N)(SWAP)`
pub fn jamiolkowski(ch: &ChannelRep) -> CMat4 {
    ch.jamiolkowski()
}

/// Choi matrix from the Jamiolkowski operator (transpose of the first factor).
pub fn choi_from_jam(jam: &CMat4) -> CMat4 {
    partial_transpose(jam, Subsystem::First)
}

pub fn jam_from_choi(choi: &CMat4) -> CMat4 {
    partial_transpose(choi, Subsystem::First)
}

pub fn apply(ch: &ChannelRep, s: &BlochState) -> Result<BlochState> {
    let out = ch.apply_operator(&s.matrix());
    let r = bloch_components(&out);
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !norm.is_finite() || norm > 1.0 + APPLY_BALL_TOL {
        return Err(Error::InternalCpViolation { norm });
    }
    // rounding may leave the norm a hair above 1
    let r = if norm > 1.0 { r.map(|x| x / norm) } else { r };
    BlochState::new(r)
}

/// Hilbert-Schmidt adjoint; the representation kind is preserved.
pub fn adjoint(ch: &ChannelRep) -> ChannelRep {
    match ch {
        ChannelRep::Kraus(ops) => ChannelRep::Kraus(ops.iter().map(|k| k.dagger()).collect()),
        ChannelRep::Ptm(t) => ChannelRep::Ptm(t.transpose()),
        ChannelRep::Choi(_) => {
            let adj = ChannelRep::Ptm(ch.ptm().transpose());
            ChannelRep::Choi(adj.choi())
        }
        ChannelRep::Jamiolkowski(_) => {
            let adj = ChannelRep::Ptm(ch.ptm().transpose());
            ChannelRep::Jamiolkowski(adj.jamiolkowski())
        }
    }
}

/// `f o g` (apply `g` first).
pub fn compose(f: &ChannelRep, g: &ChannelRep) -> ChannelRep {
    match (f, g) {
        (ChannelRep::Kraus(fk), ChannelRep::Kraus(gk)) => ChannelRep::Kraus(
            fk.iter()
                .flat_map(|a| gk.iter().map(move |b| *a * *b))
                .filter(|k| k.frobenius_norm() > 0.0)
                .collect(),
        ),
        _ => ChannelRep::Ptm(f.ptm().mul(&g.ptm())),
    }
}

/// Minimum eigenvalue of the Choi matrix (`-inf` when it is not Hermitian).
pub fn choi_min_eigenvalue(ch: &ChannelRep) -> f64 {
    herm_eig(&ch.choi()).map(|e| e.min()).unwrap_or(f64::NEG_INFINITY)
}

/// Complete positivity via the Choi spectrum, trace preservation via PTM row 0.
pub fn is_cptp(ch: &ChannelRep, tol: f64) -> bool {
    choi_min_eigenvalue(ch) >= -tol && ch.ptm().tp_deviation() <= tol
}

/// Complete positivity of the PTM-diagonal unital map `diag(1, lambda)`:
/// `|lambda_1 +- lambda_2| <= |1 +- lambda_3|`.
pub fn fujiwara_algoet(lambda: [f64; 3]) -> bool {
    let [l1, l2, l3] = lambda;
    (l1 + l2).abs() <= (1.0 + l3).abs() + FA_SLACK && (l1 - l2).abs() <= (1.0 - l3).abs() + FA_SLACK
}

/// Unital channel written as `E = U o P o V` with unitary channels `U`, `V`.
#[derive(Clone, Copy, Debug)]
pub struct PauliDecomposition {
    pub u: CMat2,
    pub pauli: PauliChannel,
    pub v: CMat2,
}

impl PauliDecomposition {
    pub fn recompose(&self) -> ChannelRep {
        ChannelRep::Ptm(unitary_ptm(&self.u).mul(&self.pauli.ptm()).mul(&unitary_ptm(&self.v)))
    }

    /// The state `V s V^dag` seen by the Pauli channel.
    pub fn frame_state(&self, s: &BlochState) -> Result<BlochState> {
        let m = self.v * s.matrix() * self.v.dagger();
        BlochState::from_matrix(&m)
    }
}

/// PTM of `w -> U w U^dag`.
pub fn unitary_ptm(u: &CMat2) -> Ptm {
    ChannelRep::unitary(*u).ptm()
}

/// Decomposes a unital CPTP channel as `U o P o V` using the signed singular
/// value decomposition of the PTM block.
pub fn unital_to_pauli(ch: &ChannelRep) -> Result<PauliDecomposition> {
    let ptm = ch.ptm();
    let (row, deviation) = ptm.unital_deviation();
    if deviation > TP_TOL {
        return Err(Error::NotUnital { row, deviation });
    }
    let min_eigenvalue = choi_min_eigenvalue(ch);
    let tp_deviation = ptm.tp_deviation();
    if min_eigenvalue < -DECOMPOSE_CPTP_TOL || tp_deviation > DECOMPOSE_CPTP_TOL {
        return Err(Error::NotCptp { min_eigenvalue, tp_deviation });
    }

    let block = ptm.block();
    let off_diagonal = (0..3)
        .flat_map(|i| (0..3).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0_f64, |acc, (i, j)| acc.max(block[i][j].abs()));
    if off_diagonal <= DIAGONAL_TOL {
        let lambda = [block[0][0], block[1][1], block[2][2]];
        return Ok(PauliDecomposition {
            u: CMat2::identity(),
            pauli: PauliChannel::from_lambda(lambda)?,
            v: CMat2::identity(),
        });
    }

    let t = Matrix3::from_fn(|i, j| block[i][j]);
    let svd = t.svd(true, true);
    let mut left = svd.u.ok_or_else(|| Error::InvalidChannel("SVD failed".into()))?;
    let mut right_t = svd.v_t.ok_or_else(|| Error::InvalidChannel("SVD failed".into()))?;
    let mut sigma = [svd.singular_values[0], svd.singular_values[1], svd.singular_values[2]];
    if left.determinant() < 0.0 {
        left.column_mut(2).neg_mut();
        sigma[2] = -sigma[2];
    }
    if right_t.determinant() < 0.0 {
        right_t.row_mut(2).neg_mut();
        sigma[2] = -sigma[2];
    }
    let rot_u: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| left[(i, j)]));
    let rot_v: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| right_t[(i, j)]));
    Ok(PauliDecomposition {
        u: su2_from_rotation(&rot_u),
        pauli: PauliChannel::from_lambda(sigma)?,
        v: su2_from_rotation(&rot_v),
    })
}

/// Lifts a proper rotation to `U = w - i (x X + y Y + z Z)` with `Tr U >= 0`,
/// so that `U sigma_j U^dag = sum_i R_ij sigma_i`.
pub fn su2_from_rotation(r: &[[f64; 3]; 3]) -> CMat2 {
    let trace = r[0][0] + r[1][1] + r[2][2];
    let (w, x, y, z) = if trace > 0.0 {
        let s = (trace + 1.0).sqrt() * 2.0;
        (s / 4.0, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s)
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt() * 2.0;
        ((r[2][1] - r[1][2]) / s, s / 4.0, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s)
    } else if r[1][1] > r[2][2] {
        let s = (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt() * 2.0;
        ((r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, s / 4.0, (r[1][2] + r[2][1]) / s)
    } else {
        let s = (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt() * 2.0;
        ((r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, s / 4.0)
    };
    let sign = if w < 0.0 { -1.0 } else { 1.0 };
    let norm = (w * w + x * x + y * y + z * z).sqrt() * sign;
    let (w, x, y, z) = (w / norm, x / norm, y / norm, z / norm);
    PAULI[0].scale(w) - (PAULI[1].scale(x) + PAULI[2].scale(y) + PAULI[3].scale(z)).scale_c(I)
}

/// `V^dag o F o U^dag`: carries a Bayesian inverse of `P` (state `rho`) to one
/// of `U o P o V` (state `V^dag rho V`).
pub fn transport_inverse(u: &CMat2, v: &CMat2, f: &ChannelRep) -> ChannelRep {
    let pre = ChannelRep::unitary(u.dagger());
    let post = ChannelRep::unitary(v.dagger());
    compose(&post, &compose(f, &pre))
}
