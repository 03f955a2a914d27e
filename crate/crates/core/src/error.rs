use thiserror::Error;

use crate::bayes::NoInverse;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge")]
    EigenNoConvergence,

    #[error("invalid subsystem index {0} (expected 0 or 1)")]
    InvalidSubsystem(usize),

    #[error("invalid Pauli index {index} (allowed {min}..=3)")]
    InvalidPauliIndex { index: usize, min: usize },

    #[error("Bloch vector has norm {norm} > 1")]
    InvalidState { norm: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("channel output left the Bloch ball (norm {norm})")]
    InternalCpViolation { norm: f64 },

    #[error("channel is not unital: PTM column 0 deviates from (1,0,0,0) by {deviation:e} at row {row}")]
    NotUnital { row: usize, deviation: f64 },

    #[error("channel is not CPTP (min Choi eigenvalue {min_eigenvalue:e}, trace-preservation deviation {tp_deviation:e})")]
    NotCptp { min_eigenvalue: f64, tp_deviation: f64 },

    #[error("S = {s} is too close to 1; the analytic inverse is singular")]
    SingularS { s: f64 },

    #[error("channel eigenvalue lambda_{index} = {lambda} lies on the boundary |lambda| = 1")]
    EigenvalueOnBoundary { index: usize, lambda: f64 },

    #[error("anticommutator equation has no solution: block ({k},{l}) has m_k + m_l = 0 but nonzero right-hand side {magnitude:e}")]
    RankDeficient { k: usize, l: usize, magnitude: f64 },

    #[error("Choi matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("{0}")]
    NoInverse(Box<NoInverse>),

    #[error("certification of the constructed inverse failed: {0}")]
    Certification(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),

    #[error("feasibility is not monotone in t at p = {p}; grid maximum {grid_max} used instead")]
    MonotonicityViolated { p: f64, grid_max: f64 },

    #[error("malformed channel/state description: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
