//! Bayesian inversion of unital single-qubit channels.
//!
//! * [`mat`]: fixed-size complex matrices, Pauli expansions, Hermitian
//!   eigensolver.
//! * [`channel`]: Bloch states, Pauli channels, general channel
//!   representations and the unital-to-Pauli reduction.
//! * [`bayes`]: pseudo-density matrices, the Bayes-rule residual, unscathed
//!   states, the analytic inverse and its feasibility test.
//! * [`scan`]: feasibility regions over `(p, |r|^2)` grids.
//! * [`schema`]: JSON descriptions of channels and states.

pub mod bayes;
pub mod channel;
pub mod error;
pub mod mat;
pub mod sampling;
pub mod scan;
pub mod schema;

pub use bayes::{bayesian_inverse, InverseRecord, NoInverse, NoInverseReason};
pub use channel::{BlochState, ChannelRep, PauliChannel, Ptm};
pub use error::{Error, Result};
