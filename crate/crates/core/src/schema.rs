//! JSON descriptions of channels and states.
//!
//! ```json
//! {"kind": "pauli", "p": [0.7, 0.1, 0.1, 0.1]}
//! {"kind": "kraus", "ops": [[[1,0],[0,0],[0,0],[1,0]]]}
//! {"kind": "ptm", "m": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]}
//! {"bloch": [0.6, 0, 0]}
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major. Kraus
//! operators are lists of four entries; a flat list of pairs whose length is
//! a multiple of four is also accepted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{BlochState, ChannelRep, PauliChannel, Ptm};
use crate::error::{Error, Result};
use crate::mat::CMat2;

pub type Complex = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KrausOps {
    Nested(Vec<Vec<Complex>>),
    Flat(Vec<Complex>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChannelSpec {
    Pauli { p: Vec<f64> },
    Kraus { ops: KrausOps },
    Ptm { m: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub bloch: Vec<f64>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn operator(entries: &[Complex]) -> Result<CMat2> {
    if entries.len() != 4 {
        return Err(schema(format!("Kraus operator needs 4 entries, got {}", entries.len())));
    }
    if entries.iter().flatten().any(|x| !x.is_finite()) {
        return Err(schema("Kraus entries must be finite"));
    }
    Ok(CMat2::from_fn(|i, j| {
        let [re, im] = entries[2 * i + j];
        Complex64::new(re, im)
    }))
}

impl ChannelSpec {
    pub fn to_channel(&self) -> Result<ChannelRep> {
        match self {
            ChannelSpec::Pauli { p } => {
                let p: [f64; 4] =
                    p.as_slice().try_into().map_err(|_| schema(format!("pauli needs 4 probabilities, got {}", p.len())))?;
                Ok(PauliChannel::new(p)?.rep())
            }
            ChannelSpec::Kraus { ops } => {
                let ops = match ops {
                    KrausOps::Nested(list) => list.iter().map(|op| operator(op)).collect::<Result<Vec<_>>>()?,
                    KrausOps::Flat(pairs) => {
                        if pairs.len() % 4 != 0 {
                            return Err(schema(format!("flat Kraus list length {} is not a multiple of 4", pairs.len())));
                        }
                        pairs.chunks(4).map(operator).collect::<Result<Vec<_>>>()?
                    }
                };
                if ops.is_empty() {
                    return Err(schema("Kraus list is empty"));
                }
                Ok(ChannelRep::Kraus(ops))
            }
            ChannelSpec::Ptm { m } => {
                if m.len() != 16 {
                    return Err(schema(format!("ptm needs 16 entries, got {}", m.len())));
                }
                if m.iter().any(|x| !x.is_finite()) {
                    return Err(schema("ptm entries must be finite"));
                }
                Ok(ChannelRep::Ptm(Ptm(std::array::from_fn(|i| std::array::from_fn(|j| m[4 * i + j])))))
            }
        }
    }

    pub fn from_channel(ch: &ChannelRep) -> Self {
        match ch {
            ChannelRep::Kraus(ops) => ChannelSpec::Kraus {
                ops: KrausOps::Nested(
                    ops.iter().map(|k| k.0.iter().flatten().map(|z| [z.re, z.im]).collect()).collect(),
                ),
            },
            other => ChannelSpec::Ptm { m: other.ptm().0.iter().flatten().copied().collect() },
        }
    }

    pub fn from_pauli(p: &PauliChannel) -> Self {
        ChannelSpec::Pauli { p: p.p().to_vec() }
    }
}

impl StateSpec {
    pub fn to_state(&self) -> Result<BlochState> {
        let r: [f64; 3] = self
            .bloch
            .as_slice()
            .try_into()
            .map_err(|_| schema(format!("bloch needs 3 components, got {}", self.bloch.len())))?;
        if r.iter().any(|x| !x.is_finite()) {
            return Err(schema("bloch components must be finite"));
        }
        BlochState::new(r)
    }

    pub fn from_state(s: &BlochState) -> Self {
        StateSpec { bloch: s.r().to_vec() }
    }
}

pub fn parse_channel(json: &str) -> Result<ChannelRep> {
    let spec: ChannelSpec = serde_json::from_str(json).map_err(|e| schema(e.to_string()))?;
    spec.to_channel()
}

pub fn parse_state(json: &str) -> Result<BlochState> {
    let spec: StateSpec = serde_json::from_str(json).map_err(|e| schema(e.to_string()))?;
    spec.to_state()
}

/// `[re, im]` pairs, row-major.
pub fn complex_rows<const N: usize>(m: &crate::mat::CMat<N>) -> Vec<Vec<Complex>> {
    m.0.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}
