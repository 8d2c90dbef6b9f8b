use thiserror::Error;

use crate::cartan::Family;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank n={n} is outside the supported range for type {family} (minimum {min}); use relax_rank to override")]
    RankOutOfRange { family: Family, n: usize, min: usize },

    #[error("unknown type name `{0}`")]
    UnknownType(String),

    #[error("weight has {got} entries, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),

    #[error("node index {index} out of range 0..={n}")]
    NodeIndex { index: usize, n: usize },

    #[error("letter `{0}` does not belong to this crystal")]
    InvalidLetter(String),

    #[error("length {len} is not on the lattice of node {node}")]
    OffLattice { node: usize, len: String },

    #[error("rigged configuration is not admissible: {0}")]
    Inadmissible(String),

    #[error("local energy propagation failed: {0}")]
    Energy(String),

    #[error("b natural lookup failed: {0}")]
    BNatural(String),

    #[error("box removal failed: {0}")]
    Delta(String),

    #[error("no preimage under box removal: {0}")]
    NoPreimage(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
