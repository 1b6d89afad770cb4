use thiserror::Error;

use crate::rat::Rat;

/// Every failure mode of the library. Law violations are never errors; they
/// come back as report values with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {0} appears more than once")]
    DuplicateIndex(u64),
    #[error("weight {weight} at index {index} is negative")]
    NegativeWeight { index: u64, weight: Rat },
    #[error("total mass is {0}, expected exactly 1")]
    MassNotOne(Rat),
    #[error("invalid tail: {0}")]
    InvalidTail(String),
    #[error("set shape not supported against a tail-backed distribution")]
    UnsupportedSetShape,
    #[error("no positive weight found within the first {0} indices")]
    EnumerationCapExceeded(u64),
    #[error("map undefined at support point {0}")]
    PartialMap(u64),
    #[error("operation requires finite support; tail-backed measure given")]
    TailUnsupported,
    #[error("family undefined at support point {0}")]
    PartialFamily(u64),
    #[error("unknown space {0:?}")]
    UnknownSpace(String),
    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),
    #[error("sequence undefined at index {0}")]
    PartialSequence(u64),
    #[error("{0} is outside the carrier")]
    OutOfCarrier(String),
    #[error("bound {got} exceeds the exhaustive limit {limit}")]
    BoundExceeded { got: usize, limit: usize },
    #[error("map is not countably affine: {0}")]
    NotAffine(String),
    #[error("table is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("split part is empty")]
    EmptyPart,
    #[error("split parts do not partition the atom: {0}")]
    NotAPartition(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("atom chain breaks containment at level {0}")]
    BrokenChain(usize),
    #[error("squared norm is {0}, expected exactly 1")]
    NormNotOne(Rat),
    #[error("type precondition violated: {0}")]
    TypeMismatch(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
