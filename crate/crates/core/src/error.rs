use thiserror::Error;

/// Errors surfaced by the numeric and combinatorial layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("operator is not unitary: {0}")]
    NonUnitary(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("symbol not in alphabet: {0}")]
    ForeignSymbol(String),
    #[error("sequence length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("enumeration guard exceeded: |alphabet|^n = {size} > 2^24")]
    EnumerationGuard { size: u128 },
    #[error("codec is lossy: {0}")]
    LossyCodec(String),
    #[error("sequence is not typical: {0}")]
    Atypical(String),
    #[error("backend capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("ensemble error: {0}")]
    Ensemble(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<U> = std::result::Result<U, Error>;
