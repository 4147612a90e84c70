use thiserror::Error;

/// Errors raised across the compiler, simulator, and pulse mapping.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{qubits} qubits exceeds the dense-matrix cap of {cap}")]
    ResourceLimit { qubits: usize, cap: usize },

    #[error("{variables} variables exceeds the enumeration cap of {cap}")]
    EnumerationLimit { variables: usize, cap: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsatisfiable instance: {0}")]
    Unsatisfiable(String),

    #[error("decoded factors {p} x {q} = {product} does not equal {n}")]
    DecodeVerification {
        p: u64,
        q: u64,
        product: u128,
        n: u64,
    },

    #[error("slice {index} has s = 0; the s = 0 endpoint is realized by state preparation, not by a pulse")]
    ZeroInterpolation { index: usize },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
