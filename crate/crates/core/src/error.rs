use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("qubit count mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("generator {0} is not hermitian")]
    NonHermitian(String),
    #[error("not a stabilizer group: {0}")]
    NotAStabilizer(String),
    #[error("contradictory signs: {0}")]
    Contradiction(String),
    #[error("group is not abelian")]
    NonAbelian,
    #[error("group of dimension {dim} on {n} qubits is not maximal")]
    NotMaximal { dim: usize, n: usize },
    #[error("enumeration of 2^{dim} elements exceeds the limit 2^{limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("dense simulation of {qubits} qubits exceeds the cap of {cap}")]
    DenseCap { qubits: usize, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
