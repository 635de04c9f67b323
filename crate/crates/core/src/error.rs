use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("success bound undefined for m = {m}, n = {n}: denominator 2^(m-n+1) - 4 is zero")]
    BoundUndefined { m: usize, n: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    /// An internal numerical invariant (normalisation, unitarity) failed.
    #[error("numerical invariant violated: {0}")]
    Numerical(String),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
