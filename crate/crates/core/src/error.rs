use thiserror::Error;

/// Errors raised by the certification library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not unitary (max |X^dag X - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitOutOfRange { index: usize, qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigensolver failed to converge (residual {residual:e})")]
    Eigensolver { residual: f64 },

    #[error("empty point set")]
    EmptyInput,

    #[error("{0} is out of range")]
    OutOfRange(String),

    #[error("dimension {0} is below 4; use the single-qubit relation D = (1 - F)/sqrt(5) instead")]
    DimensionTooSmall(usize),

    #[error("inadmissible (F, D) pair: {0}")]
    Inadmissible(String),

    #[error("over-rotation model is not defined for gate {0}")]
    UnsupportedGate(String),

    #[error("no bound inputs supplied")]
    NoBoundInputs,
}

pub type Result<T> = std::result::Result<T, Error>;
