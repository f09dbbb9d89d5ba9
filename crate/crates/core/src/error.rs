use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// Operand shapes do not line up (matrix products, vector lengths, ...).
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix that must be invertible over GF(2) is singular.
    #[error("matrix is singular over GF(2): {0}")]
    Singular(String),

    /// An argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A dense-state operation would exceed the qubit-count cap.
    #[error("qubit count {qubits} exceeds the dense-simulation cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },

    /// A staircase index window cannot be satisfied for the given sizes.
    #[error("window constraint of protocol step {step} is unsatisfiable: {detail}")]
    UnsatisfiableWindow { step: u8, detail: String },

    /// An iterative numeric routine failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Input data is degenerate for the requested statistic or fit.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A serialized artifact does not parse or fails validation.
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
