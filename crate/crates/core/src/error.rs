use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("fermion mode {mode} out of range 1..={n}")]
    ModeOutOfRange { mode: usize, n: usize },

    #[error("qubit {qubit} out of range 1..={n}")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("{n} qubits exceeds the limit of {max}")]
    Capacity { n: usize, max: usize },

    #[error("operator is not Hermitian")]
    NotHermitian,

    #[error("Pauli exponential needs a real unit coefficient, got {0}")]
    NonUnitCoefficient(Complex64),

    #[error("invalid Pauli letter {0:?}")]
    InvalidLetter(char),

    #[error("invalid spin label {0:?} (expected one of u, d, U, D, 1, 0, ↑, ↓)")]
    InvalidSpinLabel(char),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("cannot compile: {0}")]
    Compile(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
