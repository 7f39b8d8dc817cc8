use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit count {n} exceeds the configured cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid Pauli string: {0}")]
    InvalidPauli(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("map is not Hermiticity preserving (Choi deviation {0:.3e})")]
    NotHermiticityPreserving(f64),

    #[error("dissipator is not stochastically simulatable: {0}")]
    NotSimulatable(String),

    #[error("product-formula validity condition violated: {0}")]
    ValidityViolated(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
