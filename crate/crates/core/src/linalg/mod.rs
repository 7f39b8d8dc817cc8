//! Dense complex linear algebra: matrices, Pauli strings, exponentials and
//! quantum states.

pub mod eigen;
pub mod expm;
pub mod matrix;
pub mod pauli;
pub mod state;
pub mod unitary;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, trace_norm};
pub use expm::matrix_exp;
pub use matrix::ComplexMatrix;
pub use pauli::{pauli_decompose, Pauli, PauliString};
pub use unitary::UnitaryOp;
pub use state::{embed_operator, partial_trace, trace_distance, DensityMatrix, StateVector, STATE_TOL};

/// `phase · σ_1 ⊗ … ⊗ σ_n` as a dense matrix.
pub fn pauli_to_matrix(p: &PauliString) -> ComplexMatrix {
    p.to_matrix()
}
