use std::sync::Arc;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::pauli::PauliString;
use super::state::qubits_for_dim;
use crate::error::{Error, Result};

/// A unitary, kept symbolic when it is a (phased) Pauli string.
#[derive(Clone, Debug, PartialEq)]
pub enum UnitaryOp {
    Pauli(PauliString),
    Matrix(Arc<ComplexMatrix>),
}

impl UnitaryOp {
    pub fn identity(n_qubits: usize) -> Self {
        UnitaryOp::Pauli(PauliString::identity(n_qubits))
    }

    /// Wraps an explicit matrix after checking unitarity within `1e-10`.
    pub fn matrix(u: ComplexMatrix) -> Result<Self> {
        let dim = u.dim()?;
        qubits_for_dim(dim)?;
        if !u.is_unitary(1e-10) {
            return Err(Error::InvalidArgument("matrix is not unitary within 1e-10".into()));
        }
        Ok(UnitaryOp::Matrix(Arc::new(u)))
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            UnitaryOp::Pauli(p) => p.n_qubits(),
            UnitaryOp::Matrix(m) => m.rows().trailing_zeros() as usize,
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        match self {
            UnitaryOp::Pauli(p) => p.to_matrix(),
            UnitaryOp::Matrix(m) => (**m).clone(),
        }
    }

    pub fn is_pauli(&self) -> bool {
        matches!(self, UnitaryOp::Pauli(_))
    }

    /// `self · other`; stays in the Pauli group when both factors are Pauli.
    pub fn compose(&self, other: &UnitaryOp) -> Result<UnitaryOp> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch { expected: self.n_qubits(), found: other.n_qubits() });
        }
        Ok(match (self, other) {
            (UnitaryOp::Pauli(a), UnitaryOp::Pauli(b)) => UnitaryOp::Pauli(a.compose(b)?),
            _ => UnitaryOp::Matrix(Arc::new(self.to_matrix().matmul(&other.to_matrix()))),
        })
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match self {
            UnitaryOp::Pauli(p) => p.conjugate(rho),
            UnitaryOp::Matrix(m) => m.conjugate(rho),
        }
    }

    pub fn apply_to_state(&self, amps: &mut Vec<Complex64>) {
        match self {
            UnitaryOp::Pauli(p) => p.apply_to_state(amps),
            UnitaryOp::Matrix(m) => *amps = m.matvec(amps),
        }
    }

    /// Column-stacked superoperator `conj(U) ⊗ U`.
    pub fn superoperator_matrix(&self) -> ComplexMatrix {
        let u = self.to_matrix();
        u.conj().kron(&u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::Pauli;

    #[test]
    fn pauli_composition_stays_symbolic() {
        let x = UnitaryOp::Pauli(PauliString::single(2, 0, Pauli::X).unwrap());
        let z = UnitaryOp::Pauli(PauliString::single(2, 0, Pauli::Z).unwrap());
        let xz = x.compose(&z).unwrap();
        assert!(xz.is_pauli());
        assert!(xz.to_matrix().max_abs_diff(&x.to_matrix().matmul(&z.to_matrix())) < 1e-15);
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(UnitaryOp::matrix(m).is_err());
    }
}
