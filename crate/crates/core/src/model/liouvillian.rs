use num_complex::Complex64;

use super::spec::{HamiltonianSpec, JumpSpec, LindbladSpec};
use super::superop::Superoperator;
use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, I};
use crate::linalg::DensityMatrix;

/// Largest register for which dense superoperators are built by default.
pub const DEFAULT_QUBIT_CAP: usize = 6;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// `Ĥ = −i(I ⊗ H − Hᵀ ⊗ I)`.
pub fn hamiltonian_superoperator(h: &HamiltonianSpec) -> Result<Superoperator> {
    hamiltonian_superoperator_with_cap(h, DEFAULT_QUBIT_CAP)
}

pub fn hamiltonian_superoperator_with_cap(h: &HamiltonianSpec, cap: usize) -> Result<Superoperator> {
    check_cap(h.n_qubits(), cap)?;
    Superoperator::new(h.n_qubits(), commutator_generator(&h.matrix()))
}

fn commutator_generator(h: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(h.rows());
    let mut g = id.kron(h);
    g -= &h.transpose().kron(&id);
    g.scale(-I)
}

/// `D̂ = Σ_μ conj(L)⊗L − ½ I⊗L†L − ½ (L†L)ᵀ⊗I`.
pub fn dissipator_superoperator(n_qubits: usize, jumps: &[JumpSpec]) -> Result<Superoperator> {
    dissipator_superoperator_with_cap(n_qubits, jumps, DEFAULT_QUBIT_CAP)
}

pub fn dissipator_superoperator_with_cap(n_qubits: usize, jumps: &[JumpSpec], cap: usize) -> Result<Superoperator> {
    check_cap(n_qubits, cap)?;
    let d = 1usize << n_qubits;
    let id = ComplexMatrix::identity(d);
    let mut g = ComplexMatrix::zeros(d * d, d * d);
    for j in jumps {
        if j.n_qubits() != n_qubits {
            return Err(Error::DimensionMismatch { expected: n_qubits, found: j.n_qubits() });
        }
        let l = j.matrix();
        let ltl = l.adjoint().matmul(&l);
        g += &l.conj().kron(&l);
        g.add_scaled(Complex64::new(-0.5, 0.0), &id.kron(&ltl));
        g.add_scaled(Complex64::new(-0.5, 0.0), &ltl.transpose().kron(&id));
    }
    Superoperator::new(n_qubits, g)
}

/// The full generator `L̂ = Ĥ + D̂`.
pub fn build_liouvillian(spec: &LindbladSpec) -> Result<Superoperator> {
    build_liouvillian_with_cap(spec, DEFAULT_QUBIT_CAP)
}

pub fn build_liouvillian_with_cap(spec: &LindbladSpec, cap: usize) -> Result<Superoperator> {
    let h = hamiltonian_superoperator_with_cap(spec.hamiltonian(), cap)?;
    let d = dissipator_superoperator_with_cap(spec.n_qubits(), spec.jumps(), cap)?;
    h.add(&d)
}

/// `exp(T L̂)`.
pub fn exact_propagator(spec: &LindbladSpec, t: f64) -> Result<Superoperator> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("evolution time {t} must be finite and nonnegative")));
    }
    build_liouvillian(spec)?.exp(t)
}

/// `exp(T L̂)(ρ)`, validated as a density matrix within `1e-8`.
pub fn exact_propagate(spec: &LindbladSpec, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho.n_qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch { expected: spec.n_qubits(), found: rho.n_qubits() });
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    exact_propagator(spec, t)?.apply_state(rho, 1e-8)
}

/// `L(ρ)` evaluated in matrix form, without vectorization.
pub fn lindbladian_action(spec: &LindbladSpec, rho: &ComplexMatrix) -> ComplexMatrix {
    let h = spec.hamiltonian().matrix();
    let mut out = h.commutator(rho).scale(-I);
    for j in spec.jumps() {
        let l = j.matrix();
        let ld = l.adjoint();
        let ltl = ld.matmul(&l);
        out += &l.matmul(rho).matmul(&ld);
        out.add_scaled(Complex64::new(-0.5, 0.0), &ltl.matmul(rho));
        out.add_scaled(Complex64::new(-0.5, 0.0), &rho.matmul(&ltl));
    }
    out
}
