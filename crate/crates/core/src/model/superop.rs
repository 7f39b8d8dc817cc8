//! Superoperators on column-stacked density matrices, their Choi matrices,
//! and two-sided diamond-norm bounds.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eigen::{hermitian_eigen, hermitian_eigenvalues};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::{matrix_exp, DensityMatrix};

/// A linear map on `n`-qubit operators, stored as a `4^n × 4^n` matrix that
/// acts on `vec(ρ)` with `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

/// Bounds `lower ≤ ‖Φ‖◇ ≤ upper` read off the Choi matrix `C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiamondBounds {
    /// `‖C‖₁ / 2^n`: the trace norm of `Φ ⊗ I` applied to the normalized
    /// maximally entangled state.
    pub lower: f64,
    /// `‖Tr_out |C|‖∞`, the objective at a feasible point of the
    /// diamond-norm SDP. Never larger than `choi_trace_norm`.
    pub upper: f64,
    /// `‖C‖₁`, the classic (looser) upper bound.
    pub choi_trace_norm: f64,
}

impl Superoperator {
    pub fn new(n_qubits: usize, matrix: ComplexMatrix) -> Result<Self> {
        let expected = 1usize << (2 * n_qubits);
        if matrix.rows() != expected || matrix.cols() != expected {
            return Err(Error::DimensionMismatch { expected, found: matrix.rows() });
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, matrix: ComplexMatrix::identity(1 << (2 * n_qubits)) }
    }

    pub fn zero(n_qubits: usize) -> Self {
        let d2 = 1 << (2 * n_qubits);
        Self { n_qubits, matrix: ComplexMatrix::zeros(d2, d2) }
    }

    /// `ρ ↦ U ρ U†`.
    pub fn unitary_conjugation(u: &ComplexMatrix) -> Result<Self> {
        let d = u.dim()?;
        Self::new(crate::linalg::state::qubits_for_dim(d)?, u.conj().kron(u))
    }

    /// `ρ ↦ Σ_k K_k ρ K_k†`.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let d = first.dim()?;
        let n = crate::linalg::state::qubits_for_dim(d)?;
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for k in kraus {
            if k.rows() != d || k.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: k.rows() });
            }
            m += &k.conj().kron(k);
        }
        Self::new(n, m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Φ(X)` for an arbitrary operator `X`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim();
        if x.rows() != d || x.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.rows() });
        }
        ComplexMatrix::unvec_columns(&self.matrix.matvec(&x.vec_columns()), d, d)
    }

    /// Applies a map known to be CPTP and validates the output at `tol`.
    pub fn apply_state(&self, rho: &DensityMatrix, tol: f64) -> Result<DensityMatrix> {
        DensityMatrix::with_tolerance(self.apply(rho.matrix())?, tol)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        self.check_same(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: self.matrix.matmul(&other.matrix) })
    }

    pub fn sub(&self, other: &Superoperator) -> Result<Superoperator> {
        self.check_same(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: &self.matrix - &other.matrix })
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        self.check_same(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, s: f64) -> Superoperator {
        Self { n_qubits: self.n_qubits, matrix: self.matrix.scale_real(s) }
    }

    /// `[A, B] = A∘B − B∘A`.
    pub fn commutator(&self, other: &Superoperator) -> Result<Superoperator> {
        self.check_same(other)?;
        Ok(Self { n_qubits: self.n_qubits, matrix: self.matrix.commutator(&other.matrix) })
    }

    pub fn pow(&self, r: u64) -> Superoperator {
        Self { n_qubits: self.n_qubits, matrix: self.matrix.pow(r) }
    }

    /// `exp(t · self)` for a generator.
    pub fn exp(&self, t: f64) -> Result<Superoperator> {
        Ok(Self { n_qubits: self.n_qubits, matrix: matrix_exp(&self.matrix, Complex64::new(t, 0.0))? })
    }

    fn check_same(&self, other: &Superoperator) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(())
    }

    /// Unnormalized Choi matrix `C = Σ_ij Φ(E_ij) ⊗ E_ij` (output factor first).
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim();
        // C[(a,i),(b,j)] = Φ(E_ij)[a,b] = S[a + d b, i + d j]
        ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (a, i) = (row / d, row % d);
            let (b, j) = (col / d, col % d);
            self.matrix[(a + d * b, i + d * j)]
        })
    }

    /// Maximum deviation of `Tr_out C` from the identity.
    pub fn trace_preservation_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let s: Complex64 = (0..d).map(|a| self.matrix[(a + d * a, i + d * j)]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Most negative Choi eigenvalue (zero or positive for CP maps).
    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        let c = self.choi();
        let dev = c.hermitian_deviation();
        if dev > 1e-9 {
            return Ok(-dev);
        }
        Ok(hermitian_eigenvalues(&c)?.into_iter().fold(f64::INFINITY, f64::min))
    }

    pub fn is_cptp(&self, psd_tol: f64, tp_tol: f64) -> Result<bool> {
        Ok(self.trace_preservation_deviation() <= tp_tol && self.min_choi_eigenvalue()? >= -psd_tol)
    }
}

/// Two-sided diamond-norm bounds of a Hermiticity-preserving map.
pub fn diamond_bounds(delta: &Superoperator) -> Result<DiamondBounds> {
    let c = delta.choi();
    let scale = c.max_abs().max(1.0);
    let dev = c.hermitian_deviation();
    if dev > 1e-9 * scale {
        return Err(Error::NotHermiticityPreserving(dev));
    }
    let d = delta.dim();
    let (values, vectors) = hermitian_eigen(&c)?;
    let choi_trace_norm: f64 = values.iter().map(|l| l.abs()).sum();

    // Tr_out |C| where |C| = V |Λ| V†, accumulated directly.
    let mut reduced = ComplexMatrix::zeros(d, d);
    for (k, &lambda) in values.iter().enumerate() {
        let w = lambda.abs();
        if w == 0.0 {
            continue;
        }
        for a in 0..d {
            for i in 0..d {
                let vi = vectors[(a * d + i, k)] * w;
                for j in 0..d {
                    reduced[(i, j)] += vi * vectors[(a * d + j, k)].conj();
                }
            }
        }
    }
    let upper = hermitian_eigenvalues(&reduced)?.into_iter().fold(0.0, f64::max).min(choi_trace_norm);
    Ok(DiamondBounds { lower: choi_trace_norm / d as f64, upper, choi_trace_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Pauli;

    #[test]
    fn zero_and_cancelling_maps() {
        let b = diamond_bounds(&Superoperator::zero(1)).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let id = Superoperator::identity(2);
        let b = diamond_bounds(&id.sub(&id).unwrap()).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
    }

    #[test]
    fn identity_channel_has_unit_norm() {
        let b = diamond_bounds(&Superoperator::identity(2)).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12);
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert!((b.choi_trace_norm - 4.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_channels_are_cptp() {
        let u = Pauli::Y.matrix().kron(&Pauli::X.matrix());
        let s = Superoperator::unitary_conjugation(&u).unwrap();
        assert!(s.is_cptp(1e-12, 1e-12).unwrap());
        let bad = s.scale(1.5);
        assert!(!bad.is_cptp(1e-12, 1e-12).unwrap());
    }

    #[test]
    fn non_hermiticity_preserving_rejected() {
        // ρ ↦ iρ is not Hermiticity preserving.
        let s = Superoperator::new(1, ComplexMatrix::identity(4).scale(Complex64::new(0.0, 1.0))).unwrap();
        assert!(matches!(diamond_bounds(&s), Err(Error::NotHermiticityPreserving(_))));
    }

    #[test]
    fn choi_of_identity_is_maximally_entangled_projector() {
        let c = Superoperator::identity(1).choi();
        // |Ω⟩⟨Ω| with |Ω⟩ = |00⟩ + |11⟩
        let expected = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0, 1.0],
        ]);
        assert_eq!(c, expected);
    }
}
