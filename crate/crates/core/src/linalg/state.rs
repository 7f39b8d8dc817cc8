//! Quantum states: density matrices, state vectors, and distances between them.

use num_complex::Complex64;

use super::eigen::{hermitian_eigenvalues, hermitian_trace_norm};
use super::matrix::{ComplexMatrix, ONE, ZERO};
use super::unitary::UnitaryOp;
use crate::error::{Error, Result};

/// Absolute tolerance used for every state-validity check.
pub const STATE_TOL: f64 = 1e-10;

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!("dimension {dim} is not 2^n with n >= 1")));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STATE_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let dim = matrix.dim()?;
        let n_qubits = qubits_for_dim(dim)?;
        let dev = matrix.hermitian_deviation();
        if dev > tol {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix)?.into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Wraps a matrix known to be a valid state by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let n_qubits = qubits_for_dim(matrix.rows()).expect("trusted state has qubit dimension");
        Self { n_qubits, matrix }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        Self::from_trusted(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()))
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&StateVector::basis(n_qubits, index)?))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self::from_trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// Convex mixture `Σ w_k ρ_k`.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(first.1.dim(), first.1.dim());
        for (w, rho) in parts {
            if rho.dim() != acc.rows() {
                return Err(Error::DimensionMismatch { expected: acc.rows(), found: rho.dim() });
            }
            acc.add_scaled(Complex64::new(*w, 0.0), &rho.matrix);
        }
        Self::new(acc)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_trusted(self.matrix.kron(&other.matrix))
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `tr(O ρ)` for Hermitian `O`; the imaginary part is dropped.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += op[(i, k)] * self.matrix[(k, i)];
            }
        }
        acc.re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validates that the squared norm is within [`STATE_TOL`] of one.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm2} differs from 1")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Rescales to unit norm; fails only for the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if n_qubits == 0 || index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amplitudes: amps })
    }

    /// Computational basis state from a bit label such as `"010"`.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut index = 0usize;
        for (i, c) in label.chars().enumerate() {
            index = match c {
                '0' => index << 1,
                '1' => (index << 1) | 1,
                _ => return Err(Error::InvalidState(format!("bad basis label character {c:?} at {i}"))),
            };
        }
        Self::basis(label.len(), index)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn apply_unitary(&mut self, u: &UnitaryOp) {
        u.apply_to_state(&mut self.amplitudes);
    }

    pub fn apply_matrix(&mut self, u: &ComplexMatrix) {
        self.amplitudes = u.matvec(&self.amplitudes);
    }

    /// `<ψ|O|ψ>` real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        let o_psi = op.matvec(&self.amplitudes);
        self.amplitudes.iter().zip(&o_psi).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

fn check_keep(n: usize, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one qubit".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::InvalidArgument(format!("duplicate qubits in keep set {keep:?}")));
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidArgument(format!("qubit {q} out of range for {n} qubits")));
    }
    Ok(sorted)
}

/// Reduced state on the qubits in `keep` (returned in ascending qubit order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let out = partial_trace_matrix(rho.matrix(), rho.n_qubits(), keep)?;
    Ok(DensityMatrix::from_trusted(out))
}

/// Partial trace on a raw matrix over `n` qubits.
pub fn partial_trace_matrix(m: &ComplexMatrix, n: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    let keep = check_keep(n, keep)?;
    if m.rows() != 1 << n || !m.is_square() {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: m.rows() });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |value: usize, qubits: &[usize]| {
        let k = qubits.len();
        qubits.iter().enumerate().fold(0usize, |acc, (i, &q)| {
            if (value >> (k - 1 - i)) & 1 == 1 {
                acc | bit(q)
            } else {
                acc
            }
        })
    };
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..dk).map(|a| spread(a, &keep)).collect();
    let traced_idx: Vec<usize> = (0..dt).map(|t| spread(t, &traced)).collect();
    Ok(ComplexMatrix::from_fn(dk, dk, |a, b| {
        traced_idx.iter().map(|&t| m[(kept_idx[a] | t, kept_idx[b] | t)]).sum()
    }))
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * hermitian_trace_norm(&diff, 1e-8)?)
}

/// Lifts a `2^k`-dimensional operator acting on `targets` (first target most
/// significant) to the full `n`-qubit space.
pub fn embed_operator(op: &ComplexMatrix, targets: &[usize], n: usize) -> Result<ComplexMatrix> {
    let k = targets.len();
    if op.rows() != 1 << k || !op.is_square() {
        return Err(Error::DimensionMismatch { expected: 1 << k, found: op.rows() });
    }
    let mut seen = targets.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != k || seen.iter().any(|&q| q >= n) {
        return Err(Error::InvalidArgument(format!("bad target set {targets:?} for {n} qubits")));
    }
    let bits: Vec<usize> = targets.iter().map(|&q| 1usize << (n - 1 - q)).collect();
    let mask: usize = bits.iter().sum();
    let local = |b: usize| bits.iter().fold(0usize, |acc, &bit| (acc << 1) | usize::from(b & bit != 0));
    let global = |rest: usize, t: usize| {
        bits.iter().enumerate().fold(rest, |acc, (i, &bit)| if (t >> (k - 1 - i)) & 1 == 1 { acc | bit } else { acc })
    };
    let dim = 1usize << n;
    let mut full = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let t_in = local(col);
        let rest = col & !mask;
        for t_out in 0..(1 << k) {
            let v = op[(t_out, t_in)];
            if v != ZERO {
                full[(global(rest, t_out), col)] = v;
            }
        }
    }
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> DensityMatrix {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        DensityMatrix::from_pure(&StateVector::new(vec![s, ZERO, ZERO, s]).unwrap())
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        for q in 0..2 {
            let r = partial_trace(&bell(), &[q]).unwrap();
            assert!(r.matrix().max_abs_diff(&DensityMatrix::maximally_mixed(1).into_matrix()) < 1e-12);
        }
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let a = DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Complex64::new(if i == 0 { 0.7 } else { 0.3 }, 0.0)
            } else if i == 0 {
                Complex64::new(0.2, 0.1)
            } else {
                Complex64::new(0.2, -0.1)
            }
        }))
        .unwrap();
        let b = DensityMatrix::basis(1, 1).unwrap();
        let ab = a.tensor(&b);
        assert!(partial_trace(&ab, &[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-15);
        assert!(partial_trace(&ab, &[1]).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn keep_set_errors() {
        let r = bell();
        assert!(partial_trace(&r, &[]).is_err());
        assert!(partial_trace(&r, &[2]).is_err());
        assert!(partial_trace(&r, &[0, 0]).is_err());
    }

    #[test]
    fn orthogonal_pure_states_are_distance_one() {
        let a = DensityMatrix::basis(1, 0).unwrap();
        let b = DensityMatrix::basis(1, 1).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        assert!(trace_distance(&a, &bell()).is_err());
    }

    #[test]
    fn invalid_states_are_rejected() {
        let not_unit_trace = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(not_unit_trace).is_err());
        let negative = ComplexMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
        assert!(DensityMatrix::new(negative).is_err());
        assert!(StateVector::new(vec![ONE, ONE]).is_err());
        assert!(StateVector::from_label("01x").is_err());
    }

    #[test]
    fn label_ordering_is_big_endian() {
        let s = StateVector::from_label("01").unwrap();
        assert_eq!(s.amplitudes()[1], ONE);
    }

    #[test]
    fn embedding_matches_kron() {
        let x = super::super::pauli::Pauli::X.matrix();
        let z = super::super::pauli::Pauli::Z.matrix();
        let xz = x.kron(&z);
        // X on qubit 2, Z on qubit 0 of three qubits: Z ⊗ I ⊗ X
        let full = embed_operator(&xz, &[2, 0], 3).unwrap();
        let expected = z.kron(&ComplexMatrix::identity(2)).kron(&x);
        assert!(full.max_abs_diff(&expected) < 1e-15);
    }
}
