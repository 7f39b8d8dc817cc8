//! Lindblad models in Pauli-sum form.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, ONE};
use crate::linalg::pauli::pauli_decompose;
use crate::linalg::{PauliString, UnitaryOp};

/// Coefficients below this modulus are dropped from Pauli decompositions.
const DECOMPOSITION_TOL: f64 = 1e-14;

fn check_term(n: usize, beta: f64, p: &PauliString) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("Pauli coefficient {beta} must be positive and finite")));
    }
    if p.n_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.n_qubits() });
    }
    Ok(())
}

/// `H = Σ_k β_k V_k` with `β_k > 0` and each `V_k` a Hermitian Pauli string.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl HamiltonianSpec {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("a register needs at least one qubit".into()));
        }
        for (beta, p) in &terms {
            check_term(n_qubits, *beta, p)?;
            if !p.is_hermitian() {
                return Err(Error::NotHermitian(format!("Hamiltonian term {p} has a non-real phase")));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    /// Builds from real signed coefficients: a negative sign moves into the
    /// string's phase and zero terms are dropped.
    pub fn from_signed(n_qubits: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for &(c, s) in terms {
            if c == 0.0 {
                continue;
            }
            let p: PauliString = s.parse()?;
            let p = if c < 0.0 { p.with_phase(-ONE)? } else { p };
            out.push((c.abs(), p));
        }
        Self::new(n_qubits, out)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let d = 1usize << self.n_qubits;
        let mut h = ComplexMatrix::zeros(d, d);
        for (beta, p) in &self.terms {
            h.add_scaled(Complex64::new(*beta, 0.0), &p.to_matrix());
        }
        h
    }

    /// `Σ_k β_k`.
    pub fn pauli_norm(&self) -> f64 {
        self.terms.iter().map(|(b, _)| b).sum()
    }
}

/// A jump operator `L = Σ_k β_k V_k`, optionally known to equal `α U` with `U`
/// unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpSpec {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    unitary_form: Option<(Complex64, UnitaryOp)>,
}

impl JumpSpec {
    /// A Pauli sum. A single term is automatically in unitary form.
    pub fn pauli_sum(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (beta, p) in &terms {
            check_term(n_qubits, *beta, p)?;
        }
        let unitary_form = match terms.as_slice() {
            [(beta, p)] => {
                let bare = p.clone().with_phase(ONE)?;
                Some((p.phase() * *beta, UnitaryOp::Pauli(bare)))
            }
            _ => None,
        };
        Ok(Self { n_qubits, terms, unitary_form })
    }

    /// `L = α U`.
    pub fn unitary(alpha: Complex64, u: UnitaryOp) -> Result<Self> {
        let n_qubits = u.n_qubits();
        if !alpha.norm().is_finite() {
            return Err(Error::InvalidArgument(format!("jump amplitude {alpha} is not finite")));
        }
        let terms = if alpha.norm() == 0.0 {
            Vec::new()
        } else {
            match &u {
                UnitaryOp::Pauli(p) => {
                    let combined = p.phase() * alpha / alpha.norm();
                    vec![(alpha.norm(), p.clone().with_phase(combined)?)]
                }
                UnitaryOp::Matrix(m) => phased_terms(&m.scale(alpha))?,
            }
        };
        Ok(Self { n_qubits, terms, unitary_form: Some((alpha, u)) })
    }

    /// An arbitrary jump matrix, expanded in the Pauli basis. Unitary form is
    /// detected when `L†L` is proportional to the identity.
    pub fn from_matrix(l: &ComplexMatrix) -> Result<Self> {
        let d = l.dim()?;
        let n_qubits = crate::linalg::state::qubits_for_dim(d)?;
        let terms = phased_terms(l)?;
        let ltl = l.adjoint().matmul(l);
        let scale = ltl.trace().re / d as f64;
        let unitary_form = if scale > 0.0 && ltl.max_abs_diff(&ComplexMatrix::identity(d).scale_real(scale)) <= 1e-12 * scale.max(1.0) {
            let alpha = scale.sqrt();
            Some((Complex64::new(alpha, 0.0), UnitaryOp::matrix(l.scale_real(1.0 / alpha))?))
        } else {
            None
        };
        Ok(Self { n_qubits, terms, unitary_form })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn unitary_form(&self) -> Option<&(Complex64, UnitaryOp)> {
        self.unitary_form.as_ref()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        if let Some((alpha, u)) = &self.unitary_form {
            return u.to_matrix().scale(*alpha);
        }
        let d = 1usize << self.n_qubits;
        let mut l = ComplexMatrix::zeros(d, d);
        for (beta, p) in &self.terms {
            l.add_scaled(Complex64::new(*beta, 0.0), &p.to_matrix());
        }
        l
    }

    /// `(Σ_k β_k)²`.
    pub fn pauli_norm(&self) -> f64 {
        let s: f64 = self.terms.iter().map(|(b, _)| b).sum();
        s * s
    }
}

fn phased_terms(m: &ComplexMatrix) -> Result<Vec<(f64, PauliString)>> {
    pauli_decompose(m, DECOMPOSITION_TOL)?
        .into_iter()
        .map(|(c, p)| {
            let beta = c.norm();
            Ok((beta, p.with_phase(c / beta)?))
        })
        .collect()
}

/// `L = H + D` with `D(ρ) = Σ_μ L_μ ρ L_μ† − ½{L_μ†L_μ, ρ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LindbladSpec {
    hamiltonian: HamiltonianSpec,
    jumps: Vec<JumpSpec>,
}

impl LindbladSpec {
    pub fn new(hamiltonian: HamiltonianSpec, jumps: Vec<JumpSpec>) -> Result<Self> {
        let n = hamiltonian.n_qubits();
        if let Some(j) = jumps.iter().find(|j| j.n_qubits() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: j.n_qubits() });
        }
        Ok(Self { hamiltonian, jumps })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[JumpSpec] {
        &self.jumps
    }

    pub fn with_hamiltonian(&self, hamiltonian: HamiltonianSpec) -> Result<Self> {
        Self::new(hamiltonian, self.jumps.clone())
    }

    pub fn dissipator_only(&self) -> Self {
        Self { hamiltonian: HamiltonianSpec::zero(self.n_qubits()), jumps: self.jumps.clone() }
    }

    pub fn hamiltonian_only(&self) -> Self {
        Self { hamiltonian: self.hamiltonian.clone(), jumps: Vec::new() }
    }

    /// `(α_μ, U_μ)` for every jump, or `None` if any jump lacks unitary form.
    pub fn unitary_jumps(&self) -> Option<Vec<(Complex64, UnitaryOp)>> {
        self.jumps.iter().map(|j| j.unitary_form().cloned()).collect()
    }
}

/// `‖L‖_pauli = Σ_k β_0k + Σ_μ (Σ_k β_μk)²`.
pub fn pauli_norm(spec: &LindbladSpec) -> f64 {
    spec.hamiltonian().pauli_norm() + dissipator_pauli_norm(spec)
}

/// The dissipator part `Σ_μ (Σ_k β_μk)²` of the Pauli norm.
pub fn dissipator_pauli_norm(spec: &LindbladSpec) -> f64 {
    spec.jumps().iter().map(JumpSpec::pauli_norm).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::I;
    use crate::linalg::Pauli;

    #[test]
    fn signed_hamiltonian_is_hermitian() {
        let h = HamiltonianSpec::from_signed(2, &[(0.5, "XI"), (-0.3, "ZZ"), (0.0, "YY")]).unwrap();
        assert_eq!(h.terms().len(), 2);
        assert!(h.matrix().is_hermitian(1e-14));
        assert!((h.pauli_norm() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_rejects_bad_terms() {
        let p: PauliString = "X".parse().unwrap();
        assert!(HamiltonianSpec::new(1, vec![(-1.0, p.clone())]).is_err());
        assert!(HamiltonianSpec::new(1, vec![(1.0, p.clone().with_phase(I).unwrap())]).is_err());
        assert!(HamiltonianSpec::new(2, vec![(1.0, p)]).is_err());
    }

    #[test]
    fn unitary_jump_realizes_alpha_u() {
        let alpha = Complex64::new(0.3, -0.4);
        let z = PauliString::single(2, 1, Pauli::Z).unwrap();
        let j = JumpSpec::unitary(alpha, UnitaryOp::Pauli(z.clone())).unwrap();
        assert!((j.pauli_norm() - 0.25).abs() < 1e-15);
        let (beta, p) = &j.terms()[0];
        let from_terms = p.to_matrix().scale_real(*beta);
        assert!(from_terms.max_abs_diff(&z.to_matrix().scale(alpha)) < 1e-15);
    }

    #[test]
    fn matrix_jump_detects_unitary_form() {
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).scale_real(0.5f64.sqrt());
        let j = JumpSpec::from_matrix(&h.scale_real(0.7)).unwrap();
        let (alpha, u) = j.unitary_form().unwrap();
        assert!((alpha.re - 0.7).abs() < 1e-12);
        assert!(u.to_matrix().max_abs_diff(&h) < 1e-12);
        // Hadamard = (X + Z)/√2, so the Pauli norm is (0.7·√2)².
        assert!((j.pauli_norm() - 0.98).abs() < 1e-12);

        let lowering = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(JumpSpec::from_matrix(&lowering).unwrap().unitary_form().is_none());
    }

    #[test]
    fn mismatched_qubit_counts_rejected() {
        let j = JumpSpec::unitary(ONE, UnitaryOp::identity(2)).unwrap();
        assert!(LindbladSpec::new(HamiltonianSpec::zero(1), vec![j]).is_err());
    }

    #[test]
    fn pauli_norm_direct_sum() {
        let h = HamiltonianSpec::from_signed(2, &[(0.5, "XI"), (0.3, "IZ")]).unwrap();
        let spec = LindbladSpec::new(h, vec![]).unwrap();
        assert!((pauli_norm(&spec) - 0.8).abs() < 1e-15);
    }
}
