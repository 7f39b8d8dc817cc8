use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::{DensityMatrix, PauliString, StateVector};

/// A Hermitian observable `O = Σ_k c_k P_k` with real `c_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Observable {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (c, p) in &terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch { expected: n_qubits, found: p.n_qubits() });
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("observable coefficient {c} is not finite")));
            }
            if !p.is_hermitian() {
                return Err(Error::NotHermitian(format!("observable term {p} has a non-real phase")));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    /// Parses `(coefficient, "XZ")` pairs.
    pub fn from_pairs(n_qubits: usize, pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs.iter().map(|&(c, s)| Ok((c, s.parse()?))).collect::<Result<Vec<_>>>()?;
        Self::new(n_qubits, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let d = 1usize << self.n_qubits;
        let mut m = ComplexMatrix::zeros(d, d);
        for (c, p) in &self.terms {
            m.add_scaled(Complex64::new(*c, 0.0), &p.to_matrix());
        }
        m
    }

    /// `tr(O ρ)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        self.terms.iter().map(|(c, p)| c * p.overlap(rho.matrix()).re).sum()
    }

    /// `⟨ψ|O|ψ⟩`, applying each string symbolically.
    pub fn expectation_state(&self, psi: &StateVector) -> f64 {
        let amps = psi.amplitudes();
        let mut scratch = amps.to_vec();
        let mut total = 0.0;
        for (c, p) in &self.terms {
            scratch.copy_from_slice(amps);
            p.apply_to_state(&mut scratch);
            let v: Complex64 = amps.iter().zip(&scratch).map(|(a, b)| a.conj() * b).sum();
            total += c * v.re;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_and_matrix_expectations_agree() {
        let o = Observable::from_pairs(2, &[(0.5, "ZI"), (-1.5, "XY"), (0.25, "YY")]).unwrap();
        let psi = StateVector::normalized(vec![
            Complex64::new(0.1, 0.4),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.2, -0.5),
        ])
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let direct = psi.expectation(&o.matrix());
        assert!((o.expectation_state(&psi) - direct).abs() < 1e-14);
        assert!((o.expectation(&rho) - direct).abs() < 1e-14);
    }

    #[test]
    fn imaginary_phase_rejected() {
        let p: PauliString = "XZ".parse::<PauliString>().unwrap().with_phase(Complex64::new(0.0, 1.0)).unwrap();
        assert!(matches!(Observable::new(2, vec![(1.0, p)]), Err(Error::NotHermitian(_))));
    }
}
