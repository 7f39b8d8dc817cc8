use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, I};
use crate::linalg::{matrix_exp, PauliString};
use crate::model::{HamiltonianSpec, Superoperator};

/// Which closed-system integrator realizes `exp(dt/2 · H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SubroutineKind {
    #[default]
    ExactExp,
    /// First-order product of Pauli rotations; the inner step count is
    /// chosen from the error budget.
    TrotterPauli,
}

/// A half-step unitary `K ≈ exp(−i H dt/2)` with its certified diamond error.
#[derive(Clone, Debug)]
pub struct HamiltonianSubroutine {
    kind: SubroutineKind,
    inner_steps: usize,
    eps_h: f64,
    unitary: Arc<ComplexMatrix>,
    trivial: bool,
}

impl HamiltonianSubroutine {
    pub fn kind(&self) -> SubroutineKind {
        self.kind
    }

    /// Trotter repetitions per half step (1 for exact exponentials).
    pub fn inner_steps(&self) -> usize {
        self.inner_steps
    }

    /// Certified `‖exp(dt/2 · Ĥ) − K‖◇`.
    pub fn eps_h(&self) -> f64 {
        self.eps_h
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub(crate) fn shared_unitary(&self) -> Arc<ComplexMatrix> {
        Arc::clone(&self.unitary)
    }

    /// `true` when `H = 0`, so `K` is the identity.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn superoperator(&self) -> Result<Superoperator> {
        Superoperator::unitary_conjugation(&self.unitary)
    }
}

/// `Σ_{j<k, anticommuting} β_j β_k`, half the summed commutator norms.
pub fn anticommuting_weight(h: &HamiltonianSpec) -> f64 {
    let t = h.terms();
    let mut s = 0.0;
    for j in 0..t.len() {
        for k in j + 1..t.len() {
            if !t[j].1.commutes_with(&t[k].1) {
                s += t[j].0 * t[k].0;
            }
        }
    }
    s
}

/// Certified diamond error of `N` first-order Trotter steps over time `tau_total`:
/// `2 · N (τ²/2) Σ_{j<k} ‖[A_j, A_k]‖ = 2 τ_total² S / N`.
pub fn trotter_error_bound(h: &HamiltonianSpec, tau_total: f64, inner_steps: usize) -> f64 {
    2.0 * tau_total * tau_total * anticommuting_weight(h) / inner_steps as f64
}

/// `exp(−i β P τ) = cos(βτ) I − i sin(βτ) P` for Hermitian `P`.
fn pauli_rotation(beta: f64, p: &PauliString, tau: f64) -> ComplexMatrix {
    let d = 1usize << p.n_qubits();
    let mut u = ComplexMatrix::identity(d).scale_real((beta * tau).cos());
    u.add_scaled(-I * (beta * tau).sin(), &p.to_matrix());
    u
}

pub fn build_ham_subroutine(
    h: &HamiltonianSpec,
    dt: f64,
    eps_h_budget: f64,
    kind: SubroutineKind,
) -> Result<HamiltonianSubroutine> {
    if !(eps_h_budget >= 0.0) {
        return Err(Error::InvalidArgument(format!("Hamiltonian error budget {eps_h_budget} must be nonnegative")));
    }
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be finite and nonnegative")));
    }
    let d = 1usize << h.n_qubits();
    let half = dt / 2.0;
    match kind {
        SubroutineKind::ExactExp => {
            let u = matrix_exp(&h.matrix(), Complex64::new(0.0, -half))?;
            Ok(HamiltonianSubroutine { kind, inner_steps: 1, eps_h: 0.0, unitary: Arc::new(u), trivial: h.is_zero() })
        }
        SubroutineKind::TrotterPauli => {
            if eps_h_budget == 0.0 {
                return Err(Error::InvalidArgument("a product-formula subroutine needs a positive error budget".into()));
            }
            let inner_steps = if anticommuting_weight(h) == 0.0 {
                1
            } else {
                let total: f64 = h.terms().iter().map(|(b, _)| b).sum();
                let n = ((total * half).powi(2) / (eps_h_budget / 2.0)).ceil();
                if n > 1e7 {
                    return Err(Error::InvalidArgument(format!("Hamiltonian budget {eps_h_budget} needs {n} Trotter steps")));
                }
                (n as usize).max(1)
            };
            let tau = half / inner_steps as f64;
            let mut step = ComplexMatrix::identity(d);
            for (beta, p) in h.terms() {
                step = pauli_rotation(*beta, p, tau).matmul(&step);
            }
            let u = step.pow(inner_steps as u64);
            let eps_h = trotter_error_bound(h, half, inner_steps);
            Ok(HamiltonianSubroutine { kind, inner_steps, eps_h, unitary: Arc::new(u), trivial: h.is_zero() })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{diamond_bounds, hamiltonian_superoperator};

    #[test]
    fn single_term_trotter_is_exact() {
        let h = HamiltonianSpec::from_signed(2, &[(0.9, "XY")]).unwrap();
        let t = build_ham_subroutine(&h, 0.4, 1e-6, SubroutineKind::TrotterPauli).unwrap();
        let e = build_ham_subroutine(&h, 0.4, 0.0, SubroutineKind::ExactExp).unwrap();
        assert_eq!(t.inner_steps(), 1);
        assert_eq!(t.eps_h(), 0.0);
        assert!(t.unitary().max_abs_diff(e.unitary()) < 1e-14);
    }

    #[test]
    fn certified_bound_dominates_measured_error() {
        let h = HamiltonianSpec::from_signed(1, &[(1.0, "X"), (1.0, "Z")]).unwrap();
        let dt = 0.2;
        let exact = hamiltonian_superoperator(&h).unwrap().exp(dt / 2.0).unwrap();
        for budget in [1e-2, 1e-3, 1e-4] {
            let t = build_ham_subroutine(&h, dt, budget, SubroutineKind::TrotterPauli).unwrap();
            let diff = exact.sub(&t.superoperator().unwrap()).unwrap();
            let measured = diamond_bounds(&diff).unwrap().upper;
            assert!(measured <= t.eps_h(), "{measured} > {}", t.eps_h());
            assert!(t.eps_h() <= budget);
        }
    }

    #[test]
    fn zero_budget_rejected_for_trotter() {
        let h = HamiltonianSpec::from_signed(1, &[(1.0, "X")]).unwrap();
        assert!(build_ham_subroutine(&h, 0.1, 0.0, SubroutineKind::TrotterPauli).is_err());
    }
}
