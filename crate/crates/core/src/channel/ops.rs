use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::{DensityMatrix, StateVector, UnitaryOp};

/// Tolerance on probability vectors summing to one.
pub const PROBABILITY_TOL: f64 = 1e-12;

pub(crate) fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidArgument("empty probability vector".into()));
    }
    if let Some(bad) = p.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(format!("probability {bad} is negative or not finite")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// A pure-state ensemble `Σ_j w_j |ψ_j⟩⟨ψ_j|`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<(f64, StateVector)>,
    dist: WeightedIndex<f64>,
    rho: DensityMatrix,
}

impl PartialEq for Ensemble {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Ensemble {
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        let weights: Vec<f64> = members.iter().map(|(w, _)| *w).collect();
        check_probabilities(&weights)?;
        let n = members[0].1.n_qubits();
        if let Some((_, s)) = members.iter().find(|(_, s)| s.n_qubits() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: s.n_qubits() });
        }
        let parts: Vec<(f64, DensityMatrix)> =
            members.iter().map(|(w, s)| (*w, DensityMatrix::from_pure(s))).collect();
        let rho = DensityMatrix::mixture(&parts)?;
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { members, dist, rho })
    }

    pub fn pure(state: StateVector) -> Self {
        Self::new(vec![(1.0, state)]).expect("single unit-weight member is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.rho.n_qubits()
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    pub fn density_matrix(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &StateVector {
        &self.members[self.dist.sample(rng)].1
    }
}

/// One operation a sampled branch applies.
#[derive(Clone, Debug, PartialEq)]
pub enum PrimitiveOperation {
    Unitary(UnitaryOp),
    /// Discards the input and prepares the ensemble state.
    Prepare(Arc<Ensemble>),
}

impl PrimitiveOperation {
    pub fn n_qubits(&self) -> usize {
        match self {
            PrimitiveOperation::Unitary(u) => u.n_qubits(),
            PrimitiveOperation::Prepare(e) => e.n_qubits(),
        }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match self {
            PrimitiveOperation::Unitary(u) => u.conjugate(rho),
            PrimitiveOperation::Prepare(e) => e.density_matrix().matrix().scale(rho.trace()),
        }
    }

    /// Trajectory update of a pure state.
    pub fn apply_to_state<R: Rng + ?Sized>(&self, psi: &mut StateVector, rng: &mut R) {
        match self {
            PrimitiveOperation::Unitary(u) => psi.apply_unitary(u),
            PrimitiveOperation::Prepare(e) => *psi = e.sample(rng).clone(),
        }
    }

    /// Column-stacked superoperator matrix.
    pub fn superoperator_matrix(&self) -> ComplexMatrix {
        match self {
            PrimitiveOperation::Unitary(u) => u.superoperator_matrix(),
            PrimitiveOperation::Prepare(e) => {
                let d = 1usize << e.n_qubits();
                let id = ComplexMatrix::identity(d).vec_columns();
                ComplexMatrix::outer(&e.density_matrix().matrix().vec_columns(), &id)
            }
        }
    }
}
