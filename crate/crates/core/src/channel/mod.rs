//! Stochastically simulatable channels: convex mixtures of unitary
//! conjugations and one fixed-state preparation.
//!
//! Short-time dissipators with unitary jump operators `L_μ = α_μ U_μ` become
//! random-composition channels through a truncated, renormalized Poisson
//! expansion of `exp(dt·D)` (see [`dissipator_to_stochastic`]).

mod examples;
mod ops;
mod taylor;

use std::sync::Arc;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

pub use examples::{make_example_channel, reset_lindbladian, ExampleChannel, ExampleKind};
pub use ops::{Ensemble, PrimitiveOperation, PROBABILITY_TOL};
pub use taylor::{poisson_tail, truncation_majorant, TaylorChannel, TaylorConfig};

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::{DensityMatrix, UnitaryOp};
use crate::model::{Superoperator, DEFAULT_QUBIT_CAP};
pub(crate) use ops::check_probabilities;

/// Output states of exact channel application are validated at this level.
pub const CHANNEL_STATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
enum Kind {
    Explicit { branches: Vec<(f64, PrimitiveOperation)>, dist: WeightedIndex<f64> },
    RandomComposition(TaylorChannel),
}

/// `N(ρ) = Σ_i p_i A_i(ρ)` with every `A_i` a unitary conjugation except at
/// most one state preparation.
#[derive(Clone, Debug)]
pub struct StochasticChannel {
    n_qubits: usize,
    kind: Kind,
}

/// One draw from a channel.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledOperation {
    pub op: PrimitiveOperation,
    /// Branch index for explicit mixtures, composition length otherwise.
    pub branch: usize,
    /// Number of non-trivial unitaries composed into `op` (zero for preparations).
    pub length: usize,
}

impl StochasticChannel {
    /// An explicit mixture; probabilities must sum to one and at most one
    /// branch may be a preparation.
    pub fn mixture(branches: Vec<(f64, PrimitiveOperation)>) -> Result<Self> {
        let probs: Vec<f64> = branches.iter().map(|(p, _)| *p).collect();
        check_probabilities(&probs)?;
        let n_qubits = branches[0].1.n_qubits();
        if let Some((_, op)) = branches.iter().find(|(_, op)| op.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch { expected: n_qubits, found: op.n_qubits() });
        }
        let preps = branches.iter().filter(|(_, op)| matches!(op, PrimitiveOperation::Prepare(_))).count();
        if preps > 1 {
            return Err(Error::NotSimulatable(format!("{preps} preparation branches; merge them into one ensemble")));
        }
        let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { n_qubits, kind: Kind::Explicit { branches, dist } })
    }

    /// `q Σ_i λ_i U_i ρ U_i† + (1 − q) ρ_f`.
    pub fn definition_one(q: f64, unitaries: Vec<(f64, UnitaryOp)>, prepare: Option<Ensemble>) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("q = {q} outside [0, 1]")));
        }
        let mut branches: Vec<(f64, PrimitiveOperation)> =
            unitaries.into_iter().map(|(l, u)| (q * l, PrimitiveOperation::Unitary(u))).collect();
        match prepare {
            Some(e) => branches.push((1.0 - q, PrimitiveOperation::Prepare(Arc::new(e)))),
            None if q != 1.0 => {
                return Err(Error::InvalidArgument("q < 1 requires a preparation ensemble".into()));
            }
            None => {}
        }
        Self::mixture(branches)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::mixture(vec![(1.0, PrimitiveOperation::Unitary(UnitaryOp::identity(n_qubits)))])
            .expect("identity channel is valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Explicit branches, or `None` for a random-composition channel.
    pub fn branches(&self) -> Option<&[(f64, PrimitiveOperation)]> {
        match &self.kind {
            Kind::Explicit { branches, .. } => Some(branches),
            Kind::RandomComposition(_) => None,
        }
    }

    pub fn taylor(&self) -> Option<&TaylorChannel> {
        match &self.kind {
            Kind::RandomComposition(t) => Some(t),
            Kind::Explicit { .. } => None,
        }
    }

    /// Total preparation probability `1 − q`.
    pub fn prepare_weight(&self) -> f64 {
        self.branches()
            .map(|b| b.iter().filter(|(_, op)| matches!(op, PrimitiveOperation::Prepare(_))).map(|(p, _)| p).sum())
            .unwrap_or(0.0)
    }

    /// `Σ_i p_i A_i(X)` on an arbitrary operator.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match &self.kind {
            Kind::Explicit { branches, .. } => {
                let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
                for (p, op) in branches {
                    if *p > 0.0 {
                        out.add_scaled(Complex64::new(*p, 0.0), &op.apply(x));
                    }
                }
                out
            }
            Kind::RandomComposition(t) => t.apply(x),
        }
    }

    pub fn apply_exact(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: rho.n_qubits() });
        }
        DensityMatrix::with_tolerance(self.apply_matrix(rho.matrix()), CHANNEL_STATE_TOL)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SampledOperation {
        match &self.kind {
            Kind::Explicit { dist, .. } => self.branch_operation(dist.sample(rng)).expect("sampled index is in range"),
            Kind::RandomComposition(t) => {
                let (u, k) = t.sample(rng);
                SampledOperation { op: PrimitiveOperation::Unitary(u), branch: k, length: k }
            }
        }
    }

    /// Branch `i` of an explicit mixture as a sample.
    pub fn branch_operation(&self, i: usize) -> Option<SampledOperation> {
        let (_, op) = self.branches()?.get(i)?;
        let length = match op {
            PrimitiveOperation::Unitary(UnitaryOp::Pauli(p)) if p.is_identity() => 0,
            PrimitiveOperation::Unitary(_) => 1,
            PrimitiveOperation::Prepare(_) => 0,
        };
        Some(SampledOperation { op: op.clone(), branch: i, length })
    }

    pub fn sample_operation<R: Rng + ?Sized>(&self, rng: &mut R) -> PrimitiveOperation {
        self.sample(rng).op
    }

    pub fn superoperator(&self) -> Result<Superoperator> {
        if self.n_qubits > DEFAULT_QUBIT_CAP {
            return Err(Error::CapExceeded { n: self.n_qubits, cap: DEFAULT_QUBIT_CAP });
        }
        let m = match &self.kind {
            Kind::Explicit { branches, .. } => {
                let d2 = 1usize << (2 * self.n_qubits);
                let mut m = ComplexMatrix::zeros(d2, d2);
                for (p, op) in branches {
                    if *p > 0.0 {
                        m.add_scaled(Complex64::new(*p, 0.0), &op.superoperator_matrix());
                    }
                }
                m
            }
            Kind::RandomComposition(t) => t.superoperator_matrix(),
        };
        Superoperator::new(self.n_qubits, m)
    }
}

/// Converts `D(ρ) = Σ_μ |α_μ|² (U_μ ρ U_μ† − ρ)` over one step into a
/// random-composition channel truncated at order `K`, together with the
/// diamond-norm error bound `2 Σ_{k>K} Poisson(a·dt; k)`.
///
/// An empty jump list (or all-zero amplitudes) yields the identity channel
/// with zero error.
pub fn dissipator_to_stochastic(
    n_qubits: usize,
    jumps: &[(Complex64, UnitaryOp)],
    dt: f64,
    k: usize,
) -> Result<(StochasticChannel, f64)> {
    if let Some((_, u)) = jumps.iter().find(|(_, u)| u.n_qubits() != n_qubits) {
        return Err(Error::DimensionMismatch { expected: n_qubits, found: u.n_qubits() });
    }
    let live: Vec<(Complex64, UnitaryOp)> = jumps.iter().filter(|(a, _)| a.norm_sqr() > 0.0).cloned().collect();
    let a: f64 = live.iter().map(|(alpha, _)| alpha.norm_sqr()).sum();
    if live.is_empty() {
        if !(dt >= 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step {dt} must be nonnegative")));
        }
        return Ok((StochasticChannel::identity(n_qubits), 0.0));
    }
    let config = TaylorConfig::new(k, a, dt)?;
    let bound = config.error_bound();
    let channel = TaylorChannel::new(&live, config)?;
    Ok((StochasticChannel { n_qubits, kind: Kind::RandomComposition(channel) }, bound))
}
