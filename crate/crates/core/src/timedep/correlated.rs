use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::channel::{Ensemble, SampledOperation, CHANNEL_STATE_TOL, PROBABILITY_TOL};
use crate::engine::{run_trajectories, simulate_trajectories, SimulationPlan, TrajectoryResult};
use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::DensityMatrix;

/// Joint distribution of branch indices across steps.
#[derive(Clone, Debug, PartialEq)]
pub enum CorrelationPolicy {
    Independent,
    /// The branch drawn at the first step is reused at every step.
    FullyCorrelated,
    /// Step `k` draws its branch from row `branch(k − 1)`.
    MarkovChain(Vec<Vec<f64>>),
}

impl CorrelationPolicy {
    pub fn validate(&self) -> Result<()> {
        if let CorrelationPolicy::MarkovChain(rows) = self {
            let m = rows.len();
            if m == 0 {
                return Err(Error::InvalidArgument("empty transition matrix".into()));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != m {
                    return Err(Error::InvalidArgument(format!("transition row {i} has {} entries, expected {m}", row.len())));
                }
                if row.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
                    return Err(Error::InvalidArgument(format!("transition row {i} has a negative entry")));
                }
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > PROBABILITY_TOL {
                    return Err(Error::InvalidArgument(format!("transition row {i} sums to {s}")));
                }
            }
        }
        Ok(())
    }
}

/// Branch count shared by every step channel, required by correlated
/// policies that reuse or chain branch indices.
fn explicit_branch_count(plan: &SimulationPlan) -> Result<usize> {
    let mut count = None;
    for step in 0..plan.steps() as usize {
        let b = plan
            .channel(step)
            .branches()
            .ok_or_else(|| Error::NotSimulatable("branch correlations need explicit channels".into()))?;
        match count {
            None => count = Some(b.len()),
            Some(c) if c != b.len() => {
                return Err(Error::InvalidArgument("step channels have different branch counts".into()));
            }
            _ => {}
        }
    }
    Ok(count.unwrap_or(0))
}

fn explicit_op(plan: &SimulationPlan, step: usize, i: usize) -> SampledOperation {
    plan.channel(step).branch_operation(i).expect("branch counts checked")
}

/// Trajectories under a correlated sampling policy.
pub fn correlated_run(plan: &SimulationPlan, policy: &CorrelationPolicy, initial: &Ensemble) -> Result<TrajectoryResult> {
    policy.validate()?;
    match policy {
        CorrelationPolicy::Independent => run_trajectories(plan, initial),
        CorrelationPolicy::FullyCorrelated => {
            // Random-composition channels reuse the whole sampled unitary.
            let explicit = plan.steps() == 0 || plan.channel(0).branches().is_some();
            if explicit {
                explicit_branch_count(plan)?;
            }
            simulate_trajectories(plan, initial, |plan, step, prev, rng| match prev {
                None => plan.channel(step).sample(rng),
                Some(p) if explicit => explicit_op(plan, step, p.branch),
                Some(p) => p.clone(),
            })
        }
        CorrelationPolicy::MarkovChain(rows) => {
            let m = explicit_branch_count(plan)?;
            if plan.steps() > 0 && m != rows.len() {
                return Err(Error::DimensionMismatch { expected: m, found: rows.len() });
            }
            let dists = rows
                .iter()
                .map(|r| WeightedIndex::new(r).map_err(|e| Error::InvalidArgument(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            simulate_trajectories(plan, initial, move |plan, step, prev, rng| match prev {
                None => plan.channel(step).sample(rng),
                Some(p) => explicit_op(plan, step, dists[p.branch].sample(rng)),
            })
        }
    }
}

/// Exact ensemble average implied by a policy, tracking the
/// branch-conditioned (unnormalized) states `σ_i`.
pub fn correlated_reference(
    plan: &SimulationPlan,
    policy: &CorrelationPolicy,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    policy.validate()?;
    if rho0.n_qubits() != plan.n_qubits() {
        return Err(Error::DimensionMismatch { expected: plan.n_qubits(), found: rho0.n_qubits() });
    }
    let r = plan.steps() as usize;
    if r == 0 {
        return Ok(rho0.clone());
    }
    let m = explicit_branch_count(plan)?;
    if let CorrelationPolicy::MarkovChain(rows) = policy {
        if rows.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: rows.len() });
        }
    }
    let ham = plan.hamiltonian_subroutine();
    let u = ham.unitary();
    let gadget = |step: usize, i: usize, x: &ComplexMatrix| -> ComplexMatrix {
        let op = &plan.channel(step).branches().expect("checked explicit")[i].1;
        if ham.is_trivial() {
            op.apply(x)
        } else {
            u.conjugate(&op.apply(&u.conjugate(x)))
        }
    };
    let probs = |step: usize| -> Vec<f64> {
        plan.channel(step).branches().expect("checked explicit").iter().map(|(p, _)| *p).collect()
    };
    let p0 = probs(0);
    let mut sigma: Vec<ComplexMatrix> = (0..m).map(|i| gadget(0, i, rho0.matrix()).scale_real(p0[i])).collect();
    for step in 1..r {
        let pk = probs(step);
        let total = sigma.iter().fold(ComplexMatrix::zeros(rho0.dim(), rho0.dim()), |acc, s| &acc + s);
        sigma = (0..m)
            .map(|j| {
                let incoming = match policy {
                    CorrelationPolicy::Independent => total.scale_real(pk[j]),
                    CorrelationPolicy::FullyCorrelated => sigma[j].clone(),
                    CorrelationPolicy::MarkovChain(rows) => {
                        let mut acc = ComplexMatrix::zeros(rho0.dim(), rho0.dim());
                        for (i, s) in sigma.iter().enumerate() {
                            acc.add_scaled(Complex64::new(rows[i][j], 0.0), s);
                        }
                        acc
                    }
                };
                gadget(step, j, &incoming)
            })
            .collect();
    }
    let total = sigma.iter().fold(ComplexMatrix::zeros(rho0.dim(), rho0.dim()), |acc, s| &acc + s);
    DensityMatrix::with_tolerance(total, CHANNEL_STATE_TOL)
}
