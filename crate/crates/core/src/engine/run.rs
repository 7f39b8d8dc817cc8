use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::plan::{Mode, SimulationPlan, TrajectoryConfig};
use crate::channel::{Ensemble, SampledOperation, CHANNEL_STATE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, StateVector};
use crate::model::{Superoperator, DEFAULT_QUBIT_CAP};

/// Sample mean of an observable over independent trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryResult {
    pub estimate: f64,
    /// Sample standard deviation over `√n_traj`.
    pub std_error: f64,
    pub n_traj: usize,
    /// Preparation branches taken, summed over trajectories and steps.
    pub prep_count: u64,
    /// `length_histogram[k]` counts unitary draws composed of `k` factors.
    pub length_histogram: Vec<u64>,
}

/// `K̂ N̂_step K̂` as a dense superoperator.
pub fn gadget_superoperator(plan: &SimulationPlan, step: usize) -> Result<Superoperator> {
    let n = plan.n_qubits();
    if n > DEFAULT_QUBIT_CAP {
        return Err(Error::CapExceeded { n, cap: DEFAULT_QUBIT_CAP });
    }
    let k = plan.hamiltonian_subroutine().superoperator()?;
    let nn = plan.channel(step).superoperator()?;
    k.compose(&nn)?.compose(&k)
}

/// Applies the gadget `r` times with exact channel averaging, validating the
/// state after every step.
pub fn run_density_matrix(plan: &SimulationPlan, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if rho0.n_qubits() != plan.n_qubits() {
        return Err(Error::DimensionMismatch { expected: plan.n_qubits(), found: rho0.n_qubits() });
    }
    let ham = plan.hamiltonian_subroutine();
    let u = ham.unitary();
    let mut rho = rho0.matrix().clone();
    for step in 0..plan.steps() as usize {
        if !ham.is_trivial() {
            rho = u.conjugate(&rho);
        }
        rho = plan.channel(step).apply_matrix(&rho);
        if !ham.is_trivial() {
            rho = u.conjugate(&rho);
        }
        rho = DensityMatrix::with_tolerance(rho, CHANNEL_STATE_TOL)
            .map_err(|e| Error::ValidityViolated(format!("state invalid after step {}: {e}", step + 1)))?
            .into_matrix();
    }
    DensityMatrix::with_tolerance(rho, CHANNEL_STATE_TOL)
}

/// Independent Monte Carlo trajectories; needs [`Mode::Trajectories`].
pub fn run_trajectories(plan: &SimulationPlan, initial: &Ensemble) -> Result<TrajectoryResult> {
    simulate_trajectories(plan, initial, |plan, step, _, rng| plan.channel(step).sample(rng))
}

pub(crate) fn trajectory_config(plan: &SimulationPlan) -> Result<&TrajectoryConfig> {
    match plan.mode() {
        Mode::Trajectories(cfg) => Ok(cfg),
        Mode::DensityMatrix => Err(Error::InvalidArgument("plan is not in trajectory mode".into())),
    }
}

/// The random stream of trajectory `j`: one ChaCha stream per index.
pub fn trajectory_rng(seed: u64, j: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j);
    rng
}

struct Outcome {
    value: f64,
    preps: u64,
    lengths: Vec<u64>,
}

/// Runs every trajectory with `sample(plan, step, previous, rng)` choosing
/// the operation at each step.
pub(crate) fn simulate_trajectories<S>(plan: &SimulationPlan, initial: &Ensemble, sample: S) -> Result<TrajectoryResult>
where
    S: Fn(&SimulationPlan, usize, Option<&SampledOperation>, &mut ChaCha8Rng) -> SampledOperation + Sync,
{
    let cfg = trajectory_config(plan)?;
    if initial.n_qubits() != plan.n_qubits() {
        return Err(Error::DimensionMismatch { expected: plan.n_qubits(), found: initial.n_qubits() });
    }
    let ham = plan.hamiltonian_subroutine();
    let half = ham.shared_unitary();
    let full = plan.full_step.clone();
    let r = plan.steps() as usize;

    let run_one = |j: usize| -> Outcome {
        let mut rng = trajectory_rng(cfg.seed, j as u64);
        let mut psi: StateVector = initial.sample(&mut rng).clone();
        let mut preps = 0u64;
        let mut lengths = Vec::new();
        let mut prev: Option<SampledOperation> = None;
        for step in 0..r {
            if !ham.is_trivial() {
                psi.apply_matrix(if step == 0 { &half } else { &full });
            }
            let s = sample(plan, step, prev.as_ref(), &mut rng);
            match &s.op {
                crate::channel::PrimitiveOperation::Prepare(_) => preps += 1,
                crate::channel::PrimitiveOperation::Unitary(_) => {
                    if lengths.len() <= s.length {
                        lengths.resize(s.length + 1, 0);
                    }
                    lengths[s.length] += 1;
                }
            }
            s.op.apply_to_state(&mut psi, &mut rng);
            prev = Some(s);
        }
        if r > 0 && !ham.is_trivial() {
            psi.apply_matrix(&half);
        }
        Outcome { value: cfg.observable.expectation_state(&psi), preps, lengths }
    };

    let outcomes: Vec<Outcome> = (0..cfg.n_traj).into_par_iter().map(run_one).collect();

    let values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    let (estimate, std_error) = mean_and_std_error(&values);
    let prep_count = outcomes.iter().map(|o| o.preps).sum();
    let width = outcomes.iter().map(|o| o.lengths.len()).max().unwrap_or(0);
    let mut length_histogram = vec![0u64; width];
    for o in &outcomes {
        for (h, c) in length_histogram.iter_mut().zip(&o.lengths) {
            *h += c;
        }
    }
    Ok(TrajectoryResult { estimate, std_error, n_traj: cfg.n_traj, prep_count, length_histogram })
}

/// Neumaier-compensated sum in slice order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        c += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + c
}

pub(crate) fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0) / n).sqrt())
}
