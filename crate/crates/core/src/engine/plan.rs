use std::sync::Arc;

use num_complex::Complex64;

use super::budget::{check_budget, jump_rate, resolve_steps, step_count_with_norms, taylor_order, GeneratorNorms};
use super::hamiltonian::{build_ham_subroutine, HamiltonianSubroutine, SubroutineKind};
use super::observable::Observable;
use crate::channel::{dissipator_to_stochastic, reset_lindbladian, Ensemble, StochasticChannel};
use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::UnitaryOp;
use crate::model::{dissipator_pauli_norm, pauli_norm, HamiltonianSpec, LindbladSpec};

/// How the dissipator is turned into a per-step stochastic channel.
#[derive(Clone, Debug)]
pub enum Dissipation {
    /// `L_μ = α_μ U_μ`, compiled by truncated random composition.
    UnitaryJumps(Vec<(Complex64, UnitaryOp)>),
    /// `D(ρ) = κ (tr(ρ) ρ_f − ρ)`, whose step channel is exactly
    /// `e^{−κ dt} ρ + (1 − e^{−κ dt}) ρ_f`.
    Reset { rate: f64, ensemble: Ensemble },
}

impl Dissipation {
    /// Unitary-form jumps of `spec`.
    pub fn from_spec(spec: &LindbladSpec) -> Result<Self> {
        spec.unitary_jumps().map(Dissipation::UnitaryJumps).ok_or_else(|| {
            Error::NotSimulatable("every jump operator must be a multiple of a unitary".into())
        })
    }

    /// Builds the step channel and its diamond-norm truncation bound.
    pub fn step_channel(&self, n_qubits: usize, dt: f64, k: usize) -> Result<(StochasticChannel, f64)> {
        match self {
            Dissipation::UnitaryJumps(jumps) => dissipator_to_stochastic(n_qubits, jumps, dt, k),
            Dissipation::Reset { rate, ensemble } => {
                let q = (-rate * dt).exp();
                let id = UnitaryOp::identity(n_qubits);
                Ok((StochasticChannel::definition_one(q, vec![(1.0, id)], Some(ensemble.clone()))?, 0.0))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryConfig {
    pub n_traj: usize,
    pub seed: u64,
    pub observable: Observable,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum Mode {
    #[default]
    DensityMatrix,
    Trajectories(TrajectoryConfig),
}

/// Knobs that override the automatic budget.
#[derive(Clone, Debug, Default)]
pub struct PlanOptions {
    pub subroutine: SubroutineKind,
    /// Fixed truncation order instead of the budgeted one.
    pub taylor_order: Option<usize>,
    /// Fixed step count instead of the budgeted one.
    pub steps: Option<u64>,
    pub mode: Mode,
}

/// Channels applied at each step.
#[derive(Clone, Debug)]
pub(crate) enum StepChannels {
    Fixed(StochasticChannel),
    PerStep(Vec<StochasticChannel>),
}

/// Target accuracy of a budgeted plan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub epsilon: f64,
    pub c0: f64,
}

/// Everything needed to run `r` gadget steps `K ∘ N ∘ K`.
#[derive(Clone, Debug)]
pub struct SimulationPlan {
    pub(crate) spec: LindbladSpec,
    pub(crate) t: f64,
    pub(crate) budget: Option<Budget>,
    pub(crate) r: u64,
    pub(crate) eps_h_budget: f64,
    pub(crate) mode: Mode,
    pub(crate) ham: HamiltonianSubroutine,
    pub(crate) full_step: Arc<ComplexMatrix>,
    pub(crate) taylor_k: usize,
    pub(crate) truncation_bound: f64,
    pub(crate) channels: StepChannels,
}

impl SimulationPlan {
    /// Budgeted plan for a spec whose jumps all have unitary form.
    pub fn new(spec: LindbladSpec, t: f64, epsilon: f64, c0: f64, options: PlanOptions) -> Result<Self> {
        let dissipation = Dissipation::from_spec(&spec)?;
        Self::build(spec, dissipation, t, epsilon, c0, options)
    }

    /// Budgeted plan for `H` plus a reset dissipator of rate `κ`.
    pub fn with_reset(
        hamiltonian: HamiltonianSpec,
        rate: f64,
        ensemble: Ensemble,
        t: f64,
        epsilon: f64,
        c0: f64,
        options: PlanOptions,
    ) -> Result<Self> {
        if ensemble.n_qubits() != hamiltonian.n_qubits() {
            return Err(Error::DimensionMismatch { expected: hamiltonian.n_qubits(), found: ensemble.n_qubits() });
        }
        let spec = reset_lindbladian(rate, &ensemble)?.with_hamiltonian(hamiltonian)?;
        Self::build(spec, Dissipation::Reset { rate, ensemble }, t, epsilon, c0, options)
    }

    fn build(
        spec: LindbladSpec,
        dissipation: Dissipation,
        t: f64,
        epsilon: f64,
        c0: f64,
        options: PlanOptions,
    ) -> Result<Self> {
        check_budget(t, epsilon, c0)?;
        let norms = GeneratorNorms::of(&spec)?;
        let rate = match &dissipation {
            Dissipation::UnitaryJumps(j) => j.iter().map(|(a, _)| a.norm_sqr()).sum(),
            Dissipation::Reset { .. } => 0.0,
        };
        let auto = step_count_with_norms(pauli_norm(&spec), &norms, rate, t, epsilon, c0);
        let r = resolve_steps(options.steps, auto.r, norms.validity_rate().max(rate), t)?;
        let dt = if r == 0 { 0.0 } else { t / r as f64 };
        let eps_h_budget = if r == 0 { 0.0 } else { epsilon / (4.0 * r as f64) };
        let taylor_k = match (&dissipation, options.taylor_order) {
            (Dissipation::Reset { .. }, _) => 0,
            (_, Some(k)) => k,
            (_, None) => taylor_order(jump_rate(&spec), dissipator_pauli_norm(&spec), dt, c0),
        };
        let (channel, truncation_bound) = if r == 0 {
            (StochasticChannel::identity(spec.n_qubits()), 0.0)
        } else {
            dissipation.step_channel(spec.n_qubits(), dt, taylor_k)?
        };
        let ham = build_ham_subroutine(spec.hamiltonian(), dt, eps_h_budget, options.subroutine)?;
        Self::assemble(spec, t, Some(Budget { epsilon, c0 }), r, eps_h_budget, options.mode, ham, taylor_k, truncation_bound, StepChannels::Fixed(channel))
    }

    /// Unbudgeted plan running `r` steps of an explicit channel `N` between
    /// Hamiltonian half steps.
    pub fn from_channel(
        hamiltonian: HamiltonianSpec,
        channel: StochasticChannel,
        t: f64,
        r: u64,
        mode: Mode,
    ) -> Result<Self> {
        if channel.n_qubits() != hamiltonian.n_qubits() {
            return Err(Error::DimensionMismatch { expected: hamiltonian.n_qubits(), found: channel.n_qubits() });
        }
        if !(t >= 0.0 && t.is_finite()) || (t > 0.0 && r == 0) {
            return Err(Error::InvalidArgument(format!("cannot cover time {t} with {r} steps")));
        }
        let dt = if r == 0 { 0.0 } else { t / r as f64 };
        let ham = build_ham_subroutine(&hamiltonian, dt, 0.0, SubroutineKind::ExactExp)?;
        let spec = LindbladSpec::new(hamiltonian, Vec::new())?;
        Self::assemble(spec, t, None, r, 0.0, mode, ham, 0, 0.0, StepChannels::Fixed(channel))
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        spec: LindbladSpec,
        t: f64,
        budget: Option<Budget>,
        r: u64,
        eps_h_budget: f64,
        mode: Mode,
        ham: HamiltonianSubroutine,
        taylor_k: usize,
        truncation_bound: f64,
        channels: StepChannels,
    ) -> Result<Self> {
        if let Mode::Trajectories(cfg) = &mode {
            if cfg.observable.n_qubits() != spec.n_qubits() {
                return Err(Error::DimensionMismatch { expected: spec.n_qubits(), found: cfg.observable.n_qubits() });
            }
            if cfg.n_traj == 0 {
                return Err(Error::InvalidArgument("at least one trajectory is required".into()));
            }
        }
        let full_step = Arc::new(ham.unitary().matmul(ham.unitary()));
        Ok(Self { spec, t, budget, r, eps_h_budget, mode, ham, full_step, taylor_k, truncation_bound, channels })
    }

    pub fn spec(&self) -> &LindbladSpec {
        &self.spec
    }

    pub fn n_qubits(&self) -> usize {
        self.spec.n_qubits()
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn budget(&self) -> Option<Budget> {
        self.budget
    }

    pub fn steps(&self) -> u64 {
        self.r
    }

    pub fn dt(&self) -> f64 {
        if self.r == 0 {
            0.0
        } else {
            self.t / self.r as f64
        }
    }

    pub fn eps_h_budget(&self) -> f64 {
        self.eps_h_budget
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn hamiltonian_subroutine(&self) -> &HamiltonianSubroutine {
        &self.ham
    }

    pub fn taylor_order(&self) -> usize {
        self.taylor_k
    }

    /// Largest per-step truncation bound `‖e^{dt D} − N‖◇`.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    /// The channel `N` used at step `step` (0-based).
    pub fn channel(&self, step: usize) -> &StochasticChannel {
        match &self.channels {
            StepChannels::Fixed(c) => c,
            StepChannels::PerStep(v) => &v[step],
        }
    }

    /// Oracle queries `(Hamiltonian half steps, dissipator samples)`: `(2r, r)`.
    pub fn oracle_calls(&self) -> (u64, u64) {
        (2 * self.r, self.r)
    }

    /// `(8/3) r (1 + 6c0)(‖L‖_pauli dt)³ + 2r ε_H` with the subroutine's
    /// certified `ε_H`.
    pub fn error_bound(&self) -> Option<f64> {
        let b = self.budget?;
        let r = self.r as f64;
        let x = pauli_norm(&self.spec) * self.dt();
        Some((8.0 / 3.0) * r * (1.0 + 6.0 * b.c0) * x.powi(3) + 2.0 * r * self.ham.eps_h())
    }
}
