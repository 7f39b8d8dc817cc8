use super::dissipator::TimeDepDissipator;
use crate::channel::{dissipator_to_stochastic, StochasticChannel};
use crate::engine::budget::{check_budget, resolve_steps, step_count_with_norms};
use crate::engine::{
    build_ham_subroutine, jump_rate, taylor_order, Budget, GeneratorNorms, PlanOptions, SimulationPlan, StepChannels,
};
use crate::error::{Error, Result};
use crate::model::{dissipator_pauli_norm, pauli_norm, HamiltonianSpec};

/// Budgeted plan whose step `j` uses the channel of `D` evaluated at the
/// midpoint `(j + ½) dt`. Costs use grid suprema over `[0, T]` of the Pauli
/// norm, the generator norms, and the jump rate.
///
/// The plan's reported spec is `H + D(t*)` at the grid point `t*` of
/// largest Pauli norm.
pub fn timedep_plan(
    h: &HamiltonianSpec,
    d: &TimeDepDissipator,
    t: f64,
    epsilon: f64,
    c0: f64,
    options: PlanOptions,
    grid_points: usize,
) -> Result<SimulationPlan> {
    check_budget(t, epsilon, c0)?;
    if h.n_qubits() != d.n_qubits() {
        return Err(Error::DimensionMismatch { expected: d.n_qubits(), found: h.n_qubits() });
    }
    let mut sup_pauli = f64::NEG_INFINITY;
    let mut sup_spec = None;
    let mut sup_norms = GeneratorNorms { hamiltonian: 0.0, dissipator: 0.0 };
    let mut sup_rate = 0.0f64;
    for tp in d.grid(0.0, t, grid_points) {
        let spec = d.spec_at(h, tp)?;
        let norms = GeneratorNorms::of(&spec)?;
        sup_norms.hamiltonian = sup_norms.hamiltonian.max(norms.hamiltonian);
        sup_norms.dissipator = sup_norms.dissipator.max(norms.dissipator);
        sup_rate = sup_rate.max(jump_rate(&spec));
        let pn = pauli_norm(&spec);
        if pn > sup_pauli {
            sup_pauli = pn;
            sup_spec = Some(spec);
        }
    }
    let spec = sup_spec.expect("grid is never empty");

    let auto = step_count_with_norms(sup_pauli, &sup_norms, sup_rate, t, epsilon, c0);
    let r = resolve_steps(options.steps, auto.r, sup_norms.validity_rate().max(sup_rate), t)?;
    let dt = if r == 0 { 0.0 } else { t / r as f64 };
    let eps_h_budget = if r == 0 { 0.0 } else { epsilon / (4.0 * r as f64) };

    let mut channels = Vec::with_capacity(r as usize);
    let (mut k_max, mut bound_max) = (0usize, 0.0f64);
    for j in 0..r {
        let mid = (j as f64 + 0.5) * dt;
        let step_spec = d.spec_at(h, mid)?;
        let k = options
            .taylor_order
            .unwrap_or_else(|| taylor_order(jump_rate(&step_spec), dissipator_pauli_norm(&step_spec), dt, c0));
        let (ch, bound) = dissipator_to_stochastic(d.n_qubits(), &d.unitary_jumps(mid), dt, k)?;
        k_max = k_max.max(k);
        bound_max = bound_max.max(bound);
        channels.push(ch);
    }
    let channels = if channels.is_empty() {
        StepChannels::Fixed(StochasticChannel::identity(d.n_qubits()))
    } else {
        StepChannels::PerStep(channels)
    };
    let ham = build_ham_subroutine(h, dt, eps_h_budget, options.subroutine)?;
    SimulationPlan::assemble(
        spec,
        t,
        Some(Budget { epsilon, c0 }),
        r,
        eps_h_budget,
        options.mode,
        ham,
        k_max,
        bound_max,
        channels,
    )
}
