//! The second-order gadget `K ∘ N ∘ K`, step budgeting, and the two
//! execution modes: exact density-matrix averaging and Monte Carlo
//! state-vector trajectories.

pub(crate) mod budget;
mod hamiltonian;
mod observable;
mod plan;
mod run;

pub use budget::{
    jump_rate, step_count, taylor_order, GeneratorNorms, StepCount, CHOI_NORM_QUBIT_CAP, MAX_TAYLOR_ORDER,
    TAYLOR_FLOOR,
};
pub use hamiltonian::{
    anticommuting_weight, build_ham_subroutine, trotter_error_bound, HamiltonianSubroutine, SubroutineKind,
};
pub use observable::Observable;
pub use plan::{Budget, Dissipation, Mode, PlanOptions, SimulationPlan, TrajectoryConfig};
pub use run::{gadget_superoperator, run_density_matrix, run_trajectories, trajectory_rng, TrajectoryResult};

pub(crate) use plan::StepChannels;
pub(crate) use run::simulate_trajectories;
