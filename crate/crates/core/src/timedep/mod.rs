//! Time-dependent dissipators `D(t)`: rate profiles, an RK4 time-ordered
//! oracle, the single-step splitting bound, per-step channel schedules, and
//! branch sampling correlated across steps.
//!
//! Plans from [`timedep_plan`] run through the ordinary engine entry points
//! ([`crate::engine::run_density_matrix`], [`crate::engine::run_trajectories`]).

mod correlated;
mod dissipator;
mod plan;
mod profile;

pub use correlated::{correlated_reference, correlated_run, CorrelationPolicy};
pub use dissipator::{
    ode_propagate, ode_propagator, theorem3_bound, theorem3_norms, Theorem3Norms, TimeDepDissipator,
    DEFAULT_GRID_POINTS,
};
pub use plan::timedep_plan;
pub use profile::Profile;
