//! Lindblad models, dense Liouvillian oracles, and norms.

mod liouvillian;
mod spec;
mod superop;

pub use liouvillian::{
    build_liouvillian, build_liouvillian_with_cap, dissipator_superoperator, dissipator_superoperator_with_cap,
    exact_propagate, exact_propagator, hamiltonian_superoperator, hamiltonian_superoperator_with_cap,
    lindbladian_action, DEFAULT_QUBIT_CAP,
};
pub use spec::{dissipator_pauli_norm, pauli_norm, HamiltonianSpec, JumpSpec, LindbladSpec};
pub use superop::{diamond_bounds, DiamondBounds, Superoperator};
