//! Randomized second-order simulation of Lindblad master equations.
//!
//! A Lindbladian `L = H + D` is split into a Hamiltonian part, simulated by
//! any closed-system subroutine `K`, and a dissipator whose short-time channel
//! is realized as a randomly sampled unitary or state-preparation operation.
//! One step is the gadget `K ∘ N ∘ K` and `r` steps approximate `exp(T L)`.
//! Every module comes with exact dense oracles for small qubit counts.

pub mod error;
pub mod linalg;
pub mod model;
pub mod channel;
pub mod engine;
pub mod timedep;
pub mod dilation;

pub use error::{Error, Result};
