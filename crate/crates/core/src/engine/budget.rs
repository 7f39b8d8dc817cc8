use crate::channel::poisson_tail;
use crate::error::{Error, Result};
use crate::model::{
    diamond_bounds, dissipator_pauli_norm, dissipator_superoperator, hamiltonian_superoperator, pauli_norm,
    LindbladSpec,
};

/// Registers up to this size get Choi-based norm surrogates; larger ones
/// fall back to twice the Pauli norm.
pub const CHOI_NORM_QUBIT_CAP: usize = 4;

/// Largest truncation order the budget will pick.
pub const MAX_TAYLOR_ORDER: usize = 60;

/// Target used when `c0 = 0` asks for an exact dissipator channel.
pub const TAYLOR_FLOOR: f64 = 1e-16;

/// Result of [`step_count`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepCount {
    pub r: u64,
    /// Per-half-step Hamiltonian accuracy `ε / (4r)`, so that `2r ε_H ≤ ε/2`.
    pub eps_h_budget: f64,
}

/// Upper surrogates for `‖Ĥ‖◇` and `‖D̂‖◇`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorNorms {
    pub hamiltonian: f64,
    pub dissipator: f64,
}

impl GeneratorNorms {
    /// `min(Choi upper bound, 2 · Pauli norm)` for each part.
    pub fn of(spec: &LindbladSpec) -> Result<Self> {
        let h_pauli = 2.0 * spec.hamiltonian().pauli_norm();
        let d_pauli = 2.0 * dissipator_pauli_norm(spec);
        if spec.n_qubits() > CHOI_NORM_QUBIT_CAP {
            return Ok(Self { hamiltonian: h_pauli, dissipator: d_pauli });
        }
        let h = diamond_bounds(&hamiltonian_superoperator(spec.hamiltonian())?)?.upper;
        let d = diamond_bounds(&dissipator_superoperator(spec.n_qubits(), spec.jumps())?)?.upper;
        Ok(Self { hamiltonian: h.min(h_pauli), dissipator: d.min(d_pauli) })
    }

    /// `‖Ĥ‖◇/2 + ‖D̂‖◇`.
    pub fn validity_rate(&self) -> f64 {
        self.hamiltonian / 2.0 + self.dissipator
    }
}

/// Total unitary-jump rate `Σ_μ |α_μ|²`, zero when no jump has unitary form.
pub fn jump_rate(spec: &LindbladSpec) -> f64 {
    spec.jumps().iter().filter_map(|j| j.unitary_form()).map(|(a, _)| a.norm_sqr()).sum()
}

/// `r = ⌈√((16/3)(1 + 6c0)/ε) (‖L‖_pauli T)^{3/2}⌉`, then raised until
/// `(‖Ĥ‖◇/2 + ‖D̂‖◇) dt ≤ 1` and `a dt ≤ 1`.
pub fn step_count(spec: &LindbladSpec, t: f64, epsilon: f64, c0: f64) -> Result<StepCount> {
    check_budget(t, epsilon, c0)?;
    let norms = GeneratorNorms::of(spec)?;
    Ok(step_count_with_norms(pauli_norm(spec), &norms, jump_rate(spec), t, epsilon, c0))
}

pub(crate) fn check_budget(t: f64, epsilon: f64, c0: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} outside (0, 1]")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("evolution time {t} must be finite and nonnegative")));
    }
    if !(c0 >= 0.0 && c0.is_finite()) {
        return Err(Error::InvalidArgument(format!("c0 = {c0} must be finite and nonnegative")));
    }
    Ok(())
}

pub(crate) fn step_count_with_norms(
    pauli: f64,
    norms: &GeneratorNorms,
    rate: f64,
    t: f64,
    epsilon: f64,
    c0: f64,
) -> StepCount {
    if t == 0.0 {
        return StepCount { r: 0, eps_h_budget: 0.0 };
    }
    let base = ((16.0 / 3.0) * (1.0 + 6.0 * c0) / epsilon).sqrt() * (pauli * t).powf(1.5);
    let mut r = (base.ceil() as u64).max(1);
    let validity = norms.validity_rate().max(rate);
    if validity > 0.0 {
        r = r.max((validity * t).ceil() as u64);
        while validity * (t / r as f64) > 1.0 {
            r += 1;
        }
    }
    StepCount { r, eps_h_budget: epsilon / (4.0 * r as f64) }
}

/// Applies a fixed step count if requested, checking the validity
/// condition `rate · dt ≤ 1`; otherwise returns `auto`.
pub(crate) fn resolve_steps(fixed: Option<u64>, auto: u64, rate: f64, t: f64) -> Result<u64> {
    let Some(r) = fixed else { return Ok(auto) };
    if t == 0.0 {
        return Ok(0);
    }
    if r == 0 {
        return Err(Error::InvalidArgument("a positive time needs at least one step".into()));
    }
    if rate * (t / r as f64) > 1.0 {
        return Err(Error::ValidityViolated(format!(
            "(‖H‖/2 + ‖D‖)·dt = {} exceeds 1 with {r} steps",
            rate * t / r as f64
        )));
    }
    Ok(r)
}

/// Smallest `K` whose truncation bound meets `c0 (2 ‖D‖_pauli dt)³`
/// (or [`TAYLOR_FLOOR`] when that target vanishes), capped at
/// [`MAX_TAYLOR_ORDER`].
pub fn taylor_order(rate: f64, dissipator_pauli: f64, dt: f64, c0: f64) -> usize {
    let x = rate * dt;
    if x == 0.0 {
        return 0;
    }
    let target = c0 * (2.0 * dissipator_pauli * dt).powi(3);
    let target = if target > 0.0 { target } else { TAYLOR_FLOOR };
    (0..=MAX_TAYLOR_ORDER).find(|&k| 2.0 * poisson_tail(x, k) <= target).unwrap_or(MAX_TAYLOR_ORDER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{HamiltonianSpec, LindbladSpec};

    fn unit_norm_spec() -> LindbladSpec {
        LindbladSpec::new(HamiltonianSpec::from_signed(1, &[(1.0, "Z")]).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn closed_form_example() {
        assert_eq!(step_count(&unit_norm_spec(), 1.0, 1e-2, 0.0).unwrap().r, 24);
    }

    #[test]
    fn zero_time_needs_no_steps() {
        assert_eq!(step_count(&unit_norm_spec(), 0.0, 1e-2, 0.0).unwrap().r, 0);
    }

    #[test]
    fn budget_is_split_evenly() {
        let s = step_count(&unit_norm_spec(), 3.0, 1e-3, 1.0).unwrap();
        assert!((2.0 * s.r as f64 * s.eps_h_budget - 0.5e-3).abs() < 1e-15);
    }

    #[test]
    fn bad_epsilon_rejected() {
        assert!(step_count(&unit_norm_spec(), 1.0, 0.0, 0.0).is_err());
        assert!(step_count(&unit_norm_spec(), 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn taylor_order_meets_target() {
        for (x, c0) in [(0.01, 1.0), (0.3, 0.1), (0.9, 0.0)] {
            let k = taylor_order(x, x, 1.0, c0);
            let target = (c0 * (2.0 * x).powi(3)).max(if c0 == 0.0 { TAYLOR_FLOOR } else { 0.0 });
            assert!(2.0 * poisson_tail(x, k) <= target);
            assert!(k == 0 || 2.0 * poisson_tail(x, k - 1) > target);
        }
    }
}
