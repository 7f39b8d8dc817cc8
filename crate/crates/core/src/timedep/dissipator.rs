use num_complex::Complex64;

use super::profile::Profile;
use crate::engine::{GeneratorNorms, CHOI_NORM_QUBIT_CAP};
use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::{DensityMatrix, UnitaryOp};
use crate::model::{
    diamond_bounds, dissipator_superoperator, hamiltonian_superoperator, HamiltonianSpec, JumpSpec, LindbladSpec,
    Superoperator,
};

/// Default number of grid points for suprema over time.
pub const DEFAULT_GRID_POINTS: usize = 1000;

/// `D(t)` with jumps `√γ_μ(t) U_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeDepDissipator {
    n_qubits: usize,
    jumps: Vec<(Profile, UnitaryOp)>,
}

impl TimeDepDissipator {
    pub fn new(n_qubits: usize, jumps: Vec<(Profile, UnitaryOp)>) -> Result<Self> {
        for (p, u) in &jumps {
            p.validate()?;
            if u.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch { expected: n_qubits, found: u.n_qubits() });
            }
        }
        Ok(Self { n_qubits, jumps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn jumps(&self) -> &[(Profile, UnitaryOp)] {
        &self.jumps
    }

    pub fn is_constant(&self) -> bool {
        self.jumps.iter().all(|(p, _)| p.is_constant())
    }

    /// `(α_μ(t), U_μ)` with `α_μ = √γ_μ(t)`.
    pub fn unitary_jumps(&self, t: f64) -> Vec<(Complex64, UnitaryOp)> {
        self.jumps.iter().map(|(p, u)| (Complex64::new(p.rate(t).sqrt(), 0.0), u.clone())).collect()
    }

    /// The dissipator at time `t` as a jump list.
    pub fn jump_specs(&self, t: f64) -> Result<Vec<JumpSpec>> {
        self.unitary_jumps(t).into_iter().map(|(a, u)| JumpSpec::unitary(a, u)).collect()
    }

    /// `H + D(t)`.
    pub fn spec_at(&self, h: &HamiltonianSpec, t: f64) -> Result<LindbladSpec> {
        LindbladSpec::new(h.clone(), self.jump_specs(t)?)
    }

    /// `Σ_μ γ_μ(t)`.
    pub fn total_rate(&self, t: f64) -> f64 {
        self.jumps.iter().map(|(p, _)| p.rate(t)).sum()
    }

    /// `n` evenly spaced points covering `[s, t]` (just `s` when `n ≤ 1` or
    /// the dissipator is constant).
    pub fn grid(&self, s: f64, t: f64, n: usize) -> Vec<f64> {
        if n <= 1 || self.is_constant() || t == s {
            return vec![s];
        }
        (0..n).map(|i| s + (t - s) * i as f64 / (n - 1) as f64).collect()
    }
}

/// `L̂(t) = Ĥ + Σ_μ γ_μ(t) D̂_μ` with the unit-rate pieces built once.
pub(crate) struct GeneratorFamily {
    h: Superoperator,
    unit: Vec<(Profile, Superoperator)>,
}

impl GeneratorFamily {
    pub(crate) fn new(d: &TimeDepDissipator, h: &HamiltonianSpec) -> Result<Self> {
        if h.n_qubits() != d.n_qubits() {
            return Err(Error::DimensionMismatch { expected: d.n_qubits(), found: h.n_qubits() });
        }
        let h_sup = hamiltonian_superoperator(h)?;
        let unit = d
            .jumps()
            .iter()
            .map(|(p, u)| {
                let j = JumpSpec::unitary(Complex64::new(1.0, 0.0), u.clone())?;
                Ok((p.clone(), dissipator_superoperator(d.n_qubits(), &[j])?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { h: h_sup, unit })
    }

    pub(crate) fn dissipator(&self, t: f64) -> ComplexMatrix {
        let d2 = self.h.matrix().rows();
        let mut m = ComplexMatrix::zeros(d2, d2);
        for (p, s) in &self.unit {
            m.add_scaled(Complex64::new(p.rate(t), 0.0), s.matrix());
        }
        m
    }

    pub(crate) fn generator(&self, t: f64) -> ComplexMatrix {
        let mut m = self.dissipator(t);
        m += self.h.matrix();
        m
    }

    pub(crate) fn hamiltonian(&self) -> &Superoperator {
        &self.h
    }
}

fn check_interval(t0: f64, t1: f64, n_steps: usize) -> Result<()> {
    if !(t1 >= t0 && t0.is_finite() && t1.is_finite()) {
        return Err(Error::InvalidArgument(format!("interval [{t0}, {t1}] is not ordered")));
    }
    if n_steps == 0 {
        return Err(Error::InvalidArgument("at least one integration step is required".into()));
    }
    Ok(())
}

/// Classical RK4 for `Y' = L̂(t) Y` starting from `Y(t0) = Y0`.
fn rk4(family: &GeneratorFamily, mut y: ComplexMatrix, t0: f64, t1: f64, n_steps: usize) -> ComplexMatrix {
    let h = (t1 - t0) / n_steps as f64;
    let c = |x: f64| Complex64::new(x, 0.0);
    for i in 0..n_steps {
        let t = t0 + i as f64 * h;
        let (la, lm, lb) = (family.generator(t), family.generator(t + h / 2.0), family.generator(t + h));
        let k1 = la.matmul(&y);
        let mut y2 = y.clone();
        y2.add_scaled(c(h / 2.0), &k1);
        let k2 = lm.matmul(&y2);
        let mut y3 = y.clone();
        y3.add_scaled(c(h / 2.0), &k2);
        let k3 = lm.matmul(&y3);
        let mut y4 = y.clone();
        y4.add_scaled(c(h), &k3);
        let k4 = lb.matmul(&y4);
        y.add_scaled(c(h / 6.0), &k1);
        y.add_scaled(c(h / 3.0), &k2);
        y.add_scaled(c(h / 3.0), &k3);
        y.add_scaled(c(h / 6.0), &k4);
    }
    y
}

/// Time-ordered propagator `T exp(∫_{t0}^{t1} L̂(t) dt)` by RK4.
pub fn ode_propagator(
    d: &TimeDepDissipator,
    h: &HamiltonianSpec,
    t0: f64,
    t1: f64,
    n_steps: usize,
) -> Result<Superoperator> {
    check_interval(t0, t1, n_steps)?;
    let family = GeneratorFamily::new(d, h)?;
    let d2 = family.h.matrix().rows();
    Superoperator::new(d.n_qubits(), rk4(&family, ComplexMatrix::identity(d2), t0, t1, n_steps))
}

/// `ρ(t1)` from `ρ(t0)` by RK4 on `vec(ρ)`.
pub fn ode_propagate(
    d: &TimeDepDissipator,
    h: &HamiltonianSpec,
    rho: &DensityMatrix,
    t0: f64,
    t1: f64,
    n_steps: usize,
) -> Result<DensityMatrix> {
    check_interval(t0, t1, n_steps)?;
    if rho.n_qubits() != d.n_qubits() {
        return Err(Error::DimensionMismatch { expected: d.n_qubits(), found: rho.n_qubits() });
    }
    if t1 == t0 {
        return Ok(rho.clone());
    }
    let family = GeneratorFamily::new(d, h)?;
    let dim = rho.dim();
    let v = ComplexMatrix::from_vec(dim * dim, 1, rho.matrix().vec_columns())?;
    let out = rk4(&family, v, t0, t1, n_steps);
    DensityMatrix::with_tolerance(ComplexMatrix::unvec_columns(out.as_slice(), dim, dim)?, 1e-8)
}

/// Grid suprema entering the single-step bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem3Norms {
    pub hamiltonian: f64,
    pub sup_dissipator: f64,
    pub sup_commutator: f64,
}

/// `(sup‖[Ĥ, D̂(t')]‖◇ / 3)(‖Ĥ‖◇/2 + sup‖D̂(t')‖◇)(t − s)³` with every norm
/// replaced by an upper surrogate maximized over `grid_points` samples of
/// `t' ∈ [s, t]`. Fails unless `(‖Ĥ‖◇/2 + sup‖D̂‖◇)(t − s) ≤ 1`.
pub fn theorem3_bound(h: &HamiltonianSpec, d: &TimeDepDissipator, s: f64, t: f64, grid_points: usize) -> Result<f64> {
    let norms = theorem3_norms(h, d, s, t, grid_points)?;
    let width = t - s;
    let rate = norms.hamiltonian / 2.0 + norms.sup_dissipator;
    if rate * width > 1.0 {
        return Err(Error::ValidityViolated(format!("(‖H‖/2 + sup‖D‖)(t − s) = {} exceeds 1", rate * width)));
    }
    Ok(norms.sup_commutator / 3.0 * rate * width.powi(3))
}

pub fn theorem3_norms(
    h: &HamiltonianSpec,
    d: &TimeDepDissipator,
    s: f64,
    t: f64,
    grid_points: usize,
) -> Result<Theorem3Norms> {
    if !(t >= s) {
        return Err(Error::InvalidArgument(format!("interval [{s}, {t}] is not ordered")));
    }
    let grid = d.grid(s, t, grid_points);
    let h_spec = LindbladSpec::new(h.clone(), Vec::new())?;
    let h_norm = GeneratorNorms::of(&h_spec)?.hamiltonian;
    let small = d.n_qubits() <= CHOI_NORM_QUBIT_CAP;
    let family = if small { Some(GeneratorFamily::new(d, h)?) } else { None };
    let (mut sup_d, mut sup_c) = (0.0f64, 0.0f64);
    for &tp in &grid {
        let d_pauli = 2.0 * d.total_rate(tp);
        let (dn, cn) = match &family {
            Some(f) => {
                let dm = Superoperator::new(d.n_qubits(), f.dissipator(tp))?;
                let dn = diamond_bounds(&dm)?.upper.min(d_pauli);
                let cn = diamond_bounds(&f.hamiltonian().commutator(&dm)?)?.upper.min(2.0 * h_norm * dn);
                (dn, cn)
            }
            None => (d_pauli, 2.0 * h_norm * d_pauli),
        };
        sup_d = sup_d.max(dn);
        sup_c = sup_c.max(cn);
    }
    Ok(Theorem3Norms { hamiltonian: h_norm, sup_dissipator: sup_d, sup_commutator: sup_c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Pauli, PauliString, StateVector};
    use crate::model::exact_propagate;

    fn z() -> UnitaryOp {
        UnitaryOp::Pauli(PauliString::single(1, 0, Pauli::Z).unwrap())
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::from_pure(&StateVector::normalized(vec![Complex64::new(1.0, 0.0); 2]).unwrap())
    }

    #[test]
    fn constant_profile_matches_exact_exponential() {
        let d = TimeDepDissipator::new(1, vec![(Profile::Constant(0.6), z())]).unwrap();
        let h = HamiltonianSpec::from_signed(1, &[(0.8, "X")]).unwrap();
        let spec = d.spec_at(&h, 0.0).unwrap();
        let a = ode_propagate(&d, &h, &plus(), 0.0, 1.0, 200).unwrap();
        let b = exact_propagate(&spec, &plus(), 1.0).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-8);
    }

    #[test]
    fn sinusoidal_dephasing_decay() {
        // A jump √γ Z damps coherences by exp(−2∫γ).
        let p = Profile::Sinusoid { c0: 1.0, amp: 0.5, omega: 3.0 };
        let d = TimeDepDissipator::new(1, vec![(p.clone(), z())]).unwrap();
        let out = ode_propagate(&d, &HamiltonianSpec::zero(1), &plus(), 0.0, 1.0, 400).unwrap();
        let expected = 0.5 * (-2.0 * p.integral(0.0, 1.0)).exp();
        assert!((out.matrix()[(0, 1)].norm() - expected).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_identity() {
        let d = TimeDepDissipator::new(1, vec![(Profile::Constant(1.0), z())]).unwrap();
        let out = ode_propagate(&d, &HamiltonianSpec::zero(1), &plus(), 0.3, 0.3, 1).unwrap();
        assert_eq!(&out, &plus());
    }

    #[test]
    fn commuting_case_has_zero_bound() {
        let p = Profile::Sinusoid { c0: 1.0, amp: 0.5, omega: 3.0 };
        let d = TimeDepDissipator::new(1, vec![(p, z())]).unwrap();
        let h = HamiltonianSpec::from_signed(1, &[(0.7, "Z")]).unwrap();
        assert_eq!(theorem3_bound(&h, &d, 0.0, 0.1, 50).unwrap(), 0.0);
    }

    #[test]
    fn bound_is_cubic_in_width() {
        let d = TimeDepDissipator::new(1, vec![(Profile::Constant(0.5), z())]).unwrap();
        let h = HamiltonianSpec::from_signed(1, &[(1.0, "X")]).unwrap();
        let a = theorem3_bound(&h, &d, 0.0, 0.2, 10).unwrap();
        let b = theorem3_bound(&h, &d, 0.0, 0.1, 10).unwrap();
        assert!((a / b - 8.0).abs() < 1e-12);
    }

    #[test]
    fn validity_enforced() {
        let d = TimeDepDissipator::new(1, vec![(Profile::Constant(5.0), z())]).unwrap();
        let h = HamiltonianSpec::from_signed(1, &[(1.0, "X")]).unwrap();
        assert!(matches!(theorem3_bound(&h, &d, 0.0, 1.0, 10), Err(Error::ValidityViolated(_))));
    }
}
