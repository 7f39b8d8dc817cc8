use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::UnitaryOp;

/// Truncation order `K`, total jump rate `a = Σ|α_μ|²`, and step `dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorConfig {
    k: usize,
    a: f64,
    dt: f64,
}

/// Slack on `a·dt ≤ 1` absorbing the rounding of `dt = T / r`.
const RATE_SLACK: f64 = 1e-12;

impl TaylorConfig {
    pub fn new(k: usize, a: f64, dt: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument(format!("jump rate {a} must be positive")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
        }
        if a * dt > 1.0 + RATE_SLACK {
            return Err(Error::ValidityViolated(format!("a·dt = {} exceeds 1", a * dt)));
        }
        Ok(Self { k, a, dt })
    }

    pub fn truncation_order(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.a
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `x = a·dt`.
    pub fn x(&self) -> f64 {
        self.a * self.dt
    }

    /// `2 Σ_{k>K} e^{−x} x^k / k!`, summed term by term.
    pub fn error_bound(&self) -> f64 {
        2.0 * poisson_tail(self.x(), self.k)
    }
}

/// `P(N > k)` for `N ~ Poisson(x)`, without cancellation.
pub fn poisson_tail(x: f64, k: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // e^{-x} x^{k+1} / (k+1)! built in log space to avoid overflow.
    let log_first = -x + (k as f64 + 1.0) * x.ln() - ln_factorial(k + 1);
    let mut term = log_first.exp();
    let mut sum = 0.0;
    let mut j = k + 1;
    while term > 0.0 && term > sum * 1e-18 {
        sum += term;
        j += 1;
        term *= x / j as f64;
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `2 x^{K+1} / (K+1)!`, the closed-form majorant of the truncation error.
pub fn truncation_majorant(x: f64, k: usize) -> f64 {
    2.0 * ((k as f64 + 1.0) * x.ln() - ln_factorial(k + 1)).exp()
}

/// The random-composition channel `Σ_k w_k R^k` with
/// `R(ρ) = Σ_μ p_μ U_μ ρ U_μ†`, sampled lazily: first the length `k`, then
/// `k` independent jump indices.
#[derive(Clone, Debug)]
pub struct TaylorChannel {
    config: TaylorConfig,
    length_weights: Vec<f64>,
    length_dist: WeightedIndex<f64>,
    unitaries: Vec<UnitaryOp>,
    jump_probs: Vec<f64>,
    jump_dist: WeightedIndex<f64>,
    n_qubits: usize,
}

impl TaylorChannel {
    pub(crate) fn new(jumps: &[(Complex64, UnitaryOp)], config: TaylorConfig) -> Result<Self> {
        let n_qubits = jumps[0].1.n_qubits();
        if let Some((_, u)) = jumps.iter().find(|(_, u)| u.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch { expected: n_qubits, found: u.n_qubits() });
        }
        let x = config.x();
        let mut length_weights = Vec::with_capacity(config.k + 1);
        let mut w = 1.0;
        for k in 0..=config.k {
            if k > 0 {
                w *= x / k as f64;
            }
            length_weights.push(w);
        }
        // The common factor e^{-x} cancels in the renormalization.
        let total: f64 = length_weights.iter().sum();
        length_weights.iter_mut().for_each(|w| *w /= total);
        let jump_probs: Vec<f64> = jumps.iter().map(|(alpha, _)| alpha.norm_sqr() / config.a).collect();
        let length_dist = WeightedIndex::new(&length_weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let jump_dist = WeightedIndex::new(&jump_probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self {
            config,
            length_weights,
            length_dist,
            unitaries: jumps.iter().map(|(_, u)| u.clone()).collect(),
            jump_probs,
            jump_dist,
            n_qubits,
        })
    }

    pub fn config(&self) -> &TaylorConfig {
        &self.config
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Renormalized weights `w_0..w_K`.
    pub fn length_weights(&self) -> &[f64] {
        &self.length_weights
    }

    pub fn jump_probabilities(&self) -> &[f64] {
        &self.jump_probs
    }

    pub fn unitaries(&self) -> &[UnitaryOp] {
        &self.unitaries
    }

    /// Samples `U_{μ_k} ⋯ U_{μ_1}` and returns it with its length `k`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (UnitaryOp, usize) {
        let k = self.length_dist.sample(rng);
        let mut acc = UnitaryOp::identity(self.n_qubits);
        for _ in 0..k {
            let mu = self.jump_dist.sample(rng);
            acc = self.unitaries[mu].compose(&acc).expect("jump unitaries share one register");
        }
        (acc, k)
    }

    /// `R(ρ)`.
    fn one_jump(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for (p, u) in self.jump_probs.iter().zip(&self.unitaries) {
            out.add_scaled(Complex64::new(*p, 0.0), &u.conjugate(rho));
        }
        out
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut power = rho.clone();
        let mut out = rho.scale_real(self.length_weights[0]);
        for w in &self.length_weights[1..] {
            power = self.one_jump(&power);
            out.add_scaled(Complex64::new(*w, 0.0), &power);
        }
        out
    }

    pub fn superoperator_matrix(&self) -> ComplexMatrix {
        let d2 = 1usize << (2 * self.n_qubits);
        let mut r = ComplexMatrix::zeros(d2, d2);
        for (p, u) in self.jump_probs.iter().zip(&self.unitaries) {
            r.add_scaled(Complex64::new(*p, 0.0), &u.superoperator_matrix());
        }
        let mut power = ComplexMatrix::identity(d2);
        let mut out = power.scale_real(self.length_weights[0]);
        for w in &self.length_weights[1..] {
            power = r.matmul(&power);
            out.add_scaled(Complex64::new(*w, 0.0), &power);
        }
        out
    }
}
