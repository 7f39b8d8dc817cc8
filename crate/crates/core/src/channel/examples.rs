use num_complex::Complex64;

use super::{Ensemble, PrimitiveOperation, StochasticChannel};
use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::{Pauli, PauliString, UnitaryOp};
use crate::model::{HamiltonianSpec, JumpSpec, LindbladSpec};

/// Rates below this are treated as zero when a generator is recovered from a
/// Pauli channel.
const RATE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum ExampleKind {
    /// `D(ρ) = γ (I/2^n − ρ)` via all non-identity Pauli jumps `√(γ/4^n) P`.
    Depolarizing { n: usize, gamma: f64, dt: f64 },
    /// Jumps `√(Γ/2) Z_μ` on every qubit.
    Dephasing { n: usize, gamma: f64, dt: f64 },
    /// `ρ ↦ Σ_P p_P P ρ P` together with the Pauli generator whose step-`dt`
    /// exponential it is.
    Pauli { probs: Vec<(f64, PauliString)>, dt: f64 },
    /// `ρ ↦ q ρ + (1 − q) ρ_f`; the generator has rate `−ln(q)/dt`.
    Reset { q: f64, ensemble: Ensemble, dt: f64 },
}

/// A step channel with the Lindbladian it exponentiates. `spec` is `None`
/// when no finite generator exists (`q = 0` reset).
#[derive(Clone, Debug)]
pub struct ExampleChannel {
    pub spec: Option<LindbladSpec>,
    pub channel: StochasticChannel,
}

pub fn make_example_channel(kind: &ExampleKind) -> Result<ExampleChannel> {
    match kind {
        ExampleKind::Depolarizing { n, gamma, dt } => depolarizing(*n, *gamma, *dt),
        ExampleKind::Dephasing { n, gamma, dt } => dephasing(*n, *gamma, *dt),
        ExampleKind::Pauli { probs, dt } => pauli_channel(probs, *dt),
        ExampleKind::Reset { q, ensemble, dt } => reset(*q, ensemble, *dt),
    }
}

fn check_rate(name: &str, rate: f64, dt: f64) -> Result<()> {
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} = {rate} must be nonnegative")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
    }
    Ok(())
}

fn check_register(n: usize) -> Result<()> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidArgument(format!("register of {n} qubits outside 1..=16")));
    }
    Ok(())
}

fn unitary_branch(p: f64, s: PauliString) -> (f64, PrimitiveOperation) {
    (p, PrimitiveOperation::Unitary(UnitaryOp::Pauli(s)))
}

fn depolarizing(n: usize, gamma: f64, dt: f64) -> Result<ExampleChannel> {
    check_register(n)?;
    check_rate("gamma", gamma, dt)?;
    let count = 1usize << (2 * n);
    let coeff = (gamma / count as f64).sqrt();
    let jumps = if gamma > 0.0 {
        PauliString::all(n)
            .filter(|p| !p.is_identity())
            .map(|p| JumpSpec::pauli_sum(n, vec![(coeff, p)]))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let spec = LindbladSpec::new(HamiltonianSpec::zero(n), jumps)?;
    // The uniform Pauli mixture is the fully depolarizing channel.
    let keep = (-gamma * dt).exp();
    let each = (1.0 - keep) / count as f64;
    let branches = PauliString::all(n)
        .map(|p| {
            let w = if p.is_identity() { keep + each } else { each };
            unitary_branch(w, p)
        })
        .collect();
    Ok(ExampleChannel { spec: Some(spec), channel: StochasticChannel::mixture(branches)? })
}

fn dephasing(n: usize, gamma: f64, dt: f64) -> Result<ExampleChannel> {
    check_register(n)?;
    check_rate("Gamma", gamma, dt)?;
    let coeff = (gamma / 2.0).sqrt();
    let jumps = if gamma > 0.0 {
        (0..n)
            .map(|q| JumpSpec::pauli_sum(n, vec![(coeff, PauliString::single(n, q, Pauli::Z)?)]))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let spec = LindbladSpec::new(HamiltonianSpec::zero(n), jumps)?;
    // Each qubit independently: Z with probability (1 − e^{−Γ dt})/2.
    let flip = 0.5 * (1.0 - (-gamma * dt).exp());
    let mut branches = Vec::with_capacity(1 << n);
    for mask in 0usize..(1 << n) {
        let letters: Vec<Pauli> =
            (0..n).map(|q| if mask >> (n - 1 - q) & 1 == 1 { Pauli::Z } else { Pauli::I }).collect();
        let k = mask.count_ones() as i32;
        let w = flip.powi(k) * (1.0 - flip).powi(n as i32 - k);
        branches.push(unitary_branch(w, PauliString::new(letters, Complex64::new(1.0, 0.0))?));
    }
    Ok(ExampleChannel { spec: Some(spec), channel: StochasticChannel::mixture(branches)? })
}

fn pauli_channel(probs: &[(f64, PauliString)], dt: f64) -> Result<ExampleChannel> {
    let n = probs.first().ok_or_else(|| Error::InvalidArgument("empty Pauli channel".into()))?.1.n_qubits();
    check_register(n)?;
    check_rate("dt", 0.0, dt)?;
    let mut p_by_index = vec![0.0; 1 << (2 * n)];
    let all: Vec<PauliString> = PauliString::all(n).collect();
    for (p, s) in probs {
        if s.n_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, found: s.n_qubits() });
        }
        let bare = s.clone().with_phase(Complex64::new(1.0, 0.0))?;
        let idx = all.iter().position(|t| *t == bare).expect("enumeration covers every string");
        p_by_index[idx] += p;
    }
    let branches: Vec<_> =
        all.iter().zip(&p_by_index).filter(|(_, p)| **p > 0.0).map(|(s, p)| unitary_branch(*p, s.clone())).collect();
    let channel = StochasticChannel::mixture(branches)?;

    // Pauli eigenvalues f_Q = Σ_P p_P s(P,Q); the generator Σ_P γ_P (PρP − ρ)
    // has f_Q = exp(−2 dt Σ_{P anticommuting with Q} γ_P).
    let sign = |a: &PauliString, b: &PauliString| if a.commutes_with(b) { 1.0 } else { -1.0 };
    let mut lambda = Vec::with_capacity(all.len());
    for q in &all {
        let f: f64 = all.iter().zip(&p_by_index).map(|(p, w)| w * sign(p, q)).sum();
        if f <= 0.0 {
            return Err(Error::NotSimulatable(format!("Pauli eigenvalue {f} for {q} has no real logarithm")));
        }
        lambda.push(-f.ln() / (2.0 * dt));
    }
    let norm = 2.0 / all.len() as f64;
    let mut jumps = Vec::new();
    for p in all.iter().filter(|p| !p.is_identity()) {
        let rate = -norm * all.iter().zip(&lambda).map(|(q, l)| sign(p, q) * l).sum::<f64>();
        if rate < -RATE_TOL {
            return Err(Error::NotSimulatable(format!("channel is not Markovian: rate {rate} for {p}")));
        }
        if rate > RATE_TOL {
            jumps.push(JumpSpec::pauli_sum(n, vec![(rate.sqrt(), p.clone())])?);
        }
    }
    let spec = LindbladSpec::new(HamiltonianSpec::zero(n), jumps)?;
    Ok(ExampleChannel { spec: Some(spec), channel })
}

fn reset(q: f64, ensemble: &Ensemble, dt: f64) -> Result<ExampleChannel> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("q = {q} outside [0, 1]")));
    }
    check_rate("dt", 0.0, dt)?;
    let n = ensemble.n_qubits();
    let identity = UnitaryOp::identity(n);
    let channel = StochasticChannel::definition_one(q, vec![(1.0, identity)], Some(ensemble.clone()))?;
    let spec = if q == 0.0 {
        None
    } else {
        Some(reset_lindbladian(-q.ln() / dt, ensemble)?)
    };
    Ok(ExampleChannel { spec, channel })
}

/// `D(ρ) = κ (tr(ρ) ρ_f − ρ)` through the jumps `√(κ w_j) |ψ_j⟩⟨k|`.
pub fn reset_lindbladian(kappa: f64, ensemble: &Ensemble) -> Result<LindbladSpec> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("reset rate {kappa} must be finite and nonnegative")));
    }
    let n = ensemble.n_qubits();
    let d = 1usize << n;
    let mut jumps = Vec::new();
    if kappa > 0.0 {
        for (w, psi) in ensemble.members() {
            if *w == 0.0 {
                continue;
            }
            let amp = (kappa * w).sqrt();
            for k in 0..d {
                let l = ComplexMatrix::from_fn(d, d, |i, j| {
                    if j == k {
                        psi.amplitudes()[i] * amp
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                jumps.push(JumpSpec::from_matrix(&l)?);
            }
        }
    }
    LindbladSpec::new(HamiltonianSpec::zero(n), jumps)
}
