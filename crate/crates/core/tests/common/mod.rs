#![allow(dead_code)]

use lindsim::linalg::{ComplexMatrix, DensityMatrix, PauliString, StateVector, UnitaryOp};
use lindsim::model::{HamiltonianSpec, JumpSpec, LindbladSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box–Muller; the first uniform is kept away from zero.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_pure(n: usize, rng: &mut impl Rng) -> StateVector {
    let amps = (0..1 << n).map(|_| c(gaussian(rng), gaussian(rng))).collect();
    StateVector::normalized(amps).unwrap()
}

/// Mixture of three Haar-ish pure states with random weights.
pub fn random_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = w.iter().sum();
    let parts: Vec<(f64, DensityMatrix)> =
        w.iter().map(|wi| (wi / total, DensityMatrix::from_pure(&random_pure(n, rng)))).collect();
    DensityMatrix::mixture(&parts).unwrap()
}

pub fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    let s: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
    s.parse().unwrap()
}

pub fn random_nontrivial_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    loop {
        let p = random_pauli(n, rng);
        if !p.is_identity() {
            return p;
        }
    }
}

/// Signed coefficients uniform in `(−scale, scale)`.
pub fn random_hamiltonian(n: usize, terms: usize, scale: f64, rng: &mut impl Rng) -> HamiltonianSpec {
    let labels: Vec<(f64, String)> = (0..terms)
        .map(|_| (scale * (2.0 * rng.random::<f64>() - 1.0), random_nontrivial_pauli(n, rng).to_string()))
        .collect();
    let borrowed: Vec<(f64, &str)> = labels.iter().map(|(b, s)| (*b, s.as_str())).collect();
    HamiltonianSpec::from_signed(n, &borrowed).unwrap()
}

/// Pauli-sum Hamiltonian plus unitary Pauli jumps, all coefficients in `[0, scale)`.
pub fn random_unitary_spec(n: usize, terms: usize, jumps: usize, scale: f64, rng: &mut impl Rng) -> LindbladSpec {
    let h = random_hamiltonian(n, terms, scale, rng);
    let js = (0..jumps)
        .map(|_| {
            let alpha = c(scale * rng.random::<f64>(), 0.0);
            JumpSpec::unitary(alpha, UnitaryOp::Pauli(random_nontrivial_pauli(n, rng))).unwrap()
        })
        .collect();
    LindbladSpec::new(h, js).unwrap()
}

/// Pauli-sum Hamiltonian and jumps that are general Pauli sums.
pub fn random_general_spec(n: usize, rng: &mut impl Rng) -> LindbladSpec {
    let h = random_hamiltonian(n, 3, 1.0, rng);
    let js = (0..2)
        .map(|_| {
            let terms = (0..2).map(|_| (rng.random::<f64>(), random_nontrivial_pauli(n, rng))).collect();
            JumpSpec::pauli_sum(n, terms).unwrap()
        })
        .collect();
    LindbladSpec::new(h, js).unwrap()
}

pub fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.max_abs_diff(b)
}
