mod common;

use common::*;
use lindsim::linalg::{matrix_exp, partial_trace, trace_distance, ComplexMatrix, DensityMatrix, StateVector};
use lindsim::model::{
    build_liouvillian, diamond_bounds, exact_propagate, lindbladian_action, pauli_norm, HamiltonianSpec,
    LindbladSpec, Superoperator,
};
use lindsim::channel::{make_example_channel, ExampleKind};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// `exp(iH)` through the real symmetric embedding `φ(P + iQ) = [[P, −Q], [Q, P]]`,
/// an algebra homomorphism, so `cos` and `sin` of `φ(H)` embed `cos H` and `sin H`.
fn exp_i_hermitian_oracle(h: &ComplexMatrix) -> ComplexMatrix {
    let d = h.rows();
    let emb = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (bi, bj) = (i / d, j / d);
        let z = h[(i % d, j % d)];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let eig = SymmetricEigen::new(emb);
    let v = &eig.eigenvectors;
    let cos = v * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::cos)) * v.transpose();
    let sin = v * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sin)) * v.transpose();
    // cos H + i sin H with cos H = C1 + iC2, sin H = S1 + iS2.
    ComplexMatrix::from_fn(d, d, |i, j| c(cos[(i, j)] - sin[(i + d, j)], cos[(i + d, j)] + sin[(i, j)]))
}

#[test]
fn matrix_exp_matches_eigen_oracle() {
    let mut r = rng(11);
    let raw = ComplexMatrix::from_fn(8, 8, |_, _| c(gaussian(&mut r), gaussian(&mut r)));
    let h = (&raw + &raw.adjoint()).scale_real(0.5);
    let ours = matrix_exp(&h, c(0.0, 1.0)).unwrap();
    let oracle = exp_i_hermitian_oracle(&h);
    assert!((&ours - &oracle).frobenius_norm() < 1e-9);
}

#[test]
fn partial_trace_matches_index_sum() {
    let mut r = rng(12);
    let rho = random_density(3, &mut r);
    for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
        let ours = partial_trace(&rho, &keep).unwrap();
        let dk = 1 << keep.len();
        let mut brute = ComplexMatrix::zeros(dk, dk);
        for i in 0..8usize {
            for j in 0..8usize {
                let bits = |x: usize, q: usize| (x >> (2 - q)) & 1;
                let traced_equal = (0..3).filter(|q| !keep.contains(q)).all(|q| bits(i, q) == bits(j, q));
                if !traced_equal {
                    continue;
                }
                let a = keep.iter().fold(0, |acc, &q| (acc << 1) | bits(i, q));
                let b = keep.iter().fold(0, |acc, &q| (acc << 1) | bits(j, q));
                brute[(a, b)] += rho.matrix()[(i, j)];
            }
        }
        assert!(ours.matrix().max_abs_diff(&brute) < 1e-12, "keep {keep:?}");
    }
}

#[test]
fn trace_distance_matches_characteristic_roots() {
    let mut r = rng(13);
    for _ in 0..10 {
        let a = random_density(1, &mut r);
        let b = random_density(1, &mut r);
        let m = a.matrix() - b.matrix();
        // λ² − tr λ + det = 0.
        let tr = m.trace().re;
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let oracle = 0.5 * (((tr + disc) / 2.0).abs() + ((tr - disc) / 2.0).abs());
        assert!((trace_distance(&a, &b).unwrap() - oracle).abs() < 1e-12);
    }
}

#[test]
fn liouvillian_matches_finite_difference_of_matrix_form() {
    let mut r = rng(14);
    let spec = random_general_spec(2, &mut r);
    let rho = random_density(2, &mut r);
    let l = build_liouvillian(&spec).unwrap();
    let analytic = l.apply(rho.matrix()).unwrap();
    // Central difference of an RK4 trajectory driven by the matrix form.
    let step = |x: &ComplexMatrix, h: f64| {
        let k1 = lindbladian_action(&spec, x);
        let k2 = lindbladian_action(&spec, &(x + &k1.scale_real(h / 2.0)));
        let k3 = lindbladian_action(&spec, &(x + &k2.scale_real(h / 2.0)));
        let k4 = lindbladian_action(&spec, &(x + &k3.scale_real(h)));
        let mut out = x.clone();
        out.add_scaled(c(h / 6.0, 0.0), &(&(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4)));
        out
    };
    let h = 1e-4;
    let fd = (&step(rho.matrix(), h) - &step(rho.matrix(), -h)).scale_real(1.0 / (2.0 * h));
    assert!(analytic.max_abs_diff(&fd) < 1e-8);
}

#[test]
fn depolarizing_closed_form() {
    let gamma = 0.7;
    let t = 1.3;
    let mut r = rng(15);
    for n in 1..=2 {
        let spec = make_example_channel(&ExampleKind::Depolarizing { n, gamma, dt: 0.1 }).unwrap().spec.unwrap();
        let rho = random_density(n, &mut r);
        let out = exact_propagate(&spec, &rho, t).unwrap();
        let keep = (-gamma * t).exp();
        let closed = DensityMatrix::mixture(&[(keep, rho.clone()), (1.0 - keep, DensityMatrix::maximally_mixed(n))]).unwrap();
        assert!(trace_distance(&out, &closed).unwrap() < 1e-9);
    }
}

#[test]
fn depolarizing_pauli_norm_values() {
    let gamma = 0.37;
    for n in 1..=3 {
        let h_terms: Vec<(f64, &str)> = match n {
            1 => vec![(0.4, "X")],
            2 => vec![(0.7, "XZ"), (-0.4, "ZI")],
            _ => vec![(0.25, "XYZ")],
        };
        let h = HamiltonianSpec::from_signed(n, &h_terms).unwrap();
        let base = make_example_channel(&ExampleKind::Depolarizing { n, gamma, dt: 0.1 }).unwrap().spec.unwrap();
        let spec = base.with_hamiltonian(h.clone()).unwrap();
        let expected = h.pauli_norm() + (1.0 - 4f64.powi(-(n as i32))) * gamma;
        assert!((pauli_norm(&spec) - expected).abs() < 1e-14, "n = {n}");
    }
}

#[test]
fn dephasing_pauli_norm_values() {
    let g = 0.9;
    for n in 1..=3 {
        let spec = make_example_channel(&ExampleKind::Dephasing { n, gamma: g, dt: 0.1 }).unwrap().spec.unwrap();
        assert_eq!(spec.jumps().len(), n);
        assert!((pauli_norm(&spec) - n as f64 * g / 2.0).abs() < 1e-14);
    }
}

#[test]
fn diamond_bounds_bracket_random_inputs() {
    let z = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let delta = Superoperator::identity(1).sub(&Superoperator::unitary_conjugation(&z).unwrap()).unwrap();
    let b = diamond_bounds(&delta).unwrap();
    // The normalized Choi matrix is the output on the maximally entangled input.
    let choi_state = delta.choi().scale_real(0.5);
    let witness = lindsim::linalg::trace_norm(&choi_state).unwrap();
    assert!((witness - b.lower).abs() < 1e-12);

    let mut r = rng(16);
    let mut best = 0.0f64;
    for _ in 0..100_000 {
        // (Φ ⊗ I)(|ψ⟩⟨ψ|) on system ⊗ reference, system index most significant.
        let psi = random_pure(2, &mut r);
        let a = psi.amplitudes();
        let mut out = ComplexMatrix::zeros(4, 4);
        for s in 0..2 {
            for t in 0..2 {
                for u in 0..2 {
                    for v in 0..2 {
                        let x = a[2 * s + u] * a[2 * t + v].conj();
                        let sign = if s == t { 0.0 } else { 2.0 };
                        // I − Z·Z†: diagonal blocks cancel, off-diagonal blocks double.
                        out[(2 * s + u, 2 * t + v)] += x * sign;
                    }
                }
            }
        }
        let eig = lindsim::linalg::hermitian_eigenvalues(&out).unwrap();
        best = best.max(eig.iter().map(|e| e.abs()).sum());
    }
    assert!(best <= b.upper + 1e-12);
    assert!(best <= 2.0 + 1e-12);
    assert!(b.lower <= b.upper);
}

#[test]
fn exponentials_of_random_specs_are_cptp() {
    let mut r = rng(17);
    for _ in 0..5 {
        let n = r.random_range(1..=2);
        let spec = random_general_spec(n, &mut r);
        let l = build_liouvillian(&spec).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0] {
            let e = l.exp(t).unwrap();
            assert!(e.min_choi_eigenvalue().unwrap() > -1e-8);
            assert!(e.trace_preservation_deviation() < 1e-9);
        }
    }
}

#[test]
fn pure_hamiltonian_evolution_is_unitary() {
    let h = HamiltonianSpec::from_signed(1, &[(1.0, "X")]).unwrap();
    let spec = LindbladSpec::new(h, vec![]).unwrap();
    let out = exact_propagate(&spec, &DensityMatrix::basis(1, 0).unwrap(), std::f64::consts::FRAC_PI_2).unwrap();
    // e^{−iπX/2}|0⟩ = −i|1⟩.
    let one = DensityMatrix::from_pure(&StateVector::basis(1, 1).unwrap());
    assert!(trace_distance(&out, &one).unwrap() < 1e-10);
}
