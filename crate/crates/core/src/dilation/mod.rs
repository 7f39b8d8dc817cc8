//! Ancilla-based realization of single-qubit channels.
//!
//! A Kraus set `{K_j}` on a `d`-dimensional system is embedded as the first
//! block column of a unitary `V` on ancilla ⊗ system. Tracing out the
//! ancilla after `V (|0⟩⟨0| ⊗ ρ) V†` reproduces `Σ_j K_j ρ K_j†`. Noise on
//! several qubits runs sequentially with one ancilla register that is reset
//! between qubits.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::state::partial_trace_matrix;
use crate::linalg::{embed_operator, DensityMatrix};

/// Tolerance on `Σ K† K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

const GRAM_SCHMIDT_TOL: f64 = 1e-8;

fn completeness_deviation(kraus: &[ComplexMatrix]) -> Result<f64> {
    let d = kraus.first().ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?.dim()?;
    let mut sum = ComplexMatrix::zeros(d, d);
    for k in kraus {
        if k.dim()? != d {
            return Err(Error::DimensionMismatch { expected: d, found: k.rows() });
        }
        sum += &k.adjoint().matmul(k);
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(d)))
}

fn check_complete(kraus: &[ComplexMatrix]) -> Result<()> {
    let dev = completeness_deviation(kraus)?;
    if dev > COMPLETENESS_TOL {
        return Err(Error::InvalidArgument(format!("Kraus set is not trace preserving (deviation {dev:.3e})")));
    }
    Ok(())
}

/// `K₀ = diag(1, √(1−p))`, `K₁ = √p |0⟩⟨1|`.
pub fn amplitude_damping_kraus(p: f64) -> Result<[ComplexMatrix; 2]> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("damping probability {p} outside [0, 1]")));
    }
    Ok([
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - p).sqrt()]]),
        ComplexMatrix::from_real_rows(&[&[0.0, p.sqrt()], &[0.0, 0.0]]),
    ])
}

/// Unitary on ancilla ⊗ system (ancilla index most significant) with
/// `V[a·d + i, j] = K_a[i, j]`. Remaining columns complete the isometry by
/// Gram–Schmidt over the standard basis, so the result is deterministic.
pub fn stinespring_unitary(kraus: &[ComplexMatrix], ancilla_dim: usize) -> Result<ComplexMatrix> {
    check_complete(kraus)?;
    if kraus.len() > ancilla_dim {
        return Err(Error::InvalidArgument(format!(
            "{} Kraus operators do not fit an ancilla of dimension {ancilla_dim}",
            kraus.len()
        )));
    }
    let d = kraus[0].rows();
    let big = d * ancilla_dim;
    let mut columns: Vec<Vec<Complex64>> = (0..d)
        .map(|j| {
            let mut col = vec![Complex64::new(0.0, 0.0); big];
            for (a, k) in kraus.iter().enumerate() {
                for i in 0..d {
                    col[a * d + i] = k[(i, j)];
                }
            }
            col
        })
        .collect();
    for e in 0..big {
        if columns.len() == big {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); big];
        v[e] = Complex64::new(1.0, 0.0);
        // Two passes keep the extension orthogonal to working precision.
        for _ in 0..2 {
            for c in &columns {
                let overlap: Complex64 = c.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(c).for_each(|(y, x)| *y -= overlap * x);
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > GRAM_SCHMIDT_TOL {
            v.iter_mut().for_each(|y| *y /= norm);
            columns.push(v);
        }
    }
    Ok(ComplexMatrix::from_fn(big, big, |i, j| columns[j][i]))
}

/// Trace-preserving single-qubit channel in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalChannel {
    kraus: Vec<ComplexMatrix>,
}

impl LocalChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.iter().any(|k| k.rows() != 2 || !k.is_square()) {
            return Err(Error::DimensionMismatch { expected: 2, found: kraus.iter().map(|k| k.rows()).find(|&r| r != 2).unwrap_or(0) });
        }
        check_complete(&kraus)?;
        Ok(Self { kraus })
    }

    pub fn identity() -> Self {
        Self { kraus: vec![ComplexMatrix::identity(2)] }
    }

    pub fn amplitude_damping(p: f64) -> Result<Self> {
        Ok(Self { kraus: amplitude_damping_kraus(p)?.to_vec() })
    }

    /// `Σ p_i U_i ρ U_i†` with Kraus operators `√p_i U_i`.
    pub fn unitary_mixture(parts: &[(f64, ComplexMatrix)]) -> Result<Self> {
        if parts.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(Error::InvalidArgument("mixture weights must be nonnegative".into()));
        }
        Self::new(parts.iter().map(|(p, u)| u.scale_real(p.sqrt())).collect())
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Ancilla qubits needed to hold the Kraus index.
    pub fn ancilla_qubits(&self) -> usize {
        self.kraus.len().next_power_of_two().trailing_zeros() as usize
    }

    pub fn stinespring(&self) -> Result<ComplexMatrix> {
        stinespring_unitary(&self.kraus, 1 << self.ancilla_qubits())
    }
}

/// How [`apply_local_noise`] realizes each channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Kraus sums on the density matrix.
    #[default]
    Kraus,
    /// Stinespring unitary on system plus a reset ancilla register.
    Dilation,
}

fn apply_kraus(rho: &ComplexMatrix, ch: &LocalChannel, qubit: usize, n: usize) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for k in ch.kraus() {
        let e = embed_operator(k, &[qubit], n)?;
        out += &e.matmul(rho).matmul(&e.adjoint());
    }
    Ok(out)
}

fn apply_dilated(rho: &ComplexMatrix, ch: &LocalChannel, qubit: usize, n: usize) -> Result<ComplexMatrix> {
    let m = ch.ancilla_qubits();
    if m == 0 {
        return apply_kraus(rho, ch, qubit, n);
    }
    let da = 1usize << m;
    let mut fresh = ComplexMatrix::zeros(da, da);
    fresh[(0, 0)] = Complex64::new(1.0, 0.0);
    let joint = rho.kron(&fresh);
    // Ancilla qubits follow the system; the ancilla index is the most
    // significant part of the local operator.
    let targets: Vec<usize> = (n..n + m).chain(std::iter::once(qubit)).collect();
    let v = embed_operator(&ch.stinespring()?, &targets, n + m)?;
    let evolved = v.conjugate(&joint);
    let keep: Vec<usize> = (0..n).collect();
    partial_trace_matrix(&evolved, n + m, &keep)
}

/// Applies `⊗_q G_q` for the given `(qubit, channel)` assignments.
/// Qubits without an assignment are left alone.
pub fn apply_local_noise(rho: &DensityMatrix, assignments: &[(usize, LocalChannel)], mode: NoiseMode) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    let mut seen = vec![false; n];
    for (q, _) in assignments {
        if *q >= n {
            return Err(Error::DimensionMismatch { expected: n, found: q + 1 });
        }
        if std::mem::replace(&mut seen[*q], true) {
            return Err(Error::InvalidArgument(format!("qubit {q} assigned twice")));
        }
    }
    let mut x = rho.matrix().clone();
    for (q, ch) in assignments {
        x = match mode {
            NoiseMode::Kraus => apply_kraus(&x, ch, *q, n)?,
            NoiseMode::Dilation => apply_dilated(&x, ch, *q, n)?,
        };
    }
    DensityMatrix::with_tolerance(x, 1e-9)
}

/// `Σ_i λ_i (⊗_q G_q^{(i)})(ρ)` over weighted assignment sets.
pub fn apply_local_mixture(
    rho: &DensityMatrix,
    terms: &[(f64, Vec<(usize, LocalChannel)>)],
    mode: NoiseMode,
) -> Result<DensityMatrix> {
    let weights: Vec<f64> = terms.iter().map(|(w, _)| *w).collect();
    crate::channel::check_probabilities(&weights)?;
    let mut acc = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for (w, a) in terms {
        acc.add_scaled(Complex64::new(*w, 0.0), apply_local_noise(rho, a, mode)?.matrix());
    }
    DensityMatrix::with_tolerance(acc, 1e-9)
}
