//! Hermitian eigendecomposition and the spectral quantities built on it.
//!
//! The decomposition itself is delegated to `nalgebra`; everything here works
//! on [`ComplexMatrix`] and converts at the boundary.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Eigenvalues and eigenvectors (as columns) of a Hermitian matrix.
///
/// Only the lower triangle is read, so callers should check Hermiticity
/// themselves when it is not guaranteed by construction.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim()?;
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::new(to_nalgebra(m));
    let values = eig.eigenvalues.iter().copied().collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)]);
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(SymmetricEigen::new(to_nalgebra(m)).eigenvalues.iter().copied().collect())
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(m)?;
    let n = values.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let fl = f(lambda);
        if fl == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vectors[(i, k)] * fl;
            for j in 0..n {
                out[(i, j)] += vi * vectors[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Trace norm of a Hermitian matrix.
pub fn hermitian_trace_norm(m: &ComplexMatrix, tol: f64) -> Result<f64> {
    let dev = m.hermitian_deviation();
    if dev > tol {
        return Err(Error::NotHermitian(format!("deviation {dev:.3e}")));
    }
    Ok(hermitian_eigenvalues(m)?.iter().map(|l| l.abs()).sum())
}

/// Trace norm of an arbitrary square matrix: the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    m.dim()?;
    let svd = to_nalgebra(m).svd(false, false);
    Ok(svd.singular_values.iter().sum())
}
