//! Dense row-major complex matrices.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

// Products with at least this many output entries are split across threads.
// Each output row is computed by a single thread, so results do not depend
// on the schedule.
const PAR_THRESHOLD: usize = 64 * 64;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, s) in sums.iter_mut().enumerate() {
                *s += self.data[i * self.cols + j].norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn try_matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        Ok(self.matmul(other))
    }

    /// Matrix product. Panics on incompatible shapes; see [`Self::try_matmul`].
    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (n, m) = (self.rows, other.cols);
        let mut out = vec![ZERO; n * m];
        let kernel = |(i, out_row): (usize, &mut [Complex64])| {
            let a_row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * m..(k + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        };
        if n * m >= PAR_THRESHOLD && m > 0 {
            out.par_chunks_mut(m).enumerate().for_each(kernel);
        } else if m > 0 {
            out.chunks_mut(m).enumerate().for_each(kernel);
        }
        ComplexMatrix { rows: n, cols: m, data: out }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = ComplexMatrix::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    let dst = (i * other.rows + k) * c + j * other.cols;
                    let src = &other.data[k * other.cols..(k + 1) * other.cols];
                    for (o, &b) in out.data[dst..dst + other.cols].iter_mut().zip(src) {
                        *o = a * b;
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &ComplexMatrix) -> ComplexMatrix {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `self · rho · self†`.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rho).matmul(&self.adjoint())
    }

    pub fn pow(&self, mut exp: u64) -> ComplexMatrix {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut base = self.clone();
        let mut acc = ComplexMatrix::identity(self.rows);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.matmul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.matmul(&base);
            }
        }
        acc
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows)) <= tol
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let a = self.adjoint();
        a.matmul(self).max_abs_diff(&self.matmul(&a)) <= tol
    }

    /// Hermitian with no eigenvalue below `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && super::eigen::hermitian_eigenvalues(self).is_ok_and(|ev| ev.iter().all(|&l| l >= -tol))
    }

    /// Column-stacking vectorization: entry `(i, j)` lands at `i + rows * j`.
    pub fn vec_columns(&self) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                v[i + self.rows * j] = self[(i, j)];
            }
        }
        v
    }

    pub fn unvec_columns(v: &[Complex64], rows: usize, cols: usize) -> Result<Self> {
        if v.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: v.len() });
        }
        Ok(Self::from_fn(rows, cols, |i, j| v[i + rows * j]))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_matches_block_layout() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(0, 1)], c(1.0, 0.0));
        assert_eq!(k[(1, 2)], c(2.0, 0.0));
        assert_eq!(k[(2, 1)], c(3.0, 0.0));
        assert_eq!(k[(3, 2)], c(4.0, 0.0));
        assert_eq!(k[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn vec_identity_for_column_stacking() {
        // vec(A X B) = (B^T ⊗ A) vec(X)
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let x = ComplexMatrix::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, -1.0));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| c(j as f64 - i as f64, 0.5));
        let lhs = a.matmul(&x).matmul(&b).vec_columns();
        let rhs = b.transpose().kron(&a).matvec(&x.vec_columns());
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-12);
        }
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.try_matmul(&a).is_err());
        assert!(a.dim().is_err());
    }

    #[test]
    fn large_product_is_schedule_independent() {
        let a = ComplexMatrix::from_fn(80, 80, |i, j| c((i as f64 * 0.37).sin(), (j as f64 * 0.11).cos()));
        let p1 = a.matmul(&a);
        let p2 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| a.matmul(&a));
        assert_eq!(p1, p2);
    }

    #[test]
    fn pow_by_squaring() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let p = a.pow(5);
        assert_eq!(p[(0, 1)], c(5.0, 0.0));
        assert_eq!(a.pow(0), ComplexMatrix::identity(2));
    }
}
