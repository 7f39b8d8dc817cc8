//! Matrix exponential by scaling and squaring around a truncated Taylor core.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::Result;

const TAYLOR_DEGREE: usize = 16;
const SCALED_NORM_TARGET: f64 = 0.5;

/// `exp(scale * a)`.
///
/// The argument is halved `s` times until its 1-norm is at most 0.5, the
/// degree-16 Taylor polynomial is evaluated by Horner's rule, and the result
/// is squared `s` times. At norm 0.5 the truncation error is below
/// `0.5^17 / 17!`, far under double precision.
pub fn matrix_exp(a: &ComplexMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    let n = a.dim()?;
    let scaled = a.scale(scale);
    let norm = scaled.one_norm();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let squarings = if norm > SCALED_NORM_TARGET {
        (norm / SCALED_NORM_TARGET).log2().ceil() as i32
    } else {
        0
    };
    let x = scaled.scale_real(0.5f64.powi(squarings));

    // Horner: I + x/1 (I + x/2 (I + ... (I + x/16)))
    let identity = ComplexMatrix::identity(n);
    let mut acc = identity.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        acc = x.matmul(&acc).scale_real(1.0 / k as f64);
        acc += &identity;
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::linalg::matrix::{I, ONE};

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(matrix_exp(&z, ONE).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn pauli_rotation_by_half_pi() {
        let e = matrix_exp(&pauli_x(), -I * FRAC_PI_2).unwrap();
        let expected = pauli_x().scale(-I);
        assert!(e.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        assert!(matrix_exp(&ComplexMatrix::zeros(2, 3), ONE).is_err());
    }

    #[test]
    fn large_norm_scalar_case() {
        // exp(40) on a 1x1 matrix exercises many squarings.
        let a = ComplexMatrix::from_real_rows(&[&[40.0]]);
        let e = matrix_exp(&a, ONE).unwrap();
        assert!((e[(0, 0)].re / 40f64.exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn anti_hermitian_argument_is_unitary() {
        let h = ComplexMatrix::from_fn(6, 6, |i, j| {
            let re = ((i + 2 * j) as f64).sin() + ((j + 2 * i) as f64).sin();
            let im = ((i * j) as f64).cos() - ((j * i) as f64).cos() + (i as f64 - j as f64) * 0.3;
            Complex64::new(re, im)
        });
        assert!(h.is_hermitian(1e-12));
        let u = matrix_exp(&h, Complex64::new(0.0, -3.7)).unwrap();
        assert!(u.is_unitary(1e-10));
    }
}
