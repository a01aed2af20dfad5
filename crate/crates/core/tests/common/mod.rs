#![allow(dead_code)]

use combsim_core::{Matrix, QuadratureCombination};

/// Scaling and squaring with a truncated Taylor series.
pub fn expm_taylor(m: &Matrix) -> Matrix {
    let n = m.nrows();
    let norm = m.abs().row_sum().max();
    let mut s = 0;
    while norm / f64::from(1u32 << s) > 0.5 {
        s += 1;
    }
    let a = m / f64::from(1u32 << s);
    let mut term = Matrix::identity(n, n);
    let mut sum = Matrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).abs().max()
}

/// Residual of projecting `c` onto the row space of `basis`.
pub fn span_residual(c: &QuadratureCombination, basis: &[QuadratureCombination]) -> f64 {
    let rows = Matrix::from_fn(basis.len(), 2 * c.modes(), |i, j| basis[i].stacked()[j]);
    let v = c.stacked();
    let gram = &rows * rows.transpose();
    let coeffs = gram.try_inverse().expect("independent basis") * (&rows * &v);
    (rows.transpose() * coeffs - v).norm()
}

pub fn delta() -> (f64, f64) {
    let s5 = 5f64.sqrt();
    ((s5 + 1.0) / 2.0, (s5 - 1.0) / 2.0)
}
