//! Small dense helpers on top of nalgebra shared by the other modules.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Anything backed by a dense square matrix.
pub trait AsMatrix {
    fn as_matrix(&self) -> &Matrix;
}

impl AsMatrix for Matrix {
    fn as_matrix(&self) -> &Matrix {
        self
    }
}

impl<T: AsMatrix + ?Sized> AsMatrix for &T {
    fn as_matrix(&self) -> &Matrix {
        (**self).as_matrix()
    }
}

pub fn ensure_square(m: &Matrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Largest absolute entry; zero for an empty matrix.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Worst asymmetric pair `(row, col, |m[row,col] - m[col,row]|)`.
pub fn symmetry_defect(m: &Matrix) -> (usize, usize, f64) {
    let mut worst = (0, 0, 0.0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > worst.2 {
                worst = (i, j, d);
            }
        }
    }
    worst
}

/// Checks symmetry with a tolerance relative to the largest entry.
pub fn ensure_symmetric(m: &Matrix, what: &'static str, rel_tol: f64) -> Result<()> {
    ensure_square(m)?;
    let (row, col, deviation) = symmetry_defect(m);
    if deviation > rel_tol * max_abs(m) {
        return Err(Error::NotSymmetric {
            what,
            row,
            col,
            deviation,
        });
    }
    Ok(())
}

pub fn is_positive_definite(m: &Matrix) -> bool {
    m.nrows() == m.ncols() && m.clone().cholesky().is_some()
}

/// Symmetric eigendecomposition with eigenvalues ascending and each
/// eigenvector signed so its largest-magnitude component is positive.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: Matrix,
}

pub fn sym_eigen(m: &Matrix) -> SymEigen {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        for i in 0..n {
            // first index wins ties so degenerate columns stay deterministic
            if v[i].abs() > v[pivot].abs() + 1e-12 {
                pivot = i;
            }
        }
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, col)] = sign * v[i];
        }
    }
    SymEigen { values, vectors }
}

impl SymEigen {
    /// `U f(Λ) Uᵀ`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (col, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            for i in 0..n {
                scaled[(i, col)] *= s;
            }
        }
        scaled * self.vectors.transpose()
    }
}

/// `exp(t·m)` for symmetric `m` through its eigendecomposition.
pub fn expm_symmetric(m: &Matrix, t: f64) -> Matrix {
    sym_eigen(m).apply(|lambda| libm::exp(t * lambda))
}

/// Eigenvalues (ascending) of the pencil `(a, b)` with `b` symmetric positive
/// definite, via `L⁻¹ a L⁻ᵀ` where `b = L Lᵀ`.
pub fn generalized_sym_eigenvalues(a: &Matrix, b: &Matrix) -> Option<Vec<f64>> {
    let chol = b.clone().cholesky()?;
    let l = chol.l();
    let left = l.solve_lower_triangular(a)?;
    let reduced = l.solve_lower_triangular(&left.transpose())?;
    let sym = (&reduced + reduced.transpose()) * 0.5;
    Some(sym_eigen(&sym).values)
}

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual over the fitted points.
    pub max_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .fold(0.0f64, |acc, (x, y)| acc.max((y - intercept - slope * x).abs()));
    LineFit {
        slope,
        intercept,
        max_residual,
    }
}

/// Principal submatrix on `indices`, in the given order.
pub fn principal_submatrix(m: &Matrix, indices: &[usize]) -> Matrix {
    Matrix::from_fn(indices.len(), indices.len(), |i, j| m[(indices[i], indices[j])])
}
