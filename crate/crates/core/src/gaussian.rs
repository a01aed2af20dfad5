//! Gaussian states of `n` modes in the quadrature convention `Q = a + a†`,
//! `P = i(a† − a)`, so the vacuum has `⟨Q²⟩ = ⟨P²⟩ = 1` and `[Q, P] = 2i`.
//!
//! Covariances are stored in the ordering `(Q₁..Qₙ, P₁..Pₙ)`. Evolution under
//! the multimode squeezing Hamiltonian with coupling matrix `G` and
//! `r = κt` is `Q(r) = e^{rG} Q(0)`, `P(r) = e^{−rG} P(0)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{AsMatrix, ensure_symmetric, sym_eigen, Matrix, SymEigen, Vector};

/// Smallest `Var(Qⱼ)` accepted by [`measure_position`].
pub const SINGULAR_MEASUREMENT: f64 = 1e-14;
/// Eigenvalues of `|λ|` at or below this are treated as unsqueezed.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: usize,
    cov: Matrix,
    mean: Vector,
}

impl GaussianState {
    pub fn vacuum(modes: usize) -> Self {
        Self {
            modes,
            cov: Matrix::identity(2 * modes, 2 * modes),
            mean: Vector::zeros(2 * modes),
        }
    }

    /// Wraps a `2n×2n` covariance; checks shape and symmetry only.
    pub fn from_covariance(cov: Matrix) -> Result<Self> {
        ensure_symmetric(&cov, "covariance", 1e-12)?;
        if !cov.nrows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: cov.nrows() + 1,
                found: cov.nrows(),
            });
        }
        let modes = cov.nrows() / 2;
        Ok(Self {
            modes,
            cov,
            mean: Vector::zeros(2 * modes),
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    pub fn mean(&self) -> &Vector {
        &self.mean
    }

    pub fn q_index(&self, mode: usize) -> usize {
        mode
    }

    pub fn p_index(&self, mode: usize) -> usize {
        self.modes + mode
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes,
            });
        }
        Ok(())
    }

    pub fn determinant(&self) -> f64 {
        self.cov.clone().determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + iΩ`, computed on
    /// its real embedding `[[cov, −Ω], [Ω, cov]]`. Physical states have this
    /// `≥ 0`; pure states saturate it.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let d = 2 * self.modes;
        let n = self.modes;
        let mut omega = Matrix::zeros(d, d);
        for i in 0..n {
            omega[(i, n + i)] = 1.0;
            omega[(n + i, i)] = -1.0;
        }
        let mut big = Matrix::zeros(2 * d, 2 * d);
        big.view_mut((0, 0), (d, d)).copy_from(&self.cov);
        big.view_mut((d, d), (d, d)).copy_from(&self.cov);
        big.view_mut((0, d), (d, d)).copy_from(&(-&omega));
        big.view_mut((d, 0), (d, d)).copy_from(&omega);
        sym_eigen(&big).values.first().copied().unwrap_or(0.0)
    }

    /// Symmetric covariance satisfying the uncertainty bound within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        crate::linalg::symmetry_defect(&self.cov).2 == 0.0 && self.min_uncertainty_eigenvalue() >= -tol
    }
}

/// The operator `Σ qᵢQᵢ + Σ pᵢPᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureCombination {
    q: Vector,
    p: Vector,
}

impl QuadratureCombination {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: q.len(),
                found: p.len(),
            });
        }
        if q.iter().chain(&p).all(|x| *x == 0.0) {
            return Err(Error::ZeroCombination);
        }
        Ok(Self {
            q: Vector::from_vec(q),
            p: Vector::from_vec(p),
        })
    }

    pub fn q_only(q: Vec<f64>) -> Result<Self> {
        let n = q.len();
        Self::new(q, alloc::vec![0.0; n])
    }

    pub fn p_only(p: Vec<f64>) -> Result<Self> {
        let n = p.len();
        Self::new(alloc::vec![0.0; n], p)
    }

    pub fn modes(&self) -> usize {
        self.q.len()
    }

    pub fn q_coeffs(&self) -> &[f64] {
        self.q.as_slice()
    }

    pub fn p_coeffs(&self) -> &[f64] {
        self.p.as_slice()
    }

    /// Coefficients stacked as `(q, p)` to match the covariance ordering.
    pub fn stacked(&self) -> Vector {
        let n = self.modes();
        Vector::from_fn(2 * n, |i, _| if i < n { self.q[i] } else { self.p[i - n] })
    }

    /// Squared coefficient norm: the variance on the vacuum.
    pub fn norm_squared(&self) -> f64 {
        self.q.norm_squared() + self.p.norm_squared()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            q: &self.q * factor,
            p: &self.p * factor,
        }
    }
}

/// Single-mode π/2 phase rotation.
///
/// On a combination it substitutes `Qⱼ ↦ Pⱼ`, `Pⱼ ↦ −Qⱼ`. On a state it maps
/// the quadratures to `Q'ⱼ = −Pⱼ`, `P'ⱼ = Qⱼ`; the two are paired so that
/// `variance(rotate(s), rotate(c)) = variance(s, c)`. Four applications are
/// the identity.
pub trait RotateMode: Sized {
    fn rotate_mode(&self, mode: usize) -> Result<Self>;
}

impl RotateMode for QuadratureCombination {
    fn rotate_mode(&self, mode: usize) -> Result<Self> {
        if mode >= self.modes() {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes(),
            });
        }
        let mut out = self.clone();
        out.q[mode] = -self.p[mode];
        out.p[mode] = self.q[mode];
        Ok(out)
    }
}

impl RotateMode for GaussianState {
    fn rotate_mode(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let (qi, pi) = (self.q_index(mode), self.p_index(mode));
        let d = 2 * self.modes;
        let mut s = Matrix::identity(d, d);
        s[(qi, qi)] = 0.0;
        s[(pi, pi)] = 0.0;
        s[(qi, pi)] = -1.0;
        s[(pi, qi)] = 1.0;
        Ok(Self {
            modes: self.modes,
            cov: &s * &self.cov * s.transpose(),
            mean: &s * &self.mean,
        })
    }
}

pub fn rotate_mode<T: RotateMode>(x: &T, mode: usize) -> Result<T> {
    x.rotate_mode(mode)
}

/// Rotates every mode in `modes` once.
pub fn rotate_modes<T: RotateMode + Clone>(x: &T, modes: impl IntoIterator<Item = usize>) -> Result<T> {
    let mut out = x.clone();
    for m in modes {
        out = out.rotate_mode(m)?;
    }
    Ok(out)
}

fn check_squeezing(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidSqueezing(r));
    }
    Ok(())
}

/// Evolves the vacuum for `r = κt`: `V_Q = e^{2rG}`, `V_P = e^{−2rG}` and no
/// Q–P correlations.
pub fn evolve_vacuum(g: &impl AsMatrix, r: f64) -> Result<GaussianState> {
    let g = g.as_matrix();
    ensure_symmetric(g, "coupling matrix", 1e-12)?;
    check_squeezing(r)?;
    Ok(evolve_with(&sym_eigen(g), r))
}

fn evolve_with(eig: &SymEigen, r: f64) -> GaussianState {
    let n = eig.values.len();
    let vq = eig.apply(|l| libm::exp(2.0 * r * l));
    let vp = eig.apply(|l| libm::exp(-2.0 * r * l));
    let mut cov = Matrix::zeros(2 * n, 2 * n);
    cov.view_mut((0, 0), (n, n)).copy_from(&vq);
    cov.view_mut((n, n), (n, n)).copy_from(&vp);
    // the eigen route is symmetric only up to round-off
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianState {
        modes: n,
        cov,
        mean: Vector::zeros(2 * n),
    }
}

/// `cᵀ · cov · c` for the stacked coefficient vector.
pub fn variance(state: &GaussianState, c: &QuadratureCombination) -> Result<f64> {
    if c.modes() != state.modes {
        return Err(Error::DimensionMismatch {
            expected: state.modes,
            found: c.modes(),
        });
    }
    let v = c.stacked();
    Ok(v.dot(&(&state.cov * &v)))
}

/// Conditional state of the other `n−1` modes after an ideal homodyne
/// measurement of `Qⱼ`. The covariance update does not depend on the
/// outcome, so means are left untouched (zero throughout).
pub fn measure_position(state: &GaussianState, mode: usize) -> Result<GaussianState> {
    state.check_mode(mode)?;
    let k = state.q_index(mode);
    let var = state.cov[(k, k)];
    if var < SINGULAR_MEASUREMENT {
        return Err(Error::SingularMeasurement { mode, variance: var });
    }
    let col = state.cov.column(k).into_owned();
    let updated = &state.cov - (&col * col.transpose()) / var;
    let n = state.modes;
    let keep: Vec<usize> = (0..2 * n).filter(|&i| i != mode && i != n + mode).collect();
    let cov = crate::linalg::principal_submatrix(&updated, &keep);
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = Vector::from_fn(keep.len(), |i, _| state.mean[keep[i]]);
    Ok(GaussianState {
        modes: n - 1,
        cov,
        mean,
    })
}

/// Measures several modes (original indices), highest index first so the
/// remaining indices stay valid.
pub fn measure_positions(state: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
    let mut sorted = modes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = state.clone();
    for &m in sorted.iter().rev() {
        out = measure_position(&out, m)?;
    }
    Ok(out)
}

/// Eigendecomposition of `G` read as squeezing rates: along eigenvector `v`
/// with eigenvalue `λ`, `v·Q` scales as `e^{rλ}` and `v·P` as `e^{−rλ}`.
#[derive(Debug, Clone)]
pub struct SqueezingSpectrum {
    eigen: SymEigen,
}

/// A joint quadrature whose variance decays as `e^{−2r|λ|}·‖v‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedCombination {
    pub combination: QuadratureCombination,
    pub eigenvalue: f64,
    /// Amplitude exponent per unit `r`; always `−|λ|`.
    pub rate: f64,
}

impl SqueezingSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigen.vectors
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.eigen.vectors.column(k).iter().copied().collect()
    }

    /// Amplitude exponent of the Q-combination along eigenvector `k`.
    pub fn q_exponent(&self, k: usize) -> f64 {
        self.eigen.values[k]
    }

    pub fn p_exponent(&self, k: usize) -> f64 {
        -self.eigen.values[k]
    }

    /// Q-combinations for negative eigenvalues, P-combinations for positive
    /// ones; zero eigenvalues are skipped.
    pub fn squeezed_combinations(&self) -> Vec<SqueezedCombination> {
        let mut out = Vec::new();
        for (k, &lambda) in self.eigen.values.iter().enumerate() {
            if lambda.abs() <= ZERO_EIGENVALUE {
                continue;
            }
            let v = self.eigenvector(k);
            let combination = if lambda < 0.0 {
                QuadratureCombination::q_only(v)
            } else {
                QuadratureCombination::p_only(v)
            }
            .expect("eigenvectors are nonzero");
            out.push(SqueezedCombination {
                combination,
                eigenvalue: lambda,
                rate: -lambda.abs(),
            });
        }
        out
    }

    /// Evolves the vacuum reusing this decomposition.
    pub fn evolve_vacuum(&self, r: f64) -> Result<GaussianState> {
        check_squeezing(r)?;
        Ok(evolve_with(&self.eigen, r))
    }
}

pub fn squeezing_spectrum(g: &impl AsMatrix) -> Result<SqueezingSpectrum> {
    let g = g.as_matrix();
    ensure_symmetric(g, "coupling matrix", 1e-12)?;
    Ok(SqueezingSpectrum { eigen: sym_eigen(g) })
}
