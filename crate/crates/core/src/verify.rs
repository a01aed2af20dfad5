//! End-to-end checks that an H-graph generates a given cluster state.
//!
//! For each squeezing value in the schedule the vacuum is evolved under `G`,
//! the flagged modes are rotated, and the nullifier variances are fitted
//! against `r`. Besides the per-nullifier fits the report carries the
//! *channel exponents*: the nullifier covariance `M(r)` of a true cluster
//! state is `K·diag(e^{−2r|λₖ|})·Kᵀ` for a fixed `K`, so the eigenvalues of
//! the pencil `(M(r), M(0))` are pure exponentials whose rates are the
//! squeezing spectrum of `G`. A single nullifier can mix several rates; the
//! channels separate them.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gaussian::{squeezing_spectrum, QuadratureCombination};
use crate::graph::{
    bipartite_embed, connected_components, find_renumbering, skew_identity, tensor, AdjacencyMatrix,
    BipartiteBlock, Permutation,
};
use crate::linalg::{AsMatrix, ensure_square, fit_line, generalized_sym_eigenvalues, principal_submatrix, LineFit, Matrix};
use crate::nullifier::{cluster_nullifiers, NullifierSet};

/// Largest mode count for the exhaustive rotation search.
pub const ROTATION_SEARCH_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// A nullifier passes only if its fitted exponent is below `−exponent`.
    pub exponent: f64,
    /// ... and its variance at the largest `r` is below this fraction of its
    /// vacuum variance.
    pub variance_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exponent: 1e-3,
            variance_ratio: 0.5,
        }
    }
}

/// Per-nullifier results. `mode` is the vertex the nullifier belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct NullifierRow {
    pub mode: usize,
    pub component: usize,
    pub combination: QuadratureCombination,
    pub vacuum_variance: f64,
    pub variances: Vec<f64>,
    /// Least-squares fit of `ln(variance)` against `r`; the slope is the
    /// fitted exponent.
    pub fit: LineFit,
    /// Reference variances the row is compared against, if any (the
    /// unmeasured nullifier for measurement reductions).
    pub baseline: Vec<f64>,
    pub pass: bool,
}

impl NullifierRow {
    pub fn exponent(&self) -> f64 {
        self.fit.slope
    }

    pub fn normalized(&self) -> Vec<f64> {
        self.variances.iter().map(|v| v / self.vacuum_variance).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub modes: Vec<usize>,
    /// Renumbering onto the reference cluster, when one was required.
    pub witness: Option<Permutation>,
    pub rotations: Vec<usize>,
    pub channel_exponents: Vec<f64>,
    pub pass: bool,
}

/// Outcome of a position-measurement reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSummary {
    pub measured: Vec<usize>,
    pub remaining: Vec<usize>,
    pub reduced: AdjacencyMatrix,
    /// Edge signs (in [`crate::reduction::grid_edges`] order) of the grid the
    /// reduced graph matched, with the matching witness.
    pub grid_match: Option<crate::reduction::GridMatch>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub schedule: Vec<f64>,
    pub rotations: Vec<usize>,
    pub nullifiers: Vec<NullifierRow>,
    /// Ascending.
    pub channel_exponents: Vec<f64>,
    /// Worst residual of the channel log-linear fits.
    pub channel_residual: f64,
    pub components: Vec<ComponentReport>,
    pub measurement: Option<MeasurementSummary>,
    pub tolerances: Tolerances,
    pub pass: bool,
}

pub fn validate_schedule(schedule: &[f64], min_points: usize) -> Result<()> {
    if schedule.len() < min_points {
        return Err(Error::InvalidSchedule(format!(
            "need at least {min_points} values, got {}",
            schedule.len()
        )));
    }
    if schedule.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidSchedule("values must be positive and finite".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule("values must be strictly increasing".into()));
    }
    Ok(())
}

fn ln_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| libm::log(*x)).collect()
}

/// Nullifier covariances at every schedule point.
fn nullifier_covariances(g: &Matrix, set: &NullifierSet, schedule: &[f64]) -> Result<Vec<Matrix>> {
    let spectrum = squeezing_spectrum(g)?;
    schedule
        .iter()
        .map(|&r| set.covariance(&spectrum.evolve_vacuum(r)?))
        .collect()
}

fn channel_fits(set: &NullifierSet, covs: &[Matrix], schedule: &[f64]) -> (Vec<f64>, f64) {
    let rows = set.coefficient_matrix();
    let m0 = &rows * rows.transpose();
    let n = set.len();
    let per_r: Vec<Vec<f64>> = covs
        .iter()
        .map(|m| generalized_sym_eigenvalues(m, &m0).expect("nullifier rows are independent"))
        .collect();
    let mut exponents = Vec::with_capacity(n);
    let mut residual: f64 = 0.0;
    for k in 0..n {
        let ys: Vec<f64> = per_r.iter().map(|mu| mu[k]).collect();
        if ys.iter().any(|y| *y <= 0.0) {
            exponents.push(f64::NAN);
            residual = f64::INFINITY;
            continue;
        }
        let fit = fit_line(schedule, &ln_all(&ys));
        exponents.push(fit.slope);
        residual = residual.max(fit.max_residual);
    }
    exponents.sort_by(f64::total_cmp);
    (exponents, residual)
}

fn nullifier_rows(set: &NullifierSet, covs: &[Matrix], schedule: &[f64], tol: &Tolerances) -> Vec<NullifierRow> {
    set.combinations()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let variances: Vec<f64> = covs.iter().map(|m| m[(i, i)]).collect();
            let vacuum_variance = c.norm_squared();
            let fit = fit_line(schedule, &ln_all(&variances));
            let last = *variances.last().expect("schedule is non-empty");
            let pass = fit.slope < -tol.exponent && last < tol.variance_ratio * vacuum_variance;
            NullifierRow {
                mode: i,
                component: 0,
                combination: c.clone(),
                vacuum_variance,
                variances,
                fit,
                baseline: Vec::new(),
                pass,
            }
        })
        .collect()
}

/// Checks that `g` generates the cluster state of `a` once `rotations` are
/// applied. `schedule` needs at least three increasing positive values.
pub fn verify_cluster(
    g: &impl AsMatrix,
    a: &AdjacencyMatrix,
    rotations: &BTreeSet<usize>,
    schedule: &[f64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let g = g.as_matrix();
    let n = ensure_square(g)?;
    if a.size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.size(),
        });
    }
    validate_schedule(schedule, 3)?;
    let set = cluster_nullifiers(a, rotations)?;
    let covs = nullifier_covariances(g, &set, schedule)?;
    let nullifiers = nullifier_rows(&set, &covs, schedule, tol);
    let (channel_exponents, channel_residual) = channel_fits(&set, &covs, schedule);
    let pass = nullifiers.iter().all(|row| row.pass);
    let rotations: Vec<usize> = rotations.iter().copied().collect();
    Ok(VerificationReport {
        schedule: schedule.to_vec(),
        rotations: rotations.clone(),
        nullifiers,
        channel_exponents: channel_exponents.clone(),
        channel_residual,
        components: alloc::vec![ComponentReport {
            modes: (0..n).collect(),
            witness: None,
            rotations,
            channel_exponents,
            pass,
        }],
        measurement: None,
        tolerances: *tol,
        pass,
    })
}

/// Every rotation subset (over `n ≤ 8` modes) for which
/// [`verify_cluster`] passes, in ascending bitmask order.
pub fn search_rotations(
    g: &impl AsMatrix,
    a: &AdjacencyMatrix,
    schedule: &[f64],
    tol: &Tolerances,
) -> Result<Vec<BTreeSet<usize>>> {
    let g = g.as_matrix();
    let n = ensure_square(g)?;
    if a.size() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.size(),
        });
    }
    if n > ROTATION_SEARCH_CAP {
        return Err(Error::SizeTooLarge {
            size: n,
            cap: ROTATION_SEARCH_CAP,
        });
    }
    validate_schedule(schedule, 3)?;
    let spectrum = squeezing_spectrum(g)?;
    let states = schedule
        .iter()
        .map(|&r| spectrum.evolve_vacuum(r))
        .collect::<Result<Vec<_>>>()?;
    let mut passing = Vec::new();
    for mask in 0u32..(1 << n) {
        let rotations: BTreeSet<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let set = cluster_nullifiers(a, &rotations)?;
        let covs = states.iter().map(|s| set.covariance(s)).collect::<Result<Vec<_>>>()?;
        if nullifier_rows(&set, &covs, schedule, tol).iter().all(|row| row.pass) {
            passing.push(rotations);
        }
    }
    Ok(passing)
}

/// Checks that `g_n` splits into `copies` components, each a renumbering of
/// `F₂ ⊗ A0`, and that every component generates the cluster of `A0`.
///
/// Within a component the cluster graph is `bipartite_embed(A0)` carried over
/// by the renumbering, and the modes rotated are the images of the second
/// half of the bipartition.
pub fn verify_copies(
    g_n: &impl AsMatrix,
    a0: &BipartiteBlock,
    copies: usize,
    schedule: &[f64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let g = g_n.as_matrix();
    let size = ensure_square(g)?;
    let half = a0.size();
    if size != 2 * copies * half {
        return Err(Error::DimensionMismatch {
            expected: 2 * copies * half,
            found: size,
        });
    }
    validate_schedule(schedule, 3)?;
    let comps = connected_components(g);
    if comps.len() != copies {
        return Err(Error::WrongComponentCount {
            expected: copies,
            actual: comps.len(),
        });
    }
    let template = tensor(&skew_identity(2), a0);
    let cluster = bipartite_embed(a0);
    let mut nullifiers = Vec::new();
    let mut components = Vec::new();
    let mut channel_exponents = Vec::new();
    let mut channel_residual: f64 = 0.0;
    let mut rotations_all = Vec::new();
    for (index, comp) in comps.iter().enumerate() {
        let sub = principal_submatrix(g, comp);
        let Some(witness) = find_renumbering(&sub, &template)? else {
            components.push(ComponentReport {
                modes: comp.clone(),
                witness: None,
                rotations: Vec::new(),
                channel_exponents: Vec::new(),
                pass: false,
            });
            continue;
        };
        let local_cluster = AdjacencyMatrix::cluster(witness.push_forward(cluster.entries()))?;
        let local_rot: BTreeSet<usize> = (half..2 * half).map(|i| witness.image(i)).collect();
        let report = verify_cluster(&sub, &local_cluster, &local_rot, schedule, tol)?;
        for mut row in report.nullifiers {
            row.mode = comp[row.mode];
            row.component = index;
            nullifiers.push(row);
        }
        let rotations: Vec<usize> = local_rot.iter().map(|&j| comp[j]).collect();
        rotations_all.extend(rotations.iter().copied());
        channel_exponents.extend(report.channel_exponents.iter().copied());
        channel_residual = channel_residual.max(report.channel_residual);
        components.push(ComponentReport {
            modes: comp.clone(),
            witness: Some(witness),
            rotations,
            channel_exponents: report.channel_exponents,
            pass: report.pass,
        });
    }
    channel_exponents.sort_by(f64::total_cmp);
    rotations_all.sort_unstable();
    let pass = components.len() == copies && components.iter().all(|c| c.pass);
    Ok(VerificationReport {
        schedule: schedule.to_vec(),
        rotations: rotations_all,
        nullifiers,
        channel_exponents,
        channel_residual,
        components,
        measurement: None,
        tolerances: *tol,
        pass,
    })
}
