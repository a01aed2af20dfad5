//! Position-measurement reductions of cluster graphs.
//!
//! Ideal rule: measuring `Q` on a vertex removes it and its edges. The cube
//! cluster loses an adjacent vertex pair to become a 2×3 grid.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gaussian::{measure_positions, squeezing_spectrum};
use crate::graph::{
    bipartite_embed, cube_block, find_renumbering, AdjacencyMatrix, Permutation, EDGE_THRESHOLD,
};
use crate::linalg::{fit_line, Matrix};
use crate::nullifier::cluster_nullifiers;
use crate::verify::{
    search_rotations, validate_schedule, MeasurementSummary, NullifierRow, Tolerances, VerificationReport,
};

/// Default measured pair for the cube: a left vertex and its first neighbour.
pub const CUBE_PAIR: (usize, usize) = (0, 4);

/// Deletes `vertices` and their edges; the rest keep their relative order.
pub fn graph_measure_q(a: &AdjacencyMatrix, vertices: &BTreeSet<usize>) -> Result<AdjacencyMatrix> {
    if let Some(&index) = vertices.iter().find(|&&v| v >= a.size()) {
        return Err(Error::ModeOutOfRange { index, modes: a.size() });
    }
    let keep: Vec<usize> = (0..a.size()).filter(|i| !vertices.contains(i)).collect();
    Ok(a.induced(&keep))
}

/// Edges of the `rows × cols` grid in row-major vertex order: horizontal
/// edges row by row, then vertical edges column by column.
pub fn grid_edges(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            edges.push((r * cols + c, r * cols + c + 1));
        }
    }
    for c in 0..cols {
        for r in 0..rows.saturating_sub(1) {
            edges.push((r * cols + c, (r + 1) * cols + c));
        }
    }
    edges
}

pub fn grid_graph(rows: usize, cols: usize, weight: f64) -> Result<AdjacencyMatrix> {
    let signs = alloc::vec![1.0; grid_edges(rows, cols).len()];
    grid_graph_signed(rows, cols, weight, &signs)
}

/// Grid with edge `k` (in [`grid_edges`] order) weighted `signs[k]·|weight|`.
pub fn grid_graph_signed(rows: usize, cols: usize, weight: f64, signs: &[f64]) -> Result<AdjacencyMatrix> {
    if rows * cols < 1 {
        return Err(Error::InvalidArgument("grid needs at least one vertex".into()));
    }
    if !weight.is_finite() {
        return Err(Error::NonFinite);
    }
    let edges = grid_edges(rows, cols);
    if signs.len() != edges.len() {
        return Err(Error::DimensionMismatch {
            expected: edges.len(),
            found: signs.len(),
        });
    }
    let n = rows * cols;
    let mut m = Matrix::zeros(n, n);
    for (&(i, j), s) in edges.iter().zip(signs) {
        let w = s.signum() * weight.abs();
        m[(i, j)] = w;
        m[(j, i)] = w;
    }
    AdjacencyMatrix::cluster(m)
}

/// A signed grid that a graph was renumbered onto.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMatch {
    pub rows: usize,
    pub cols: usize,
    pub weight: f64,
    /// Edge signs in [`grid_edges`] order.
    pub signs: Vec<f64>,
    /// Grid vertex `i` is vertex `witness.image(i)` of the matched graph.
    pub witness: Permutation,
}

/// Tries every sign pattern of the `rows × cols` grid with edge magnitude
/// `|weight|` and returns the first one `a` is a renumbering of.
pub fn match_signed_grid(a: &AdjacencyMatrix, rows: usize, cols: usize, weight: f64) -> Result<Option<GridMatch>> {
    if a.size() != rows * cols {
        return Ok(None);
    }
    let edges = grid_edges(rows, cols);
    if a.edge_count() != edges.len() || edges.len() > 20 {
        return Ok(None);
    }
    for mask in 0u32..(1 << edges.len()) {
        let signs: Vec<f64> = (0..edges.len())
            .map(|k| if mask & (1 << k) != 0 { -1.0 } else { 1.0 })
            .collect();
        let grid = grid_graph_signed(rows, cols, weight, &signs)?;
        if let Some(witness) = find_renumbering(a, &grid)? {
            return Ok(Some(GridMatch {
                rows,
                cols,
                weight: weight.abs(),
                signs,
                witness,
            }));
        }
    }
    Ok(None)
}

pub fn cube_cluster() -> AdjacencyMatrix {
    bipartite_embed(&cube_block())
}

/// Vertex pairs of `a` joined by an edge.
pub fn adjacent_pairs(a: &AdjacencyMatrix) -> Vec<(usize, usize)> {
    let n = a.size();
    let m = a.entries();
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| m[(i, j)].abs() > EDGE_THRESHOLD)
        .collect()
}

/// Nullifier variances for one squeezing value.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionPoint {
    pub r: f64,
    /// Remaining vertices, in original numbering.
    pub remaining: Vec<usize>,
    /// Reduced-graph nullifiers on the conditional state.
    pub reduced: Vec<f64>,
    /// The full-cube nullifiers of the same vertices before measuring.
    pub baseline: Vec<f64>,
    /// Vacuum variances of the reduced nullifiers.
    pub vacuum: Vec<f64>,
}

/// Evolves the cube H-graph to `r`, rotates `rotations`, measures `Q` on
/// `pair` and evaluates the nullifiers of the ideally reduced graph.
pub fn cube_reduction_at(r: f64, rotations: &BTreeSet<usize>, pair: (usize, usize)) -> Result<ReductionPoint> {
    let cube = cube_cluster();
    let measured: BTreeSet<usize> = [pair.0, pair.1].into_iter().collect();
    let reduced_graph = graph_measure_q(&cube, &measured)?;
    let remaining: Vec<usize> = (0..cube.size()).filter(|i| !measured.contains(i)).collect();

    let full_set = cluster_nullifiers(&cube, rotations)?;
    let state = squeezing_spectrum(&cube)?.evolve_vacuum(r)?;
    let framed = full_set.cluster_frame(&state)?;
    let full = full_set.variances(&state)?;
    let baseline = remaining.iter().map(|&i| full[i]).collect();

    let conditional = measure_positions(&framed, &measured.iter().copied().collect::<Vec<_>>())?;
    let reduced_set = cluster_nullifiers(&reduced_graph, &BTreeSet::new())?;
    let reduced = reduced_set.variances(&conditional)?;
    let vacuum = reduced_set.combinations().iter().map(|c| c.norm_squared()).collect();
    Ok(ReductionPoint {
        r,
        remaining,
        reduced,
        baseline,
        vacuum,
    })
}

/// First passing rotation set for the cube cluster against its own H-graph.
pub fn cube_rotations(tol: &Tolerances) -> Result<BTreeSet<usize>> {
    let cube = cube_cluster();
    search_rotations(&cube, &cube, &[0.5, 1.0, 2.0], tol)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::InvalidArgument("no rotation set verifies the cube cluster".into()))
}

/// Finite-squeezing cube reduction over `schedule` (at least two increasing
/// positive values). A reduced nullifier passes when its variance never
/// exceeds the unmeasured baseline, strictly decreases along the schedule
/// and ends below the variance-ratio bound.
pub fn verify_cube_reduction(schedule: &[f64], tol: &Tolerances) -> Result<VerificationReport> {
    verify_cube_reduction_with(schedule, CUBE_PAIR, tol)
}

pub fn verify_cube_reduction_with(
    schedule: &[f64],
    pair: (usize, usize),
    tol: &Tolerances,
) -> Result<VerificationReport> {
    validate_schedule(schedule, 2)?;
    let cube = cube_cluster();
    if pair.0 >= cube.size() || pair.1 >= cube.size() || pair.0 == pair.1 {
        return Err(Error::InvalidArgument("measured pair must be two distinct cube vertices".into()));
    }
    let rotations = cube_rotations(tol)?;
    let points = schedule
        .iter()
        .map(|&r| cube_reduction_at(r, &rotations, pair))
        .collect::<Result<Vec<_>>>()?;
    let measured: BTreeSet<usize> = [pair.0, pair.1].into_iter().collect();
    let reduced_graph = graph_measure_q(&cube, &measured)?;
    let reduced_set = cluster_nullifiers(&reduced_graph, &BTreeSet::new())?;
    let remaining = points[0].remaining.clone();

    let mut nullifiers = Vec::new();
    for (k, c) in reduced_set.combinations().iter().enumerate() {
        let variances: Vec<f64> = points.iter().map(|p| p.reduced[k]).collect();
        let baseline: Vec<f64> = points.iter().map(|p| p.baseline[k]).collect();
        let logs: Vec<f64> = variances.iter().map(|v| libm::log(*v)).collect();
        let fit = fit_line(schedule, &logs);
        let vacuum_variance = c.norm_squared();
        let below = variances.iter().zip(&baseline).all(|(v, b)| *v <= b * (1.0 + 1e-12));
        let decreasing = variances.windows(2).all(|w| w[1] < w[0]);
        let last = *variances.last().expect("schedule is non-empty");
        let pass = below && decreasing && fit.slope < -tol.exponent && last < tol.variance_ratio * vacuum_variance;
        nullifiers.push(NullifierRow {
            mode: remaining[k],
            component: 0,
            combination: c.clone(),
            vacuum_variance,
            variances,
            fit,
            baseline,
            pass,
        });
    }
    let channel_exponents = {
        let mut e: Vec<f64> = nullifiers.iter().map(|n| n.exponent()).collect();
        e.sort_by(f64::total_cmp);
        e
    };
    let channel_residual = nullifiers.iter().map(|n| n.fit.max_residual).fold(0.0, f64::max);
    let grid_match = match_signed_grid(&reduced_graph, 2, 3, 1.0 / libm::sqrt(3.0))?;
    let pass = grid_match.is_some() && nullifiers.iter().all(|n| n.pass);
    let rotations: Vec<usize> = rotations.into_iter().collect();
    Ok(VerificationReport {
        schedule: schedule.to_vec(),
        rotations: rotations.clone(),
        nullifiers,
        channel_exponents: channel_exponents.clone(),
        channel_residual,
        components: alloc::vec![crate::verify::ComponentReport {
            modes: remaining.clone(),
            witness: grid_match.as_ref().map(|m| m.witness.clone()),
            rotations,
            channel_exponents,
            pass,
        }],
        measurement: Some(MeasurementSummary {
            measured: measured.into_iter().collect(),
            remaining,
            reduced: reduced_graph,
            grid_match,
        }),
        tolerances: *tol,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids() {
        let g = grid_graph(1, 2, 0.5).unwrap();
        assert_eq!(g.entries(), &Matrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
        assert_eq!(grid_graph(2, 3, 1.0).unwrap().edge_count(), 7);
        let c4 = grid_graph(2, 2, 1.0).unwrap();
        assert_eq!(c4.edge_count(), 4);
        assert!((0..4).all(|i| c4.entries().row(i).sum() == 2.0));
        assert!(grid_graph(0, 3, 1.0).is_err());
    }

    #[test]
    fn measuring_everything_leaves_nothing() {
        let cube = cube_cluster();
        let all: BTreeSet<usize> = (0..8).collect();
        assert_eq!(graph_measure_q(&cube, &all).unwrap().size(), 0);
    }

    #[test]
    fn isolated_vertex_is_harmless() {
        let mut m = Matrix::zeros(3, 3);
        m[(0, 1)] = 2.0;
        m[(1, 0)] = 2.0;
        let a = AdjacencyMatrix::cluster(m.clone()).unwrap();
        let out = graph_measure_q(&a, &[2].into_iter().collect()).unwrap();
        assert_eq!(out.entries(), &m.view((0, 0), (2, 2)).into_owned());
    }

    #[test]
    fn cube_has_twelve_edges() {
        assert_eq!(cube_cluster().edge_count(), 12);
        assert_eq!(adjacent_pairs(&cube_cluster()).len(), 12);
    }

    #[test]
    fn cube_minus_edge_is_ladder() {
        let cube = cube_cluster();
        let reduced = graph_measure_q(&cube, &[0, 4].into_iter().collect()).unwrap();
        assert_eq!(reduced.edge_count(), 7);
        assert!(match_signed_grid(&reduced, 2, 3, 1.0 / libm::sqrt(3.0)).unwrap().is_some());
    }
}
