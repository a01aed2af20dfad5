//! Cluster-state nullifiers `Pᵢ − Σⱼ Aᵢⱼ Qⱼ`.
//!
//! The H-graph state and the cluster state can differ by π/2 rotations of
//! some modes. A [`NullifierSet`] keeps the literal nullifiers of the cluster
//! graph together with the modes to rotate; evaluating it on an H-graph state
//! rotates those modes of the state first.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gaussian::{rotate_modes, GaussianState, QuadratureCombination, RotateMode};
use crate::graph::AdjacencyMatrix;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct NullifierSet {
    source: AdjacencyMatrix,
    rotations: BTreeSet<usize>,
    combinations: Vec<QuadratureCombination>,
}

/// One nullifier per vertex of `a`, evaluated after rotating `rotations`.
pub fn cluster_nullifiers(a: &AdjacencyMatrix, rotations: &BTreeSet<usize>) -> Result<NullifierSet> {
    let m = a.entries();
    let n = a.size();
    if let Some(index) = (0..n).find(|&i| m[(i, i)] != 0.0) {
        return Err(Error::NonzeroDiagonal {
            index,
            value: m[(index, index)],
        });
    }
    if let Some(&index) = rotations.iter().find(|&&j| j >= n) {
        return Err(Error::ModeOutOfRange { index, modes: n });
    }
    let combinations = (0..n)
        .map(|i| {
            let q: Vec<f64> = (0..n).map(|j| -m[(i, j)]).collect();
            let mut p = alloc::vec![0.0; n];
            p[i] = 1.0;
            QuadratureCombination::new(q, p).expect("unit P coefficient")
        })
        .collect();
    Ok(NullifierSet {
        source: a.clone(),
        rotations: rotations.clone(),
        combinations,
    })
}

impl NullifierSet {
    pub fn source(&self) -> &AdjacencyMatrix {
        &self.source
    }

    pub fn rotations(&self) -> &BTreeSet<usize> {
        &self.rotations
    }

    pub fn combinations(&self) -> &[QuadratureCombination] {
        &self.combinations
    }

    pub fn len(&self) -> usize {
        self.combinations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.combinations.is_empty()
    }

    /// Rotates the flagged modes of an H-graph state into the cluster frame.
    pub fn cluster_frame(&self, state: &GaussianState) -> Result<GaussianState> {
        rotate_modes(state, self.rotations.iter().copied())
    }

    /// The same operators written on the unrotated H-graph quadratures: each
    /// flagged mode gets the inverse rotation (three quarter turns).
    pub fn generator_frame(&self) -> Vec<QuadratureCombination> {
        self.combinations
            .iter()
            .map(|c| {
                let mut out = c.clone();
                for &j in &self.rotations {
                    for _ in 0..3 {
                        out = out.rotate_mode(j).expect("rotation index checked");
                    }
                }
                out
            })
            .collect()
    }

    /// Coefficient rows stacked as `(q, p)`.
    pub fn coefficient_matrix(&self) -> Matrix {
        let n = self.len();
        let mut rows = Matrix::zeros(n, 2 * n);
        for (i, c) in self.combinations.iter().enumerate() {
            rows.row_mut(i).copy_from(&c.stacked().transpose());
        }
        rows
    }

    /// Covariance matrix of the nullifiers on the H-graph state `state`.
    pub fn covariance(&self, state: &GaussianState) -> Result<Matrix> {
        if state.modes() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: state.modes(),
            });
        }
        let framed = self.cluster_frame(state)?;
        let rows = self.coefficient_matrix();
        Ok(&rows * framed.cov() * rows.transpose())
    }

    pub fn variances(&self, state: &GaussianState) -> Result<Vec<f64>> {
        let cov = self.covariance(state)?;
        Ok((0..self.len()).map(|i| cov[(i, i)]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_graph_gives_bare_momenta() {
        let a = AdjacencyMatrix::cluster(Matrix::zeros(3, 3)).unwrap();
        let set = cluster_nullifiers(&a, &BTreeSet::new()).unwrap();
        assert_eq!(set.len(), 3);
        for (i, c) in set.combinations().iter().enumerate() {
            assert!(c.q_coeffs().iter().all(|x| *x == 0.0));
            assert_eq!(c.p_coeffs()[i], 1.0);
        }
        let vars = set.variances(&GaussianState::vacuum(3)).unwrap();
        assert_eq!(vars, vec![1.0; 3]);
    }

    #[test]
    fn diagonal_and_range_errors() {
        let h = AdjacencyMatrix::hgraph(Matrix::identity(2, 2)).unwrap();
        assert!(matches!(cluster_nullifiers(&h, &BTreeSet::new()), Err(Error::NonzeroDiagonal { .. })));
        let a = AdjacencyMatrix::cluster(Matrix::zeros(2, 2)).unwrap();
        let bad: BTreeSet<usize> = [2].into_iter().collect();
        assert!(matches!(cluster_nullifiers(&a, &bad), Err(Error::ModeOutOfRange { index: 2, modes: 2 })));
    }

    #[test]
    fn generator_frame_inverts_rotation() {
        let a = AdjacencyMatrix::cluster(Matrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0])).unwrap();
        let rot: BTreeSet<usize> = [1].into_iter().collect();
        let set = cluster_nullifiers(&a, &rot).unwrap();
        // P₀ − 2Q₁ on the rotated state equals P₀ + 2P₁ on the original one
        let g = set.generator_frame();
        assert_eq!(g[0], QuadratureCombination::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap());
    }
}
