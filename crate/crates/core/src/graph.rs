//! H-graph and cluster-graph adjacency algebra.
//!
//! A bipartite cluster graph with off-diagonal block `A0` has adjacency
//! `[[0, A0], [A0ᵀ, 0]]`. For any symmetric positive-definite `B`, `C` the
//! H-graph
//!
//! ```text
//! G = [[B − A0·C·A0ᵀ,  B·A0 + A0·C ],
//!      [C·A0ᵀ + A0ᵀ·B, A0ᵀ·B·A0 − C]]
//! ```
//!
//! generates that cluster state. With `B = C = I/2` and orthogonal `A0` the
//! two matrices coincide, and for a Hankel `A0` the Kronecker product
//! `A0 ⊗ F_2N` is a Hankel H-graph whose graph is `N` disjoint copies of the
//! cluster (`F_n` is the skew-identity).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hankel::{matrix_to_hankel, parse_hankel_shorthand, DEFAULT_HANKEL_TOL};
use crate::linalg::{AsMatrix, ensure_square, ensure_symmetric, is_positive_definite, max_abs_diff, principal_submatrix, Matrix};

/// Entries with magnitude at or below this are not edges.
pub const EDGE_THRESHOLD: f64 = 1e-12;
/// Entrywise tolerance for renumbering matches.
pub const RENUMBER_TOL: f64 = 1e-12;
/// Backtracking cap for [`find_renumbering`].
pub const RENUMBER_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphRole {
    /// Hamiltonian coupling graph; may carry diagonal entries.
    HGraph,
    /// Cluster-state graph; zero diagonal.
    Cluster,
}

/// Weighted, signed, symmetric adjacency matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    entries: Matrix,
    role: GraphRole,
}

impl AdjacencyMatrix {
    pub fn new(entries: Matrix, role: GraphRole) -> Result<Self> {
        ensure_symmetric(&entries, "adjacency matrix", 1e-12)?;
        if role == GraphRole::Cluster {
            if let Some(index) = (0..entries.nrows()).find(|&i| entries[(i, i)] != 0.0) {
                return Err(Error::NonzeroDiagonal {
                    index,
                    value: entries[(index, index)],
                });
            }
        }
        Ok(Self { entries, role })
    }

    pub fn cluster(entries: Matrix) -> Result<Self> {
        Self::new(entries, GraphRole::Cluster)
    }

    pub fn hgraph(entries: Matrix) -> Result<Self> {
        Self::new(entries, GraphRole::HGraph)
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_entries(self) -> Matrix {
        self.entries
    }

    pub fn role(&self) -> GraphRole {
        self.role
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Off-diagonal entries above [`EDGE_THRESHOLD`], counted once per pair.
    pub fn edge_count(&self) -> usize {
        let n = self.size();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.entries[(i, j)].abs() > EDGE_THRESHOLD)
            .count()
    }

    /// Induced subgraph on `indices` (in that order), keeping the role.
    pub fn induced(&self, indices: &[usize]) -> Self {
        Self {
            entries: principal_submatrix(&self.entries, indices),
            role: self.role,
        }
    }
}

impl AsMatrix for AdjacencyMatrix {
    fn as_matrix(&self) -> &Matrix {
        &self.entries
    }
}

/// Off-diagonal block `A0` of a bipartite adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteBlock(Matrix);

impl BipartiteBlock {
    pub fn new(a0: Matrix) -> Result<Self> {
        ensure_square(&a0)?;
        Ok(Self(a0))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_hankel(&self) -> bool {
        matrix_to_hankel(&self.0, DEFAULT_HANKEL_TOL).is_ok()
    }
}

impl AsMatrix for BipartiteBlock {
    fn as_matrix(&self) -> &Matrix {
        &self.0
    }
}

/// `(1/√2)[−1/1/1]`, the orthogonal block of the square cluster.
pub fn square_block() -> BipartiteBlock {
    block_from_shorthand("scale=1/sqrt(2) [-1/1/1]")
}

/// `(1/√3)[−1,−1,1/0/1,1,−1]`, the orthogonal block of the cubic cluster.
pub fn cube_block() -> BipartiteBlock {
    block_from_shorthand("scale=1/sqrt(3) [-1,-1,1/0/1,1,-1]")
}

fn block_from_shorthand(s: &str) -> BipartiteBlock {
    let v = parse_hankel_shorthand(s).expect("built-in shorthand parses");
    BipartiteBlock(v.to_matrix())
}

/// `F_n`: ones on the anti-diagonal.
pub fn skew_identity(n: usize) -> AdjacencyMatrix {
    assert!(n >= 1, "skew identity needs n >= 1");
    let f = Matrix::from_fn(n, n, |i, j| if i + j == n - 1 { 1.0 } else { 0.0 });
    AdjacencyMatrix {
        entries: f,
        role: GraphRole::HGraph,
    }
}

/// `[[0, A0], [A0ᵀ, 0]]`.
pub fn bipartite_embed(a0: &BipartiteBlock) -> AdjacencyMatrix {
    let n = a0.size();
    let mut a = Matrix::zeros(2 * n, 2 * n);
    a.view_mut((0, n), (n, n)).copy_from(&a0.0);
    a.view_mut((n, 0), (n, n)).copy_from(&a0.0.transpose());
    AdjacencyMatrix {
        entries: a,
        role: GraphRole::Cluster,
    }
}

/// H-graph generating the bipartite cluster with block `a0` for symmetric
/// positive-definite `b` and `c`. Works for any square `a0`; orthogonality
/// is not required.
pub fn hgraph_from_cluster(a0: &BipartiteBlock, b: &Matrix, c: &Matrix) -> Result<AdjacencyMatrix> {
    let n = a0.size();
    for (m, name) in [(b, "B"), (c, "C")] {
        ensure_symmetric(m, name, 1e-12)?;
        if m.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
        if !is_positive_definite(m) {
            return Err(Error::NotPositiveDefinite(name));
        }
    }
    let a = &a0.0;
    let at = a.transpose();
    let top_left = b - a * c * &at;
    let top_right = b * a + a * c;
    let bottom_left = c * &at + &at * b;
    let bottom_right = &at * b * a - c;
    let mut g = Matrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&symmetrized(top_left));
    g.view_mut((0, n), (n, n)).copy_from(&top_right);
    g.view_mut((n, 0), (n, n)).copy_from(&bottom_left);
    g.view_mut((n, n), (n, n)).copy_from(&symmetrized(bottom_right));
    AdjacencyMatrix::hgraph(g)
}

// round-off in triple products can leave 1-ulp asymmetry
fn symmetrized(m: Matrix) -> Matrix {
    (&m + m.transpose()) * 0.5
}

/// `‖MMᵀ − I‖_max ≤ tol` and `‖MᵀM − I‖_max ≤ tol`.
pub fn is_unitary(m: &impl AsMatrix, tol: f64) -> bool {
    let m = m.as_matrix();
    if m.nrows() != m.ncols() {
        return false;
    }
    let id = Matrix::identity(m.nrows(), m.ncols());
    let mt = m.transpose();
    max_abs_diff(&(m * &mt), &id) <= tol && max_abs_diff(&(&mt * m), &id) <= tol
}

/// Kronecker product, `x[i, j]` scaling a full copy of `y`.
pub fn tensor(x: &impl AsMatrix, y: &impl AsMatrix) -> Matrix {
    x.as_matrix().kronecker(y.as_matrix())
}

/// `A0 ⊗ F_2N`: a Hankel H-graph (for Hankel `A0`) made of `N` disjoint
/// copies of the cluster `bipartite_embed(A0)`.
pub fn multi_copy_generator(a0: &BipartiteBlock, copies: usize) -> AdjacencyMatrix {
    assert!(copies >= 1, "need at least one copy");
    if !a0.is_hankel() {
        log::warn!("A0 is not Hankel; A0 ⊗ F_2N will not be Hankel either");
    }
    if !is_unitary(a0, 1e-12) {
        log::warn!("A0 is not orthogonal; the generated H-graph differs from the cluster graph");
    }
    let g = tensor(a0, &skew_identity(2 * copies));
    if crate::linalg::symmetry_defect(&g).2 != 0.0 {
        log::warn!("A0 is not symmetric; using the symmetric part of A0 ⊗ F_2N");
    }
    AdjacencyMatrix {
        entries: symmetrized(g),
        role: GraphRole::HGraph,
    }
}

/// Connected components over edges with `|entry| > EDGE_THRESHOLD`. Each
/// component is sorted; components are ordered by least element.
pub fn connected_components(a: &impl AsMatrix) -> Vec<Vec<usize>> {
    let a = a.as_matrix();
    let n = a.nrows();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if !seen[v] && (a[(u, v)].abs() > EDGE_THRESHOLD || a[(v, u)].abs() > EDGE_THRESHOLD) {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Vertex map `π` with `g[π(i), π(j)] = a[i, j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Validates that `map` is a permutation of `0..map.len()`.
    pub fn new(map: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            if x >= map.len() || core::mem::replace(&mut seen[x], true) {
                return None;
            }
        }
        Some(Self(map))
    }

    /// `(a·q + b) ↦ (b·p + a)` for `n = p·q`: the reindexing that turns
    /// `X ⊗ Y` (X of size p) into `Y ⊗ X`.
    pub fn perfect_shuffle(p: usize, q: usize) -> Self {
        Self((0..p * q).map(|i| (i % q) * p + i / q).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `out[i, j] = g[π(i), π(j)]`.
    pub fn pull_back(&self, g: &Matrix) -> Matrix {
        Matrix::from_fn(self.len(), self.len(), |i, j| g[(self.0[i], self.0[j])])
    }

    /// `out[π(i), π(j)] = a[i, j]`, the inverse of [`Permutation::pull_back`].
    pub fn push_forward(&self, a: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.len(), self.len());
        for i in 0..self.len() {
            for j in 0..self.len() {
                out[(self.0[i], self.0[j])] = a[(i, j)];
            }
        }
        out
    }
}

/// Finds `π` with `g[π(i), π(j)] = a[i, j]` (within [`RENUMBER_TOL`]), or
/// `None` if the weighted graphs are not renumberings of each other.
///
/// Tries the identity and every perfect shuffle first, then runs a
/// backtracking search pruned by diagonal value and sorted row weights.
pub fn find_renumbering(g: &impl AsMatrix, a: &impl AsMatrix) -> Result<Option<Permutation>> {
    let (g, a) = (g.as_matrix(), a.as_matrix());
    let n = ensure_square(g)?;
    if ensure_square(a)? != n {
        return Ok(None);
    }
    if n > RENUMBER_CAP {
        return Err(Error::SizeTooLarge {
            size: n,
            cap: RENUMBER_CAP,
        });
    }
    let fits = |p: &Permutation| max_abs_diff(&p.pull_back(g), a) <= RENUMBER_TOL;
    for p in (1..=n).filter(|p| n % p == 0) {
        let candidate = Permutation::perfect_shuffle(p, n / p);
        if fits(&candidate) {
            return Ok(Some(candidate));
        }
    }

    let sig_g: Vec<Vec<f64>> = (0..n).map(|i| row_signature(g, i)).collect();
    let sig_a: Vec<Vec<f64>> = (0..n).map(|i| row_signature(a, i)).collect();
    let compatible: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&v| {
                    (g[(v, v)] - a[(i, i)]).abs() <= RENUMBER_TOL && signatures_match(&sig_g[v], &sig_a[i])
                })
                .collect()
        })
        .collect();
    if compatible.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let order = search_order(a);
    let mut search = Backtrack {
        g,
        a,
        order: &order,
        compatible: &compatible,
        map: vec![usize::MAX; n],
        used: vec![false; n],
    };
    Ok(if search.extend(0) {
        Some(Permutation(search.map))
    } else {
        None
    })
}

fn row_signature(m: &Matrix, i: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..m.ncols())
        .filter(|&j| j != i && m[(i, j)].abs() > EDGE_THRESHOLD)
        .map(|j| m[(i, j)])
        .collect();
    w.sort_by(f64::total_cmp);
    w
}

fn signatures_match(x: &[f64], y: &[f64]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (p - q).abs() <= RENUMBER_TOL)
}

/// Breadth-first from the highest-degree vertex of each component so every
/// placed vertex after the first is constrained by an assigned neighbour.
fn search_order(a: &Matrix) -> Vec<usize> {
    let n = a.nrows();
    let degree = |i: usize| (0..n).filter(|&j| j != i && a[(i, j)].abs() > EDGE_THRESHOLD).count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n).filter(|&i| !seen[i]).max_by_key(|&i| (degree(i), n - i)).unwrap();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for v in 0..n {
                if !seen[v] && a[(u, v)].abs() > EDGE_THRESHOLD {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order
}

struct Backtrack<'a> {
    g: &'a Matrix,
    a: &'a Matrix,
    order: &'a [usize],
    compatible: &'a [Vec<usize>],
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Backtrack<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let i = self.order[depth];
        for &v in &self.compatible[i] {
            if self.used[v] {
                continue;
            }
            let consistent = self.order[..depth].iter().all(|&k| {
                let w = self.map[k];
                (self.g[(v, w)] - self.a[(i, k)]).abs() <= RENUMBER_TOL
            });
            if !consistent {
                continue;
            }
            self.map[i] = v;
            self.used[v] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[v] = false;
            self.map[i] = usize::MAX;
        }
        false
    }
}

/// Like [`find_renumbering`], but also allows flipping the sign of every
/// edge at a vertex (the local `Q, P ↦ −Q, −P`). Returns the permutation and
/// the vertex signs `s` with `s_i s_j g[i, j]` renumbered onto `a`.
pub fn find_switching_renumbering(
    g: &impl AsMatrix,
    a: &impl AsMatrix,
) -> Result<Option<(Permutation, Vec<f64>)>> {
    let (g, a) = (g.as_matrix(), a.as_matrix());
    let n = ensure_square(g)?;
    if n > RENUMBER_CAP {
        return Err(Error::SizeTooLarge {
            size: n,
            cap: RENUMBER_CAP,
        });
    }
    for mask in 0u32..(1u32 << n.saturating_sub(1)) {
        let signs: Vec<f64> = (0..n)
            .map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -1.0 } else { 1.0 })
            .collect();
        let switched = Matrix::from_fn(n, n, |i, j| signs[i] * signs[j] * g[(i, j)]);
        if let Some(p) = find_renumbering(&switched, a)? {
            return Ok(Some((p, signs)));
        }
    }
    Ok(None)
}
