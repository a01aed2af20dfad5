//! Named instances: coupling matrices, clusters and the pump setups that
//! produce them.

use alloc::vec;
use alloc::vec::Vec;

use crate::comb::{build_coupling_from_pumps, CombSpec, CouplingMatrix, Interaction, PumpSpec};
use crate::error::Result;
use crate::graph::{bipartite_embed, cube_block, square_block, AdjacencyMatrix, BipartiteBlock};
use crate::hankel::parse_hankel_shorthand;
use crate::linalg::Matrix;

pub use crate::reduction::cube_cluster;

fn shorthand(s: &str) -> Matrix {
    parse_hankel_shorthand(s).expect("builtin shorthand").to_matrix()
}

fn cluster(entries: Matrix) -> AdjacencyMatrix {
    AdjacencyMatrix::cluster(entries).expect("builtin cluster")
}

/// Four modes, one pump at sum 5.
pub fn g1() -> Matrix {
    shorthand("[0,0,0/1/0,0,0]")
}

/// Four modes, pumps at sums 5 and 7.
pub fn g2() -> Matrix {
    shorthand("[0,0,0/1/0,1,0]")
}

/// Twelve modes, pumps at sums 13 and 19; three disjoint squares.
pub fn g3() -> Matrix {
    shorthand("[0_11/1/0_5,1,0_5]")
}

pub fn g1_pumps() -> (CombSpec, Vec<PumpSpec>) {
    (CombSpec::unpolarized(4), unit_pumps(&[5]))
}

pub fn g2_pumps() -> (CombSpec, Vec<PumpSpec>) {
    (CombSpec::unpolarized(4), unit_pumps(&[5, 7]))
}

pub fn g3_pumps() -> (CombSpec, Vec<PumpSpec>) {
    (CombSpec::unpolarized(12), unit_pumps(&[13, 19]))
}

fn unit_pumps(sums: &[u32]) -> Vec<PumpSpec> {
    sums.iter()
        .map(|&s| PumpSpec::unpolarized(s, 1.0).expect("unit weight"))
        .collect()
}

/// Square cluster generated by [`g2`] once modes 3 and 4 (0-based 2 and 3)
/// are rotated: weights `1/2` and `√5/2`.
pub fn eq10() -> AdjacencyMatrix {
    eq10_weighted(0.5)
}

/// The same pattern with weights `1` and `√5`.
pub fn eq10_displayed() -> AdjacencyMatrix {
    eq10_weighted(1.0)
}

fn eq10_weighted(scale: f64) -> AdjacencyMatrix {
    let (a, b) = (scale, scale * libm::sqrt(5.0));
    cluster(Matrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, a, b, //
            0.0, 0.0, b, a, //
            a, b, 0.0, 0.0, //
            b, a, 0.0, 0.0,
        ],
    ))
}

/// Rotation set (0-based) for [`g2`] and [`eq10`].
pub fn eq10_rotations() -> Vec<usize> {
    vec![2, 3]
}

/// Polarized comb `{H,V} × {1, 2}` with one pump sum and four polarization
/// processes; mode order `1H, 1V, 2H, 2V`.
pub fn balanced_square_pumps() -> (CombSpec, Vec<PumpSpec>) {
    let comb = CombSpec::polarized((1, 2)).expect("valid window");
    let pumps = vec![
        PumpSpec::new(3, Interaction::Vhv, 1.0).expect("weight"),
        PumpSpec::new(3, Interaction::Vvh, 1.0).expect("weight"),
        PumpSpec::new(3, Interaction::Vvv, 1.0).expect("weight"),
        PumpSpec::new(3, Interaction::Hhh, -1.0).expect("weight"),
    ];
    (comb, pumps)
}

pub fn balanced_square_hgraph() -> Result<CouplingMatrix> {
    let (comb, pumps) = balanced_square_pumps();
    build_coupling_from_pumps(&comb, &pumps)
}

/// Balanced-square cluster: the H-graph scaled by `1/√2`. Nullifiers
/// `√2·P₁ + Q₃ − Q₄`, `√2·P₂ − Q₃ − Q₄`, `√2·P₃ + Q₁ − Q₂`, `√2·P₄ − Q₁ − Q₂`.
pub fn balanced_square_cluster() -> AdjacencyMatrix {
    let w = 1.0 / libm::sqrt(2.0);
    cluster(Matrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, -w, w, //
            0.0, 0.0, w, w, //
            -w, w, 0.0, 0.0, //
            w, w, 0.0, 0.0,
        ],
    ))
}

pub fn balanced_square_rotations() -> Vec<usize> {
    vec![2, 3]
}

pub fn square_cluster() -> AdjacencyMatrix {
    bipartite_embed(&square_block())
}

pub fn block(name: &str) -> Option<BipartiteBlock> {
    match name {
        "square" => Some(square_block()),
        "cube" => Some(cube_block()),
        _ => None,
    }
}

/// Builtin matrices by name: `eq10`, `eq10-displayed`, `square`, `cube`,
/// `balanced`, `g1`, `g2`, `g3`, `balanced-hgraph`.
pub fn named_matrix(name: &str) -> Option<Matrix> {
    Some(match name {
        "eq10" => eq10().into_entries(),
        "eq10-displayed" => eq10_displayed().into_entries(),
        "square" => square_cluster().into_entries(),
        "cube" => cube_cluster().into_entries(),
        "balanced" => balanced_square_cluster().into_entries(),
        "balanced-hgraph" => balanced_square_hgraph().ok()?.into_entries(),
        "g1" => g1(),
        "g2" => g2(),
        "g3" => g3(),
        _ => return None,
    })
}

pub const NAMES: &[&str] = &[
    "eq10",
    "eq10-displayed",
    "square",
    "cube",
    "balanced",
    "balanced-hgraph",
    "g1",
    "g2",
    "g3",
];
