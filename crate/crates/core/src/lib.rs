//! Optical-comb cluster states: coupling matrices from pump layouts or
//! Hankel shorthand, Gaussian evolution under the multimode squeezing
//! Hamiltonian, and nullifier-based cluster verification.
//!
//! Modes are 0-based throughout. Covariances use the ordering
//! `(Q₁..Qₙ, P₁..Pₙ)` with vacuum variance 1.

#![no_std]

extern crate alloc;

pub mod catalog;
pub mod comb;
pub mod error;
pub mod gaussian;
pub mod graph;
pub mod hankel;
pub mod linalg;
pub mod nullifier;
pub mod reduction;
pub mod verify;

pub use comb::{
    build_coupling_from_pumps, spurious_couplings, CombSpec, CouplingMatrix, Interaction, ModeLabel, Polarization,
    PumpSpec, SpuriousCoupling,
};
pub use error::{Error, Result};
pub use gaussian::{
    evolve_vacuum, measure_position, measure_positions, rotate_mode, rotate_modes, squeezing_spectrum, variance,
    GaussianState, QuadratureCombination, RotateMode, SqueezingSpectrum,
};
pub use graph::{
    bipartite_embed, connected_components, cube_block, find_renumbering, find_switching_renumbering,
    hgraph_from_cluster, is_unitary,
    multi_copy_generator, skew_identity, square_block, tensor, AdjacencyMatrix, BipartiteBlock, GraphRole,
    Permutation,
};
pub use hankel::{hankel_to_matrix, matrix_to_hankel, parse_hankel_shorthand, print_hankel_shorthand, HankelVector};
pub use linalg::{AsMatrix, Matrix, Vector};
pub use nullifier::{cluster_nullifiers, NullifierSet};
pub use reduction::{graph_measure_q, grid_graph, verify_cube_reduction, GridMatch};
pub use verify::{search_rotations, verify_cluster, verify_copies, Tolerances, VerificationReport};
