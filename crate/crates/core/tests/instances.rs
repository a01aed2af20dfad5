mod common;

use std::collections::BTreeSet;

use combsim_core::catalog;
use combsim_core::graph::Permutation;
use combsim_core::reduction::{cube_cluster, cube_reduction_at, cube_rotations};
use combsim_core::*;
use common::{delta, span_residual};

fn q(v: &[f64]) -> QuadratureCombination {
    QuadratureCombination::q_only(v.to_vec()).unwrap()
}

fn p(v: &[f64]) -> QuadratureCombination {
    QuadratureCombination::p_only(v.to_vec()).unwrap()
}

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

const SCHEDULE: [f64; 3] = [0.5, 1.0, 2.0];

fn g2_squeezed() -> Vec<QuadratureCombination> {
    let (dp, dm) = delta();
    vec![
        q(&[-dm, dm, -1.0, 1.0]),
        q(&[-dp, -dp, 1.0, 1.0]),
        p(&[dm, dm, 1.0, 1.0]),
        p(&[dp, -dp, -1.0, 1.0]),
    ]
}

#[test]
fn g2_operators_decay_at_their_rates() {
    let (dp, dm) = delta();
    for r in [0.3, 1.7] {
        let s = evolve_vacuum(&catalog::g2(), r).unwrap();
        for (c, rate) in g2_squeezed().into_iter().zip([dp, dm, dp, dm]) {
            let want = (-2.0 * r * rate).exp() * c.norm_squared();
            assert!((variance(&s, &c).unwrap() - want).abs() < 1e-10);
        }
    }
}

#[test]
fn eq10_nullifiers_are_the_printed_ones() {
    let h = 5f64.sqrt() / 2.0;
    let set34 = cluster_nullifiers(&catalog::eq10(), &set(&[2, 3])).unwrap();
    let printed = [
        ([0.0, 0.0, -0.5, -h], 0),
        ([0.0, 0.0, -h, -0.5], 1),
        ([-0.5, -h, 0.0, 0.0], 2),
        ([-h, -0.5, 0.0, 0.0], 3),
    ];
    for (c, (qs, i)) in set34.combinations().iter().zip(printed) {
        let mut ps = vec![0.0; 4];
        ps[i] = 1.0;
        assert_eq!(c, &QuadratureCombination::new(qs.to_vec(), ps).unwrap());
    }
    // written on the unrotated modes they lie in the squeezed span
    for c in set34.generator_frame() {
        assert!(span_residual(&c, &g2_squeezed()) < 1e-12);
    }
}

#[test]
fn displayed_eq10_weights_are_not_generated() {
    let rot = set(&[2, 3]);
    let literal = cluster_nullifiers(&catalog::eq10_displayed(), &rot).unwrap();
    assert!(literal.generator_frame().iter().all(|c| span_residual(c, &g2_squeezed()) > 1e-3));
    let passing = search_rotations(&catalog::g2(), &catalog::eq10_displayed(), &SCHEDULE, &Tolerances::default()).unwrap();
    assert!(passing.is_empty());
}

#[test]
fn g2_with_eq10_rotations_is_the_only_half_split() {
    let passing = search_rotations(&catalog::g2(), &catalog::eq10(), &SCHEDULE, &Tolerances::default()).unwrap();
    assert!(passing.contains(&set(&[2, 3])));
    assert!(!passing.contains(&BTreeSet::new()));
}

#[test]
fn g1_does_not_give_the_square() {
    let report = verify_cluster(&catalog::g1(), &catalog::eq10(), &set(&[2, 3]), &SCHEDULE, &Tolerances::default()).unwrap();
    assert!(!report.pass);
    assert!(report.nullifiers.iter().any(|n| n.variances.iter().all(|v| *v >= 1.0)));
}

#[test]
fn balanced_square_operators() {
    let g = catalog::balanced_square_hgraph().unwrap();
    let s2 = 2f64.sqrt();
    let ops = [
        q(&[1.0, 1.0, 0.0, -s2]),
        q(&[1.0, -1.0, s2, 0.0]),
        p(&[1.0, 1.0, 0.0, s2]),
        p(&[1.0, -1.0, -s2, 0.0]),
    ];
    let r = 0.9;
    let s = evolve_vacuum(&g, r).unwrap();
    for c in &ops {
        let want = (-2.0 * s2 * r).exp() * c.norm_squared();
        assert!((variance(&s, c).unwrap() - want).abs() < 1e-12);
    }
    // √2·Pᵢ ± … relations, scaled back up
    let nulls = cluster_nullifiers(&catalog::balanced_square_cluster(), &set(&[2, 3])).unwrap();
    let printed = [
        (vec![0.0, 0.0, 1.0, -1.0], 0),
        (vec![0.0, 0.0, -1.0, -1.0], 1),
        (vec![1.0, -1.0, 0.0, 0.0], 2),
        (vec![-1.0, -1.0, 0.0, 0.0], 3),
    ];
    for (c, (qs, i)) in nulls.combinations().iter().zip(printed) {
        let mut ps = vec![0.0; 4];
        ps[i] = s2;
        let want = QuadratureCombination::new(qs, ps).unwrap();
        let got = c.scaled(s2);
        assert!((got.stacked() - want.stacked()).norm() < 1e-12);
    }
    for c in nulls.generator_frame() {
        assert!(span_residual(&c, &ops) < 1e-12);
    }
}

#[test]
fn balanced_rotation_sets() {
    let g = catalog::balanced_square_hgraph().unwrap();
    let passing =
        search_rotations(&g, &catalog::balanced_square_cluster(), &SCHEDULE, &Tolerances::default()).unwrap();
    assert_eq!(passing, vec![set(&[0, 1]), set(&[2, 3])]);
}

#[test]
fn spectrum_matches_nullifier_decay() {
    let tol = Tolerances::default();
    let cases = [
        (catalog::g2(), catalog::eq10(), set(&[2, 3])),
        (
            catalog::balanced_square_hgraph().unwrap().into_entries(),
            catalog::balanced_square_cluster(),
            set(&[2, 3]),
        ),
        (cube_cluster().into_entries(), cube_cluster(), set(&[4, 5, 6, 7])),
    ];
    for (g, a, rot) in cases {
        let report = verify_cluster(&g, &a, &rot, &SCHEDULE, &tol).unwrap();
        assert!(report.pass);
        let mut want: Vec<f64> = squeezing_spectrum(&g)
            .unwrap()
            .eigenvalues()
            .iter()
            .map(|l| -2.0 * l.abs())
            .collect();
        want.sort_by(f64::total_cmp);
        for (got, want) in report.channel_exponents.iter().zip(&want) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }
}

#[test]
fn cube_rotations_are_either_half() {
    let cube = cube_cluster();
    let passing = search_rotations(&cube, &cube, &SCHEDULE, &Tolerances::default()).unwrap();
    assert!(passing.contains(&set(&[0, 1, 2, 3])));
    assert!(passing.contains(&set(&[4, 5, 6, 7])));
    assert_eq!(cube_rotations(&Tolerances::default()).unwrap(), set(&[0, 1, 2, 3]));
}

#[test]
fn unitary_embeddings_verify_with_second_half_rotated() {
    for block in [square_block(), cube_block()] {
        let half = Matrix::identity(block.size(), block.size()) * 0.5;
        let g = hgraph_from_cluster(&block, &half, &half).unwrap();
        let a = bipartite_embed(&block);
        let rot: BTreeSet<usize> = (block.size()..2 * block.size()).collect();
        assert!(verify_cluster(&g, &a, &rot, &SCHEDULE, &Tolerances::default()).unwrap().pass);
    }
}

#[test]
fn general_b_c_also_verify() {
    // non-unitary route: any positive-definite B, C
    let block = square_block();
    let b = Matrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.7]);
    let c = Matrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 0.9]);
    let g = hgraph_from_cluster(&block, &b, &c).unwrap();
    let a = bipartite_embed(&block);
    let passing = search_rotations(&g, &a, &SCHEDULE, &Tolerances::default()).unwrap();
    assert!(passing.contains(&set(&[2, 3])));
}

#[test]
fn copies_single_matches_cluster() {
    for block in [square_block(), cube_block()] {
        let g = multi_copy_generator(&block, 1);
        let copies = verify_copies(&g, &block, 1, &SCHEDULE, &Tolerances::default()).unwrap();
        assert!(copies.pass);
        assert_eq!(copies.components.len(), 1);
        let w = copies.components[0].witness.clone().unwrap();
        let a = AdjacencyMatrix::cluster(w.push_forward(bipartite_embed(&block).entries())).unwrap();
        let rot: BTreeSet<usize> = copies.rotations.iter().copied().collect();
        let direct = verify_cluster(&g, &a, &rot, &SCHEDULE, &Tolerances::default()).unwrap();
        for (x, y) in copies.nullifiers.iter().zip(&direct.nullifiers) {
            assert_eq!(x.variances, y.variances);
        }
    }
}

#[test]
fn g3_is_three_square_copies() {
    let g3 = catalog::g3();
    let comps = connected_components(&g3);
    assert_eq!(comps.len(), 3);
    assert!(comps.iter().all(|c| c.len() == 4));
}

#[test]
fn shuffle_relates_kronecker_orders() {
    let a0 = square_block();
    let f2 = skew_identity(2);
    let left = tensor(&a0, &f2);
    let right = tensor(&f2, &a0);
    let pi = find_renumbering(&left, &right).unwrap().unwrap();
    assert_eq!(pi, Permutation::perfect_shuffle(2, 2));
    assert_eq!(find_renumbering(&left, &left).unwrap().unwrap(), Permutation::identity(4));
    let cube_component = cube_cluster();
    assert!(find_renumbering(&bipartite_embed(&a0), &cube_component).unwrap().is_none());
}

#[test]
fn cube_multi_copy_components() {
    let g = multi_copy_generator(&cube_block(), 2);
    let comps = connected_components(&g);
    assert_eq!(comps.len(), 2);
    assert!(comps.iter().all(|c| c.len() == 8));
    let v = matrix_to_hankel(&g, 1e-12).unwrap();
    let printed = print_hankel_shorthand(&v);
    let w = 1.0 / 3f64.sqrt();
    let expected = parse_hankel_shorthand("[0_3,-1,0_3,-1,0_3,1,0_3/0/0_3,1,0_3,1,0_3,-1,0_3]").unwrap();
    let scaled: Vec<f64> = expected.entries().iter().map(|x| x * w).collect();
    assert_eq!(v.entries(), scaled, "{printed}");
}

#[test]
fn cube_reduction_at_zero_squeezing_is_vacuum() {
    let rot = cube_rotations(&Tolerances::default()).unwrap();
    let point = cube_reduction_at(0.0, &rot, (0, 4)).unwrap();
    for (v, vac) in point.reduced.iter().zip(&point.vacuum) {
        assert!((v - vac).abs() < 1e-12);
    }
}

#[test]
fn cube_reduction_report() {
    let report = reduction::verify_cube_reduction(&[1.0, 2.0, 3.0], &Tolerances::default()).unwrap();
    assert!(report.pass);
    let m = report.measurement.as_ref().unwrap();
    assert_eq!(m.measured, vec![0, 4]);
    assert_eq!(m.reduced.edge_count(), 7);
    let grid = m.grid_match.as_ref().unwrap();
    assert_eq!(grid.signs.len(), 7);
    for row in &report.nullifiers {
        assert!(row.variances.iter().zip(&row.baseline).all(|(v, b)| v <= &(b * (1.0 + 1e-12))));
    }
    // vertices with no measured neighbour keep their baseline
    let untouched = report
        .nullifiers
        .iter()
        .filter(|n| n.variances.iter().zip(&n.baseline).all(|(v, b)| (v - b).abs() <= 1e-12 * b))
        .count();
    assert_eq!(untouched, 2);
    assert!(reduction::verify_cube_reduction(&[1.0], &Tolerances::default()).is_err());
}
