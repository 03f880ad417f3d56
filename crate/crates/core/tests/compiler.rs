use std::f64::consts::FRAC_PI_2;

use pivotgrid::compiler::{
    compile_graph, layout, place_tiles, planarize, prep_circuit, verify, verify_with, Circuit, CircuitGate, GridCompilation,
    SizeReport, TileKind,
};
use pivotgrid::mbqc::{all_branches, corrected_branch_map, proportional, Measurement, OpenGraph, Pattern};
use pivotgrid::oracle::{circuit_matrix, matrices_equal_up_to_phase, Gate, SELF_TOL};
use pivotgrid::selftest::random_graph;
use pivotgrid::{Graph, OutcomeSource, PairingStrategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_oracle(c: &Circuit) -> Vec<Gate> {
    c.gates
        .iter()
        .map(|g| match *g {
            CircuitGate::H(w) => Gate::H(w),
            CircuitGate::Cz(a, b) => Gate::Cz(a, b),
            CircuitGate::Swap(a, b) => Gate::Swap(a, b),
        })
        .collect()
}

#[test]
fn planarize_preserves_the_unitary() {
    for n in 1..=4 {
        for g in Graph::all_graphs(n) {
            let prep = prep_circuit(&g);
            let flat = planarize(&prep);
            assert!(flat.is_planar());
            let a = circuit_matrix(n, &to_oracle(&prep)).unwrap();
            let b = circuit_matrix(n, &to_oracle(&flat)).unwrap();
            assert!(matrices_equal_up_to_phase(&a, &b, 1e-9).is_some(), "{g:?}");
        }
    }
}

/// Whole grid as an open graph: the tile path is a wire, the rest is Z.
fn single_wire_pattern(comp: &GridCompilation) -> Pattern {
    let path = &comp.wire_paths()[0];
    let output = comp.outputs[0];
    let open = OpenGraph::new(comp.grid.clone(), vec![path[0]], vec![output]).unwrap();
    let mut plan: Vec<Measurement> =
        comp.z_set.iter().map(|u| Measurement { vertex: u, angle: 0.0, correction: vec![u] }).collect();
    for (k, &u) in path.iter().enumerate() {
        let next = path.get(k + 1).copied().unwrap_or(output);
        plan.push(Measurement { vertex: u, angle: FRAC_PI_2, correction: vec![next] });
    }
    Pattern { open, plan }
}

#[test]
fn single_tiles_under_the_dense_oracle() {
    for (gates, target) in [(vec![CircuitGate::H(0)], Gate::H(0)), (vec![], Gate::Z(0))] {
        let comp = place_tiles(&Circuit::new(1, gates)).unwrap();
        assert_eq!(comp.vertex_count(), 16);
        let p = single_wire_pattern(&comp);
        let m = corrected_branch_map(&p, &vec![0; p.plan.len()]).unwrap();
        let want = if target == Gate::Z(0) { circuit_matrix(1, &[]).unwrap() } else { target.matrix() };
        assert!(proportional(&m, &want, SELF_TOL.max(1e-10)), "{:?}", comp.tiles);
    }
}

#[test]
fn single_tile_path_branches() {
    // Every outcome on the wire itself, Z outcomes fixed at 0.
    let comp = place_tiles(&Circuit::new(1, vec![CircuitGate::H(0)])).unwrap();
    let p = single_wire_pattern(&comp);
    let z = comp.z_set.len();
    let x = p.plan.len() - z;
    for branch in all_branches(x) {
        let mut raw = vec![0; z];
        raw.extend(branch);
        let m = corrected_branch_map(&p, &raw).unwrap();
        assert!(proportional(&m, &Gate::H(0).matrix(), 1e-10));
    }
}

#[test]
fn tile_kinds_for_a_cz_layer() {
    let comp = layout(&Circuit::new(2, vec![CircuitGate::Cz(0, 1)])).unwrap();
    assert_eq!(comp.tiles, vec![vec![TileKind::CzUpper, TileKind::Id], vec![TileKind::CzLower, TileKind::Id]]);
    let p2 = Graph::from_edges(2, [(0, 1)]).unwrap();
    verify(&comp, &p2, &mut OutcomeSource::Zero).unwrap();
    assert!(verify(&comp, &Graph::new(2), &mut OutcomeSource::Zero).is_err());
}

fn check_graph(g: &Graph, seeds: std::ops::Range<u64>) {
    let comp = compile_graph(g).unwrap_or_else(|e| panic!("{g:?}: {e}"));
    assert!(SizeReport::of(&comp).within_bounds(), "{:?}", SizeReport::of(&comp));
    for strategy in [PairingStrategy::LowestEdge, PairingStrategy::HighestEdge] {
        let v = verify_with(&comp, g, &mut OutcomeSource::Zero, strategy).unwrap();
        assert!(v.sign.is_empty());
    }
    for seed in seeds {
        verify(&comp, g, &mut OutcomeSource::seeded(seed)).unwrap_or_else(|e| panic!("{g:?} seed {seed}: {e}"));
    }
}

#[test]
fn every_graph_up_to_four_vertices() {
    for n in 1..=4 {
        for g in Graph::all_graphs(n) {
            check_graph(&g, 0..10);
        }
    }
}

#[test]
fn random_graphs_up_to_six_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..8 {
        let n = rng.gen_range(5..=6);
        let g = random_graph(n, 0.5, &mut rng);
        check_graph(&g, 0..5);
    }
    check_graph(&Graph::complete(6), 0..3);
}

#[test]
fn empty_source_graph() {
    let comp = compile_graph(&Graph::new(0)).unwrap();
    assert_eq!(comp.vertex_count(), 0);
}

#[test]
fn lone_hadamard_is_not_a_graph_state() {
    // H|+> = |0> has no signed graph state form, so the replay refuses it.
    assert!(layout(&Circuit::new(1, vec![CircuitGate::H(0)])).is_err());
}

/// Bridge vertices of every ΛZ tile, in grid labels.
fn bridge_vertices(comp: &GridCompilation) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, row) in comp.tiles.iter().enumerate() {
        for (l, &kind) in row.iter().enumerate() {
            if kind == TileKind::CzUpper {
                out.extend([(4 * w + 4, 4 * l + 2), (4 * w + 5, 4 * l + 2)].map(|(r, c)| r * comp.cols + c));
            }
        }
    }
    out
}

#[test]
fn tampered_certificates_fail() {
    // Cutting a bridge removes the only ΛZ of these circuits; cutting the
    // vertex before an output detaches it.
    for g in [Graph::from_edges(2, [(0, 1)]).unwrap(), Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()] {
        let comp = compile_graph(&g).unwrap();
        let paths = comp.wire_paths();
        let last = paths.iter().map(|p| *p.last().unwrap());
        for v in bridge_vertices(&comp).into_iter().chain(last) {
            let mut bad = comp.clone();
            assert!(bad.x_set.contains(v));
            bad.x_set.remove(v);
            bad.z_set.insert(v);
            assert!(verify(&bad, &g, &mut OutcomeSource::Zero).is_err(), "{g:?} {v}");
        }
    }
    let g = Graph::complete(4);
    let comp = compile_graph(&g).unwrap();
    let mut bad = comp.clone();
    let z = bad.z_set.iter().next().unwrap();
    bad.z_set.remove(z);
    assert!(verify(&bad, &g, &mut OutcomeSource::Zero).is_err());
    let mut other = g.clone();
    other.remove_edge(0, 3);
    assert!(verify(&comp, &other, &mut OutcomeSource::Zero).is_err());
}

#[test]
fn compilation_json_round_trip() {
    let g = Graph::from_edges(3, [(0, 2)]).unwrap();
    let comp = compile_graph(&g).unwrap();
    let text = serde_json::to_string(&comp).unwrap();
    let back: GridCompilation = serde_json::from_str(&text).unwrap();
    assert_eq!(back, comp);
    verify(&back, &g, &mut OutcomeSource::seeded(9)).unwrap();
}
