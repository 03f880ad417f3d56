use pivotgrid::{Graph, VertexSet};
use proptest::prelude::*;

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..=8).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (Just(n), any::<u64>().prop_map(move |m| if pairs == 0 { 0 } else { m & ((1u64 << pairs) - 1) }))
            .prop_map(|(n, m)| Graph::from_edge_mask(n, m))
    })
}

fn graph_with_edge() -> impl Strategy<Value = (Graph, (usize, usize))> {
    graph().prop_filter("needs an edge", |g| g.edge_count() > 0).prop_flat_map(|g| {
        let edges: Vec<_> = g.edges().collect();
        (Just(g), prop::sample::select(edges))
    })
}

fn bipartite() -> impl Strategy<Value = Graph> {
    (1usize..=4, 1usize..=4, any::<u16>()).prop_map(|(a, b, mask)| {
        let mut g = Graph::new(a + b);
        for u in 0..a {
            for v in 0..b {
                if mask >> (u * 4 + v) & 1 == 1 {
                    g.add_edge(u, a + v);
                }
            }
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn local_complement_is_an_involution(g in graph(), u in 0usize..8) {
        let u = u % g.vertex_count();
        prop_assert_eq!(g.local_complement(u).unwrap().local_complement(u).unwrap(), g);
    }

    #[test]
    fn pivot_is_symmetric_and_involutive((g, (u, v)) in graph_with_edge()) {
        let p = g.pivot(u, v).unwrap();
        prop_assert_eq!(&p, &g.pivot(v, u).unwrap());
        prop_assert!(p.has_edge(u, v));
        prop_assert_eq!(p.pivot(u, v).unwrap(), g);
    }

    #[test]
    fn pivot_matches_local_complements((g, (u, v)) in graph_with_edge()) {
        let uvu = g.local_complement(u).unwrap().local_complement(v).unwrap().local_complement(u).unwrap();
        let vuv = g.local_complement(v).unwrap().local_complement(u).unwrap().local_complement(v).unwrap();
        prop_assert_eq!(&g.pivot(u, v).unwrap(), &uvu);
        prop_assert_eq!(&uvu, &vuv);
        prop_assert_eq!(g.pivot_by_lc(u, v).unwrap(), uvu);
    }

    #[test]
    fn odd_neighbourhood_two_ways(g in graph(), mask in any::<u8>()) {
        let b = VertexSet::from_mask(g.vertex_count(), u64::from(mask) & ((1 << g.vertex_count()) - 1));
        prop_assert_eq!(g.odd_neighborhood(&b), g.odd_neighborhood_inductive(&b));
    }

    #[test]
    fn bipartite_stays_bipartite(g in bipartite(), picks in prop::collection::vec(any::<usize>(), 10)) {
        let mut h = g;
        for p in picks {
            let edges: Vec<_> = h.edges().collect();
            if edges.is_empty() {
                break;
            }
            let (u, v) = edges[p % edges.len()];
            h.pivot_mut(u, v).unwrap();
            prop_assert!(h.is_bipartite());
        }
    }

    #[test]
    fn edge_list_round_trip(g in graph()) {
        prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }
}
