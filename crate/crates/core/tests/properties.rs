use proptest::prelude::*;

use ramsey_forge::bandwidth::{bandwidth_lower_bound, exact_bandwidth, heuristic_labeling, labeling_width, BandwidthOutcome};
use ramsey_forge::codec::{
    decode_graph6, encode_graph6, parse_coloring, parse_edgelist, parse_map, write_coloring, write_edgelist, write_map,
};
use ramsey_forge::embed::dense::{dense_greedy_embed, DenseParams, DenseWitness};
use ramsey_forge::embed::drc::{bad_tuple_count, bad_tuple_count_naive, drc_select, TupleMode};
use ramsey_forge::embed::lovasz::lovasz_partition;
use ramsey_forge::embed::Outcome;
use ramsey_forge::generators::{blowup, min_degree_threshold, random_bounded_degree_bipartite, random_min_degree_host, BlowupSpec};
use ramsey_forge::morphisms::{find_capacity_homomorphism, verify_capacity, verify_homomorphism, CapacityProfile, SearchOutcome};
use ramsey_forge::regularity::{regularity_check, CheckMode, RegularityParams, RegularityVerdict};
use ramsey_forge::{Color, EdgeColoring, Graph, Rational, VertexMap, VertexSet, WeightedGraph};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut k = 0;
            for v in 1..n {
                for u in 0..v {
                    if bits[k] {
                        g.add_edge(u, v).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn subset_strategy(n: usize) -> impl Strategy<Value = VertexSet> {
    proptest::collection::vec(any::<bool>(), n).prop_map(move |bits| VertexSet::from_vertices(n, (0..n).filter(|&i| bits[i])).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric_and_loop_free(g in graph_strategy(14)) {
        for u in 0..g.n() {
            prop_assert!(!g.has_edge(u, u));
            for v in 0..g.n() {
                prop_assert_eq!(g.has_edge(u, v), g.has_edge(v, u));
            }
        }
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn induced_counts_inner_edges((g, x) in graph_strategy(12).prop_flat_map(|g| { let n = g.n(); (Just(g), subset_strategy(n)) })) {
        let inner = g.edges().into_iter().filter(|&(u, v)| x.contains(u) && x.contains(v)).count();
        prop_assert_eq!(g.induced(&x).unwrap().edge_count(), inner);
    }

    #[test]
    fn color_classes_partition_edges(g in graph_strategy(10), seed in any::<u64>()) {
        let c = EdgeColoring::from_fn(g.clone(), |u, v| if (u as u64 * 31 + v as u64).wrapping_add(seed).is_multiple_of(3) { Color::Red } else { Color::Blue });
        let red = c.color_subgraph(Color::Red);
        let blue = c.color_subgraph(Color::Blue);
        prop_assert_eq!(red.edge_count() + blue.edge_count(), g.edge_count());
        for (u, v) in g.edges() {
            prop_assert!(red.has_edge(u, v) != blue.has_edge(u, v));
        }
        prop_assert!(red.is_spanning_subgraph_of(&g) && blue.is_spanning_subgraph_of(&g));
    }

    #[test]
    fn codecs_round_trip(g in graph_strategy(16), seed in any::<u64>()) {
        prop_assert_eq!(parse_edgelist(&write_edgelist(&g)).unwrap(), g.clone());
        prop_assert_eq!(decode_graph6(&encode_graph6(&g).unwrap()).unwrap(), g.clone());
        let c = EdgeColoring::from_fn(g.clone(), |u, v| if (u ^ v ^ seed as usize) & 1 == 0 { Color::Red } else { Color::Blue });
        let back = parse_coloring(&write_coloring(&c)).unwrap();
        prop_assert_eq!(back.host(), c.host());
        for (u, v) in g.edges() {
            prop_assert_eq!(back.color(u, v), c.color(u, v));
        }
        let f = VertexMap::new((0..g.n()).map(|v| (v * 7 + seed as usize % 5) % g.n()).collect(), g.n()).unwrap();
        prop_assert_eq!(parse_map(&write_map(&f)).unwrap(), f);
    }

    #[test]
    fn lovasz_postcondition(g in graph_strategy(16), split in 0usize..4) {
        let d = g.max_degree();
        // split the budget Δ - s + 1 over s = 2 classes
        if d >= 1 {
            let a = split.min(d - 1);
            let degrees = [a, d - 1 - a];
            let s = lovasz_partition(&g, &degrees).unwrap();
            for (c, &di) in s.classes.iter().zip(&degrees) {
                prop_assert!(g.induced(c).unwrap().max_degree() <= di);
            }
            prop_assert!(s.moves as u128 <= s.move_bound);
        }
    }

    #[test]
    fn bandwidth_bounds(g in graph_strategy(9)) {
        let (l, h) = heuristic_labeling(&g);
        prop_assert_eq!(labeling_width(&g, &l).unwrap(), h);
        match exact_bandwidth(&g, None) {
            BandwidthOutcome::Exact { width, labeling } => {
                prop_assert_eq!(labeling_width(&g, &labeling).unwrap(), width);
                prop_assert!(bandwidth_lower_bound(&g) <= width && width <= h);
            }
            BandwidthOutcome::BudgetExhausted { .. } => prop_assert!(false, "no budget was set"),
        }
    }

    #[test]
    fn found_homomorphisms_verify(g in graph_strategy(7), h in graph_strategy(6), cap in 1usize..3) {
        let profile = CapacityProfile::uniform(h.n(), cap);
        if let SearchOutcome::Found(f) = find_capacity_homomorphism(&g, &h, &profile, Some(100_000)).unwrap() {
            prop_assert!(verify_homomorphism(&g, &h, &f).unwrap().is_valid());
            prop_assert!(verify_capacity(&f, &profile).unwrap().is_valid());
        }
    }

    #[test]
    fn blowup_projection_is_homomorphism(base in graph_strategy(5), size in 1usize..4) {
        let (g, f) = blowup(&BlowupSpec::balanced(base.clone(), size).unwrap());
        prop_assert!(verify_homomorphism(&g, &base, &f).unwrap().is_valid());
        prop_assert_eq!(g.edge_count(), base.edge_count() * size * size);
    }

    #[test]
    fn generators_respect_degree_certificates(n in 2usize..30, num in 0i64..4, seed in any::<u64>()) {
        let eps = Rational::new(num, 4);
        let g = random_min_degree_host(n, eps, seed).unwrap();
        prop_assert!(g.min_degree() >= min_degree_threshold(n, eps));
        match random_bounded_degree_bipartite(n, 3, seed) {
            Ok(b) => {
                prop_assert!(b.max_degree() <= 3);
                prop_assert!(b.bipartition().is_some());
            }
            Err(_) => prop_assert!(n < 3),
        }
    }

    #[test]
    fn composition_matches_pointwise(a in proptest::collection::vec(0usize..5, 1..8), b in proptest::collection::vec(0usize..4, 5)) {
        let f = VertexMap::new(a.clone(), 5).unwrap();
        let g = VertexMap::new(b.clone(), 4).unwrap();
        let h = f.then(&g).unwrap();
        for v in 0..a.len() {
            prop_assert_eq!(h.get(v), b[a[v]]);
        }
    }

    #[test]
    fn exhaustive_regularity_witnesses_are_real(g in graph_strategy(12), cut in 2usize..10, e in 1i64..4) {
        let n = g.n();
        prop_assume!(n >= 4);
        let cut = cut.min(n - 1).max(1);
        let x = VertexSet::range(n, 0, cut);
        let y = VertexSet::range(n, cut, n);
        let eps = Rational::new(e, 4);
        let p = RegularityParams::new(eps, Rational::new(1, 2)).unwrap();
        let v = regularity_check(&g, &x, &y, &p, CheckMode::Exhaustive).unwrap();
        if let RegularityVerdict::Violated { .. } = v {
            prop_assert!(ramsey_forge::regularity::witness_is_valid(&g, &x, &y, eps, &v));
        }
        let s = regularity_check(&g, &x, &y, &p, CheckMode::Sampled { budget: 50, seed: 1 }).unwrap();
        if let RegularityVerdict::Violated { .. } = s {
            prop_assert!(ramsey_forge::regularity::witness_is_valid(&g, &x, &y, eps, &s));
            prop_assert!(!v.counts_as_regular());
        }
    }

    #[test]
    fn drc_on_complete_graph_is_exact(n in 3usize..20, delta in 1usize..4, seed in any::<u64>()) {
        let g = Graph::complete(n);
        let full = VertexSet::full(n);
        let sel = drc_select(&g, &full, &full, delta, Rational::new(1, 4), TupleMode::Sampled { trials: 4, seed }).unwrap();
        let mut direct = full.clone();
        for &v in &sel.tuple {
            direct.intersect_with(g.neighbors(v));
        }
        prop_assert_eq!(&sel.set, &direct);
        prop_assert_eq!(sel.stats.size, direct.len());
    }

    #[test]
    fn pruned_and_naive_bad_counts_agree(seed in any::<u64>(), thr in 0usize..16, delta in 0usize..4) {
        let g = random_min_degree_host(16, Rational::new(1, 2), seed).unwrap();
        let dom = VertexSet::from_vertices(16, (0..16).filter(|v| v % 5 != 0)).unwrap();
        let x = g.neighbors((seed % 16) as usize).intersection(&dom);
        prop_assert_eq!(bad_tuple_count(&g, &dom, &x, delta, thr), bad_tuple_count_naive(&g, &dom, &x, delta, thr));
    }

    #[test]
    fn dense_unit_weights_are_injective(g in graph_strategy(6), extra in 0usize..6) {
        let host = Graph::complete(g.n() + extra);
        let gw = WeightedGraph::unit(g.clone());
        let p = DenseParams::new(Rational::new(1, 2), Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 2), g.max_degree()).unwrap();
        let w = DenseWitness::trivial(host.n(), g.max_degree());
        if let Outcome::Success(f) = dense_greedy_embed(&host, &w, &p, &gw).unwrap() {
            prop_assert!(f.is_injective());
            prop_assert!(verify_homomorphism(&g, &host, &f).unwrap().is_valid());
        }
    }
}
