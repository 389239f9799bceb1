//! Property-based invariants across the core API.

use agony_core::eval::{agony, agony_from_blocks, AgonyExponent};
use agony_core::metrics::adjusted_rand_index;
use agony_core::solve::{canonicalize, minimize_d0, minimize_d1};
use agony_core::{DirectedGraph, Ranking};
use proptest::prelude::*;

fn exponent(d: f64) -> AgonyExponent {
    AgonyExponent::new(d).unwrap()
}

fn graph_strategy(max_n: u32) -> impl Strategy<Value = DirectedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=(n as usize * n as usize)).prop_map(
            move |mut pairs| {
                pairs.retain(|&(u, v)| u != v);
                pairs.sort_unstable();
                pairs.dedup();
                DirectedGraph::new(n as usize, pairs).unwrap()
            },
        )
    })
}

fn graph_and_ranking(max_n: u32) -> impl Strategy<Value = (DirectedGraph, Ranking)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        proptest::collection::vec(1u32..=6, n)
            .prop_map(move |ranks| (g.clone(), Ranking::new(ranks).unwrap()))
    })
}

proptest! {
    #[test]
    fn trivial_ranking_costs_every_edge((g, _) in graph_and_ranking(9)) {
        let m = g.edge_count();
        for d in [0.0, 0.5, 1.0, 2.0] {
            let rep = agony(&g, &Ranking::trivial(g.node_count()), exponent(d)).unwrap();
            prop_assert_eq!(rep.agony, m as f64);
            prop_assert_eq!(rep.backward_edges, m as u64);
            prop_assert_eq!(rep.hierarchy, if m == 0 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn agony_is_nondecreasing_in_d((g, r) in graph_and_ranking(9)) {
        let mut prev = -1.0f64;
        for d in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let value = agony(&g, &r, exponent(d)).unwrap().agony;
            prop_assert!(value >= prev - 1e-9);
            prev = value;
        }
    }

    #[test]
    fn block_sum_equals_edge_sum((g, r) in graph_and_ranking(9)) {
        for d in [0.0, 0.5, 1.0, 2.0] {
            let rep = agony(&g, &r, exponent(d)).unwrap();
            let via_blocks = agony_from_blocks(&rep.block_counts, exponent(d));
            prop_assert!((via_blocks - rep.agony).abs() <= 1e-9 * rep.agony.max(1.0));
        }
    }

    #[test]
    fn canonicalize_never_increases_agony((g, r) in graph_and_ranking(8)) {
        for d in [0.0, 1.0, 2.0] {
            let before = agony(&g, &r, exponent(d)).unwrap().agony;
            let canon = canonicalize(&g, &r, exponent(d)).unwrap();
            let after = agony(&g, &canon, exponent(d)).unwrap().agony;
            prop_assert!(after <= before + 1e-9);
            prop_assert!(canon.is_normalized());
        }
    }

    #[test]
    fn invert_is_an_involution(ranks in proptest::collection::vec(1u32..=9, 1..12)) {
        let raw = Ranking::new(ranks).unwrap();
        // Inversion reverses the order of every pair ...
        for u in 0..raw.len() as u32 {
            for v in 0..raw.len() as u32 {
                let fwd = raw.rank(u).cmp(&raw.rank(v));
                let rev = raw.invert().rank(v).cmp(&raw.invert().rank(u));
                prop_assert_eq!(fwd, rev);
            }
        }
        // ... and is a strict involution once the lowest rank is 1.
        let r = raw.normalize();
        prop_assert_eq!(r.invert().invert(), r);
    }

    #[test]
    fn normalize_is_idempotent(ranks in proptest::collection::vec(1u32..=9, 1..12)) {
        let r = Ranking::new(ranks).unwrap();
        let once = r.normalize();
        prop_assert!(once.is_normalized());
        prop_assert_eq!(once.normalize(), once.clone());
        // Normalization preserves the partition and the order of classes.
        prop_assert_eq!(adjusted_rand_index(&r, &once).unwrap(), 1.0);
        for u in 0..r.len() as u32 {
            for v in 0..r.len() as u32 {
                let lhs = r.rank(u).cmp(&r.rank(v));
                let rhs = once.rank(u).cmp(&once.rank(v));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn ari_is_symmetric_and_bounded(
        a in proptest::collection::vec(1u32..=4, 2..10),
        b in proptest::collection::vec(1u32..=4, 2..10),
    ) {
        let n = a.len().min(b.len());
        let ra = Ranking::new(a[..n].to_vec()).unwrap();
        let rb = Ranking::new(b[..n].to_vec()).unwrap();
        let xy = adjusted_rand_index(&ra, &rb).unwrap();
        let yx = adjusted_rand_index(&rb, &ra).unwrap();
        prop_assert!((xy - yx).abs() < 1e-12);
        prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&xy));
        prop_assert_eq!(adjusted_rand_index(&ra, &ra).unwrap(), 1.0);
    }

    #[test]
    fn exact_solver_always_beats_or_ties_heuristics(g in graph_strategy(8)) {
        let exact = minimize_d1(&g);
        prop_assert!(exact.exact);
        // Any other ranking we can easily construct costs at least as much.
        let trivial_cost = g.edge_count() as f64;
        prop_assert!(exact.agony <= trivial_cost);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&exact.hierarchy) || g.edge_count() == 0);
        let rep = agony(&g, &exact.ranking, exponent(1.0)).unwrap();
        prop_assert_eq!(rep.agony, exact.agony);
        prop_assert!(exact.ranking.is_normalized());
    }

    #[test]
    fn d0_heuristic_respects_the_half_edge_bound(g in graph_strategy(9)) {
        let report = minimize_d0(&g);
        prop_assert!(report.agony <= g.edge_count() as f64 / 2.0 + 1e-9);
        let rep = agony(&g, &report.ranking, exponent(0.0)).unwrap();
        prop_assert_eq!(rep.agony, report.agony);
    }

    #[test]
    fn dags_reach_zero_agony(n in 2u32..10, pairs in proptest::collection::vec((0u32..10, 0u32..10), 0..40)) {
        // Forcing u < v makes any edge set acyclic.
        let mut edges: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter_map(|(u, v)| {
                let (u, v) = (u % n, v % n);
                (u < v).then_some((u, v))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let g = DirectedGraph::new(n as usize, edges).unwrap();
        prop_assert!(agony_core::graph::is_dag(&g));
        for (d, report) in [(1.0, minimize_d1(&g)), (0.0, minimize_d0(&g))] {
            prop_assert_eq!(report.agony, 0.0);
            prop_assert!(report.exact, "d = {} should be exact on DAGs", d);
            prop_assert_eq!(report.hierarchy, 1.0);
        }
    }
}
