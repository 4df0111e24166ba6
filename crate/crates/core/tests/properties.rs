mod common;

use disjunct::covers::{cover_to_scheme, is_valid_cover, scheme_to_cover, stars_cover};
use disjunct::formulations::{emit_lp, idealness_check, pairwise_ideal, projection_check};
use disjunct::io::{cdc_from_json, cdc_to_json};
use disjunct::search::{log_lower_bound, min_cover, min_cover_cdc, EXACT_NODE_LIMIT};
use disjunct::{Cdc, ConflictGraph, NodeSet};
use proptest::prelude::*;

/// A CDC on `n` labels from random masks, normalised, with singletons
/// added for uncovered elements.
fn arb_cdc(max_n: usize) -> impl Strategy<Value = Cdc> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1u64..1 << n, 1..8).prop_map(move |masks| {
            let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let covered = masks.iter().fold(0, |a, m| a | m);
            let sets: Vec<Vec<String>> = masks
                .iter()
                .copied()
                .chain((0..n).filter(|i| covered >> i & 1 == 0).map(|i| 1u64 << i))
                .map(|m| NodeSet::from_mask(m).iter().map(|i| labels[i].clone()).collect())
                .collect();
            Cdc::normalized(labels.clone(), sets).unwrap().0
        })
    })
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = ConflictGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            ConflictGraph::from_edges(n, edges.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn min_cover_is_valid_and_no_deeper_than_stars(g in arb_graph(7)) {
        let best = min_cover(&g).unwrap();
        prop_assert!(is_valid_cover(&g, &best.cover));
        prop_assert_eq!(best.depth, best.cover.levels.len());
        prop_assert!(best.depth <= stars_cover(&g).depth());
        if best.depth > 0 {
            let shallower = disjunct::search::min_cover_decide(&g, best.depth - 1).unwrap();
            prop_assert!(shallower.cover.is_none());
        }
    }

    #[test]
    fn pairwise_means_rank_two(c in arb_cdc(7)) {
        let pairwise = c.is_pairwise_representable().unwrap();
        prop_assert_eq!(pairwise, c.k_way_representable(2).unwrap());
        prop_assert_eq!(pairwise, c.conflict_hypergraph().rank <= 2);
        prop_assert!(c.cnf_ib_scheme(c.len()).unwrap().represents(&c));
    }

    #[test]
    fn conflict_edges_are_infeasible_pairs(c in arb_cdc(7)) {
        let g = c.conflict_graph();
        for u in 0..c.len() {
            for v in u + 1..c.len() {
                let pair: NodeSet = [u, v].into_iter().collect();
                prop_assert_eq!(g.has_edge(u, v), !c.is_feasible(&pair).unwrap());
            }
        }
    }

    #[test]
    fn covers_of_pairwise_cdcs_are_schemes(c in arb_cdc(7)) {
        prop_assume!(c.is_pairwise_representable().unwrap());
        let g = c.conflict_graph();
        let best = min_cover_cdc(&c, EXACT_NODE_LIMIT).unwrap();
        prop_assert!(best.depth >= log_lower_bound(&c));
        for cover in [best.cover, stars_cover(&g)] {
            let scheme = cover_to_scheme(&cover);
            prop_assert!(scheme.represents(&c));
            prop_assert_eq!(scheme_to_cover(&scheme).unwrap(), cover);
        }
    }

    #[test]
    fn ideal_models_project_and_emit_stably(c in arb_cdc(6)) {
        prop_assume!(c.is_pairwise_representable().unwrap());
        let m = pairwise_ideal(&c, &stars_cover(&c.conflict_graph())).unwrap();
        prop_assert!(projection_check(&m, &c).unwrap().passed());
        prop_assert_eq!(emit_lp(&m).unwrap(), emit_lp(&m).unwrap());
        if m.variables().len() <= 10 {
            prop_assert!(idealness_check(&m).unwrap().is_ideal());
        }
    }

    #[test]
    fn json_round_trip(c in arb_cdc(8)) {
        let back = cdc_from_json(&cdc_to_json(&c)).unwrap();
        prop_assert_eq!(back.labels(), c.labels());
        prop_assert_eq!(back.sets(), c.sets());
    }
}

#[test]
fn generator_corpus_is_strict() {
    for (name, c) in common::corpus(8, 1 << 9) {
        let rebuilt = Cdc::new(c.labels().to_vec(), c.sets().iter().map(|s| c.labels_of(s)));
        assert!(rebuilt.is_ok(), "{name}: {rebuilt:?}");
    }
}
