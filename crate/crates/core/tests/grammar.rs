mod common;

use common::{acyclic_grammar, rng};
use hyperpath::grammar::{best_derivation, from_pruned, parse_grammar, to_hypergraph, write_grammar, Wrtg};
use hyperpath::oracle::enumerate_derivations;
use hyperpath::{extract_best_tree, prune, reduce, viterbi_inside, viterbi_outside};
use proptest::prelude::*;

fn sorted_productions(g: &Wrtg) -> Vec<String> {
    let mut v: Vec<String> = g
        .productions()
        .iter()
        .map(|p| format!("{} {} {}", p.lhs, p.rhs, p.weight))
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn text_round_trip(seed in any::<u64>()) {
        let g = acyclic_grammar(&mut rng(seed));
        prop_assert_eq!(parse_grammar(&write_grammar(&g)).unwrap(), g);
    }

    #[test]
    fn unpruned_conversion_round_trips(seed in any::<u64>()) {
        let g = acyclic_grammar(&mut rng(seed));
        let conv = to_hypergraph(&g).unwrap();
        let all: Vec<_> = conv.graph.vertices().collect();
        let identity = conv.graph.restrict(&all).unwrap();
        match from_pruned(&g, &conv.map, &identity) {
            Ok(back) => prop_assert_eq!(sorted_productions(&back.grammar), sorted_productions(&g)),
            // the generator can produce a start symbol with no finite derivation
            Err(_) => prop_assert!(enumerate_derivations(&g, 100_000).is_none_or(|d| d.is_empty())),
        }
    }

    /// The min-cost hyperpath-tree is the max-weight derivation.
    #[test]
    fn best_tree_is_most_probable_derivation(seed in any::<u64>()) {
        let g = acyclic_grammar(&mut rng(seed));
        let Some(derivations) = enumerate_derivations(&g, 20_000) else {
            return Ok(());
        };
        let conv = to_hypergraph(&g).unwrap();
        let inside = viterbi_inside(&conv.graph, conv.query.sources()).unwrap();
        let target = conv.query.target();
        if derivations.is_empty() {
            prop_assert!(inside.inside[target.index()].is_infinite());
            return Ok(());
        }
        let best_weight = derivations.iter().map(|d| d.1).fold(0.0, f64::max);
        let tree = extract_best_tree(&conv.graph, &inside, target).unwrap();
        let (d, w) = best_derivation(&conv, &tree).unwrap();
        prop_assert!((w - best_weight).abs() <= 1e-9 * best_weight);
        prop_assert!((d.weight(&g) - w).abs() <= 1e-9);
        prop_assert!(derivations.iter().any(|(e, _)| *e == d));
    }

    /// Pruning with any beam keeps the best derivation and yields a valid grammar.
    #[test]
    fn pruned_grammar_keeps_best_derivation(seed in any::<u64>(), beam in 0.0..3.0f64) {
        let g = acyclic_grammar(&mut rng(seed));
        let conv = to_hypergraph(&g).unwrap();
        let red = reduce(&conv.graph, &conv.query);
        let Some(q) = red.query.clone() else {
            return Ok(());
        };
        let inside = viterbi_inside(red.graph(), q.sources()).unwrap();
        let outside = viterbi_outside(red.graph(), &inside, q.target()).unwrap();
        let p = prune(red.graph(), &inside, &outside, beam).unwrap();
        let composed = red.subgraph.compose(p.subgraph.clone());
        let pruned = from_pruned(&g, &conv.map, &composed).unwrap();
        let pconv = to_hypergraph(&pruned.grammar).unwrap();
        let again = viterbi_inside(&pconv.graph, pconv.query.sources()).unwrap();
        let before = inside.inside[q.target().index()];
        let after = again.inside[pconv.query.target().index()];
        prop_assert!((before - after).abs() <= 1e-12);
    }
}

#[test]
fn sample_grammars_cover_both_rhs_kinds() {
    let mut r = rng(3);
    let mut trees = 0;
    let mut strings = 0;
    for _ in 0..100 {
        for p in acyclic_grammar(&mut r).productions() {
            match p.rhs {
                hyperpath::grammar::Rhs::Tree(_) => trees += 1,
                hyperpath::grammar::Rhs::String(_) => strings += 1,
            }
        }
    }
    assert!(trees > 50 && strings > 50);
}
