use std::collections::HashMap;
use std::fmt;

use super::{GrammarError, ProductionId, Wrtg};
use crate::graph::{runs, ArcId, ArcSpec, Hypergraph, Query, Subgraph, VertexId};
use crate::tree::HyperpathTree;

const SINK: &str = "_OMEGA_";

/// Correspondence between a grammar and its hypergraph: nonterminals are
/// vertices, productions are arcs, plus a fresh sink vertex that stands in
/// for the empty nonterminal yield.
#[derive(Clone, Debug, PartialEq)]
pub struct GrammarHypergraphMap {
    pub sink: VertexId,
    vertex_of: HashMap<String, VertexId>,
    nonterminal_of: Vec<Option<String>>,
    arc_of: Vec<ArcId>,
    production_of: Vec<ProductionId>,
}

impl GrammarHypergraphMap {
    pub fn vertex(&self, nonterminal: &str) -> Option<VertexId> {
        self.vertex_of.get(nonterminal).copied()
    }

    /// `None` for the sink.
    pub fn nonterminal(&self, v: VertexId) -> Option<&str> {
        self.nonterminal_of[v.index()].as_deref()
    }

    pub fn arc(&self, p: ProductionId) -> ArcId {
        self.arc_of[p.slot()]
    }

    pub fn production(&self, a: ArcId) -> ProductionId {
        self.production_of[a.slot()]
    }
}

/// A grammar converted to a hypergraph, with the query `{ω} ⇝ S`.
#[derive(Clone, Debug)]
pub struct GrammarHypergraph {
    pub graph: Hypergraph,
    pub query: Query,
    pub map: GrammarHypergraphMap,
}

fn arc_length(weight: f64) -> f64 {
    let l = -weight.ln();
    // -ln 1 is -0.0
    if l == 0.0 {
        0.0
    } else {
        l
    }
}

/// One arc per production `l -> r`: head `l`, tails `yield_N(r)` (or the
/// sink when that is empty) and length `-ln w`. Weights must lie in (0, 1].
pub fn to_hypergraph(g: &Wrtg) -> Result<GrammarHypergraph, GrammarError> {
    for (i, p) in g.productions().iter().enumerate() {
        if p.weight > 1.0 {
            return Err(GrammarError::SuperunitWeight {
                production: i + 1,
                weight: p.weight,
            });
        }
    }
    let mut symbols: std::collections::BTreeSet<String> = g.alphabet();
    symbols.extend(g.nonterminals().iter().cloned());
    let mut sink_name = SINK.to_string();
    let mut suffix = 0;
    while symbols.contains(&sink_name) {
        suffix += 1;
        sink_name = format!("{SINK}{suffix}");
    }

    let sink = VertexId(0);
    let mut names = vec![Some(sink_name)];
    let mut nonterminal_of = vec![None];
    let mut vertex_of = HashMap::new();
    for nt in g.nonterminals() {
        vertex_of.insert(nt.clone(), VertexId(names.len()));
        names.push(Some(nt.clone()));
        nonterminal_of.push(Some(nt.clone()));
    }

    let mut specs = Vec::with_capacity(g.productions().len());
    for p in g.productions() {
        let occurrences: Vec<VertexId> = g
            .nonterminal_yield(&p.rhs)
            .into_iter()
            .map(|nt| vertex_of[nt])
            .collect();
        let tails = if occurrences.is_empty() {
            vec![(sink, 1)]
        } else {
            runs(&occurrences)
        };
        specs.push(ArcSpec {
            head: vertex_of[&p.lhs],
            tails,
            length: arc_length(p.weight),
        });
    }
    let graph = Hypergraph::build(names, specs).expect("grammar conversion yields a valid hypergraph");
    let query = Query::new(vec![(sink, 0.0)], vertex_of[g.start()]).expect("single source");
    let map = GrammarHypergraphMap {
        sink,
        vertex_of,
        nonterminal_of,
        arc_of: graph.arc_ids().collect(),
        production_of: g.production_ids().collect(),
    };
    Ok(GrammarHypergraph { graph, query, map })
}

/// A grammar cut down to the productions that survived pruning.
#[derive(Clone, Debug)]
pub struct PrunedGrammar {
    pub grammar: Wrtg,
    /// Index in the original grammar of each retained production.
    pub origin: Vec<ProductionId>,
}

/// Keeps exactly the productions whose arcs survive in `pruned`, which must
/// be a restriction of the graph produced by [`to_hypergraph`] for `g`.
pub fn from_pruned(g: &Wrtg, map: &GrammarHypergraphMap, pruned: &Subgraph) -> Result<PrunedGrammar, GrammarError> {
    let empty = || GrammarError::LanguageEmpty(g.start().to_string());
    let start = map.vertex(g.start()).expect("start is a nonterminal");
    if pruned.map_vertex(start).is_none() {
        return Err(empty());
    }
    let origin: Vec<ProductionId> = pruned.arc_origin.iter().map(|&a| map.production(a)).collect();
    if origin.is_empty() {
        return Err(empty());
    }
    let productions: Vec<_> = origin.iter().map(|&p| g.production(p).clone()).collect();

    // nonterminals with at least one complete derivation among the survivors
    let mut productive: HashMap<&str, bool> = HashMap::new();
    loop {
        let mut changed = false;
        for p in &productions {
            if productive.get(p.lhs.as_str()).copied().unwrap_or(false) {
                continue;
            }
            if g.nonterminal_yield(&p.rhs)
                .iter()
                .all(|nt| productive.get(nt).copied().unwrap_or(false))
            {
                productive.insert(&p.lhs, true);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !productive.get(g.start()).copied().unwrap_or(false) {
        return Err(empty());
    }
    let grammar = Wrtg::new(g.start(), productions).map_err(|_| empty())?;
    Ok(PrunedGrammar { grammar, origin })
}

/// A derivation tree of the derivation tree grammar: production labels with
/// one child per nonterminal in the production's yield.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivationTree {
    pub production: ProductionId,
    pub children: Vec<DerivationTree>,
}

impl DerivationTree {
    /// Product of the production weights.
    pub fn weight(&self, g: &Wrtg) -> f64 {
        self.children
            .iter()
            .fold(g.production(self.production).weight, |w, c| w * c.weight(g))
    }
}

impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.production)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Relabels a hyperpath-tree of the converted graph as a derivation tree
/// and reports its weight `exp(-cost)`.
pub fn best_derivation(conv: &GrammarHypergraph, tree: &HyperpathTree) -> Result<(DerivationTree, f64), GrammarError> {
    let derivation = relabel(conv, tree)?;
    let weight = (-tree.cost(&conv.graph, conv.query.sources())).exp();
    Ok((derivation, weight))
}

fn relabel(conv: &GrammarHypergraph, tree: &HyperpathTree) -> Result<DerivationTree, GrammarError> {
    match tree {
        HyperpathTree::Source(v) => Err(GrammarError::NotADerivation(format!(
            "leaf at vertex {} outside a production",
            conv.graph.display_name(*v)
        ))),
        HyperpathTree::Arc { arc, children } => {
            let children = children
                .iter()
                .filter(|c| **c != HyperpathTree::Source(conv.map.sink))
                .map(|c| relabel(conv, c))
                .collect::<Result<_, _>>()?;
            Ok(DerivationTree {
                production: conv.map.production(*arc),
                children,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::grammar::{parse_grammar, Production, Rhs, Tree};
    use crate::inside::{extract_best_tree, viterbi_inside};
    use crate::outside::{prune, viterbi_outside};
    use crate::text::Document;

    fn f1_grammar() -> Wrtg {
        parse_grammar(&format!(
            "{}: A -> a\n{}: B -> b\n{}: S -> σ(A, B)\n{}: S -> σ(A, A)\nstart S\n",
            (-1.0f64).exp(),
            (-2.0f64).exp(),
            (-0.5f64).exp(),
            (-3.0f64).exp(),
        ))
        .unwrap()
    }

    #[test]
    fn converts_to_f1() {
        let conv = to_hypergraph(&f1_grammar()).unwrap();
        let (f1, _) = fixtures::f1();
        let g = &conv.graph;
        assert_eq!(g.display_name(conv.map.sink), "_OMEGA_");
        assert_eq!(g.vertex_count(), 4);
        for (got, want) in g.arcs().zip(f1.arcs()) {
            assert_eq!(got.head, want.head);
            assert_eq!(got.tails, want.tails);
            assert!((got.length - want.length).abs() < 1e-12);
        }
        assert_eq!(conv.query.sources(), &[(VertexId(0), 0.0)]);
        assert_eq!(g.display_name(conv.query.target()), "S");
    }

    #[test]
    fn repeated_nonterminal_becomes_multiplicity() {
        let g = parse_grammar("0.5: A -> σ(A, A)\n1: A -> a\n").unwrap();
        let conv = to_hypergraph(&g).unwrap();
        let text = Document::new(conv.graph.clone(), Some(&conv.query)).write();
        assert!(text.contains("arc A <- A*2 @ 0.69314718055994529\n"), "{text}");
        assert!(text.contains("arc A <- _OMEGA_ @ 0\n"), "{text}");
    }

    #[test]
    fn unreachable_nonterminal_is_converted_then_reduced() {
        let g = parse_grammar("1: S -> a\n0.5: U -> S\n").unwrap();
        let conv = to_hypergraph(&g).unwrap();
        assert!(conv.map.vertex("U").is_some());
        let r = crate::reach::reduce(&conv.graph, &conv.query);
        assert!(r.subgraph.map_vertex(conv.map.vertex("U").unwrap()).is_none());
    }

    #[test]
    fn sink_name_avoids_collisions() {
        let g = parse_grammar("1: S -> _OMEGA_ _OMEGA_1\n").unwrap();
        let conv = to_hypergraph(&g).unwrap();
        assert_eq!(conv.graph.display_name(conv.map.sink), "_OMEGA_2");
    }

    #[test]
    fn rejects_superunit_weights() {
        let g = Wrtg::new("S", vec![Production::new("S", Rhs::String(vec![]), 1.5)]).unwrap();
        assert!(matches!(to_hypergraph(&g), Err(GrammarError::SuperunitWeight { production: 1, .. })));
    }

    #[test]
    fn full_subgraph_round_trips() {
        let g = f1_grammar();
        let conv = to_hypergraph(&g).unwrap();
        let all: Vec<_> = conv.graph.vertices().collect();
        let back = from_pruned(&g, &conv.map, &conv.graph.restrict(&all).unwrap()).unwrap();
        assert_eq!(back.grammar, g);
        assert_eq!(back.origin, g.production_ids().collect::<Vec<_>>());
    }

    #[test]
    fn pruning_drops_the_aa_production() {
        let g = f1_grammar();
        let conv = to_hypergraph(&g).unwrap();
        let inside = viterbi_inside(&conv.graph, conv.query.sources()).unwrap();
        let outside = viterbi_outside(&conv.graph, &inside, conv.query.target()).unwrap();
        let p = prune(&conv.graph, &inside, &outside, 1.0).unwrap();
        let reduced = from_pruned(&g, &conv.map, &p.subgraph).unwrap();
        assert_eq!(reduced.grammar.productions().len(), 3);
        assert_eq!(reduced.origin, (1..=3).map(ProductionId::new).collect::<Vec<_>>());
    }

    #[test]
    fn emptied_language_is_an_error() {
        let g = f1_grammar();
        let conv = to_hypergraph(&g).unwrap();
        let no_start = conv.graph.restrict(&[VertexId(0), VertexId(1)]).unwrap();
        assert_eq!(
            from_pruned(&g, &conv.map, &no_start).unwrap_err(),
            GrammarError::LanguageEmpty("S".into())
        );
        // S kept but only S -> σ(A, B) with B's production gone
        let all = vec![true; 4];
        let only_s = conv.graph.restrict_mask(&all, |a| a.get() == 3);
        assert!(from_pruned(&g, &conv.map, &only_s).is_err());
    }

    #[test]
    fn best_derivation_of_f1() {
        let g = f1_grammar();
        let conv = to_hypergraph(&g).unwrap();
        let inside = viterbi_inside(&conv.graph, conv.query.sources()).unwrap();
        let tree = extract_best_tree(&conv.graph, &inside, conv.query.target()).unwrap();
        let (d, w) = best_derivation(&conv, &tree).unwrap();
        assert_eq!(d.to_string(), "p3(p1, p2)");
        assert!((w - (-3.5f64).exp()).abs() < 1e-9);
        assert!((w - d.weight(&g)).abs() < 1e-9);
    }

    #[test]
    fn single_terminal_production() {
        let g = Wrtg::new("S", vec![Production::new("S", Rhs::Tree(Tree::leaf("a")), 0.3)]).unwrap();
        let conv = to_hypergraph(&g).unwrap();
        let inside = viterbi_inside(&conv.graph, conv.query.sources()).unwrap();
        let tree = extract_best_tree(&conv.graph, &inside, conv.query.target()).unwrap();
        let (d, w) = best_derivation(&conv, &tree).unwrap();
        assert_eq!(d.to_string(), "p1");
        assert!((w - 0.3).abs() < 1e-12);
    }
}
