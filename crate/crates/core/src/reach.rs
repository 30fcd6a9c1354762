//! Unweighted reachability and the two-phase reduction.
//!
//! Forward reachability (`X ⇝ v`) fires an arc once all of its distinct
//! tails are reached. Backward reachability walks from the target through
//! head→tail edges of the projected graph. [`reduce`] runs the forward pass,
//! restricts, then runs the backward pass on the restriction. The backward
//! pass treats every tail of an arc as useful, which is only sound once
//! every vertex is known to be forward reachable, so the order matters.

use crate::graph::{Hypergraph, Query, Subgraph, VertexId};

/// Per-vertex reachability marks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    marks: Vec<bool>,
}

impl Reachability {
    pub fn contains(&self, v: VertexId) -> bool {
        self.marks[v.index()]
    }

    pub fn marks(&self) -> &[bool] {
        &self.marks
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.marks
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| VertexId(i))
    }

    pub fn count(&self) -> usize {
        self.marks.iter().filter(|&&m| m).count()
    }
}

/// Work counters for the traversal passes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraversalTrace {
    /// Number of times an (arc, tail) adjacency slot was examined.
    pub tail_visits: usize,
}

/// All `v` with `X ⇝ v`.
pub fn reach_from(g: &Hypergraph, sources: &[VertexId]) -> Reachability {
    reach_from_traced(g, sources, &mut TraversalTrace::default())
}

pub fn reach_from_traced(g: &Hypergraph, sources: &[VertexId], trace: &mut TraversalTrace) -> Reachability {
    let mut marks = vec![false; g.vertex_count()];
    // distinct tails still unreached, per arc
    let mut remaining: Vec<u32> = g.arc_ids().map(|a| g.distinct_tails(a).len() as u32).collect();
    // each vertex enters once, so a vector with a read cursor is the FIFO;
    // first-in-first-out keeps consecutive pops close in layered graphs
    let mut queue = Vec::with_capacity(g.vertex_count());
    for &x in sources {
        if !marks[x.index()] {
            marks[x.index()] = true;
            queue.push(x);
        }
    }
    let mut next = 0;
    while let Some(&y) = queue.get(next) {
        next += 1;
        for &(arc, _) in g.tail_of(y) {
            trace.tail_visits += 1;
            // the head is looked up only when the arc fires; counters of arcs
            // into already reached heads just run down harmlessly
            let r = &mut remaining[arc.slot()];
            *r -= 1;
            if *r == 0 {
                let h = g.head(arc);
                if !marks[h.index()] {
                    marks[h.index()] = true;
                    queue.push(h);
                }
            }
        }
    }
    Reachability { marks }
}

/// Every vertex that occurs in some head→tail chain ending at `target`.
///
/// This equals "lies on a hyperpath-tree to `target`" only when every
/// vertex of `g` is forward reachable from the sources; callers are expected
/// to restrict first (see [`reduce`]). Not checked here.
pub fn reach_to(g: &Hypergraph, target: VertexId) -> Reachability {
    reach_to_traced(g, target, &mut TraversalTrace::default())
}

pub fn reach_to_traced(g: &Hypergraph, target: VertexId, trace: &mut TraversalTrace) -> Reachability {
    let mut marks = vec![false; g.vertex_count()];
    marks[target.index()] = true;
    let mut stack = vec![target];
    while let Some(v) = stack.pop() {
        for &arc in g.head_of(v) {
            for &(t, _) in g.distinct_tails(arc) {
                trace.tail_visits += 1;
                if !marks[t.index()] {
                    marks[t.index()] = true;
                    stack.push(t);
                }
            }
        }
    }
    Reachability { marks }
}

/// Result of [`reduce`]: the minimal restriction with the same
/// hyperpath-trees `X ⇝ y`, plus the query mapped into it.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub subgraph: Subgraph,
    /// `None` when the target is unreachable; the subgraph is then empty.
    pub query: Option<Query>,
}

impl Reduction {
    pub fn target_reachable(&self) -> bool {
        self.query.is_some()
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.subgraph.graph
    }
}

/// Forward pass, restrict, backward pass on the restriction, restrict.
pub fn reduce(g: &Hypergraph, q: &Query) -> Reduction {
    let forward = reach_from(g, &q.source_vertices());
    if !forward.contains(q.target()) {
        return Reduction {
            subgraph: Subgraph::empty_of(g),
            query: None,
        };
    }
    let first = g.restrict_mask(forward.marks(), |_| true);
    let target = first.map_vertex(q.target()).expect("target is forward reachable");
    let backward = reach_to(&first.graph, target);
    let second = first.graph.restrict_mask(backward.marks(), |_| true);
    let subgraph = first.compose(second);
    let query = subgraph.map_query(q);
    debug_assert!(query.is_some());
    Reduction { subgraph, query }
}

/// The two passes in the wrong order, kept for demonstrating why the order
/// matters. Returns the backward marks on the unrestricted graph and the
/// final restriction.
#[doc(hidden)]
pub fn reduce_backward_first(g: &Hypergraph, q: &Query) -> (Reachability, Subgraph) {
    let backward = reach_to(g, q.target());
    let first = g.restrict_mask(backward.marks(), |_| true);
    let sources: Vec<_> = q.source_vertices().into_iter().filter_map(|s| first.map_vertex(s)).collect();
    let forward = reach_from(&first.graph, &sources);
    let second = first.graph.restrict_mask(forward.marks(), |_| true);
    (backward, first.compose(second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{ArcId, HypergraphBuilder};
    use crate::oracle;

    fn names(g: &Hypergraph, r: &Reachability) -> Vec<String> {
        r.vertices().map(|v| g.display_name(v)).collect()
    }

    #[test]
    fn forward_on_f1() {
        let (g, q) = fixtures::f1();
        assert_eq!(reach_from(&g, &q.source_vertices()).count(), 4);
        let a = g.vertex_by_name("A").unwrap();
        assert_eq!(names(&g, &reach_from(&g, &[a])), ["A", "S"]);
    }

    #[test]
    fn forward_without_arcs() {
        let g = Hypergraph::build(vec![Some("y".into()), Some("z".into())], vec![]).unwrap();
        assert_eq!(reach_from(&g, &[VertexId(0)]).marks(), &[true, false]);
    }

    #[test]
    fn backward_on_f1() {
        let (g, q) = fixtures::f1();
        assert_eq!(reach_to(&g, q.target()).count(), 4);
        let mut b = HypergraphBuilder::new();
        for arc in g.arc_specs() {
            b.arc_ids(arc);
        }
        for name in ["ω", "A", "B", "S", "D"] {
            b.vertex(name);
        }
        let g2 = b.build().unwrap();
        let d = g2.vertex_by_name("D").unwrap();
        assert!(!reach_to(&g2, g2.vertex_by_name("S").unwrap()).contains(d));
        let omega = g.vertex_by_name("ω").unwrap();
        assert_eq!(names(&g, &reach_to(&g, omega)), ["ω"]);
    }

    #[test]
    fn reduce_keeps_all_of_f1() {
        let (g, q) = fixtures::f1();
        let r = reduce(&g, &q);
        assert!(r.target_reachable());
        assert_eq!(r.graph(), &g);
    }

    #[test]
    fn reduce_keeps_arc_feeding_back_from_target() {
        let (g, q) = fixtures::f1();
        let mut b = HypergraphBuilder::new();
        for name in ["ω", "A", "B", "S"] {
            b.vertex(name);
        }
        for arc in g.arc_specs() {
            b.arc_ids(arc);
        }
        b.arc("B", &[("S", 1)], 1.0);
        let g5 = b.build().unwrap();
        let r = reduce(&g5, &q);
        // B <- S is on finite trees such as S(A, B(S(A, B))), so it stays
        assert_eq!(r.subgraph.arc_origin, (1..=5).map(ArcId::new).collect::<Vec<_>>());
        let e5 = ArcId::new(5);
        let found = oracle::enumerate_trees(&g5, q.sources(), q.target(), oracle::EnumerationBudget::with_cost(7.0));
        assert!(found.complete);
        assert!(found.trees.iter().any(|(t, _)| t.arcs().contains(&e5)));
    }

    #[test]
    fn order_of_passes_matters() {
        let (g, q) = fixtures::f3();
        let r = reduce(&g, &q);
        assert!(!r.target_reachable());
        assert_eq!(r.graph().vertex_count(), 0);
        let (backward, _) = reduce_backward_first(&g, &q);
        assert!(backward.contains(g.vertex_by_name("U").unwrap()));
    }

    #[test]
    fn backward_first_keeps_useless_vertices() {
        // S <- A U, A <- ω: A is forward reachable but only helps through an
        // arc that needs the underivable U.
        let mut b = HypergraphBuilder::new();
        b.arc("S", &[("A", 1), ("U", 1)], 1.0);
        b.arc("A", &[("ω", 1)], 1.0);
        let g = b.build().unwrap();
        let q = Query::new(vec![(g.vertex_by_name("ω").unwrap(), 0.0)], g.vertex_by_name("S").unwrap()).unwrap();
        assert_eq!(reduce(&g, &q).graph().vertex_count(), 0);
        let (_, wrong) = reduce_backward_first(&g, &q);
        let kept: Vec<_> = wrong.graph.vertices().map(|v| wrong.graph.display_name(v)).collect();
        assert_eq!(kept, ["A", "ω"]);
    }

    #[test]
    fn traversal_work_is_linear() {
        let (g, q) = fixtures::f1();
        let mut trace = TraversalTrace::default();
        reach_from_traced(&g, &q.source_vertices(), &mut trace);
        let slots: usize = g.arcs().map(|a| a.distinct_tails.len()).sum();
        assert!(trace.tail_visits <= slots);
        let mut trace = TraversalTrace::default();
        reach_to_traced(&g, q.target(), &mut trace);
        assert!(trace.tail_visits <= slots);
    }

    #[test]
    fn matches_fixpoint_on_f1_subsets() {
        let (g, _) = fixtures::f1();
        for mask in 0u32..16 {
            let sources: Vec<_> = g.vertices().filter(|v| mask & (1 << v.index()) != 0).collect();
            assert_eq!(reach_from(&g, &sources).marks(), oracle::fixpoint_reach(&g, &sources).as_slice());
        }
    }
}
