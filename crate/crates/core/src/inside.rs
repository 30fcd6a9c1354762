//! Shortest hyperpath-trees from a source set (Knuth's generalization of
//! Dijkstra's algorithm).
//!
//! Vertices leave the queue in nondecreasing order of inside cost. When a
//! vertex `y` is extracted, its cost is bound into every arc that has `y` as
//! a tail; an arc fires once all of its distinct tails are bound, possibly
//! lowering the cost of its head. This is correct for any *superior* arc
//! cost function, one whose value is never below any of its inputs.

use thiserror::Error;

use crate::graph::{check_sources, ArcId, Hypergraph, QueryError, VertexId};
use crate::queue::MinQueue;
use crate::tree::HyperpathTree;

/// Incrementally evaluated cost of one hyperarc.
///
/// `inf` must be a lower bound on the final cost that never decreases as
/// tails are bound, and must equal the exact cost once every distinct tail
/// has been bound. The final cost must be at least every bound tail cost.
pub trait CostFunction {
    /// Binds the cost of reaching tail `tail`, which occurs `multiplicity`
    /// times among the arc's tails.
    fn bind(&mut self, tail: VertexId, multiplicity: u32, cost: f64);
    fn inf(&self) -> f64;
}

/// Creates the per-arc [`CostFunction`] state for one run.
pub trait CostModel {
    type Cost: CostFunction;
    fn for_arc(&self, g: &Hypergraph, arc: ArcId) -> Self::Cost;
}

/// `length + Σ multiplicity · tail cost`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AdditiveCost {
    accumulated: f64,
}

impl AdditiveCost {
    pub fn new(length: f64) -> Self {
        AdditiveCost { accumulated: length }
    }
}

impl CostFunction for AdditiveCost {
    #[inline]
    fn bind(&mut self, _tail: VertexId, multiplicity: u32, cost: f64) {
        self.accumulated += f64::from(multiplicity) * cost;
    }

    #[inline]
    fn inf(&self) -> f64 {
        self.accumulated
    }
}

/// The additive model over the graph's arc lengths.
#[derive(Copy, Clone, Debug, Default)]
pub struct Additive;

impl CostModel for Additive {
    type Cost = AdditiveCost;

    #[inline]
    fn for_arc(&self, g: &Hypergraph, arc: ArcId) -> AdditiveCost {
        AdditiveCost::new(g.length(arc))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InsideError {
    #[error(transparent)]
    Sources(#[from] QueryError),
    #[error("source vertex {vertex} out of range (graph has {count} vertices)")]
    SourceOutOfRange { vertex: usize, count: usize },
}

/// Cheapest inside costs and predecessor arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct InsideResult {
    /// Minimum cost of a tree `X ⇝ v`, `+∞` if there is none.
    pub inside: Vec<f64>,
    /// Arc that last improved `v`; `None` for unreached vertices and for
    /// sources whose initial cost was never beaten.
    pub pi: Vec<Option<ArcId>>,
    pub sources: Vec<(VertexId, f64)>,
}

impl InsideResult {
    pub fn cost(&self, v: VertexId) -> f64 {
        self.inside[v.index()]
    }

    pub fn predecessor(&self, v: VertexId) -> Option<ArcId> {
        self.pi[v.index()]
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct InsideOptions {
    /// Skip binding into arcs whose lower bound already cannot improve the
    /// head. Never changes results for superior costs.
    pub guard: bool,
}

impl Default for InsideOptions {
    fn default() -> Self {
        InsideOptions { guard: true }
    }
}

/// Counters and checks gathered during a run.
#[derive(Clone, Debug, PartialEq)]
pub struct InsideTrace {
    pub extractions: usize,
    pub binds: usize,
    pub fired: usize,
    /// Whether extracted keys were nondecreasing.
    pub monotone: bool,
    last_key: f64,
}

impl Default for InsideTrace {
    fn default() -> Self {
        InsideTrace {
            extractions: 0,
            binds: 0,
            fired: 0,
            monotone: true,
            last_key: f64::NEG_INFINITY,
        }
    }
}

/// Additive-cost inside pass with the default options.
pub fn viterbi_inside(g: &Hypergraph, sources: &[(VertexId, f64)]) -> Result<InsideResult, InsideError> {
    viterbi_inside_with(g, sources, &Additive, InsideOptions::default(), &mut InsideTrace::default())
}

pub fn viterbi_inside_with<M: CostModel>(
    g: &Hypergraph,
    sources: &[(VertexId, f64)],
    model: &M,
    options: InsideOptions,
    trace: &mut InsideTrace,
) -> Result<InsideResult, InsideError> {
    check_sources(sources)?;
    let n = g.vertex_count();
    if let Some(&(v, _)) = sources.iter().find(|s| s.0.index() >= n) {
        return Err(InsideError::SourceOutOfRange { vertex: v.index(), count: n });
    }

    let mut inside = vec![f64::INFINITY; n];
    let mut pi = vec![None; n];
    let mut queue = MinQueue::new(n);
    for &(x, c) in sources {
        inside[x.index()] = c;
        queue.insert(x, c);
    }
    let mut costs: Vec<M::Cost> = g.arc_ids().map(|a| model.for_arc(g, a)).collect();
    let mut remaining: Vec<u32> = g.arc_ids().map(|a| g.distinct_tails(a).len() as u32).collect();

    while let Some((y, key)) = queue.extract_min() {
        trace.extractions += 1;
        if key < trace.last_key {
            trace.monotone = false;
        }
        trace.last_key = key;
        let y_cost = inside[y.index()];
        for &(arc, multiplicity) in g.tail_of(y) {
            let h = g.head(arc).index();
            let cost = &mut costs[arc.slot()];
            if options.guard && cost.inf() >= inside[h] {
                continue;
            }
            cost.bind(y, multiplicity, y_cost);
            trace.binds += 1;
            let r = &mut remaining[arc.slot()];
            *r -= 1;
            if *r == 0 {
                trace.fired += 1;
                let c = cost.inf();
                if c < inside[h] {
                    if inside[h] == f64::INFINITY {
                        queue.insert(VertexId(h), c);
                    } else {
                        let queued = queue.decrease_key(VertexId(h), c);
                        debug_assert!(queued, "improvement of an extracted vertex");
                    }
                    pi[h] = Some(arc);
                    inside[h] = c;
                }
            }
        }
    }

    Ok(InsideResult {
        inside,
        pi,
        sources: sources.to_vec(),
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("vertex {0} is unreachable from the sources")]
    Unreachable(usize),
    #[error("predecessor chain through vertex {0} is cyclic")]
    Cycle(usize),
}

/// Expands `π` into a cheapest hyperpath-tree for `v`: each node is the
/// predecessor arc of its vertex, with one child per tail occurrence. Sources
/// without a predecessor become leaves.
pub fn extract_best_tree(g: &Hypergraph, result: &InsideResult, v: VertexId) -> Result<HyperpathTree, ExtractError> {
    if !result.inside[v.index()].is_finite() {
        return Err(ExtractError::Unreachable(v.index()));
    }
    let mut on_path = vec![false; g.vertex_count()];
    expand(g, result, v, &mut on_path)
}

fn expand(g: &Hypergraph, result: &InsideResult, v: VertexId, on_path: &mut [bool]) -> Result<HyperpathTree, ExtractError> {
    let Some(arc) = result.pi[v.index()] else {
        return Ok(HyperpathTree::Source(v));
    };
    if on_path[v.index()] {
        return Err(ExtractError::Cycle(v.index()));
    }
    on_path[v.index()] = true;
    let children = g
        .arc(arc)
        .tails
        .iter()
        .map(|&t| expand(g, result, t, on_path))
        .collect::<Result<Vec<_>, _>>()?;
    on_path[v.index()] = false;
    Ok(HyperpathTree::Arc { arc, children })
}
