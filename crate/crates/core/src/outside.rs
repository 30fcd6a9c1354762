//! Viterbi outside costs and beam pruning of relatively useless elements.
//!
//! The outside pass runs Dijkstra on the reversed monadic graph implied by
//! the hypergraph: every (arc, tail) pair is an edge from the arc's head to
//! that tail, weighted by the arc length plus the best inside costs of all
//! the other tail occurrences. `outside[v]` is then the cheapest way to
//! complete a tree `X ⇝ v` into one reaching the target.

use thiserror::Error;

use crate::graph::{ArcId, Hypergraph, Subgraph, VertexId};
use crate::inside::InsideResult;
use crate::queue::MinQueue;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OutsideError {
    #[error("target unreachable")]
    TargetUnreachable,
    #[error("inside result has {found} vertices, graph has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("beam must be a nonnegative number, got {0}")]
    BadBeam(f64),
}

/// Cheapest completion costs and the arcs realizing them.
#[derive(Clone, Debug, PartialEq)]
pub struct OutsideResult {
    pub outside: Vec<f64>,
    /// Arc through which `v` was last improved; `None` for the target and
    /// for vertices with no completion.
    pub psi: Vec<Option<ArcId>>,
    pub target: VertexId,
}

impl OutsideResult {
    pub fn cost(&self, v: VertexId) -> f64 {
        self.outside[v.index()]
    }
}

/// How the improvement step enqueues a relaxed tail.
#[doc(hidden)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Enqueue {
    /// Insert the tail when its outside cost was +∞, otherwise decrease its key.
    ByTail,
    /// Insert or decrease depending on the *head's* outside cost. Since the
    /// head was just extracted its cost is finite, so tails are never
    /// inserted. Kept to show the difference against the reference.
    ByHead,
}

/// `l_e + Σ m·inside[t]` for every arc; +∞ if any tail is unreached.
pub fn arc_inside_costs(g: &Hypergraph, inside: &InsideResult) -> Vec<f64> {
    g.arcs()
        .map(|arc| {
            arc.distinct_tails
                .iter()
                .fold(arc.length, |acc, &(t, m)| acc + f64::from(m) * inside.inside[t.index()])
        })
        .collect()
}

pub fn viterbi_outside(g: &Hypergraph, inside: &InsideResult, target: VertexId) -> Result<OutsideResult, OutsideError> {
    viterbi_outside_with(g, inside, target, Enqueue::ByTail)
}

#[doc(hidden)]
pub fn viterbi_outside_with(
    g: &Hypergraph,
    inside: &InsideResult,
    target: VertexId,
    enqueue: Enqueue,
) -> Result<OutsideResult, OutsideError> {
    let n = g.vertex_count();
    if inside.inside.len() != n {
        return Err(OutsideError::SizeMismatch {
            expected: n,
            found: inside.inside.len(),
        });
    }
    if !inside.inside[target.index()].is_finite() {
        return Err(OutsideError::TargetUnreachable);
    }
    let arc_cost = arc_inside_costs(g, inside);
    let mut outside = vec![f64::INFINITY; n];
    let mut psi = vec![None; n];
    let mut queue = MinQueue::new(n);
    outside[target.index()] = 0.0;
    queue.insert(target, 0.0);

    while let Some((x, _)) = queue.extract_min() {
        for &arc in g.head_of(x) {
            let c = outside[x.index()] + arc_cost[arc.slot()];
            if !c.is_finite() {
                continue;
            }
            for &(t, _) in g.distinct_tails(arc) {
                let proposed = c - inside.inside[t.index()];
                if proposed < outside[t.index()] {
                    match enqueue {
                        // rounding in `c - inside[t]` can undercut an already
                        // extracted vertex by an ulp; push re-queues it
                        Enqueue::ByTail => queue.push(t, proposed),
                        Enqueue::ByHead => {
                            if outside[x.index()] == f64::INFINITY {
                                queue.insert(t, proposed);
                            } else {
                                queue.decrease_key(t, proposed);
                            }
                        }
                    }
                    psi[t.index()] = Some(arc);
                    outside[t.index()] = proposed;
                }
            }
        }
    }

    Ok(OutsideResult { outside, psi, target })
}

/// Cost of the cheapest tree `X ⇝ y` using each vertex and each arc.
#[derive(Clone, Debug, PartialEq)]
pub struct Utilities {
    pub vertex: Vec<f64>,
    /// Indexed by arc slot (`ArcId::slot`).
    pub arc: Vec<f64>,
}

impl Utilities {
    pub fn of_vertex(&self, v: VertexId) -> f64 {
        self.vertex[v.index()]
    }

    pub fn of_arc(&self, a: ArcId) -> f64 {
        self.arc[a.slot()]
    }
}

/// `γ[v] = inside[v] + outside[v]`, `γ[e] = outside[h_e] + l_e + Σ m·inside[t]`.
pub fn utilities(g: &Hypergraph, inside: &InsideResult, outside: &OutsideResult) -> Utilities {
    let vertex = inside
        .inside
        .iter()
        .zip(&outside.outside)
        .map(|(i, o)| i + o)
        .collect();
    let arc = arc_inside_costs(g, inside)
        .into_iter()
        .zip(g.arc_ids())
        .map(|(c, a)| outside.outside[g.head(a).index()] + c)
        .collect();
    Utilities { vertex, arc }
}

/// Relative slack on the beam threshold, absorbing rounding differences
/// between the inside and outside summation orders.
pub const KEEP_TOLERANCE: f64 = 1e-10;

/// Keep decisions under a beam, and the pruned graph.
#[derive(Clone, Debug)]
pub struct Pruning {
    pub utilities: Utilities,
    pub keep_vertex: Vec<bool>,
    /// Indexed by arc slot.
    pub keep_arc: Vec<bool>,
    pub beam: f64,
    /// `inside[y] + beam`.
    pub threshold: f64,
    /// Restriction to kept vertices, further filtered to kept arcs.
    pub subgraph: Subgraph,
}

impl Pruning {
    pub fn kept_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.keep_vertex.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| VertexId(i))
    }

    pub fn kept_arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.keep_arc.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| ArcId::from_slot(i))
    }
}

/// Whether a utility passes the threshold `limit`.
pub fn within_beam(gamma: f64, limit: f64) -> bool {
    if limit == f64::INFINITY {
        gamma.is_finite()
    } else {
        gamma <= limit + KEEP_TOLERANCE * limit.abs().max(1.0)
    }
}

/// Keeps every vertex and arc whose utility is within `beam` of the best
/// cost `inside[y]`. `beam` may be `+∞`, keeping everything on some tree.
pub fn prune(g: &Hypergraph, inside: &InsideResult, outside: &OutsideResult, beam: f64) -> Result<Pruning, OutsideError> {
    if beam.is_nan() || beam < 0.0 {
        return Err(OutsideError::BadBeam(beam));
    }
    let best = inside.inside[outside.target.index()];
    if !best.is_finite() {
        return Err(OutsideError::TargetUnreachable);
    }
    let threshold = best + beam;
    let utilities = utilities(g, inside, outside);
    let keep_vertex: Vec<bool> = utilities.vertex.iter().map(|&u| within_beam(u, threshold)).collect();
    let keep_arc: Vec<bool> = utilities.arc.iter().map(|&u| within_beam(u, threshold)).collect();
    if cfg!(debug_assertions) {
        // γ[e] bounds γ of its head and tails, so a kept arc has kept ends
        for arc in g.arcs() {
            let ge = utilities.arc[arc.id.slot()];
            if ge.is_finite() {
                let slack = 1e-9 * ge.abs().max(1.0);
                debug_assert!(utilities.vertex[arc.head.index()] <= ge + slack);
                for &(t, _) in arc.distinct_tails {
                    debug_assert!(utilities.vertex[t.index()] <= ge + slack);
                }
            }
        }
    }
    let subgraph = g.restrict_mask(&keep_vertex, |a| keep_arc[a.slot()]);
    Ok(Pruning {
        utilities,
        keep_vertex,
        keep_arc,
        beam,
        threshold,
        subgraph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::inside::viterbi_inside;

    fn f1_results() -> (Hypergraph, InsideResult, OutsideResult) {
        let (g, q) = fixtures::f1();
        let inside = viterbi_inside(&g, q.sources()).unwrap();
        let outside = viterbi_outside(&g, &inside, q.target()).unwrap();
        (g, inside, outside)
    }

    #[test]
    fn f1_outside_values() {
        let (_, _, out) = f1_results();
        assert_eq!(out.outside, vec![3.5, 2.5, 1.5, 0.0]);
        let psi: Vec<usize> = out.psi.iter().map(|&p| ArcId::or_zero(p)).collect();
        // ω ties between e1 (via A) and e2 (via B); B is extracted first
        assert_eq!(psi, vec![2, 3, 3, 0]);
    }

    #[test]
    fn self_loop_cannot_improve_target() {
        let (g, q) = fixtures::f2();
        let inside = viterbi_inside(&g, q.sources()).unwrap();
        let out = viterbi_outside(&g, &inside, q.target()).unwrap();
        assert_eq!(out.cost(q.target()), 0.0);
        assert_eq!(out.psi[q.target().index()], None);
        assert_eq!(out.cost(VertexId(0)), 1.0);
    }

    #[test]
    fn unreachable_target_is_an_error() {
        let (g, q) = fixtures::f3();
        let inside = viterbi_inside(&g, q.sources()).unwrap();
        assert_eq!(viterbi_outside(&g, &inside, q.target()), Err(OutsideError::TargetUnreachable));
    }

    #[test]
    fn f1_utilities() {
        let (g, inside, out) = f1_results();
        let u = utilities(&g, &inside, &out);
        assert_eq!(u.vertex, vec![3.5, 3.5, 3.5, 3.5]);
        assert_eq!(u.arc, vec![3.5, 3.5, 3.5, 5.0]);
    }

    #[test]
    fn infinite_outside_gives_infinite_utility() {
        let (g, q) = fixtures::f1();
        let inside = viterbi_inside(&g, q.sources()).unwrap();
        // target A: B and S never complete to A
        let out = viterbi_outside(&g, &inside, VertexId(1)).unwrap();
        let u = utilities(&g, &inside, &out);
        assert_eq!(u.vertex[2], f64::INFINITY);
        assert_eq!(u.vertex[3], f64::INFINITY);
        assert_eq!(u.arc[0], 1.0);
        assert_eq!(u.arc[3], f64::INFINITY);
    }

    #[test]
    fn f1_prune_beams() {
        let (g, inside, out) = f1_results();
        let p = prune(&g, &inside, &out, 1.0).unwrap();
        assert_eq!(p.threshold, 4.5);
        assert_eq!(p.keep_vertex, vec![true; 4]);
        assert_eq!(p.keep_arc, vec![true, true, true, false]);
        assert_eq!(p.subgraph.arc_origin, vec![ArcId::new(1), ArcId::new(2), ArcId::new(3)]);

        let p0 = prune(&g, &inside, &out, 0.0).unwrap();
        assert_eq!(p0.keep_arc, vec![true, true, true, false]);
        let again = viterbi_inside(&p0.subgraph.graph, &[(VertexId(0), 0.0)]).unwrap();
        assert_eq!(again.inside[3], 3.5);

        let all = prune(&g, &inside, &out, f64::INFINITY).unwrap();
        assert_eq!(all.keep_arc, vec![true; 4]);
        assert_eq!(all.subgraph.graph, g);

        assert_eq!(prune(&g, &inside, &out, -0.5).unwrap_err(), OutsideError::BadBeam(-0.5));
        assert!(prune(&g, &inside, &out, f64::NAN).is_err());
    }

    #[test]
    fn head_reading_never_enqueues_tails() {
        let (g, inside, _) = f1_results();
        let out = viterbi_outside_with(&g, &inside, VertexId(3), Enqueue::ByHead).unwrap();
        // A and B get proposals from the target but are never extracted, so ω
        // is never reached
        assert_eq!(out.outside, vec![f64::INFINITY, 2.5, 1.5, 0.0]);
    }
}
