//! Brute-force reference implementations.
//!
//! Nothing here calls the fast algorithms: reachability is a naive
//! iterate-to-fixpoint over the inductive definition, costs come from
//! value iteration, and hyperpath-trees are enumerated explicitly under a
//! budget. These exist to check the real implementations on small inputs.

use std::rc::Rc;

use crate::grammar::{DerivationTree, Wrtg};
use crate::graph::{ArcId, Hypergraph, VertexId};
use crate::tree::HyperpathTree;

/// Slack for comparisons against enumeration limits; lower bounds and tree
/// costs are summed in different orders.
const SLACK: f64 = 1e-9;

/// `reach[v]` iff `v` is a source, or some arc with head `v` has every tail
/// reachable. Full scans until nothing changes.
pub fn fixpoint_reach(g: &Hypergraph, sources: &[VertexId]) -> Vec<bool> {
    let mut reach = vec![false; g.vertex_count()];
    for &s in sources {
        reach[s.index()] = true;
    }
    loop {
        let mut changed = false;
        for arc in g.arcs() {
            if !reach[arc.head.index()] && arc.tails.iter().all(|t| reach[t.index()]) {
                reach[arc.head.index()] = true;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}

/// Minimum additive tree cost per vertex by value iteration (∞ if none).
pub fn fixpoint_costs(g: &Hypergraph, sources: &[(VertexId, f64)]) -> Vec<f64> {
    let mut cost = vec![f64::INFINITY; g.vertex_count()];
    for &(s, c) in sources {
        cost[s.index()] = c;
    }
    let max_rounds = 10 * (g.vertex_count() + 1);
    for _ in 0..max_rounds {
        let mut changed = false;
        for arc in g.arcs() {
            let c = arc.length + arc.tails.iter().map(|t| cost[t.index()]).sum::<f64>();
            if c < cost[arc.head.index()] {
                cost[arc.head.index()] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    cost
}

/// Bounds on a tree enumeration. Exceeding either of the first two marks
/// the result incomplete.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EnumerationBudget {
    pub max_depth: usize,
    /// Cap on trees materialized at any level of the search.
    pub max_trees: usize,
    pub max_cost: f64,
}

impl EnumerationBudget {
    pub fn with_cost(max_cost: f64) -> Self {
        EnumerationBudget {
            max_depth: 64,
            max_trees: 500_000,
            max_cost,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    /// Trees with cost ≤ `max_cost`, sorted by cost then structure.
    pub trees: Vec<(HyperpathTree, f64)>,
    /// False if the depth or tree-count bound cut the search short.
    pub complete: bool,
}

#[derive(Debug)]
enum Node {
    Leaf(VertexId),
    Arc(ArcId, Vec<Rc<Node>>),
}

impl Node {
    fn to_tree(&self) -> HyperpathTree {
        match self {
            Node::Leaf(v) => HyperpathTree::Source(*v),
            Node::Arc(a, children) => HyperpathTree::Arc {
                arc: *a,
                children: children.iter().map(|c| c.to_tree()).collect(),
            },
        }
    }
}

struct Enumerator<'g> {
    g: &'g Hypergraph,
    source_cost: Vec<Option<f64>>,
    lower: Vec<f64>,
    by_head: Vec<Vec<ArcId>>,
    max_trees: usize,
    produced: usize,
    complete: bool,
}

impl Enumerator<'_> {
    fn expand(&mut self, v: VertexId, limit: f64, depth: usize) -> Vec<(Rc<Node>, f64)> {
        let mut out = Vec::new();
        if !self.complete {
            return out;
        }
        if let Some(c) = self.source_cost[v.index()] {
            if c <= limit + SLACK {
                out.push((Rc::new(Node::Leaf(v)), c));
            }
        }
        let arcs = self.by_head[v.index()].clone();
        'arcs: for id in arcs {
            let arc = self.g.arc(id);
            let lower_sum: f64 = arc.tails.iter().map(|t| self.lower[t.index()]).sum();
            if arc.length + lower_sum > limit + SLACK {
                continue;
            }
            if depth == 0 {
                self.complete = false;
                continue;
            }
            let mut lists = Vec::with_capacity(arc.tails.len());
            for &t in arc.tails {
                let others = lower_sum - self.lower[t.index()];
                let mut list = self.expand(t, limit - arc.length - others, depth - 1);
                if list.is_empty() || !self.complete {
                    continue 'arcs;
                }
                list.sort_by(|a, b| a.1.total_cmp(&b.1));
                lists.push(list);
            }
            // lower bound on the cost of positions k.. of the tail list
            let mut suffix = vec![0.0; arc.tails.len() + 1];
            for k in (0..arc.tails.len()).rev() {
                suffix[k] = suffix[k + 1] + self.lower[arc.tails[k].index()];
            }
            let mut chosen = Vec::with_capacity(arc.tails.len());
            self.combine(id, &lists, &suffix, 0, arc.length, limit, &mut chosen, &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn combine(
        &mut self,
        arc: ArcId,
        lists: &[Vec<(Rc<Node>, f64)>],
        suffix: &[f64],
        k: usize,
        partial: f64,
        limit: f64,
        chosen: &mut Vec<Rc<Node>>,
        out: &mut Vec<(Rc<Node>, f64)>,
    ) {
        if !self.complete {
            return;
        }
        if k == lists.len() {
            self.produced += 1;
            if self.produced > self.max_trees {
                self.complete = false;
                return;
            }
            out.push((Rc::new(Node::Arc(arc, chosen.clone())), partial));
            return;
        }
        for (node, c) in &lists[k] {
            if partial + c + suffix[k + 1] > limit + SLACK {
                break;
            }
            chosen.push(node.clone());
            self.combine(arc, lists, suffix, k + 1, partial + c, limit, chosen, out);
            chosen.pop();
        }
    }
}

/// Enumerates every hyperpath-tree `X ⇝ v` with cost at most
/// `budget.max_cost`. Termination relies on the cost bound, so cycles must
/// have strictly positive length; `max_depth` guards the rest.
pub fn enumerate_trees(
    g: &Hypergraph,
    sources: &[(VertexId, f64)],
    v: VertexId,
    budget: EnumerationBudget,
) -> Enumeration {
    let mut source_cost = vec![None; g.vertex_count()];
    for &(s, c) in sources {
        source_cost[s.index()] = Some(c);
    }
    let mut by_head = vec![Vec::new(); g.vertex_count()];
    for arc in g.arcs() {
        by_head[arc.head.index()].push(arc.id);
    }
    let mut e = Enumerator {
        g,
        source_cost,
        lower: fixpoint_costs(g, sources),
        by_head,
        max_trees: budget.max_trees,
        produced: 0,
        complete: true,
    };
    let found = e.expand(v, budget.max_cost, budget.max_depth);
    let mut trees: Vec<(HyperpathTree, f64)> = found
        .into_iter()
        .filter(|(_, c)| *c <= budget.max_cost)
        .map(|(n, c)| (n.to_tree(), c))
        .collect();
    trees.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Enumeration {
        trees,
        complete: e.complete,
    }
}

/// Per-element minimum cost over enumerated trees `X ⇝ target`.
#[derive(Clone, Debug)]
pub struct UsageCosts {
    /// Cheapest enumerated tree using each vertex (∞ if none).
    pub vertex: Vec<f64>,
    /// Cheapest enumerated tree using each arc, by arc slot (∞ if none).
    pub arc: Vec<f64>,
    pub trees: Vec<(HyperpathTree, f64)>,
}

/// For every vertex and arc, the cheapest enumerated tree `X ⇝ target`
/// containing it, among trees of cost ≤ `max_cost`. `None` if the
/// enumeration was incomplete.
pub fn usage_costs(
    g: &Hypergraph,
    sources: &[(VertexId, f64)],
    target: VertexId,
    budget: EnumerationBudget,
) -> Option<UsageCosts> {
    let e = enumerate_trees(g, sources, target, budget);
    if !e.complete {
        return None;
    }
    let mut vertex = vec![f64::INFINITY; g.vertex_count()];
    let mut arc = vec![f64::INFINITY; g.arc_count()];
    for (t, c) in &e.trees {
        for v in t.vertices(g) {
            vertex[v.index()] = vertex[v.index()].min(*c);
        }
        for a in t.arcs() {
            arc[a.slot()] = arc[a.slot()].min(*c);
        }
    }
    Some(UsageCosts {
        vertex,
        arc,
        trees: e.trees,
    })
}

/// Every derivation tree of `g` from its start symbol, with its weight, by
/// direct recursive expansion of the productions. `None` if the grammar is
/// recursive (reachable cycle through the start symbol's derivations) or
/// has more than `limit` derivations.
pub fn enumerate_derivations(g: &Wrtg, limit: usize) -> Option<Vec<(DerivationTree, f64)>> {
    let mut in_progress = Vec::new();
    let out = derivations_of(g, g.start(), limit, &mut in_progress)?;
    Some(out.into_iter().map(|d| {
        let w = d.weight(g);
        (d, w)
    }).collect())
}

fn derivations_of(g: &Wrtg, nt: &str, limit: usize, in_progress: &mut Vec<String>) -> Option<Vec<DerivationTree>> {
    if in_progress.iter().any(|s| s == nt) {
        return None;
    }
    in_progress.push(nt.to_string());
    let mut out = Vec::new();
    for id in g.production_ids() {
        let p = g.production(id);
        if p.lhs != nt {
            continue;
        }
        // cartesian product over the yield, left to right
        let mut partial: Vec<Vec<DerivationTree>> = vec![Vec::new()];
        for child in g.nonterminal_yield(&p.rhs) {
            let options = derivations_of(g, child, limit, in_progress)?;
            let mut next = Vec::new();
            for prefix in &partial {
                for o in &options {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    next.push(v);
                    if next.len() > limit {
                        return None;
                    }
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|children| DerivationTree { production: id, children }));
        if out.len() > limit {
            return None;
        }
    }
    in_progress.pop();
    Some(out)
}
