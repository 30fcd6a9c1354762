//! Seeded random instance generators shared by the integration tests.
#![allow(dead_code)]

use hyperpath::grammar::{Production, Rhs, Tree, Wrtg};
use hyperpath::{ArcSpec, Hypergraph, Query, VertexId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Copy, Clone, Debug)]
pub struct GraphShape {
    pub max_vertices: usize,
    pub max_arcs: usize,
    pub max_tails: usize,
    pub min_length: f64,
    pub max_length: f64,
}

impl GraphShape {
    pub const REACH: GraphShape = GraphShape {
        max_vertices: 8,
        max_arcs: 15,
        max_tails: 3,
        min_length: 0.0,
        max_length: 1.0,
    };
    pub const WEIGHTED: GraphShape = GraphShape {
        max_vertices: 7,
        max_arcs: 12,
        max_tails: 3,
        min_length: 0.1,
        max_length: 4.0,
    };
}

/// Vertices `v0..`, arcs with random heads and 1..=max_tails tail
/// occurrences (repeats allowed, so multiplicities above 1 occur).
pub fn random_graph(rng: &mut TestRng, shape: GraphShape) -> Hypergraph {
    let n = rng.gen_range(1..=shape.max_vertices);
    let m = rng.gen_range(0..=shape.max_arcs);
    let names = (0..n).map(|i| Some(format!("v{i}"))).collect();
    let arcs = (0..m)
        .map(|_| {
            let head = VertexId(rng.gen_range(0..n));
            let k = rng.gen_range(1..=shape.max_tails);
            let tails: Vec<(VertexId, u32)> = (0..k).map(|_| (VertexId(rng.gen_range(0..n)), 1)).collect();
            let length = if shape.min_length == shape.max_length {
                shape.min_length
            } else {
                rng.gen_range(shape.min_length..shape.max_length)
            };
            ArcSpec::new(head, &tails, length)
        })
        .collect();
    Hypergraph::build(names, arcs).expect("generated graph is valid")
}

/// A random nonempty source set with costs in `[0, max_cost]`.
pub fn random_sources(rng: &mut TestRng, g: &Hypergraph, max_cost: f64) -> Vec<(VertexId, f64)> {
    let n = g.vertex_count();
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let k = rng.gen_range(1..=n.min(3));
    ids.truncate(k);
    ids.sort_unstable();
    ids.into_iter()
        .map(|i| {
            let c = if max_cost > 0.0 { rng.gen_range(0.0..max_cost) } else { 0.0 };
            (VertexId(i), c)
        })
        .collect()
}

pub fn random_query(rng: &mut TestRng, g: &Hypergraph) -> Query {
    let sources = random_sources(rng, g, 1.0);
    let target = VertexId(rng.gen_range(0..g.vertex_count()));
    Query::new(sources, target).expect("generated query is valid")
}

/// A weighted instance whose target is reachable from the sources.
pub fn reachable_instance(rng: &mut TestRng) -> (Hypergraph, Query) {
    loop {
        let g = random_graph(rng, GraphShape::WEIGHTED);
        let q = random_query(rng, &g);
        if hyperpath::reach_from(&g, &q.source_vertices()).contains(q.target()) {
            return (g, q);
        }
    }
}

/// Layered graph of constant-width layers, like a parse chart: each arc's
/// head lies in layer `L` and its tails in layers `L-1` and `L-2`, and arcs
/// are numbered layer by layer. Layer 0 is the source set. The last vertex
/// is a target fed by a unary arc from every other vertex, so a backward
/// pass from it visits the whole graph.
pub fn layered_graph(rng: &mut TestRng, target_size: usize) -> (Hypergraph, Vec<(VertexId, f64)>, VertexId) {
    const WIDTH: usize = 64;
    let layers = (target_size / 10 / WIDTH).max(3);
    let n = layers * WIDTH;
    let target = VertexId(n);
    let names = vec![None; n + 1];
    let mut arcs: Vec<ArcSpec> = (0..n).map(|v| ArcSpec::new(target, &[(VertexId(v), 1)], 1.0)).collect();
    let per_layer = (target_size.saturating_sub(2 * n) / 3 / (layers - 1)).max(1);
    for layer in 1..layers {
        for _ in 0..per_layer {
            let head = VertexId(layer * WIDTH + rng.gen_range(0..WIDTH));
            let k = rng.gen_range(1..=3);
            let tails: Vec<(VertexId, u32)> = (0..k)
                .map(|_| {
                    let l = layer - rng.gen_range(1..=layer.min(2));
                    (VertexId(l * WIDTH + rng.gen_range(0..WIDTH)), 1)
                })
                .collect();
            arcs.push(ArcSpec::new(head, &tails, rng.gen_range(0.0..4.0)));
        }
    }
    let g = Hypergraph::build(names, arcs).expect("layered graph is valid");
    let sources = (0..WIDTH).map(|i| (VertexId(i), 0.0)).collect();
    (g, sources, target)
}

/// A grammar over nonterminals `N0..`, where `Ni` only rewrites to `Nj`
/// with `j > i`, so the derivation relation is acyclic. Mixes tree and
/// string right-hand sides.
pub fn acyclic_grammar(rng: &mut TestRng) -> Wrtg {
    let k = rng.gen_range(1..=6usize);
    let total = rng.gen_range(k..=12);
    let mut lhs: Vec<usize> = (0..k).collect();
    while lhs.len() < total {
        lhs.push(rng.gen_range(0..k));
    }
    lhs.sort_unstable();
    let terminals = ["a", "b", "c"];
    let productions = lhs
        .into_iter()
        .map(|i| {
            let arity = rng.gen_range(0..=3usize);
            let mut leaves: Vec<String> = (0..arity)
                .map(|_| {
                    if i + 1 < k && rng.gen_bool(0.6) {
                        format!("N{}", rng.gen_range(i + 1..k))
                    } else {
                        terminals.choose(rng).unwrap().to_string()
                    }
                })
                .collect();
            let rhs = if rng.gen_bool(0.5) {
                Rhs::String(std::mem::take(&mut leaves))
            } else {
                let label = ["f", "g", "h"].choose(rng).unwrap();
                Rhs::Tree(Tree::node(*label, leaves.into_iter().map(Tree::leaf).collect()))
            };
            let weight = 1.0 - rng.gen_range(0.0..1.0);
            Production::new(format!("N{i}"), rhs, weight)
        })
        .collect();
    Wrtg::new("N0", productions).expect("generated grammar is valid")
}
