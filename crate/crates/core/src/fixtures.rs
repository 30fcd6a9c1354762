//! Small named hypergraphs used throughout the tests and documentation.

use crate::graph::{Hypergraph, HypergraphBuilder, Query};

fn query(g: &Hypergraph, source: &str, target: &str) -> Query {
    let s = g.vertex_by_name(source).expect("source vertex");
    let t = g.vertex_by_name(target).expect("target vertex");
    Query::new(vec![(s, 0.0)], t).expect("valid query")
}

/// `A <- ω @1`, `B <- ω @2`, `S <- A B @0.5`, `S <- A*2 @3`; query ω ⇝ S.
pub fn f1() -> (Hypergraph, Query) {
    let mut b = HypergraphBuilder::new();
    for name in ["ω", "A", "B", "S"] {
        b.vertex(name);
    }
    b.arc("A", &[("ω", 1)], 1.0);
    b.arc("B", &[("ω", 1)], 2.0);
    b.arc("S", &[("A", 1), ("B", 1)], 0.5);
    b.arc("S", &[("A", 2)], 3.0);
    let g = b.build().expect("valid fixture");
    let q = query(&g, "ω", "S");
    (g, q)
}

/// `S <- ω @1` and the self-loop `S <- S @1`; query ω ⇝ S.
pub fn f2() -> (Hypergraph, Query) {
    let mut b = HypergraphBuilder::new();
    b.vertex("ω");
    b.arc("S", &[("ω", 1)], 1.0);
    b.arc("S", &[("S", 1)], 1.0);
    let g = b.build().expect("valid fixture");
    let q = query(&g, "ω", "S");
    (g, q)
}

/// `S <- U ω @1` where nothing derives `U`; query ω ⇝ S.
pub fn f3() -> (Hypergraph, Query) {
    let mut b = HypergraphBuilder::new();
    for name in ["ω", "U", "S"] {
        b.vertex(name);
    }
    b.arc("S", &[("U", 1), ("ω", 1)], 1.0);
    let g = b.build().expect("valid fixture");
    let q = query(&g, "ω", "S");
    (g, q)
}
