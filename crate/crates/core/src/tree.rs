//! Hyperpath-trees: proofs of `X ⇝ v` labeled by hyperarcs.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{ArcId, Hypergraph, VertexId};

/// An ordered tree labeled by hyperarcs. An `Arc` node has exactly one child
/// per tail occurrence, in tail order, and each child is rooted at that tail
/// vertex. `Source` leaves are source vertices used with their initial cost.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HyperpathTree {
    Source(VertexId),
    Arc { arc: ArcId, children: Vec<HyperpathTree> },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("arc {arc} has {expected} tails but the node has {found} children")]
    Arity { arc: usize, expected: usize, found: usize },
    #[error("child {position} of arc {arc} is rooted at vertex {found}, expected tail {expected}")]
    TailMismatch {
        arc: usize,
        position: usize,
        expected: usize,
        found: usize,
    },
    #[error("leaf vertex {0} is not a source")]
    NotASource(usize),
}

impl HyperpathTree {
    pub fn leaf(v: VertexId) -> Self {
        HyperpathTree::Source(v)
    }

    pub fn node(arc: ArcId, children: Vec<HyperpathTree>) -> Self {
        HyperpathTree::Arc { arc, children }
    }

    /// The vertex this tree proves.
    pub fn root_vertex(&self, g: &Hypergraph) -> VertexId {
        match self {
            HyperpathTree::Source(v) => *v,
            HyperpathTree::Arc { arc, .. } => g.head(*arc),
        }
    }

    /// Bottom-up additive cost: a leaf costs its initial cost and a node
    /// costs its arc length plus the costs of its children. Leaves that are
    /// not sources cost +∞.
    pub fn cost(&self, g: &Hypergraph, sources: &[(VertexId, f64)]) -> f64 {
        match self {
            HyperpathTree::Source(v) => sources
                .iter()
                .find(|s| s.0 == *v)
                .map_or(f64::INFINITY, |s| s.1),
            HyperpathTree::Arc { arc, children } => {
                g.length(*arc) + children.iter().map(|c| c.cost(g, sources)).sum::<f64>()
            }
        }
    }

    /// Checks the structural invariants against `g` and the source set.
    pub fn check(&self, g: &Hypergraph, sources: &[(VertexId, f64)]) -> Result<(), TreeError> {
        match self {
            HyperpathTree::Source(v) => {
                if sources.iter().any(|s| s.0 == *v) {
                    Ok(())
                } else {
                    Err(TreeError::NotASource(v.0))
                }
            }
            HyperpathTree::Arc { arc, children } => {
                let tails = g.arc(*arc).tails;
                if tails.len() != children.len() {
                    return Err(TreeError::Arity {
                        arc: arc.get(),
                        expected: tails.len(),
                        found: children.len(),
                    });
                }
                for (position, (child, &tail)) in children.iter().zip(tails).enumerate() {
                    let found = child.root_vertex(g);
                    if found != tail {
                        return Err(TreeError::TailMismatch {
                            arc: arc.get(),
                            position,
                            expected: tail.0,
                            found: found.0,
                        });
                    }
                    child.check(g, sources)?;
                }
                Ok(())
            }
        }
    }

    /// Arc labels in preorder, with repetitions.
    pub fn arcs(&self) -> Vec<ArcId> {
        let mut out = Vec::new();
        self.visit(&mut |t| {
            if let HyperpathTree::Arc { arc, .. } = t {
                out.push(*arc);
            }
        });
        out
    }

    /// Root vertex of every subtree in preorder, with repetitions.
    pub fn vertices(&self, g: &Hypergraph) -> Vec<VertexId> {
        let mut out = Vec::new();
        self.visit(&mut |t| out.push(t.root_vertex(g)));
        out
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Preorder traversal over all subtrees.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a HyperpathTree)) {
        f(self);
        if let HyperpathTree::Arc { children, .. } = self {
            for c in children {
                c.visit(f);
            }
        }
    }

    /// S-expression of arc indices: `(3 (1 ω) (2 ω))`. Source leaves print
    /// as their vertex name.
    pub fn to_sexpr(&self, g: &Hypergraph) -> String {
        let mut out = String::new();
        self.write_sexpr(g, &mut out);
        out
    }

    fn write_sexpr(&self, g: &Hypergraph, out: &mut String) {
        match self {
            HyperpathTree::Source(v) => out.push_str(&g.display_name(*v)),
            HyperpathTree::Arc { arc, children } => {
                write!(out, "({}", arc.get()).unwrap();
                for c in children {
                    out.push(' ');
                    c.write_sexpr(g, out);
                }
                out.push(')');
            }
        }
    }
}
