//! Utility tables printed by `prune`.

use std::fmt::Write as _;

use hyperpath::inside::InsideResult;
use hyperpath::{format_cost, OutsideResult, Pruning, Subgraph};
use serde::Serialize;

#[derive(Serialize)]
struct VertexRow {
    name: String,
    inside: Option<f64>,
    outside: Option<f64>,
    gamma: Option<f64>,
    keep: bool,
}

#[derive(Serialize)]
struct ArcRow {
    /// Index in the input file.
    index: usize,
    head: String,
    tails: Vec<String>,
    length: f64,
    gamma: Option<f64>,
    keep: bool,
}

/// Rows for the vertices and arcs that survive reduction. JSON has no
/// infinity, so infinite costs serialize as `null`.
#[derive(Serialize)]
pub struct Tables {
    vertices: Vec<VertexRow>,
    arcs: Vec<ArcRow>,
    best: f64,
    #[serde(skip)]
    beam: f64,
    #[serde(skip)]
    threshold: f64,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn cost(x: Option<f64>) -> String {
    x.map_or_else(|| "inf".to_string(), format_cost)
}

impl Tables {
    /// `reduced` is the reduction of the input graph the passes ran on.
    pub fn new(reduced: &Subgraph, inside: &InsideResult, outside: &OutsideResult, p: &Pruning) -> Tables {
        let g = &reduced.graph;
        let vertices = g
            .vertices()
            .map(|v| VertexRow {
                name: g.display_name(v),
                inside: finite(inside.cost(v)),
                outside: finite(outside.cost(v)),
                gamma: finite(p.utilities.of_vertex(v)),
                keep: p.keep_vertex[v.index()],
            })
            .collect();
        let arcs = g
            .arcs()
            .map(|a| ArcRow {
                index: reduced.origin_arc(a.id).get(),
                head: g.display_name(a.head),
                tails: a.tails.iter().map(|&t| g.display_name(t)).collect(),
                length: a.length,
                gamma: finite(p.utilities.of_arc(a.id)),
                keep: p.keep_arc[a.id.slot()],
            })
            .collect();
        Tables {
            vertices,
            arcs,
            best: inside.cost(outside.target),
            beam: p.beam,
            threshold: p.threshold,
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "best {}", format_cost(self.best)).unwrap();
        writeln!(out, "beam {}", format_cost(self.beam)).unwrap();
        writeln!(out, "threshold {}", format_cost(self.threshold)).unwrap();
        writeln!(out, "# vertex name inside outside gamma keep").unwrap();
        for v in &self.vertices {
            writeln!(
                out,
                "vertex {} {} {} {} {}",
                v.name,
                cost(v.inside),
                cost(v.outside),
                cost(v.gamma),
                if v.keep { "keep" } else { "drop" }
            )
            .unwrap();
        }
        writeln!(out, "# arc index head <- tails gamma keep").unwrap();
        for a in &self.arcs {
            writeln!(
                out,
                "arc {} {} <- {} {} {}",
                a.index,
                a.head,
                a.tails.join(" "),
                cost(a.gamma),
                if a.keep { "keep" } else { "drop" }
            )
            .unwrap();
        }
        out
    }

    pub fn json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
