//! Line-based text format for hypergraphs and queries.
//!
//! ```text
//! # comment
//! vertex ω
//! arc A <- ω @ 1
//! arc S <- A*2 @ 3
//! source ω 0
//! target S
//! ```
//!
//! Vertices are declared by a `vertex` line or on first use. Numbers are
//! written with 17 significant digits so that parse and write round-trip.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{runs, ArcSpec, GraphError, Hypergraph, Query, QueryError, VertexId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("query: {0}")]
    Query(#[from] QueryError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// A parsed hypergraph file: the graph plus the optional query lines.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub graph: Hypergraph,
    pub sources: Vec<(VertexId, f64)>,
    pub target: Option<VertexId>,
}

impl Document {
    pub fn new(graph: Hypergraph, query: Option<&Query>) -> Document {
        Document {
            graph,
            sources: query.map(|q| q.sources().to_vec()).unwrap_or_default(),
            target: query.map(Query::target),
        }
    }

    /// The file's `source`/`target` lines as a validated query.
    pub fn query(&self) -> Result<Query, ParseError> {
        let target = self.target.ok_or(syntax(0, "no `target` line"))?;
        Ok(Query::new(self.sources.clone(), target)?)
    }

    pub fn parse(text: &str) -> Result<Document, ParseError> {
        let mut names: Vec<Option<String>> = Vec::new();
        let mut index: HashMap<String, VertexId> = HashMap::new();
        let mut arcs = Vec::new();
        let mut sources = Vec::new();
        let mut target = None;

        let mut intern = |name: &str, line: usize| -> Result<VertexId, ParseError> {
            if let Some(&v) = index.get(name) {
                return Ok(v);
            }
            check_name(name, line)?;
            let v = VertexId(names.len());
            names.push(Some(name.to_string()));
            index.insert(name.to_string(), v);
            Ok(v)
        };

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(keyword) = tokens.next() else { continue };
            let rest: Vec<&str> = tokens.collect();
            match keyword {
                "vertex" => match rest.as_slice() {
                    [name] => {
                        intern(name, line)?;
                    }
                    _ => return Err(syntax(line, "expected `vertex <name>`")),
                },
                "arc" => {
                    let (head, rest) = rest
                        .split_first()
                        .ok_or_else(|| syntax(line, "expected `arc <head> <- <tails> @ <length>`"))?;
                    if rest.first() != Some(&"<-") {
                        return Err(syntax(line, "expected `<-` after arc head"));
                    }
                    let at = rest
                        .iter()
                        .position(|&t| t == "@")
                        .ok_or_else(|| syntax(line, "missing `@ <length>`"))?;
                    let tail_tokens = &rest[1..at];
                    let length = match &rest[at + 1..] {
                        [len] => parse_number(len, line)?,
                        _ => return Err(syntax(line, "expected exactly one length after `@`")),
                    };
                    if tail_tokens.is_empty() {
                        return Err(syntax(line, "arc has no tails"));
                    }
                    let head = intern(head, line)?;
                    let mut tails = Vec::with_capacity(tail_tokens.len());
                    for tok in tail_tokens {
                        let (name, mult) = match tok.rsplit_once('*') {
                            Some((name, m)) => {
                                let m: u32 = m
                                    .parse()
                                    .map_err(|_| syntax(line, format!("bad multiplicity in `{tok}`")))?;
                                (name, m)
                            }
                            None => (*tok, 1),
                        };
                        if mult == 0 {
                            return Err(syntax(line, format!("zero multiplicity in `{tok}`")));
                        }
                        tails.push((intern(name, line)?, mult));
                    }
                    if length < 0.0 {
                        return Err(syntax(line, format!("negative length {length}")));
                    }
                    arcs.push(ArcSpec { head, tails, length });
                }
                "source" => {
                    let (name, cost) = match rest.as_slice() {
                        [name] => (*name, 0.0),
                        [name, cost] => (*name, parse_number(cost, line)?),
                        _ => return Err(syntax(line, "expected `source <name> [<cost>]`")),
                    };
                    let v = intern(name, line)?;
                    if sources.iter().any(|&(s, _)| s == v) {
                        return Err(syntax(line, format!("source `{name}` listed twice")));
                    }
                    if cost < 0.0 {
                        return Err(syntax(line, format!("negative initial cost {cost}")));
                    }
                    sources.push((v, cost));
                }
                "target" => match rest.as_slice() {
                    [name] => {
                        if target.is_some() {
                            return Err(syntax(line, "more than one `target` line"));
                        }
                        target = Some(intern(name, line)?);
                    }
                    _ => return Err(syntax(line, "expected `target <name>`")),
                },
                other => return Err(syntax(line, format!("unknown directive `{other}`"))),
            }
        }

        let graph = Hypergraph::build(names, arcs)?;
        Ok(Document { graph, sources, target })
    }

    /// Canonical serialization: every vertex, then arcs in index order, then
    /// sources and target.
    pub fn write(&self) -> String {
        let g = &self.graph;
        let mut out = String::new();
        for v in g.vertices() {
            writeln!(out, "vertex {}", g.display_name(v)).unwrap();
        }
        for arc in g.arcs() {
            write!(out, "arc {} <-", g.display_name(arc.head)).unwrap();
            for (t, m) in runs(arc.tails) {
                if m == 1 {
                    write!(out, " {}", g.display_name(t)).unwrap();
                } else {
                    write!(out, " {}*{}", g.display_name(t), m).unwrap();
                }
            }
            writeln!(out, " @ {}", format_cost(arc.length)).unwrap();
        }
        for &(v, c) in &self.sources {
            writeln!(out, "source {} {}", g.display_name(v), format_cost(c)).unwrap();
        }
        if let Some(t) = self.target {
            writeln!(out, "target {}", g.display_name(t)).unwrap();
        }
        out
    }
}

fn check_name(name: &str, line: usize) -> Result<(), ParseError> {
    if name == "<-" || name == "@" || name.contains('*') || name.contains('@') {
        return Err(syntax(line, format!("invalid vertex name `{name}`")));
    }
    Ok(())
}

fn parse_number(token: &str, line: usize) -> Result<f64, ParseError> {
    let value = match token {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        _ => token
            .parse::<f64>()
            .map_err(|_| syntax(line, format!("bad number `{token}`")))?,
    };
    if !value.is_finite() {
        return Err(syntax(line, format!("number `{token}` is not finite")));
    }
    Ok(value)
}

/// Parses a cost that may be the literal `inf`.
pub fn parse_cost(token: &str) -> Option<f64> {
    match token {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        _ => token.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent notation outside `1e-4 ..= 1e17`. Infinities print as `inf`.
pub fn format_cost(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    const PRECISION: i32 = 17;
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };

    if !(-4..PRECISION).contains(&exp) {
        let (first, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        let dot = if rest.is_empty() { "" } else { "." };
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{first}{dot}{rest}e{esign}{:02}", exp.abs())
    } else if exp >= 0 {
        let split = (exp + 1) as usize;
        let (int, frac) = digits.split_at(split);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        let frac = digits.trim_end_matches('0');
        format!("{sign}0.{zeros}{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F1: &str = "\
# fixture
arc A <- ω @ 1
arc B <- ω @ 2
arc S <- A B @ 0.5
arc S <- A*2 @ 3
source ω
target S
";

    #[test]
    fn parses_f1() {
        let doc = Document::parse(F1).unwrap();
        assert_eq!(doc.graph.vertex_count(), 4);
        assert_eq!(doc.graph.arc_count(), 4);
        assert_eq!(doc.sources, vec![(VertexId(1), 0.0)]);
        assert_eq!(doc.graph.display_name(doc.target.unwrap()), "S");
        let q = doc.query().unwrap();
        assert_eq!(q.sources().len(), 1);
    }

    #[test]
    fn canonical_write() {
        let doc = Document::parse(F1).unwrap();
        let text = doc.write();
        assert_eq!(
            text,
            "vertex A\nvertex ω\nvertex B\nvertex S\n\
             arc A <- ω @ 1\narc B <- ω @ 2\narc S <- A B @ 0.5\narc S <- A*2 @ 3\n\
             source ω 0\ntarget S\n"
        );
        assert_eq!(Document::parse(&text).unwrap().write(), text);
    }

    #[test]
    fn reports_line_numbers() {
        let err = Document::parse("vertex a\narc a <- b @ x\n").unwrap_err();
        assert_eq!(err.to_string(), "line 2: bad number `x`");
        let err = Document::parse("arc a <- b @ -1\n").unwrap_err();
        assert!(err.to_string().contains("negative length"));
        let err = Document::parse("arc a b @ 1\n").unwrap_err();
        assert!(err.to_string().starts_with("line 1"));
        let err = Document::parse("arc a <- b*0 @ 1\n").unwrap_err();
        assert!(err.to_string().contains("zero multiplicity"));
        let err = Document::parse("\n\nbogus\n").unwrap_err();
        assert_eq!(err.to_string(), "line 3: unknown directive `bogus`");
        let err = Document::parse("arc a <- b @ nan\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn format_matches_printf_g17() {
        assert_eq!(format_cost(0.5), "0.5");
        assert_eq!(format_cost(3.0), "3");
        assert_eq!(format_cost(0.1), "0.10000000000000001");
        assert_eq!(format_cost(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_cost(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_cost(1e20), "1e+20");
        assert_eq!(format_cost(123456.75), "123456.75");
        assert_eq!(format_cost(-2.5), "-2.5");
        assert_eq!(format_cost(0.0001), "0.0001");
        assert_eq!(format_cost(f64::INFINITY), "inf");
        assert_eq!(format_cost(0.0), "0");
    }

    proptest! {
        #[test]
        fn format_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
            let s = format_cost(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }

        #[test]
        fn serialization_is_stable(
            arcs in prop::collection::vec(
                (0usize..5, prop::collection::vec((0usize..5, 1u32..4), 1..4), 0.0f64..10.0),
                0..8,
            ),
            sources in prop::collection::btree_map(0usize..5, 0.0f64..3.0, 0..3),
        ) {
            let mut text = String::new();
            for (h, tails, len) in &arcs {
                let tails: Vec<String> = tails.iter().map(|(t, m)| format!("n{t}*{m}")).collect();
                text.push_str(&format!("arc n{h} <- {} @ {}\n", tails.join(" "), format_cost(*len)));
            }
            for (s, c) in &sources {
                text.push_str(&format!("source n{s} {}\n", format_cost(*c)));
            }
            let once = Document::parse(&text).unwrap().write();
            let doc = Document::parse(&once).unwrap();
            doc.graph.validate().unwrap();
            prop_assert_eq!(doc.write(), once);
        }
    }
}
