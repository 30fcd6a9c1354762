//! Weighted regular tree grammars and context-free grammars.
//!
//! A production rewrites a nonterminal to either a tree over the alphabet
//! with nonterminal leaves (`σ(A, a, B)`) or, in CFG mode, a flat string of
//! symbols (`A a B`). Either way only the left-to-right sequence of
//! nonterminal leaves matters for derivations, so both share one
//! representation after [`Wrtg::nonterminal_yield`].

mod convert;
mod format;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use convert::{best_derivation, from_pruned, to_hypergraph, DerivationTree, GrammarHypergraph, GrammarHypergraphMap, PrunedGrammar};
pub use format::{parse_grammar, write_grammar};

/// 1-based production index in file order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductionId(usize);

impl ProductionId {
    pub fn new(one_based: usize) -> ProductionId {
        assert!(one_based != 0, "production indices start at 1");
        ProductionId(one_based)
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn slot(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for ProductionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

/// A ranked tree; leaves are symbols of rank 0 (terminals or nonterminals).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    pub label: String,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: impl Into<String>) -> Tree {
        Tree {
            label: label.into(),
            children: Vec::new(),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<Tree>) -> Tree {
        Tree {
            label: label.into(),
            children,
        }
    }

    /// Leaf labels from left to right.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if t.children.is_empty() {
                out.push(t.label.as_str());
            } else {
                stack.extend(t.children.iter().rev());
            }
        }
        out
    }

    fn labels<'a>(&'a self, out: &mut Vec<&'a Tree>) {
        out.push(self);
        for c in &self.children {
            c.labels(out);
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
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

/// Right-hand side of a production.
#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    /// A tree; printed with parentheses at the root, even at rank 0.
    Tree(Tree),
    /// A CFG string of symbols, possibly empty.
    String(Vec<String>),
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Tree(t) if t.children.is_empty() => write!(f, "{}()", t.label),
            Rhs::Tree(t) => write!(f, "{t}"),
            Rhs::String(items) => f.write_str(&items.join(" ")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Production {
    pub lhs: String,
    pub rhs: Rhs,
    pub weight: f64,
}

impl Production {
    pub fn new(lhs: impl Into<String>, rhs: Rhs, weight: f64) -> Production {
        Production {
            lhs: lhs.into(),
            rhs,
            weight,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("grammar has no productions")]
    NoProductions,
    #[error("start symbol `{0}` has no productions")]
    UnknownStart(String),
    #[error("production {production}: weight {weight} must be a positive finite number")]
    BadWeight { production: usize, weight: f64 },
    #[error("production {production}: weight {weight} exceeds 1 and would give a negative arc length")]
    SuperunitWeight { production: usize, weight: f64 },
    #[error("production {production}: nonterminal `{symbol}` used as an interior tree label")]
    NonterminalLabel { production: usize, symbol: String },
    #[error("language emptied: no derivation of `{0}` survives")]
    LanguageEmpty(String),
    #[error("tree does not correspond to a derivation: {0}")]
    NotADerivation(String),
}

/// A weighted regular tree grammar `(Σ, N, S, P)`. `N` is the set of
/// left-hand sides; every other symbol is in `Σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Wrtg {
    start: String,
    productions: Vec<Production>,
    nonterminals: Vec<String>,
    nonterminal_index: HashMap<String, usize>,
}

impl Wrtg {
    pub fn new(start: impl Into<String>, productions: Vec<Production>) -> Result<Wrtg, GrammarError> {
        let start = start.into();
        if productions.is_empty() {
            return Err(GrammarError::NoProductions);
        }
        let mut nonterminals = Vec::new();
        let mut nonterminal_index = HashMap::new();
        for p in &productions {
            if !nonterminal_index.contains_key(&p.lhs) {
                nonterminal_index.insert(p.lhs.clone(), nonterminals.len());
                nonterminals.push(p.lhs.clone());
            }
        }
        if !nonterminal_index.contains_key(&start) {
            return Err(GrammarError::UnknownStart(start));
        }
        for (i, p) in productions.iter().enumerate() {
            if !(p.weight > 0.0 && p.weight.is_finite()) {
                return Err(GrammarError::BadWeight {
                    production: i + 1,
                    weight: p.weight,
                });
            }
            if let Rhs::Tree(t) = &p.rhs {
                let mut nodes = Vec::new();
                t.labels(&mut nodes);
                let interior = nodes
                    .iter()
                    .find(|n| !n.children.is_empty() && nonterminal_index.contains_key(&n.label));
                if let Some(n) = interior {
                    return Err(GrammarError::NonterminalLabel {
                        production: i + 1,
                        symbol: n.label.clone(),
                    });
                }
            }
        }
        Ok(Wrtg {
            start,
            productions,
            nonterminals,
            nonterminal_index,
        })
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn production(&self, id: ProductionId) -> &Production {
        &self.productions[id.slot()]
    }

    pub fn production_ids(&self) -> impl ExactSizeIterator<Item = ProductionId> {
        (0..self.productions.len()).map(|i| ProductionId(i + 1))
    }

    /// Nonterminals in order of first appearance as a left-hand side.
    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }

    pub fn is_nonterminal(&self, symbol: &str) -> bool {
        self.nonterminal_index.contains_key(symbol)
    }

    /// Every non-nonterminal symbol occurring on a right-hand side.
    pub fn alphabet(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for p in &self.productions {
            match &p.rhs {
                Rhs::Tree(t) => {
                    let mut nodes = Vec::new();
                    t.labels(&mut nodes);
                    out.extend(nodes.iter().map(|n| n.label.clone()));
                }
                Rhs::String(items) => out.extend(items.iter().cloned()),
            }
        }
        out.retain(|s| !self.is_nonterminal(s));
        out
    }

    /// The nonterminal leaves of `rhs`, left to right.
    pub fn nonterminal_yield<'a>(&self, rhs: &'a Rhs) -> Vec<&'a str> {
        match rhs {
            Rhs::Tree(t) => t.leaves().into_iter().filter(|s| self.is_nonterminal(s)).collect(),
            Rhs::String(items) => items
                .iter()
                .map(String::as_str)
                .filter(|s| self.is_nonterminal(s))
                .collect(),
        }
    }

    /// The derivation tree grammar: same nonterminals, start and weights,
    /// with each production `l -> r` replaced by `l -> p_i(yield_N(r))`.
    pub fn derivation_grammar(&self) -> Wrtg {
        let mut prefix = String::from("p");
        while self
            .production_ids()
            .any(|id| self.is_nonterminal(&format!("{prefix}{}", id.get())))
        {
            prefix.insert(0, '_');
        }
        let productions = self
            .production_ids()
            .map(|id| {
                let p = self.production(id);
                let children = self.nonterminal_yield(&p.rhs).into_iter().map(Tree::leaf).collect();
                Production::new(
                    p.lhs.clone(),
                    Rhs::Tree(Tree::node(format!("{prefix}{}", id.get()), children)),
                    p.weight,
                )
            })
            .collect();
        Wrtg::new(self.start.clone(), productions).expect("derivation grammar of a valid grammar is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Wrtg {
        Wrtg::new(
            "S",
            vec![
                Production::new(
                    "S",
                    Rhs::Tree(Tree::node("σ", vec![Tree::leaf("A"), Tree::leaf("a"), Tree::leaf("B")])),
                    0.5,
                ),
                Production::new("A", Rhs::String(vec!["a".into()]), 1.0),
                Production::new("A", Rhs::Tree(Tree::node("σ", vec![Tree::leaf("A")])), 0.25),
                Production::new("B", Rhs::String(vec!["b".into()]), 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn sets_and_yields() {
        let g = sample();
        assert_eq!(g.nonterminals(), ["S", "A", "B"]);
        assert_eq!(g.alphabet().into_iter().collect::<Vec<_>>(), ["a", "b", "σ"]);
        assert_eq!(g.nonterminal_yield(&g.productions()[0].rhs), ["A", "B"]);
        assert!(g.nonterminal_yield(&g.productions()[1].rhs).is_empty());
    }

    #[test]
    fn derivation_grammar_relabels() {
        let dg = sample().derivation_grammar();
        let rhs: Vec<String> = dg.productions().iter().map(|p| p.rhs.to_string()).collect();
        assert_eq!(rhs, ["p1(A, B)", "p2()", "p3(A)", "p4()"]);
        assert_eq!(dg.productions()[0].weight, 0.5);
        assert_eq!(dg.start(), "S");
        assert_eq!(dg.nonterminals(), ["S", "A", "B"]);
    }

    #[test]
    fn derivation_labels_avoid_nonterminals() {
        let g = Wrtg::new("p1", vec![Production::new("p1", Rhs::String(vec![]), 1.0)]).unwrap();
        assert_eq!(g.derivation_grammar().productions()[0].rhs.to_string(), "_p1()");
    }

    #[test]
    fn validation_errors() {
        let p = |w| Production::new("S", Rhs::String(vec![]), w);
        assert_eq!(Wrtg::new("S", vec![]), Err(GrammarError::NoProductions));
        assert_eq!(Wrtg::new("T", vec![p(0.5)]), Err(GrammarError::UnknownStart("T".into())));
        assert!(matches!(Wrtg::new("S", vec![p(0.0)]), Err(GrammarError::BadWeight { production: 1, .. })));
        assert!(matches!(Wrtg::new("S", vec![p(f64::NAN)]), Err(GrammarError::BadWeight { .. })));
        let bad = Production::new("S", Rhs::Tree(Tree::node("S", vec![Tree::leaf("a")])), 1.0);
        assert!(matches!(Wrtg::new("S", vec![bad]), Err(GrammarError::NonterminalLabel { .. })));
    }

    fn collect_leaves<'a>(t: &'a Tree, out: &mut Vec<&'a str>) {
        if t.children.is_empty() {
            out.push(&t.label);
        }
        for c in &t.children {
            collect_leaves(c, out);
        }
    }

    fn arb_tree() -> impl Strategy<Value = Tree> {
        let leaf = prop::sample::select(vec!["A", "B", "a", "b"]).prop_map(Tree::leaf);
        leaf.prop_recursive(5, 64, 3, |inner| {
            (prop::sample::select(vec!["f", "g"]), prop::collection::vec(inner, 1..4))
                .prop_map(|(l, c)| Tree::node(l, c))
        })
    }

    proptest! {
        #[test]
        fn leaf_scan_matches_recursive_collection(t in arb_tree()) {
            let mut expected = Vec::new();
            collect_leaves(&t, &mut expected);
            prop_assert_eq!(t.leaves(), expected);
        }
    }
}
