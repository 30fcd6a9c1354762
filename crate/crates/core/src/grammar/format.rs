//! Grammar file format.
//!
//! ```text
//! # weight: lhs -> rhs
//! start S
//! 0.5: S -> σ(A, a, B)     # tree rhs
//! 0.25: A -> a A b         # CFG string rhs
//! 1: B ->                  # empty string
//! ```
//!
//! Nonterminals are the symbols that appear on some left-hand side. The
//! start symbol defaults to the first left-hand side.

use std::fmt::Write as _;

use super::{GrammarError, Production, Rhs, Tree, Wrtg};
use crate::text::format_cost;

fn err(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_grammar(text: &str) -> Result<Wrtg, GrammarError> {
    let mut start = None;
    let mut productions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("start") {
            if rest.starts_with(char::is_whitespace) {
                let name = rest.trim();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(err(line, "expected `start <nonterminal>`"));
                }
                if start.replace(name.to_string()).is_some() {
                    return Err(err(line, "more than one `start` line"));
                }
                continue;
            }
        }
        let (weight, rest) = content
            .split_once(':')
            .ok_or_else(|| err(line, "expected `<weight>: <lhs> -> <rhs>`"))?;
        let weight: f64 = weight
            .trim()
            .parse()
            .map_err(|_| err(line, format!("bad weight `{}`", weight.trim())))?;
        let (lhs, rhs) = rest.split_once("->").ok_or_else(|| err(line, "missing `->`"))?;
        let lhs = lhs.trim();
        if lhs.is_empty() || !is_identifier(lhs) {
            return Err(err(line, format!("bad left-hand side `{lhs}`")));
        }
        let rhs = parse_rhs(rhs, line)?;
        productions.push(Production::new(lhs, rhs, weight));
    }
    let start = match start {
        Some(s) => s,
        None => productions
            .first()
            .map(|p: &Production| p.lhs.clone())
            .ok_or(GrammarError::NoProductions)?,
    };
    Wrtg::new(start, productions)
}

/// Writes the grammar in the format accepted by [`parse_grammar`].
pub fn write_grammar(g: &Wrtg) -> String {
    let mut out = String::new();
    writeln!(out, "start {}", g.start()).unwrap();
    for p in g.productions() {
        let rhs = p.rhs.to_string();
        if rhs.is_empty() {
            writeln!(out, "{}: {} ->", format_cost(p.weight), p.lhs).unwrap();
        } else {
            writeln!(out, "{}: {} -> {}", format_cost(p.weight), p.lhs, rhs).unwrap();
        }
    }
    out
}

impl Wrtg {
    pub fn parse(text: &str) -> Result<Wrtg, GrammarError> {
        parse_grammar(text)
    }

    pub fn write(&self) -> String {
        write_grammar(self)
    }
}

fn is_identifier(s: &str) -> bool {
    !s.chars().any(|c| c.is_whitespace() || "(),:".contains(c))
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Ident(&'a str),
    Open,
    Close,
    Comma,
}

fn tokenize(s: &str, line: usize) -> Result<Vec<Token<'_>>, GrammarError> {
    let mut tokens = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                tokens.push(Token::Open);
                chars.next();
            }
            ')' => {
                tokens.push(Token::Close);
                chars.next();
            }
            ',' => {
                tokens.push(Token::Comma);
                chars.next();
            }
            ':' => return Err(err(line, "unexpected `:` in right-hand side")),
            _ => {
                let mut end = s.len();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_whitespace() || "(),:".contains(d) {
                        end = j;
                        break;
                    }
                    chars.next();
                }
                tokens.push(Token::Ident(&s[i..end]));
            }
        }
    }
    Ok(tokens)
}

struct TermParser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    line: usize,
}

impl TermParser<'_> {
    /// `IDENT [ '(' [term (',' term)*] ')' ]`; the flag reports parentheses.
    fn term(&mut self) -> Result<(Tree, bool), GrammarError> {
        let label = match self.tokens.get(self.pos) {
            Some(Token::Ident(s)) => *s,
            other => return Err(err(self.line, format!("expected a symbol, found {other:?}"))),
        };
        self.pos += 1;
        if self.tokens.get(self.pos) != Some(&Token::Open) {
            return Ok((Tree::leaf(label), false));
        }
        self.pos += 1;
        let mut children = Vec::new();
        if self.tokens.get(self.pos) == Some(&Token::Close) {
            self.pos += 1;
            return Ok((Tree::node(label, children), true));
        }
        loop {
            children.push(self.term()?.0);
            match self.tokens.get(self.pos) {
                Some(Token::Comma) => self.pos += 1,
                Some(Token::Close) => {
                    self.pos += 1;
                    return Ok((Tree::node(label, children), true));
                }
                _ => return Err(err(self.line, format!("unclosed `(` after `{label}`"))),
            }
        }
    }
}

fn parse_rhs(s: &str, line: usize) -> Result<Rhs, GrammarError> {
    let mut p = TermParser {
        tokens: tokenize(s, line)?,
        pos: 0,
        line,
    };
    let mut terms = Vec::new();
    while p.pos < p.tokens.len() {
        terms.push(p.term()?);
    }
    match terms.as_slice() {
        [(tree, true)] => Ok(Rhs::Tree(tree.clone())),
        _ if terms.iter().any(|(_, parens)| *parens) => Err(err(
            line,
            "a tree right-hand side must be a single term; strings take bare symbols",
        )),
        _ => Ok(Rhs::String(terms.into_iter().map(|(t, _)| t.label).collect())),
    }
}
