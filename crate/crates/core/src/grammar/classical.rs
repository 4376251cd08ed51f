//! Reader for classical productions over a one-object base.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::closure::CfgBuilder;
use super::Cfg;
use crate::error::{Error, Result};
use crate::graph::{Graph, PathArrow};
use crate::spliced::{GapType, SplicedArrow};

/// Parses lines `R -> a R1 b c R2 | ε`. Symbols appearing on a left-hand
/// side are nonterminals, every other token is a letter of the bouquet.
/// The first left-hand side is the start symbol; productions are named
/// `r1`, `r2`, … in reading order. Blank lines and `#` comments are skipped.
pub fn parse_classical(text: &str) -> Result<Cfg> {
    let mut rules: Vec<(String, Vec<String>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("line {}: expected `->`", lineno + 1)))?;
        let lhs = lhs.trim();
        if lhs.is_empty() || lhs.contains(char::is_whitespace) {
            return Err(Error::Parse(format!("line {}: bad left-hand side", lineno + 1)));
        }
        for alt in rhs.split('|') {
            let toks: Vec<String> = alt
                .split_whitespace()
                .filter(|t| *t != "ε")
                .map(str::to_string)
                .collect();
            rules.push((lhs.to_string(), toks));
        }
    }
    let start = rules
        .first()
        .map(|r| r.0.clone())
        .ok_or_else(|| Error::Parse("no productions".into()))?;
    let nonterminals: BTreeSet<String> = rules.iter().map(|r| r.0.clone()).collect();
    let letters: BTreeSet<&String> = rules
        .iter()
        .flat_map(|r| &r.1)
        .filter(|t| !nonterminals.contains(*t))
        .collect();
    let letters: Vec<&String> = letters.into_iter().collect();
    let base = Arc::new(Graph::bouquet(&letters)?);
    let star = base.node("*").expect("bouquet node");
    let gap = GapType::new(star, star);

    let mut b = CfgBuilder::default();
    for nt in &nonterminals {
        b.color(nt.clone(), gap);
    }
    let width = rules.len().to_string().len();
    for (k, (lhs, toks)) in rules.iter().enumerate() {
        let mut segments = vec![Vec::new()];
        let mut inputs = Vec::new();
        for t in toks {
            if nonterminals.contains(t) {
                inputs.push(t.clone());
                segments.push(Vec::new());
            } else {
                segments.last_mut().expect("nonempty").push(base.require_edge(t)?);
            }
        }
        let segments = segments
            .into_iter()
            .map(|edges| base.path(star, edges))
            .collect::<Result<Vec<PathArrow>>>()?;
        b.op(
            format!("r{:0width$}", k + 1),
            inputs,
            lhs.clone(),
            SplicedArrow::new(segments)?,
        );
    }
    b.finish(base, &start)
}
