//! Context-free grammars over free categories.
//!
//! A grammar assigns to every color of a species a gap type and to every
//! node a spliced arrow of matching type, so that derivation trees are sent
//! to spliced arrows by splicing. Closed derivations of the start color
//! yield the arrows of the language.

mod chart;
mod classical;
mod closure;

pub use chart::{AmbiguityCount, Chart, Item, ParseResult};
pub use classical::parse_classical;
pub(crate) use closure::CfgBuilder;
pub use closure::{bilinearize, image, splice_concat, union, Translation};

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{EdgeIx, Graph, PathArrow, PathFunctor};
use crate::species::{ColorIx, OpIx, OpTree, Species};
use crate::spliced::{render_segment, GapType, SplicedArrow};

/// Letter or color of a sentential form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sym {
    Letter(EdgeIx),
    Color(ColorIx),
}

/// A context-free grammar over the free category on `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    pub base: Arc<Graph>,
    pub species: Arc<Species>,
    pub start: ColorIx,
    /// Gap type refined by each color, indexed by color.
    pub color_assign: Vec<GapType>,
    /// Spliced arrow of each node, indexed by node.
    pub rule_assign: Vec<SplicedArrow>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// The offending species node or color, if the problem is local to one.
    pub subject: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, subject: Option<&str>, message: String) {
        self.violations.push(Violation {
            subject: subject.map(str::to_string),
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            match &v.subject {
                Some(s) => writeln!(f, "{s}: {}", v.message)?,
                None => writeln!(f, "{}", v.message)?,
            }
        }
        Ok(())
    }
}

/// Nullable and useful colors of a grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub nullable: BTreeSet<ColorIx>,
    pub productive: BTreeSet<ColorIx>,
    pub useful: BTreeSet<ColorIx>,
}

impl Cfg {
    pub fn new(
        base: Arc<Graph>,
        species: Arc<Species>,
        start: ColorIx,
        color_assign: Vec<GapType>,
        rule_assign: Vec<SplicedArrow>,
    ) -> Result<Cfg> {
        let g = Cfg {
            base,
            species,
            start,
            color_assign,
            rule_assign,
        };
        let report = g.validate();
        if report.is_valid() {
            Ok(g)
        } else {
            Err(Error::InvalidGrammar(report.to_string()))
        }
    }

    /// Builds a grammar from names: colors map to `(left, right)` base
    /// nodes and nodes map to lists of segments (lists of edge names).
    /// Empty segments become identities at the node their typing requires.
    pub fn from_names(
        base: Arc<Graph>,
        species: Arc<Species>,
        start: &str,
        color_map: &HashMap<String, (String, String)>,
        rule_map: &HashMap<String, Vec<Vec<String>>>,
    ) -> Result<Cfg> {
        let start = species.require_color(start)?;
        let color_assign = species
            .colors()
            .map(|c| {
                let name = species.color_name(c);
                let (l, r) = color_map
                    .get(name)
                    .ok_or_else(|| Error::UnknownColor(format!("no gap type for color `{name}`")))?;
                Ok(GapType::new(base.require_node(l)?, base.require_node(r)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rule_assign = Vec::with_capacity(species.op_count());
        for x in species.ops() {
            let d = species.op(x);
            let segs = rule_map
                .get(&d.id)
                .ok_or_else(|| Error::UnknownOp(format!("no rule for node `{}`", d.id)))?;
            if segs.len() != d.arity() + 1 {
                return Err(Error::InvalidGrammar(format!(
                    "{}: rule has {} gaps but the node has arity {}\n",
                    d.id,
                    segs.len().saturating_sub(1),
                    d.arity()
                )));
            }
            let mut paths = Vec::with_capacity(segs.len());
            for (k, seg) in segs.iter().enumerate() {
                let src = if k == 0 {
                    color_assign[d.output.index()].left
                } else {
                    color_assign[d.inputs[k - 1].index()].right
                };
                let edges = seg.iter().map(|e| base.require_edge(e)).collect::<Result<Vec<_>>>()?;
                let src = match edges.first() {
                    Some(&e) => base.src(e),
                    None => src,
                };
                paths.push(base.path(src, edges)?);
            }
            rule_assign.push(SplicedArrow::new(paths)?);
        }
        Cfg::new(base, species, start, color_assign, rule_assign)
    }

    /// Lists every violated typing constraint.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let s = &self.species;
        if self.start.index() >= s.color_count() {
            report.push(None, "start color is not a color of the species".into());
        }
        if self.color_assign.len() != s.color_count() {
            report.push(
                None,
                format!("{} gap types for {} colors", self.color_assign.len(), s.color_count()),
            );
            return report;
        }
        for c in s.colors() {
            let gap = self.color_assign[c.index()];
            if !self.base.contains_node(gap.left) || !self.base.contains_node(gap.right) {
                report.push(Some(s.color_name(c)), "gap type outside the base graph".into());
            }
        }
        if self.rule_assign.len() != s.op_count() {
            report.push(
                None,
                format!("{} rules for {} nodes", self.rule_assign.len(), s.op_count()),
            );
            return report;
        }
        for x in s.ops() {
            let d = s.op(x);
            let rule = &self.rule_assign[x.index()];
            let name = Some(d.id.as_str());
            if let Some(err) = rule.segments().iter().find_map(|p| self.base.check_path(p).err()) {
                report.push(name, format!("segment is not a path of the base: {err}"));
                continue;
            }
            if rule.arity() != d.arity() {
                report.push(
                    name,
                    format!("rule has arity {} but the node has arity {}", rule.arity(), d.arity()),
                );
                continue;
            }
            if rule.outer() != self.color_assign[d.output.index()] {
                report.push(
                    name,
                    format!(
                        "rule has outer type ({}) but color `{}` refines ({})",
                        rule.outer().render(&self.base),
                        s.color_name(d.output),
                        self.color_assign[d.output.index()].render(&self.base)
                    ),
                );
            }
            for (k, (&c, gap)) in d.inputs.iter().zip(rule.gap_types()).enumerate() {
                if *gap != self.color_assign[c.index()] {
                    report.push(
                        name,
                        format!(
                            "gap {k} has type ({}) but input color `{}` refines ({})",
                            gap.render(&self.base),
                            s.color_name(c),
                            self.color_assign[c.index()].render(&self.base)
                        ),
                    );
                }
            }
        }
        report
    }

    pub fn start_gap(&self) -> GapType {
        self.color_assign[self.start.index()]
    }

    pub fn gap(&self, c: ColorIx) -> GapType {
        self.color_assign[c.index()]
    }

    pub fn rule(&self, x: OpIx) -> &SplicedArrow {
        &self.rule_assign[x.index()]
    }

    /// The spliced arrow a derivation tree is sent to.
    pub fn yield_of(&self, t: &OpTree) -> Result<SplicedArrow> {
        t.check(&self.species)?;
        Ok(self.yield_unchecked(t))
    }

    fn yield_unchecked(&self, t: &OpTree) -> SplicedArrow {
        match t {
            OpTree::Leaf(c) => SplicedArrow::identity(self.gap(*c)),
            OpTree::Node(x, ch) => {
                let parts: Vec<SplicedArrow> = ch.iter().map(|c| self.yield_unchecked(c)).collect();
                self.rule(*x)
                    .splice_full(&parts)
                    .expect("well-typed grammar splices well-typed trees")
            }
        }
    }

    /// The arrow yielded by a closed derivation.
    pub fn yield_path(&self, t: &OpTree) -> Result<PathArrow> {
        if !t.is_closed() {
            return Err(Error::OpenTree);
        }
        let f = self.yield_of(t)?;
        Ok(f.as_constant().expect("closed trees yield constants").clone())
    }

    /// Productions in classical notation, e.g. `S -> NP sp VP`; identity
    /// segments are omitted and an empty right-hand side prints as `ε`.
    pub fn productions(&self) -> Vec<String> {
        self.species.ops().map(|x| self.render_production(x)).collect()
    }

    pub fn render_production(&self, x: OpIx) -> String {
        let s = &self.species;
        let d = s.op(x);
        let rule = self.rule(x);
        let mut rhs = Vec::new();
        for (k, seg) in rule.segments().iter().enumerate() {
            if k > 0 {
                rhs.push(s.color_name(d.inputs[k - 1]).to_string());
            }
            if !seg.is_identity() {
                rhs.push(self.base.render_path(seg));
            }
        }
        let rhs = if rhs.is_empty() {
            "ε".to_string()
        } else {
            rhs.join(" ")
        };
        format!("{} -> {}", s.color_name(d.output), rhs)
    }

    pub fn render_rule(&self, x: OpIx) -> String {
        format!("{} ↦ {}", self.species.op_name(x), self.rule(x).render(&self.base))
    }

    /// Every derivable arrow of length at most `max_len`.
    pub fn enumerate_language(&self, max_len: usize) -> BTreeSet<PathArrow> {
        self.enumerate_language_weighted(max_len, None)
    }

    /// As [`enumerate_language`](Self::enumerate_language), additionally
    /// discarding arrows whose image under `weight.0` is longer than `weight.1`.
    pub fn enumerate_language_weighted(
        &self,
        max_len: usize,
        weight: Option<(&PathFunctor, usize)>,
    ) -> BTreeSet<PathArrow> {
        let mut table = self.derivable_paths(max_len, weight);
        std::mem::take(&mut table[self.start.index()])
    }

    /// Least fixed point of "color `R` derives arrow `u`" over arrows of
    /// length at most `max_len`, computed semi-naively.
    pub fn derivable_paths(&self, max_len: usize, weight: Option<(&PathFunctor, usize)>) -> Vec<BTreeSet<PathArrow>> {
        let s = &self.species;
        let max_weight = weight.map_or(usize::MAX, |w| w.1);
        let weigh = |p: &PathArrow| -> usize {
            match weight {
                None => 0,
                Some((f, _)) => p.edges().iter().map(|&e| f.map_edge(e).len()).sum(),
            }
        };
        let mut facts = FactTable::new(s.color_count(), max_len);
        let rule_len: Vec<usize> = self.rule_assign.iter().map(SplicedArrow::len).collect();
        let rule_weight: Vec<usize> = self
            .rule_assign
            .iter()
            .map(|r| r.segments().iter().map(&weigh).sum())
            .collect();

        let mut pending = Vec::new();
        for x in s.ops().filter(|&x| s.arity(x) == 0) {
            let p = &self.rule(x).segments()[0];
            if p.len() <= max_len && rule_weight[x.index()] <= max_weight {
                pending.push((s.op(x).output, p.clone(), rule_weight[x.index()]));
            }
        }
        let mut round = 0;
        loop {
            let mut fresh = false;
            for (c, p, w) in pending.drain(..) {
                fresh |= facts.insert(c, p, w, round);
            }
            if !fresh {
                break;
            }
            for x in s.ops().filter(|&x| s.arity(x) > 0) {
                let d = s.op(x);
                if rule_len[x.index()] > max_len || rule_weight[x.index()] > max_weight {
                    continue;
                }
                for delta_pos in 0..d.arity() {
                    let mut chosen: Vec<&PathArrow> = Vec::with_capacity(d.arity());
                    let search = ChildSearch {
                        facts: &facts,
                        inputs: &d.inputs,
                        delta_pos,
                        round,
                    };
                    search.run(
                        0,
                        max_len - rule_len[x.index()],
                        max_weight - rule_weight[x.index()],
                        &mut chosen,
                        &mut |children: &[&PathArrow], wsum| {
                            let p = self.rule(x).splice_apply_unchecked(children.iter().copied());
                            pending.push((d.output, p, wsum + rule_weight[x.index()]));
                        },
                    );
                }
            }
            round += 1;
        }
        facts.into_sets()
    }

    /// Decides membership by searching closed derivations with at most
    /// `max_nodes` nodes.
    pub fn member_bruteforce(&self, w: &PathArrow, max_nodes: usize) -> bool {
        self.count_trees_bruteforce(w, max_nodes) > 0
    }

    /// Number of closed derivations of `w` with at most `max_nodes` nodes,
    /// found by expanding the leftmost color of sentential forms. Forms
    /// whose letters disagree with `w` are dropped early.
    pub fn count_trees_bruteforce(&self, w: &PathArrow, max_nodes: usize) -> u64 {
        let gap = self.start_gap();
        if (w.src(), w.tgt()) != (gap.left, gap.right) {
            return 0;
        }
        let shortest = self.shortest_yields();
        self.leftmost(w.edges(), &shortest, vec![Sym::Color(self.start)], max_nodes)
    }

    /// Fewest letters each color can derive (`usize::MAX` if none).
    fn shortest_yields(&self) -> Vec<usize> {
        let mut best = vec![usize::MAX; self.species.color_count()];
        let mut changed = true;
        while changed {
            changed = false;
            for x in self.species.ops() {
                let d = self.species.op(x);
                let len = d.inputs.iter().try_fold(self.rule(x).len(), |acc, c| {
                    best[c.index()].checked_add(acc).filter(|&v| v != usize::MAX)
                });
                if let Some(len) = len {
                    if len < best[d.output.index()] {
                        best[d.output.index()] = len;
                        changed = true;
                    }
                }
            }
        }
        best
    }

    fn leftmost(&self, w: &[EdgeIx], shortest: &[usize], form: Vec<Sym>, budget: usize) -> u64 {
        let least = form.iter().try_fold(0usize, |acc, s| match s {
            Sym::Letter(_) => Some(acc + 1),
            Sym::Color(c) => shortest[c.index()].checked_add(acc).filter(|&v| v != usize::MAX),
        });
        if least.is_none_or(|n| n > w.len()) {
            return 0;
        }
        let Some(k) = form.iter().position(|s| matches!(s, Sym::Color(_))) else {
            return u64::from(form.iter().zip(w).all(|(s, &e)| *s == Sym::Letter(e)) && form.len() == w.len());
        };
        if form[..k].iter().zip(w).any(|(s, &e)| *s != Sym::Letter(e)) || budget == 0 {
            return 0;
        }
        let Sym::Color(c) = form[k] else { unreachable!() };
        let mut total = 0u64;
        for x in self.species.ops_with_output(c) {
            let d = self.species.op(x);
            let mut next = form[..k].to_vec();
            for (i, seg) in self.rule(x).segments().iter().enumerate() {
                if i > 0 {
                    next.push(Sym::Color(d.inputs[i - 1]));
                }
                next.extend(seg.edges().iter().map(|&e| Sym::Letter(e)));
            }
            next.extend_from_slice(&form[k + 1..]);
            total = total.saturating_add(self.leftmost(w, shortest, next, budget - 1));
        }
        total
    }

    pub fn analyze(&self) -> Analysis {
        let s = &self.species;
        let fixpoint = |pred: &dyn Fn(OpIx, &[bool]) -> bool| {
            let mut marked = vec![false; s.color_count()];
            loop {
                let mut changed = false;
                for x in s.ops() {
                    let out = s.op(x).output.index();
                    if !marked[out] && pred(x, &marked) {
                        marked[out] = true;
                        changed = true;
                    }
                }
                if !changed {
                    return marked;
                }
            }
        };
        let nullable = fixpoint(&|x, m| self.rule(x).is_empty() && s.op(x).inputs.iter().all(|c| m[c.index()]));
        let productive = fixpoint(&|x, m| s.op(x).inputs.iter().all(|c| m[c.index()]));

        let mut reachable = vec![false; s.color_count()];
        if productive[self.start.index()] {
            reachable[self.start.index()] = true;
        }
        loop {
            let mut changed = false;
            for x in s.ops() {
                let d = s.op(x);
                if reachable[d.output.index()] && d.inputs.iter().all(|c| productive[c.index()]) {
                    for c in &d.inputs {
                        if !reachable[c.index()] {
                            reachable[c.index()] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let set = |v: &[bool]| -> BTreeSet<ColorIx> { s.colors().filter(|c| v[c.index()]).collect() };
        let useful: Vec<bool> = (0..s.color_count()).map(|i| productive[i] && reachable[i]).collect();
        Analysis {
            nullable: set(&nullable),
            productive: set(&productive),
            useful: set(&useful),
        }
    }

    /// Restricts the grammar to its useful colors (the start color is kept
    /// even when useless).
    pub fn trim(&self) -> Cfg {
        let useful = self.analyze().useful;
        let s = &self.species;
        let keep_color = |c: ColorIx| c == self.start || useful.contains(&c);
        let keep_op = |x: OpIx| {
            let d = s.op(x);
            useful.contains(&d.output) && d.inputs.iter().all(|c| useful.contains(c))
        };
        self.restrict(keep_color, keep_op)
    }

    /// Sub-grammar on the selected colors and nodes; selected nodes must only
    /// mention selected colors.
    pub(crate) fn restrict(&self, keep_color: impl Fn(ColorIx) -> bool, keep_op: impl Fn(OpIx) -> bool) -> Cfg {
        let s = &self.species;
        let colors: Vec<ColorIx> = s.colors().filter(|&c| keep_color(c)).collect();
        let ops: Vec<OpIx> = s.ops().filter(|&x| keep_op(x)).collect();
        let species = Species::new(
            colors.iter().map(|&c| s.color_name(c).to_string()),
            ops.iter().map(|&x| {
                let d = s.op(x);
                (
                    d.id.clone(),
                    d.inputs.iter().map(|&c| s.color_name(c).to_string()).collect(),
                    s.color_name(d.output).to_string(),
                )
            }),
        )
        .expect("restriction of a valid species");
        let color_assign = species
            .colors()
            .map(|c| self.gap(s.color(species.color_name(c)).expect("kept color")))
            .collect();
        let rule_assign = species
            .ops()
            .map(|x| self.rule(s.op_named(species.op_name(x)).expect("kept node")).clone())
            .collect();
        Cfg {
            base: self.base.clone(),
            start: species.color(s.color_name(self.start)).expect("start kept"),
            species: Arc::new(species),
            color_assign,
            rule_assign,
        }
    }

    /// Whether every color is mapped to a distinct gap type.
    pub fn is_chromatic(&self) -> bool {
        let distinct: HashSet<GapType> = self.color_assign.iter().copied().collect();
        distinct.len() == self.color_assign.len()
    }

    /// Whether every node has arity at most two.
    pub fn is_bilinear(&self) -> bool {
        self.species.ops().all(|x| self.species.arity(x) <= 2)
    }

    /// Renders the rule of `x` with segments in dot notation.
    pub fn render_segments(&self, x: OpIx) -> Vec<String> {
        self.rule(x)
            .segments()
            .iter()
            .map(|p| render_segment(&self.base, p))
            .collect()
    }
}

/// Derived facts per color, bucketed by path length, each tagged with the
/// round in which it was found.
struct FactTable {
    seen: Vec<HashSet<PathArrow>>,
    by_len: Vec<Vec<Vec<(PathArrow, usize, usize)>>>,
}

impl FactTable {
    fn new(colors: usize, max_len: usize) -> FactTable {
        FactTable {
            seen: vec![HashSet::new(); colors],
            by_len: vec![vec![Vec::new(); max_len + 1]; colors],
        }
    }

    fn insert(&mut self, c: ColorIx, p: PathArrow, weight: usize, round: usize) -> bool {
        if self.seen[c.index()].contains(&p) {
            return false;
        }
        self.seen[c.index()].insert(p.clone());
        self.by_len[c.index()][p.len()].push((p, weight, round));
        true
    }

    fn into_sets(self) -> Vec<BTreeSet<PathArrow>> {
        self.seen.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

/// Enumerates child tuples for one rule such that the child at `delta_pos`
/// was found in the latest round, earlier children in older rounds, and
/// later children in any round so far.
struct ChildSearch<'a> {
    facts: &'a FactTable,
    inputs: &'a [ColorIx],
    delta_pos: usize,
    round: usize,
}

impl<'a> ChildSearch<'a> {
    fn run(
        &self,
        k: usize,
        len_budget: usize,
        weight_budget: usize,
        chosen: &mut Vec<&'a PathArrow>,
        emit: &mut dyn FnMut(&[&PathArrow], usize),
    ) {
        self.run_inner(k, len_budget, weight_budget, 0, chosen, emit)
    }

    fn run_inner(
        &self,
        k: usize,
        len_budget: usize,
        weight_budget: usize,
        wsum: usize,
        chosen: &mut Vec<&'a PathArrow>,
        emit: &mut dyn FnMut(&[&PathArrow], usize),
    ) {
        if k == self.inputs.len() {
            emit(chosen, wsum);
            return;
        }
        let buckets = &self.facts.by_len[self.inputs[k].index()];
        for bucket in buckets.iter().take(len_budget + 1) {
            for (p, w, r) in bucket {
                let ok = match k.cmp(&self.delta_pos) {
                    std::cmp::Ordering::Less => *r < self.round,
                    std::cmp::Ordering::Equal => *r == self.round,
                    std::cmp::Ordering::Greater => *r <= self.round,
                };
                if !ok || *w > weight_budget {
                    continue;
                }
                chosen.push(p);
                self.run_inner(k + 1, len_budget - p.len(), weight_budget - w, wsum + w, chosen, emit);
                chosen.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests;
