//! Colored species and the free operads they generate.
//!
//! An operation of the free operad on a species is a color-consistent
//! rooted planar tree. Open inputs are explicit [`OpTree::Leaf`]s, which
//! also serve as the identity operations.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorIx(pub u32);

/// Index of a node (generating operation) of a species.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpIx(pub u32);

impl ColorIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl OpIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpData {
    pub id: String,
    pub inputs: Vec<ColorIx>,
    pub output: ColorIx,
}

impl OpData {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

/// A finite colored species: colors plus nodes `x : R1,…,Rn → R`.
/// Colors and nodes are kept sorted by identifier.
#[derive(Clone)]
pub struct Species {
    colors: Vec<String>,
    ops: Vec<OpData>,
    color_lookup: HashMap<String, ColorIx>,
    op_lookup: HashMap<String, OpIx>,
}

impl PartialEq for Species {
    fn eq(&self, other: &Self) -> bool {
        self.colors == other.colors && self.ops == other.ops
    }
}

impl Eq for Species {}

impl fmt::Debug for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ops: Vec<String> = self.ops().map(|x| self.render_signature(x)).collect();
        f.debug_struct("Species")
            .field("colors", &self.colors)
            .field("nodes", &ops)
            .finish()
    }
}

impl Species {
    /// Builds a species from color names and `(id, inputs, output)` node records.
    pub fn new<C, S, O>(colors: C, ops: O) -> Result<Species>
    where
        C: IntoIterator<Item = S>,
        S: Into<String>,
        O: IntoIterator<Item = (String, Vec<String>, String)>,
    {
        let mut names: Vec<String> = colors.into_iter().map(Into::into).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Duplicate(w[0].clone()));
        }
        let color_lookup: HashMap<String, ColorIx> = names
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), ColorIx(i as u32)))
            .collect();
        let mut raw: Vec<(String, Vec<String>, String)> = ops.into_iter().collect();
        raw.sort();
        if let Some(w) = raw.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Duplicate(w[0].0.clone()));
        }
        let color = |c: &String| {
            color_lookup
                .get(c)
                .copied()
                .ok_or_else(|| Error::UnknownColor(c.clone()))
        };
        let ops = raw
            .into_iter()
            .map(|(id, inputs, output)| {
                Ok(OpData {
                    inputs: inputs.iter().map(color).collect::<Result<_>>()?,
                    output: color(&output)?,
                    id,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let op_lookup = ops
            .iter()
            .enumerate()
            .map(|(i, x)| (x.id.clone(), OpIx(i as u32)))
            .collect();
        Ok(Species {
            colors: names,
            ops,
            color_lookup,
            op_lookup,
        })
    }

    pub fn color_count(&self) -> usize {
        self.colors.len()
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn colors(&self) -> impl Iterator<Item = ColorIx> + '_ {
        (0..self.colors.len() as u32).map(ColorIx)
    }

    pub fn ops(&self) -> impl Iterator<Item = OpIx> + '_ {
        (0..self.ops.len() as u32).map(OpIx)
    }

    pub fn color_name(&self, c: ColorIx) -> &str {
        &self.colors[c.index()]
    }

    pub fn op(&self, x: OpIx) -> &OpData {
        &self.ops[x.index()]
    }

    pub fn op_name(&self, x: OpIx) -> &str {
        &self.ops[x.index()].id
    }

    pub fn arity(&self, x: OpIx) -> usize {
        self.ops[x.index()].inputs.len()
    }

    pub fn color(&self, name: &str) -> Option<ColorIx> {
        self.color_lookup.get(name).copied()
    }

    pub fn op_named(&self, name: &str) -> Option<OpIx> {
        self.op_lookup.get(name).copied()
    }

    pub fn require_color(&self, name: &str) -> Result<ColorIx> {
        self.color(name).ok_or_else(|| Error::UnknownColor(name.to_string()))
    }

    pub fn require_op(&self, name: &str) -> Result<OpIx> {
        self.op_named(name).ok_or_else(|| Error::UnknownOp(name.to_string()))
    }

    /// Nodes with the given output color, in identifier order.
    pub fn ops_with_output(&self, c: ColorIx) -> impl Iterator<Item = OpIx> + '_ {
        self.ops().filter(move |&x| self.op(x).output == c)
    }

    pub fn render_signature(&self, x: OpIx) -> String {
        let d = self.op(x);
        let ins: Vec<&str> = d.inputs.iter().map(|&c| self.color_name(c)).collect();
        format!("{} : {} -> {}", d.id, ins.join(","), self.color_name(d.output))
    }

    /// All trees of root color `root` with at most `max_nodes` species nodes,
    /// ordered by size, then node identifier, then children.
    pub fn enumerate_trees(&self, root: ColorIx, max_nodes: usize, closed_only: bool) -> Vec<OpTree> {
        let sized = self.trees_by_size(max_nodes, closed_only);
        (0..=max_nodes)
            .flat_map(|n| sized[n][root.index()].iter().cloned())
            .collect()
    }

    /// `table[n][c]`: all trees of color `c` with exactly `n` nodes.
    pub(crate) fn trees_by_size(&self, max_nodes: usize, closed_only: bool) -> Vec<Vec<Vec<OpTree>>> {
        let mut table: Vec<Vec<Vec<OpTree>>> = Vec::with_capacity(max_nodes + 1);
        table.push(
            self.colors()
                .map(|c| if closed_only { Vec::new() } else { vec![OpTree::Leaf(c)] })
                .collect(),
        );
        for n in 1..=max_nodes {
            let mut row = vec![Vec::new(); self.color_count()];
            for x in self.ops() {
                let d = self.op(x);
                let mut acc = Vec::new();
                let mut children = Vec::new();
                fill_children(&table, &d.inputs, n - 1, &mut children, &mut acc);
                row[d.output.index()].extend(acc.into_iter().map(|ch| OpTree::Node(x, ch)));
            }
            table.push(row);
        }
        table
    }
}

fn fill_children(
    table: &[Vec<Vec<OpTree>>],
    inputs: &[ColorIx],
    budget: usize,
    prefix: &mut Vec<OpTree>,
    out: &mut Vec<Vec<OpTree>>,
) {
    let k = prefix.len();
    if k == inputs.len() {
        if budget == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let sizes: Vec<usize> = if k + 1 == inputs.len() {
        vec![budget]
    } else {
        (0..=budget).collect()
    };
    for m in sizes {
        if m >= table.len() {
            continue;
        }
        for t in &table[m][inputs[k].index()] {
            prefix.push(t.clone());
            fill_children(table, inputs, budget - m, prefix, out);
            prefix.pop();
        }
    }
}

/// An operation of the free operad on a species.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpTree {
    /// The identity operation on a color; an open input slot.
    Leaf(ColorIx),
    /// A species node applied to one subtree per input.
    Node(OpIx, Vec<OpTree>),
}

/// Input colors and output color of an operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frontier {
    pub inputs: Vec<ColorIx>,
    pub output: ColorIx,
}

impl OpTree {
    /// The node `x` with all of its inputs left open.
    pub fn generator(s: &Species, x: OpIx) -> OpTree {
        OpTree::Node(x, s.op(x).inputs.iter().map(|&c| OpTree::Leaf(c)).collect())
    }

    pub fn output(&self, s: &Species) -> ColorIx {
        match self {
            OpTree::Leaf(c) => *c,
            OpTree::Node(x, _) => s.op(*x).output,
        }
    }

    pub fn frontier(&self, s: &Species) -> Frontier {
        let mut inputs = Vec::new();
        self.collect_leaves(&mut inputs);
        Frontier {
            inputs,
            output: self.output(s),
        }
    }

    fn collect_leaves(&self, out: &mut Vec<ColorIx>) {
        match self {
            OpTree::Leaf(c) => out.push(*c),
            OpTree::Node(_, ch) => ch.iter().for_each(|t| t.collect_leaves(out)),
        }
    }

    /// Number of open inputs.
    pub fn arity(&self) -> usize {
        match self {
            OpTree::Leaf(_) => 1,
            OpTree::Node(_, ch) => ch.iter().map(OpTree::arity).sum(),
        }
    }

    /// Number of species nodes.
    pub fn node_count(&self) -> usize {
        match self {
            OpTree::Leaf(_) => 0,
            OpTree::Node(_, ch) => 1 + ch.iter().map(OpTree::node_count).sum::<usize>(),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            OpTree::Leaf(_) => false,
            OpTree::Node(_, ch) => ch.iter().all(OpTree::is_closed),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            OpTree::Leaf(_) => 0,
            OpTree::Node(_, ch) => 1 + ch.iter().map(OpTree::height).max().unwrap_or(0),
        }
    }

    /// Checks arities and colors against the species.
    pub fn check(&self, s: &Species) -> Result<()> {
        match self {
            OpTree::Leaf(c) => {
                if c.index() >= s.color_count() {
                    return Err(Error::UnknownColor(format!("#{}", c.0)));
                }
            }
            OpTree::Node(x, ch) => {
                if x.index() >= s.op_count() {
                    return Err(Error::UnknownOp(format!("#{}", x.0)));
                }
                let d = s.op(*x);
                if d.arity() != ch.len() {
                    return Err(Error::ArityMismatch {
                        expected: d.arity(),
                        found: ch.len(),
                    });
                }
                for (t, &want) in ch.iter().zip(&d.inputs) {
                    t.check(s)?;
                    let got = t.output(s);
                    if got != want {
                        return Err(Error::ColorMismatch {
                            expected: s.color_name(want).to_string(),
                            found: s.color_name(got).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Partial composition `self ∘_i child`: plugs `child` into the `i`-th
    /// open input (0-indexed, left to right).
    pub fn graft(&self, s: &Species, i: usize, child: &OpTree) -> Result<OpTree> {
        let arity = self.arity();
        if i >= arity {
            return Err(Error::IndexOutOfRange { index: i, arity });
        }
        let mut seen = 0;
        let mut out = self.clone();
        let slot = out.leaf_mut(i, &mut seen).expect("index within arity");
        let (want, got) = (*slot, child.output(s));
        if want != got {
            return Err(Error::ColorMismatch {
                expected: s.color_name(want).to_string(),
                found: s.color_name(got).to_string(),
            });
        }
        out.replace_leaf(i, child.clone());
        Ok(out)
    }

    fn leaf_mut(&mut self, i: usize, seen: &mut usize) -> Option<&mut ColorIx> {
        match self {
            OpTree::Leaf(c) => {
                if *seen == i {
                    Some(c)
                } else {
                    *seen += 1;
                    None
                }
            }
            OpTree::Node(_, ch) => ch.iter_mut().find_map(|t| t.leaf_mut(i, seen)),
        }
    }

    fn replace_leaf(&mut self, i: usize, with: OpTree) {
        fn go(t: &mut OpTree, i: usize, seen: &mut usize, with: &mut Option<OpTree>) {
            match t {
                OpTree::Leaf(_) => {
                    if *seen == i {
                        *t = with.take().expect("replaced once");
                    }
                    *seen += 1;
                }
                OpTree::Node(_, ch) => {
                    for c in ch {
                        if with.is_none() {
                            return;
                        }
                        go(c, i, seen, with);
                    }
                }
            }
        }
        let mut with = Some(with);
        go(self, i, &mut 0, &mut with);
    }

    /// Parallel composition `self ∘ (children…)`, one child per open input.
    pub fn compose_full(&self, s: &Species, children: &[OpTree]) -> Result<OpTree> {
        let arity = self.arity();
        if children.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: children.len(),
            });
        }
        let mut out = self.clone();
        for (i, child) in children.iter().enumerate().rev() {
            out = out.graft(s, i, child)?;
        }
        Ok(out)
    }

    /// Substitutes leaves in order without color checks.
    pub(crate) fn substitute_leaves(&self, children: &mut impl Iterator<Item = OpTree>) -> OpTree {
        match self {
            OpTree::Leaf(_) => children.next().expect("one child per leaf"),
            OpTree::Node(x, ch) => OpTree::Node(*x, ch.iter().map(|t| t.substitute_leaves(children)).collect()),
        }
    }

    /// Term syntax, e.g. `x1(x2, x4(x3))`; open inputs print as `_:C`.
    pub fn render(&self, s: &Species) -> String {
        match self {
            OpTree::Leaf(c) => format!("_:{}", s.color_name(*c)),
            OpTree::Node(x, ch) if ch.is_empty() => s.op_name(*x).to_string(),
            OpTree::Node(x, ch) => {
                let parts: Vec<String> = ch.iter().map(|t| t.render(s)).collect();
                format!("{}({})", s.op_name(*x), parts.join(", "))
            }
        }
    }

    /// Parses the term syntax produced by [`render`](Self::render).
    pub fn parse(s: &Species, text: &str) -> Result<OpTree> {
        let mut p = TermParser {
            chars: text.chars().collect(),
            pos: 0,
        };
        let t = p.term(s)?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("trailing input in `{text}`")));
        }
        t.check(s)?;
        Ok(t)
    }
}

struct TermParser {
    chars: Vec<char>,
    pos: usize,
}

impl TermParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && !"(),: \t\n".contains(self.chars[self.pos]) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self, s: &Species) -> Result<OpTree> {
        let name = self.ident();
        if name == "_" && self.eat(':') {
            let c = self.ident();
            return Ok(OpTree::Leaf(s.require_color(&c)?));
        }
        if name.is_empty() {
            return Err(Error::Parse("expected a node name".into()));
        }
        let x = s.require_op(&name)?;
        let mut children = Vec::new();
        if self.eat('(') {
            loop {
                children.push(self.term(s)?);
                if self.eat(')') {
                    break;
                }
                if !self.eat(',') {
                    return Err(Error::Parse("expected `,` or `)`".into()));
                }
            }
        }
        Ok(OpTree::Node(x, children))
    }
}

/// graft(parent, i, child).
pub fn graft(s: &Species, parent: &OpTree, i: usize, child: &OpTree) -> Result<OpTree> {
    parent.graft(s, i, child)
}

/// A map of species; induces a functor between the free operads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesMap {
    pub source: Arc<Species>,
    pub target: Arc<Species>,
    color_map: Vec<ColorIx>,
    op_map: Vec<OpIx>,
}

impl SpeciesMap {
    pub fn new(
        source: Arc<Species>,
        target: Arc<Species>,
        color_map: Vec<ColorIx>,
        op_map: Vec<OpIx>,
    ) -> Result<SpeciesMap> {
        if color_map.len() != source.color_count() || op_map.len() != source.op_count() {
            return Err(Error::InvalidHom("species map has the wrong size".into()));
        }
        if color_map.iter().any(|c| c.index() >= target.color_count())
            || op_map.iter().any(|x| x.index() >= target.op_count())
        {
            return Err(Error::InvalidHom("species map leaves its target".into()));
        }
        for x in source.ops() {
            let d = source.op(x);
            let img = target.op(op_map[x.index()]);
            let mapped: Vec<ColorIx> = d.inputs.iter().map(|c| color_map[c.index()]).collect();
            if mapped != img.inputs || color_map[d.output.index()] != img.output {
                return Err(Error::InvalidHom(format!(
                    "node `{}` maps to `{}` with a different signature",
                    d.id, img.id
                )));
            }
        }
        Ok(SpeciesMap {
            source,
            target,
            color_map,
            op_map,
        })
    }

    pub fn from_names(
        source: Arc<Species>,
        target: Arc<Species>,
        color_map: &HashMap<String, String>,
        op_map: &HashMap<String, String>,
    ) -> Result<SpeciesMap> {
        let colors = source
            .colors()
            .map(|c| {
                let name = source.color_name(c);
                let img = color_map
                    .get(name)
                    .ok_or_else(|| Error::InvalidHom(format!("color `{name}` is unmapped")))?;
                target.require_color(img)
            })
            .collect::<Result<Vec<_>>>()?;
        let ops = source
            .ops()
            .map(|x| {
                let name = source.op_name(x);
                let img = op_map
                    .get(name)
                    .ok_or_else(|| Error::InvalidHom(format!("node `{name}` is unmapped")))?;
                target.require_op(img)
            })
            .collect::<Result<Vec<_>>>()?;
        SpeciesMap::new(source, target, colors, ops)
    }

    pub fn identity(s: Arc<Species>) -> SpeciesMap {
        SpeciesMap {
            color_map: s.colors().collect(),
            op_map: s.ops().collect(),
            source: s.clone(),
            target: s,
        }
    }

    pub fn map_color(&self, c: ColorIx) -> ColorIx {
        self.color_map[c.index()]
    }

    pub fn map_op(&self, x: OpIx) -> OpIx {
        self.op_map[x.index()]
    }

    /// The induced functor on trees: relabels nodes and leaf colors.
    pub fn map_tree(&self, t: &OpTree) -> OpTree {
        match t {
            OpTree::Leaf(c) => OpTree::Leaf(self.map_color(*c)),
            OpTree::Node(x, ch) => OpTree::Node(self.map_op(*x), ch.iter().map(|c| self.map_tree(c)).collect()),
        }
    }

    /// Nodes of the source lying over each target node.
    pub fn op_fibers(&self) -> Vec<Vec<OpIx>> {
        let mut fibers = vec![Vec::new(); self.target.op_count()];
        for x in self.source.ops() {
            fibers[self.map_op(x).index()].push(x);
        }
        fibers
    }

    /// Colors of the source lying over each target color.
    pub fn color_fibers(&self) -> Vec<Vec<ColorIx>> {
        let mut fibers = vec![Vec::new(); self.target.color_count()];
        for c in self.source.colors() {
            fibers[self.map_color(c).index()].push(c);
        }
        fibers
    }
}
