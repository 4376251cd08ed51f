//! Closure operations, translations and the bilinear normal form.

use std::sync::Arc;

use super::Cfg;
use crate::error::{Error, Result};
use crate::graph::{Graph, PathArrow, PathFunctor};
use crate::species::{ColorIx, OpIx, OpTree, Species};
use crate::spliced::{GapType, SplicedArrow};

/// Collects named colors and rules, then lays them out as a grammar.
#[derive(Default)]
pub(crate) struct CfgBuilder {
    colors: Vec<(String, GapType)>,
    ops: Vec<(String, Vec<String>, String, SplicedArrow)>,
}

impl CfgBuilder {
    pub(crate) fn color(&mut self, name: impl Into<String>, gap: GapType) {
        self.colors.push((name.into(), gap));
    }

    pub(crate) fn op(
        &mut self,
        name: impl Into<String>,
        inputs: Vec<String>,
        output: impl Into<String>,
        rule: SplicedArrow,
    ) {
        self.ops.push((name.into(), inputs, output.into(), rule));
    }

    pub(crate) fn finish(self, base: Arc<Graph>, start: &str) -> Result<Cfg> {
        let species = Species::new(
            self.colors.iter().map(|(n, _)| n.clone()),
            self.ops
                .iter()
                .map(|(n, ins, out, _)| (n.clone(), ins.clone(), out.clone())),
        )?;
        let mut color_assign = vec![None; species.color_count()];
        for (n, gap) in self.colors {
            color_assign[species.color(&n).expect("declared").index()] = Some(gap);
        }
        let mut rule_assign = vec![None; species.op_count()];
        for (n, _, _, rule) in self.ops {
            rule_assign[species.op_named(&n).expect("declared").index()] = Some(rule);
        }
        let start = species.require_color(start)?;
        Cfg::new(
            base,
            Arc::new(species),
            start,
            color_assign
                .into_iter()
                .map(|g| g.expect("every color has a gap"))
                .collect(),
            rule_assign
                .into_iter()
                .map(|r| r.expect("every node has a rule"))
                .collect(),
        )
    }
}

fn copy_into(b: &mut CfgBuilder, g: &Cfg, prefix: &str) {
    let s = &g.species;
    for c in s.colors() {
        b.color(format!("{prefix}{}", s.color_name(c)), g.gap(c));
    }
    for x in s.ops() {
        let d = s.op(x);
        b.op(
            format!("{prefix}{}", d.id),
            d.inputs
                .iter()
                .map(|&c| format!("{prefix}{}", s.color_name(c)))
                .collect(),
            format!("{prefix}{}", s.color_name(d.output)),
            g.rule(x).clone(),
        );
    }
}

fn same_base(gs: &[Cfg]) -> Result<()> {
    if gs.windows(2).any(|w| w[0].base != w[1].base) {
        return Err(Error::Precondition("grammars are over different base graphs".into()));
    }
    Ok(())
}

/// Grammar of the union of the languages. Component `i` has its colors and
/// nodes prefixed by `i:`; the fresh start color `start` has one unary
/// identity rule `start>i` into each old start.
pub fn union(gs: &[Cfg]) -> Result<Cfg> {
    let first = gs
        .first()
        .ok_or_else(|| Error::Precondition("union of no grammars".into()))?;
    same_base(gs)?;
    let gap = first.start_gap();
    let mut b = CfgBuilder::default();
    b.color("start", gap);
    for (i, g) in gs.iter().enumerate() {
        if g.start_gap() != gap {
            return Err(Error::GapMismatch {
                expected: gap.render(&first.base),
                found: g.start_gap().render(&g.base),
            });
        }
        let prefix = format!("{i}:");
        copy_into(&mut b, g, &prefix);
        b.op(
            format!("start>{i}"),
            vec![format!("{prefix}{}", g.species.color_name(g.start))],
            "start",
            SplicedArrow::identity(gap),
        );
    }
    b.finish(first.base.clone(), "start")
}

/// Grammar of the spliced concatenation `{w0 u1 w1 … un wn}` with `u_i`
/// ranging over the language of `gs[i-1]`. The fresh node is `concat`.
pub fn splice_concat(base: Arc<Graph>, f: &SplicedArrow, gs: &[Cfg]) -> Result<Cfg> {
    if f.arity() != gs.len() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: gs.len(),
        });
    }
    if gs.iter().any(|g| *g.base != *base) {
        return Err(Error::Precondition("grammars are over different base graphs".into()));
    }
    for seg in f.segments() {
        base.check_path(seg)?;
    }
    let mut b = CfgBuilder::default();
    b.color("start", f.outer());
    let mut inputs = Vec::new();
    for (i, (g, gap)) in gs.iter().zip(f.gap_types()).enumerate() {
        if g.start_gap() != *gap {
            return Err(Error::GapMismatch {
                expected: gap.render(&base),
                found: g.start_gap().render(&base),
            });
        }
        let prefix = format!("{i}:");
        copy_into(&mut b, g, &prefix);
        inputs.push(format!("{prefix}{}", g.species.color_name(g.start)));
    }
    b.op("concat", inputs, "start", f.clone());
    b.finish(base, "start")
}

/// The functorial image: same species, with gap types and rules pushed
/// through `f`.
pub fn image(g: &Cfg, f: &PathFunctor) -> Result<Cfg> {
    if *f.source != *g.base {
        return Err(Error::Precondition("functor source is not the grammar's base".into()));
    }
    Cfg::new(
        f.target.clone(),
        g.species.clone(),
        g.start,
        g.color_assign
            .iter()
            .map(|gap| GapType::new(f.map_node(gap.left), f.map_node(gap.right)))
            .collect(),
        g.rule_assign.iter().map(|r| r.map(f)).collect(),
    )
}

/// A translation of grammars over a common base: colors go to colors and
/// nodes to trees of the target with matching yields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub source: Cfg,
    pub target: Cfg,
    pub color_map: Vec<ColorIx>,
    pub op_map: Vec<OpTree>,
}

impl Translation {
    pub fn new(source: Cfg, target: Cfg, color_map: Vec<ColorIx>, op_map: Vec<OpTree>) -> Result<Translation> {
        if *source.base != *target.base {
            return Err(Error::Precondition("translation between different bases".into()));
        }
        let (s, t) = (&source.species, &target.species);
        if color_map.len() != s.color_count() || op_map.len() != s.op_count() {
            return Err(Error::InvalidHom("translation has the wrong size".into()));
        }
        if color_map.iter().any(|c| c.index() >= t.color_count()) {
            return Err(Error::InvalidHom("translation leaves the target colors".into()));
        }
        if color_map[source.start.index()] != target.start {
            return Err(Error::InvalidHom("translation does not preserve the start".into()));
        }
        for x in s.ops() {
            let d = s.op(x);
            let tree = &op_map[x.index()];
            tree.check(t)?;
            let fr = tree.frontier(t);
            let want: Vec<ColorIx> = d.inputs.iter().map(|c| color_map[c.index()]).collect();
            if fr.inputs != want || fr.output != color_map[d.output.index()] {
                return Err(Error::InvalidHom(format!(
                    "image of `{}` has the wrong signature",
                    d.id
                )));
            }
            if target.yield_of(tree)? != *source.rule(x) {
                return Err(Error::InvalidHom(format!(
                    "image of `{}` yields a different spliced arrow",
                    d.id
                )));
            }
        }
        Ok(Translation {
            source,
            target,
            color_map,
            op_map,
        })
    }

    pub fn map_color(&self, c: ColorIx) -> ColorIx {
        self.color_map[c.index()]
    }

    pub fn map_op(&self, x: OpIx) -> &OpTree {
        &self.op_map[x.index()]
    }

    /// Substitutes the image of every node; yields are preserved.
    pub fn translate_tree(&self, t: &OpTree) -> Result<OpTree> {
        t.check(&self.source.species)?;
        Ok(self.translate_unchecked(t))
    }

    fn translate_unchecked(&self, t: &OpTree) -> OpTree {
        match t {
            OpTree::Leaf(c) => OpTree::Leaf(self.map_color(*c)),
            OpTree::Node(x, ch) => {
                let mut children = ch.iter().map(|c| self.translate_unchecked(c));
                self.map_op(*x).substitute_leaves(&mut children)
            }
        }
    }
}

/// Bilinear normal form. A node `x : R1, …, Rn → R` of positive arity with
/// rule `w0 - w1 - … - wn` is split into a constant `x#0 ↦ w0` and binary
/// nodes `x#i : I[x,i-1], Ri → I[x,i] ↦ id - id - wi`, where `I[x,i-1]`
/// spans from the left end of `R` to the left end of `Ri` and `I[x,n]` is
/// `R` itself. Constants are copied unchanged.
pub fn bilinearize(g: &Cfg) -> Result<(Cfg, Translation)> {
    let s = &g.species;
    let mut b = CfgBuilder::default();
    for c in s.colors() {
        b.color(s.color_name(c), g.gap(c));
    }
    let acc = |x: &str, i: usize| format!("I[{x},{i}]");
    for x in s.ops() {
        let d = s.op(x);
        let rule = g.rule(x);
        let out = s.color_name(d.output).to_string();
        if d.arity() == 0 {
            b.op(d.id.clone(), vec![], out, rule.clone());
            continue;
        }
        let outer_left = rule.outer().left;
        let segs = rule.segments();
        for i in 1..=d.arity() {
            b.color(acc(&d.id, i - 1), GapType::new(outer_left, segs[i - 1].tgt()));
        }
        b.op(
            format!("{}#0", d.id),
            vec![],
            acc(&d.id, 0),
            SplicedArrow::constant(segs[0].clone()),
        );
        for i in 1..=d.arity() {
            let here = if i == d.arity() { out.clone() } else { acc(&d.id, i) };
            let step = SplicedArrow::new(vec![
                PathArrow::identity(outer_left),
                PathArrow::identity(segs[i - 1].tgt()),
                segs[i].clone(),
            ])?;
            b.op(
                format!("{}#{i}", d.id),
                vec![acc(&d.id, i - 1), s.color_name(d.inputs[i - 1]).to_string()],
                here,
                step,
            );
        }
    }
    let target = b.finish(g.base.clone(), s.color_name(g.start))?;
    let t = &target.species;
    let color_map = s
        .colors()
        .map(|c| t.color(s.color_name(c)).expect("copied color"))
        .collect();
    let op_map = s
        .ops()
        .map(|x| {
            let d = s.op(x);
            if d.arity() == 0 {
                return OpTree::Node(t.op_named(&d.id).expect("copied node"), vec![]);
            }
            let node = |i: usize| t.op_named(&format!("{}#{i}", d.id)).expect("fresh node");
            let mut tree = OpTree::Node(node(0), vec![]);
            for (i, &c) in d.inputs.iter().enumerate() {
                let leaf = OpTree::Leaf(t.color(s.color_name(c)).expect("copied color"));
                tree = OpTree::Node(node(i + 1), vec![tree, leaf]);
            }
            tree
        })
        .collect();
    let tr = Translation::new(g.clone(), target.clone(), color_map, op_map)?;
    Ok((target, tr))
}
