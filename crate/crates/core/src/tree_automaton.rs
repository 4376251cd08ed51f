//! Tree automata as species maps, and generalized grammars over free
//! operads with their pullback along tree automata.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::species::{ColorIx, OpIx, OpTree, Species, SpeciesMap};

/// A bottom-up nondeterministic tree automaton: a map from the species of
/// states and transitions onto the ranked alphabet, with a root state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNfa {
    pub map: SpeciesMap,
    pub root: ColorIx,
}

impl TreeNfa {
    pub fn new(map: SpeciesMap, root: ColorIx) -> Result<TreeNfa> {
        if root.index() >= map.source.color_count() {
            return Err(Error::UnknownColor(format!("#{}", root.0)));
        }
        Ok(TreeNfa { map, root })
    }

    /// Accepts every closed tree of color `root`.
    pub fn identity(base: Arc<Species>, root: ColorIx) -> Result<TreeNfa> {
        TreeNfa::new(SpeciesMap::identity(base), root)
    }

    pub fn base(&self) -> &Arc<Species> {
        &self.map.target
    }

    pub fn states(&self) -> &Arc<Species> {
        &self.map.source
    }

    fn check_input(&self, t: &OpTree) -> Result<()> {
        t.check(self.base())?;
        if !t.is_closed() {
            return Err(Error::OpenTree);
        }
        let want = self.map.map_color(self.root);
        let got = t.output(self.base());
        if got != want {
            return Err(Error::ColorMismatch {
                expected: self.base().color_name(want).to_string(),
                found: self.base().color_name(got).to_string(),
            });
        }
        Ok(())
    }

    /// States reachable at the root of a closed tree, bottom-up.
    fn reachable(&self, t: &OpTree) -> BTreeSet<ColorIx> {
        match t {
            OpTree::Leaf(_) => BTreeSet::new(),
            OpTree::Node(x, ch) => {
                let below: Vec<BTreeSet<ColorIx>> = ch.iter().map(|c| self.reachable(c)).collect();
                self.transitions_over(*x)
                    .filter(|&y| {
                        let d = self.states().op(y);
                        d.inputs.iter().zip(&below).all(|(q, set)| set.contains(q))
                    })
                    .map(|y| self.states().op(y).output)
                    .collect()
            }
        }
    }

    fn transitions_over(&self, x: OpIx) -> impl Iterator<Item = OpIx> + '_ {
        self.states().ops().filter(move |&y| self.map.map_op(y) == x)
    }

    pub fn accepts_tree(&self, t: &OpTree) -> Result<bool> {
        self.check_input(t)?;
        Ok(self.reachable(t).contains(&self.root))
    }

    /// All run trees over `t` with the root state at the root.
    pub fn runs_tree(&self, t: &OpTree) -> Result<Vec<OpTree>> {
        self.check_input(t)?;
        Ok(self.runs_at(t, self.root))
    }

    /// Runs over a possibly open tree with state `q` at its root; a leaf
    /// admits exactly the run `Leaf(q)` when `q` lies over its color.
    pub(crate) fn runs_at(&self, t: &OpTree, q: ColorIx) -> Vec<OpTree> {
        match t {
            OpTree::Leaf(c) => {
                if self.map.map_color(q) == *c {
                    vec![OpTree::Leaf(q)]
                } else {
                    Vec::new()
                }
            }
            OpTree::Node(x, ch) => {
                let mut out = Vec::new();
                for y in self.transitions_over(*x) {
                    let d = self.states().op(y);
                    if d.output != q {
                        continue;
                    }
                    let mut partial: Vec<Vec<OpTree>> = vec![Vec::new()];
                    for (child, &qi) in ch.iter().zip(&d.inputs) {
                        let options = self.runs_at(child, qi);
                        partial = partial
                            .into_iter()
                            .flat_map(|p| {
                                options.iter().map(move |o| {
                                    let mut p = p.clone();
                                    p.push(o.clone());
                                    p
                                })
                            })
                            .collect();
                        if partial.is_empty() {
                            break;
                        }
                    }
                    out.extend(partial.into_iter().map(|kids| OpTree::Node(y, kids)));
                }
                out
            }
        }
    }

    /// Closed trees with at most `max_nodes` nodes having an accepting run.
    pub fn enumerate_tree_language(&self, max_nodes: usize) -> BTreeSet<OpTree> {
        self.states()
            .enumerate_trees(self.root, max_nodes, true)
            .iter()
            .map(|t| self.map.map_tree(t))
            .collect()
    }
}

/// A generalized grammar over a free operad: colors refine base colors and
/// nodes are sent to trees of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GCfgFree {
    pub base: Arc<Species>,
    pub species: Arc<Species>,
    pub start: ColorIx,
    pub color_assign: Vec<ColorIx>,
    pub rule_assign: Vec<OpTree>,
}

impl GCfgFree {
    pub fn new(
        base: Arc<Species>,
        species: Arc<Species>,
        start: ColorIx,
        color_assign: Vec<ColorIx>,
        rule_assign: Vec<OpTree>,
    ) -> Result<GCfgFree> {
        if start.index() >= species.color_count() {
            return Err(Error::UnknownColor(format!("#{}", start.0)));
        }
        if color_assign.len() != species.color_count() || rule_assign.len() != species.op_count() {
            return Err(Error::InvalidGrammar("assignments have the wrong size".into()));
        }
        if color_assign.iter().any(|c| c.index() >= base.color_count()) {
            return Err(Error::InvalidGrammar("color assigned outside the base".into()));
        }
        for x in species.ops() {
            let d = species.op(x);
            let rule = &rule_assign[x.index()];
            rule.check(&base)?;
            let fr = rule.frontier(&base);
            let want: Vec<ColorIx> = d.inputs.iter().map(|c| color_assign[c.index()]).collect();
            if fr.inputs != want || fr.output != color_assign[d.output.index()] {
                return Err(Error::InvalidGrammar(format!(
                    "{}: rule `{}` does not match the node's colors",
                    d.id,
                    rule.render(&base)
                )));
            }
        }
        Ok(GCfgFree {
            base,
            species,
            start,
            color_assign,
            rule_assign,
        })
    }

    /// The grammar of all closed trees of color `start`: every node is sent
    /// to itself.
    pub fn all_trees(base: Arc<Species>, start: ColorIx) -> Result<GCfgFree> {
        let rules = base.ops().map(|x| OpTree::generator(&base, x)).collect();
        GCfgFree::new(base.clone(), base.clone(), start, base.colors().collect(), rules)
    }

    pub fn yield_of(&self, t: &OpTree) -> Result<OpTree> {
        t.check(&self.species)?;
        Ok(self.yield_unchecked(t))
    }

    fn yield_unchecked(&self, t: &OpTree) -> OpTree {
        match t {
            OpTree::Leaf(c) => OpTree::Leaf(self.color_assign[c.index()]),
            OpTree::Node(x, ch) => {
                let mut kids = ch.iter().map(|c| self.yield_unchecked(c));
                self.rule_assign[x.index()].substitute_leaves(&mut kids)
            }
        }
    }

    /// Closed base trees with at most `max_nodes` nodes yielded by closed
    /// derivations of the start color, as a least fixed point.
    pub fn enumerate(&self, max_nodes: usize) -> BTreeSet<OpTree> {
        let s = &self.species;
        let mut facts: Vec<BTreeSet<OpTree>> = vec![BTreeSet::new(); s.color_count()];
        loop {
            let mut fresh = Vec::new();
            for x in s.ops() {
                let d = s.op(x);
                let own = self.rule_assign[x.index()].node_count();
                if own > max_nodes {
                    continue;
                }
                let mut chosen = Vec::new();
                choose_children(&facts, &d.inputs, max_nodes - own, &mut chosen, &mut |kids| {
                    let mut it = kids.iter().map(|t| (*t).clone());
                    let t = self.rule_assign[x.index()].substitute_leaves(&mut it);
                    if !facts[d.output.index()].contains(&t) {
                        fresh.push((d.output, t));
                    }
                });
            }
            if fresh.is_empty() {
                break;
            }
            for (c, t) in fresh {
                facts[c.index()].insert(t);
            }
        }
        std::mem::take(&mut facts[self.start.index()])
    }

    /// Restriction to colors that are both productive and reachable.
    pub fn trim(&self) -> Result<GCfgFree> {
        let s = &self.species;
        let mut productive = vec![false; s.color_count()];
        loop {
            let mut changed = false;
            for x in s.ops() {
                let d = s.op(x);
                if !productive[d.output.index()] && d.inputs.iter().all(|c| productive[c.index()]) {
                    productive[d.output.index()] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let usable = |x: OpIx| s.op(x).inputs.iter().all(|c| productive[c.index()]);
        let mut reachable = vec![false; s.color_count()];
        reachable[self.start.index()] = true;
        loop {
            let mut changed = false;
            for x in s.ops().filter(|&x| usable(x)) {
                let d = s.op(x);
                if reachable[d.output.index()] {
                    for c in &d.inputs {
                        changed |= !std::mem::replace(&mut reachable[c.index()], true);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let keep_color = |c: ColorIx| c == self.start || (productive[c.index()] && reachable[c.index()]);
        let keep_op = |x: OpIx| {
            let d = s.op(x);
            usable(x) && productive[d.output.index()] && reachable[d.output.index()]
        };
        let colors: Vec<ColorIx> = s.colors().filter(|&c| keep_color(c)).collect();
        let ops: Vec<OpIx> = s.ops().filter(|&x| keep_op(x)).collect();
        let species = Arc::new(Species::new(
            colors.iter().map(|&c| s.color_name(c).to_string()),
            ops.iter().map(|&x| {
                let d = s.op(x);
                (
                    d.id.clone(),
                    d.inputs.iter().map(|&c| s.color_name(c).to_string()).collect(),
                    s.color_name(d.output).to_string(),
                )
            }),
        )?);
        let color_assign = species
            .colors()
            .map(|c| self.color_assign[s.require_color(species.color_name(c)).expect("kept").index()])
            .collect();
        let rule_assign = species
            .ops()
            .map(|x| self.rule_assign[s.require_op(species.op_name(x)).expect("kept").index()].clone())
            .collect();
        let start = species.require_color(s.color_name(self.start))?;
        GCfgFree::new(self.base.clone(), species, start, color_assign, rule_assign)
    }
}

fn choose_children<'a>(
    facts: &'a [BTreeSet<OpTree>],
    inputs: &[ColorIx],
    budget: usize,
    chosen: &mut Vec<&'a OpTree>,
    emit: &mut dyn FnMut(&[&OpTree]),
) {
    let Some((&first, rest)) = inputs.split_first() else {
        emit(chosen);
        return;
    };
    for t in &facts[first.index()] {
        let n = t.node_count();
        if n <= budget {
            chosen.push(t);
            choose_children(facts, rest, budget - n, chosen, emit);
            chosen.pop();
        }
    }
}

/// The grammar over the automaton's states whose derivations pair
/// derivations of `g` with runs. Colors are pairs `R|q`; nodes pair a node
/// of `g` with a run over its rule.
pub fn pullback_tree_grammar(g: &GCfgFree, a: &TreeNfa) -> Result<GCfgFree> {
    if *g.base != **a.base() {
        return Err(Error::Precondition("grammar and automaton have different bases".into()));
    }
    if g.color_assign[g.start.index()] != a.map.map_color(a.root) {
        return Err(Error::Precondition(
            "start color and root state lie over different base colors".into(),
        ));
    }
    let s = &g.species;
    let states = a.states();
    let pair = |c: ColorIx, q: ColorIx| format!("{}|{}", s.color_name(c), states.color_name(q));
    let over = |c: ColorIx| -> Vec<ColorIx> {
        states
            .colors()
            .filter(|&q| a.map.map_color(q) == g.color_assign[c.index()])
            .collect()
    };
    let mut colors = Vec::new();
    let mut color_state = Vec::new();
    for c in s.colors() {
        for q in over(c) {
            colors.push(pair(c, q));
            color_state.push((pair(c, q), q));
        }
    }
    let mut ops = Vec::new();
    let mut rules = Vec::new();
    for x in s.ops() {
        let d = s.op(x);
        let rule = &g.rule_assign[x.index()];
        for q in over(d.output) {
            for run in a.runs_at(rule, q) {
                let leaves = run.frontier(states).inputs;
                let name = format!("{}@{}", d.id, run.render(states));
                let inputs = d.inputs.iter().zip(&leaves).map(|(&c, &p)| pair(c, p)).collect();
                ops.push((name.clone(), inputs, pair(d.output, q)));
                rules.push((name, run));
            }
        }
    }
    let species = Arc::new(Species::new(colors, ops)?);
    let mut color_assign = vec![ColorIx(0); species.color_count()];
    for (name, q) in color_state {
        color_assign[species.require_color(&name)?.index()] = q;
    }
    let mut rule_assign = vec![OpTree::Leaf(ColorIx(0)); species.op_count()];
    for (name, run) in rules {
        rule_assign[species.require_op(&name)?.index()] = run;
    }
    let start = species.require_color(&pair(g.start, a.root))?;
    GCfgFree::new(states.clone(), species, start, color_assign, rule_assign)
}

/// Grammar of `L(g) ∩ L(a)` over the common base.
pub fn intersect_gcfg_regular(g: &GCfgFree, a: &TreeNfa) -> Result<GCfgFree> {
    let p = pullback_tree_grammar(g, a)?;
    GCfgFree::new(
        g.base.clone(),
        p.species.clone(),
        p.start,
        p.color_assign.iter().map(|&q| a.map.map_color(q)).collect(),
        p.rule_assign.iter().map(|t| a.map.map_tree(t)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn eval(s: &Species, t: &OpTree) -> bool {
        match t {
            OpTree::Node(x, ch) => match s.op_name(*x) {
                "true" => true,
                "false" => false,
                "and" => ch.iter().all(|c| eval(s, c)),
                other => panic!("unexpected node {other}"),
            },
            OpTree::Leaf(_) => panic!("open tree"),
        }
    }

    #[test]
    fn boolean_evaluation() {
        let a = fixtures::boolean_automaton();
        let base = a.base().clone();
        let tt = OpTree::parse(&base, "and(true, true)").unwrap();
        let tf = OpTree::parse(&base, "and(true, false)").unwrap();
        assert!(a.accepts_tree(&tt).unwrap());
        assert!(!a.accepts_tree(&tf).unwrap());
        assert_eq!(a.runs_tree(&tt).unwrap().len(), 1);
        let lang = a.enumerate_tree_language(3);
        let rendered: BTreeSet<String> = lang.iter().map(|t| t.render(&base)).collect();
        assert_eq!(rendered, ["true", "and(true, true)"].map(String::from).into());
        let b = base.require_color("b").unwrap();
        for t in base.enumerate_trees(b, 7, true) {
            assert_eq!(a.accepts_tree(&t).unwrap(), eval(&base, &t));
        }
    }

    #[test]
    fn identity_automaton_accepts_everything() {
        let s = Arc::new(fixtures::binary_species());
        let star = s.require_color("*").unwrap();
        let a = TreeNfa::identity(s.clone(), star).unwrap();
        let all: BTreeSet<OpTree> = s.enumerate_trees(star, 5, true).into_iter().collect();
        assert_eq!(a.enumerate_tree_language(5), all);
        let g = GCfgFree::all_trees(s.clone(), star).unwrap();
        assert_eq!(g.enumerate(5), all);
        let p = pullback_tree_grammar(&g, &a).unwrap();
        assert_eq!(p.species.op_count(), s.op_count());
        assert_eq!(intersect_gcfg_regular(&g, &a).unwrap().enumerate(5), all);
    }

    #[test]
    fn intersection_with_boolean_automaton() {
        let a = fixtures::boolean_automaton();
        let base = a.base().clone();
        let b = base.require_color("b").unwrap();
        let g = GCfgFree::all_trees(base.clone(), b).unwrap();
        let i = intersect_gcfg_regular(&g, &a).unwrap();
        let want: BTreeSet<OpTree> = base
            .enumerate_trees(b, 7, true)
            .into_iter()
            .filter(|t| eval(&base, t))
            .collect();
        assert_eq!(i.enumerate(7), want);
        assert_eq!(i.trim().unwrap().enumerate(7), want);
        // colors are pairs over the single base color
        assert_eq!(pullback_tree_grammar(&g, &a).unwrap().species.color_count(), 2);
    }

    #[test]
    fn duplicated_transitions_multiply_runs() {
        let a = fixtures::boolean_automaton_with_duplicate_true();
        let tt = OpTree::parse(a.base(), "and(true, true)").unwrap();
        assert_eq!(a.runs_tree(&tt).unwrap().len(), 4);
    }

    #[test]
    fn rejects_open_and_miscolored_trees() {
        let a = fixtures::boolean_automaton();
        let b = a.base().require_color("b").unwrap();
        assert!(matches!(a.accepts_tree(&OpTree::Leaf(b)), Err(Error::OpenTree)));
    }
}
