//! Contour graphs of species, universal grammars, tree contour words and
//! the decomposition of a grammar into a chromatic contour language, a
//! coloring automaton and an output functor.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::automaton::Nfa;
use crate::error::{Error, Result};
use crate::grammar::Cfg;
use crate::graph::{EdgeIx, Graph, GraphHom, NodeIx, PathArrow, PathFunctor};
use crate::intersection::{pullback_grammar, PullbackOptions};
use crate::species::{ColorIx, OpIx, OpTree, Species, SpeciesMap};
use crate::spliced::{GapType, SplicedArrow};

pub const UP: &str = "↑";
pub const DOWN: &str = "↓";

/// Name of corner `i` of node `x`.
pub fn corner_name(x: &str, i: usize) -> String {
    format!("{x}.{i}")
}

/// The contour graph of a species: nodes `R↑`, `R↓` per color and one
/// corner `x.i : R_i↓ → R_{i+1}↑` per node `x` and `0 ≤ i ≤ arity`, where
/// `R_0↓` is `R↑` and `R_{n+1}↑` is `R↓` for the output color `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContourGraph {
    pub graph: Arc<Graph>,
    pub species: Arc<Species>,
    up: Vec<NodeIx>,
    down: Vec<NodeIx>,
    corners: Vec<Vec<EdgeIx>>,
    corner_of: Vec<(OpIx, usize)>,
}

impl ContourGraph {
    pub fn up(&self, c: ColorIx) -> NodeIx {
        self.up[c.index()]
    }

    pub fn down(&self, c: ColorIx) -> NodeIx {
        self.down[c.index()]
    }

    pub fn corner(&self, x: OpIx, i: usize) -> EdgeIx {
        self.corners[x.index()][i]
    }

    /// The node and index of a corner edge.
    pub fn corner_of(&self, e: EdgeIx) -> (OpIx, usize) {
        self.corner_of[e.index()]
    }

    /// Corner edges of node `x`, in order.
    pub fn corners(&self, x: OpIx) -> &[EdgeIx] {
        &self.corners[x.index()]
    }
}

pub fn contour_graph(s: Arc<Species>) -> ContourGraph {
    let up_name = |c: ColorIx| format!("{}{UP}", s.color_name(c));
    let down_name = |c: ColorIx| format!("{}{DOWN}", s.color_name(c));
    let nodes: Vec<String> = s.colors().flat_map(|c| [up_name(c), down_name(c)]).collect();
    let mut edges = Vec::new();
    for x in s.ops() {
        let d = s.op(x);
        let n = d.arity();
        for i in 0..=n {
            let src = if i == 0 {
                up_name(d.output)
            } else {
                down_name(d.inputs[i - 1])
            };
            let tgt = if i == n {
                down_name(d.output)
            } else {
                up_name(d.inputs[i])
            };
            edges.push((corner_name(&d.id, i), src, tgt));
        }
    }
    let graph = Graph::new(nodes, edges).expect("contour names are distinct");
    let up = s.colors().map(|c| graph.node(&up_name(c)).expect("node")).collect();
    let down = s.colors().map(|c| graph.node(&down_name(c)).expect("node")).collect();
    let corners: Vec<Vec<EdgeIx>> = s
        .ops()
        .map(|x| {
            let d = s.op(x);
            (0..=d.arity())
                .map(|i| graph.edge_named(&corner_name(&d.id, i)).expect("corner"))
                .collect()
        })
        .collect();
    let mut corner_of = vec![(OpIx(0), 0); graph.edge_count()];
    for x in s.ops() {
        for (i, e) in corners[x.index()].iter().enumerate() {
            corner_of[e.index()] = (x, i);
        }
    }
    ContourGraph {
        graph: Arc::new(graph),
        species: s,
        up,
        down,
        corners,
        corner_of,
    }
}

/// The grammar over the contour graph sending each node to its own
/// sequence of corners, with color `R` refining `(R↑, R↓)`.
pub fn universal_grammar(s: Arc<Species>, start: &str) -> Result<Cfg> {
    let start = s.require_color(start)?;
    let cg = contour_graph(s.clone());
    universal_over(&cg, start)
}

fn universal_over(cg: &ContourGraph, start: ColorIx) -> Result<Cfg> {
    let s = &cg.species;
    let g = &cg.graph;
    let color_assign = s.colors().map(|c| GapType::new(cg.up(c), cg.down(c))).collect();
    let rule_assign = s
        .ops()
        .map(|x| {
            let segs = cg
                .corners(x)
                .iter()
                .map(|&e| g.path(g.src(e), vec![e]).expect("corner is a path"))
                .collect();
            SplicedArrow::new(segs).expect("at least one corner")
        })
        .collect();
    Cfg::new(g.clone(), s.clone(), start, color_assign, rule_assign)
}

/// The clockwise contour of a closed tree, from `root↑` to `root↓`.
pub fn contour_of_tree(cg: &ContourGraph, t: &OpTree) -> Result<PathArrow> {
    t.check(&cg.species)?;
    if !t.is_closed() {
        return Err(Error::OpenTree);
    }
    let mut edges = Vec::new();
    walk(cg, t, &mut edges);
    let root = t.output(&cg.species);
    cg.graph.path(cg.up(root), edges)
}

fn walk(cg: &ContourGraph, t: &OpTree, out: &mut Vec<EdgeIx>) {
    if let OpTree::Node(x, ch) = t {
        out.push(cg.corner(*x, 0));
        for (i, c) in ch.iter().enumerate() {
            walk(cg, c, out);
            out.push(cg.corner(*x, i + 1));
        }
    }
}

/// The functor from the contour graph of `g`'s species to its base sending
/// corner `x.i` to segment `i` of the rule of `x`.
pub fn q_functor(g: &Cfg) -> PathFunctor {
    q_functor_over(&contour_graph(g.species.clone()), g)
}

fn q_functor_over(cg: &ContourGraph, g: &Cfg) -> PathFunctor {
    let s = &cg.species;
    let mut node_map = vec![NodeIx(0); cg.graph.node_count()];
    for c in s.colors() {
        node_map[cg.up(c).index()] = g.gap(c).left;
        node_map[cg.down(c).index()] = g.gap(c).right;
    }
    let edge_map = cg
        .graph
        .edges()
        .map(|e| {
            let (x, i) = cg.corner_of(e);
            g.rule(x).segments()[i].clone()
        })
        .collect();
    PathFunctor::new(cg.graph.clone(), g.base.clone(), node_map, edge_map).expect("rules are typed by their colors")
}

/// Name of the chromatic color for a gap type.
fn gap_color(g: &Cfg, gap: GapType) -> String {
    format!("({})", gap.render(&g.base))
}

/// Factors the grammar's color assignment through its image: the chromatic
/// grammar has the same nodes and one color `(A,B)` per gap type in use.
pub fn chromatic_factorization(g: &Cfg) -> (Cfg, SpeciesMap) {
    let s = &g.species;
    let names: Vec<String> = s.colors().map(|c| gap_color(g, g.gap(c))).collect();
    let distinct: BTreeSet<&String> = names.iter().collect();
    let species = Arc::new(
        Species::new(
            distinct.iter().map(|n| n.to_string()),
            s.ops().map(|x| {
                let d = s.op(x);
                (
                    d.id.clone(),
                    d.inputs.iter().map(|c| names[c.index()].clone()).collect(),
                    names[d.output.index()].clone(),
                )
            }),
        )
        .expect("node names are unchanged"),
    );
    let color_map: Vec<ColorIx> = s
        .colors()
        .map(|c| species.color(&names[c.index()]).expect("image color"))
        .collect();
    let mut color_assign = vec![g.start_gap(); species.color_count()];
    for c in s.colors() {
        color_assign[color_map[c.index()].index()] = g.gap(c);
    }
    let op_map: Vec<OpIx> = s
        .ops()
        .map(|x| species.op_named(s.op_name(x)).expect("same nodes"))
        .collect();
    let mut rule_assign = vec![g.rule_assign[0].clone(); species.op_count()];
    for x in s.ops() {
        rule_assign[op_map[x.index()].index()] = g.rule(x).clone();
    }
    let chromatic = Cfg::new(
        g.base.clone(),
        species.clone(),
        color_map[g.start.index()],
        color_assign,
        rule_assign,
    )
    .expect("typing is inherited");
    let recolor = SpeciesMap::new(s.clone(), species, color_map, op_map).expect("map of species");
    (chromatic, recolor)
}

/// The contour of the recoloring map, with initial state `S↑` and accepting
/// state `S↓`: it accepts the chromatic contour words that can be colored
/// consistently by the original colors.
pub fn coloring_automaton(g: &Cfg) -> Nfa {
    let (_, recolor) = chromatic_factorization(g);
    coloring_over(
        g,
        &recolor,
        &contour_graph(g.species.clone()),
        &contour_graph(recolor.target.clone()),
    )
}

fn coloring_over(g: &Cfg, recolor: &SpeciesMap, states: &ContourGraph, base: &ContourGraph) -> Nfa {
    let s = &g.species;
    let mut node_map = vec![NodeIx(0); states.graph.node_count()];
    for c in s.colors() {
        let img = recolor.map_color(c);
        node_map[states.up(c).index()] = base.up(img);
        node_map[states.down(c).index()] = base.down(img);
    }
    let edge_map = states
        .graph
        .edges()
        .map(|e| {
            let (x, i) = states.corner_of(e);
            base.corner(recolor.map_op(x), i)
        })
        .collect();
    let hom = GraphHom::new(states.graph.clone(), base.graph.clone(), node_map, edge_map)
        .expect("contour of a map of species");
    Nfa::new(hom, states.up(g.start), states.down(g.start)).expect("states exist")
}

#[derive(Clone, Debug)]
pub struct CsDecomposition {
    pub chromatic: Cfg,
    pub recolor: SpeciesMap,
    /// Universal grammar of the chromatic species.
    pub chromatic_universal: Cfg,
    /// Over the contour graph of the chromatic species.
    pub coloring: Nfa,
    /// From the chromatic contour graph to the original base.
    pub output: PathFunctor,
}

pub fn cs_decompose(g: &Cfg) -> CsDecomposition {
    let (chromatic, recolor) = chromatic_factorization(g);
    let chromatic_cg = contour_graph(chromatic.species.clone());
    let chromatic_universal = universal_over(&chromatic_cg, chromatic.start).expect("start is a color");
    let coloring = coloring_over(g, &recolor, &contour_graph(g.species.clone()), &chromatic_cg);
    let output = q_functor_over(&chromatic_cg, &chromatic);
    CsDecomposition {
        chromatic,
        recolor,
        chromatic_universal,
        coloring,
        output,
    }
}

/// How the left-hand side of the decomposition is enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsRoute {
    /// Enumerate the pullback of the chromatic universal grammar along the
    /// coloring automaton.
    Pullback,
    /// Enumerate the chromatic contour language and filter by the automaton.
    Filter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsReport {
    pub word_bound: usize,
    /// Contour length used for the enumeration.
    pub contour_bound: usize,
    /// Longest minimal contour among words of the language up to the word
    /// bound; any contour bound at least this large makes the check complete.
    pub witness_bound: usize,
    pub from_decomposition: BTreeSet<PathArrow>,
    pub from_grammar: BTreeSet<PathArrow>,
}

impl CsReport {
    pub fn equal(&self) -> bool {
        self.from_decomposition == self.from_grammar
    }
}

impl fmt::Display for CsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equal() {
            write!(f, "EQUAL ({} words)", self.from_grammar.len())
        } else {
            write!(
                f,
                "DIFFERENT ({} from the decomposition, {} from the grammar)",
                self.from_decomposition.len(),
                self.from_grammar.len()
            )
        }
    }
}

/// Longest minimal contour length over the given words of `g`.
pub fn witness_contour_bound<'a>(g: &Cfg, words: impl IntoIterator<Item = &'a PathArrow>) -> usize {
    words
        .into_iter()
        .map(|w| {
            g.min_derivation_cost(w, |x| g.species.arity(x) + 1)
                .expect("enumerated words are derivable")
        })
        .max()
        .unwrap_or(0)
}

/// Compares `output(L(chromatic_universal) ∩ L(coloring))` with `L(g)` on
/// words of length at most `word_bound`. Without an explicit contour bound
/// the witness bound is used.
pub fn cs_verify(
    d: &CsDecomposition,
    g: &Cfg,
    contour_bound: Option<usize>,
    word_bound: usize,
    route: CsRoute,
) -> Result<CsReport> {
    let from_grammar = g.enumerate_language(word_bound);
    let witness_bound = witness_contour_bound(g, &from_grammar);
    let contour_bound = contour_bound.unwrap_or(witness_bound);
    let contours: BTreeSet<PathArrow> = match route {
        CsRoute::Pullback => {
            let output = d.coloring.hom.to_functor().then(&d.output)?;
            let p = pullback_grammar(&d.chromatic_universal, &d.coloring, PullbackOptions::default())?;
            p.enumerate_language_weighted(contour_bound, Some((&output, word_bound)))
                .iter()
                .map(|run| d.coloring.hom.map_path(run))
                .collect()
        }
        CsRoute::Filter => d
            .chromatic_universal
            .enumerate_language_weighted(contour_bound, Some((&d.output, word_bound)))
            .into_iter()
            .filter(|w| d.coloring.accepts(w).unwrap_or(false))
            .collect(),
    };
    let from_decomposition = contours
        .iter()
        .map(|c| d.output.apply(c))
        .collect::<Result<BTreeSet<_>>>()?
        .into_iter()
        .filter(|w| w.len() <= word_bound)
        .collect();
    Ok(CsReport {
        word_bound,
        contour_bound,
        witness_bound,
        from_decomposition,
        from_grammar,
    })
}

/// Renders a contour path as corner names.
pub fn render_contour(cg: &ContourGraph, p: &PathArrow) -> String {
    cg.graph.render_path(p)
}

/// Transitions of an automaton as `(source state, target state, label)`
/// triples of names.
pub fn transition_table(m: &Nfa) -> BTreeSet<(String, String, String)> {
    let states = m.states();
    states
        .edges()
        .map(|d| {
            (
                states.node_name(states.src(d)).to_string(),
                states.node_name(states.tgt(d)).to_string(),
                m.base().edge_name(m.hom.map_edge(d)).to_string(),
            )
        })
        .collect()
}

/// Number of contour words over each word of `g`: for a word `w`, the
/// accepted contours whose output is `w`.
pub fn contour_fiber_sizes(d: &CsDecomposition, contours: &BTreeSet<PathArrow>) -> HashMap<PathArrow, usize> {
    let mut out = HashMap::new();
    for c in contours {
        *out.entry(d.output.apply_unchecked(c)).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn contour_graph_sizes() {
        let bin = contour_graph(Arc::new(fixtures::binary_species()));
        assert_eq!((bin.graph.node_count(), bin.graph.edge_count()), (2, 4));
        let sent = contour_graph(Arc::new(fixtures::sentence_species()));
        assert_eq!((sent.graph.node_count(), sent.graph.edge_count()), (6, 7));
        let empty = contour_graph(Arc::new(
            Species::new(Vec::<String>::new(), Vec::<(String, Vec<String>, String)>::new()).unwrap(),
        ));
        assert_eq!(empty.graph.node_count(), 0);
    }

    #[test]
    fn contour_of_the_example_tree() {
        let s = Arc::new(fixtures::contour_species());
        let cg = contour_graph(s.clone());
        let t = fixtures::contour_tree(&s);
        let c = contour_of_tree(&cg, &t).unwrap();
        assert_eq!(
            render_contour(&cg, &c),
            "a.0 b.0 a.1 c.0 d.0 c.1 e.0 c.2 a.2 f.0 g.0 f.1 a.3"
        );
        let u = universal_grammar(s.clone(), "1").unwrap();
        assert_eq!(u.yield_path(&t).unwrap(), c);
        let b = OpTree::parse(&s, "b").unwrap();
        assert_eq!(render_contour(&cg, &contour_of_tree(&cg, &b).unwrap()), "b.0");
    }

    #[test]
    fn universal_productions() {
        let u = universal_grammar(Arc::new(fixtures::sentence_species()), "S").unwrap();
        assert_eq!(
            u.productions(),
            vec![
                "S -> x1.0 NP x1.1 VP x1.2",
                "NP -> x2.0",
                "NP -> x3.0",
                "VP -> x4.0 NP x4.1"
            ]
        );
        let b = universal_grammar(Arc::new(fixtures::binary_species()), "*").unwrap();
        assert_eq!(b.productions(), vec!["* -> n0.0", "* -> n2.0 * n2.1 * n2.2"]);
    }

    #[test]
    fn q_functor_of_sentence_grammar() {
        let g = fixtures::sentence_grammar();
        let q = q_functor(&g);
        let show = |name: &str| {
            let e = q.source.edge_named(name).unwrap();
            g.base.render_path(q.map_edge(e))
        };
        assert_eq!(show("x1.1"), "sp");
        assert_eq!(show("x4.0"), "loves sp");
        assert_eq!(show("x2.0"), "mom");
        assert_eq!(show("x3.0"), "tom");
        for other in ["x1.0", "x1.2", "x4.1"] {
            assert_eq!(show(other), "id[*]");
        }
        let cg = contour_graph(g.species.clone());
        let t = fixtures::sentence_tree(&g.species);
        let c = contour_of_tree(&cg, &t).unwrap();
        assert_eq!(q.apply(&c).unwrap(), g.yield_path(&t).unwrap());
    }

    #[test]
    fn chromatic_sentence_grammar() {
        let g = fixtures::sentence_grammar();
        let (c, recolor) = chromatic_factorization(&g);
        assert_eq!(c.species.color_count(), 1);
        assert_eq!(c.species.op_count(), 4);
        assert!(c.is_chromatic());
        assert!(recolor.color_fibers().iter().all(|f| !f.is_empty()));
        let lang = g.enumerate_language(6);
        assert!(lang.is_subset(&c.enumerate_language(6)));
    }

    #[test]
    fn coloring_automaton_of_sentence_grammar() {
        let g = fixtures::sentence_grammar();
        let m = coloring_automaton(&g);
        assert_eq!(m.states().node_count(), 6);
        let table = transition_table(&m);
        let want: BTreeSet<(String, String, String)> = [
            ("S↑", "NP↑", "x1.0"),
            ("NP↑", "NP↓", "x2.0"),
            ("NP↑", "NP↓", "x3.0"),
            ("NP↓", "VP↑", "x1.1"),
            ("VP↑", "NP↑", "x4.0"),
            ("NP↓", "VP↓", "x4.1"),
            ("VP↓", "S↓", "x1.2"),
        ]
        .iter()
        .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
        .collect();
        assert_eq!(table, want);
        assert_eq!(m.states().node_name(m.q0), "S↑");
        assert_eq!(m.states().node_name(m.qf), "S↓");
    }

    #[test]
    fn cs_on_sentence_grammar_both_routes() {
        let g = fixtures::sentence_grammar();
        let d = cs_decompose(&g);
        let a = cs_verify(&d, &g, None, 5, CsRoute::Pullback).unwrap();
        let b = cs_verify(&d, &g, Some(13), 5, CsRoute::Filter).unwrap();
        assert!(a.equal() && b.equal());
        assert_eq!(a.from_grammar.len(), 4);
        assert_eq!(a.witness_bound, 7);
        assert_eq!(a.to_string(), "EQUAL (4 words)");
        assert_eq!(b.from_decomposition, a.from_decomposition);
    }

    #[test]
    fn cs_on_ambiguous_grammar() {
        let g = crate::grammar::parse_classical("S -> S S | a | A b\nA -> a | S").unwrap();
        let d = cs_decompose(&g);
        for route in [CsRoute::Pullback, CsRoute::Filter] {
            assert!(cs_verify(&d, &g, None, 5, route).unwrap().equal());
        }
    }
}
