//! Bracket words for tree contours: the subdividing translation from
//! contour words to Dyck words, its two left inverses, the grammars of
//! species-shaped and unrestricted Dyck words, and the index automaton.

use std::sync::Arc;

use crate::automaton::{ClassicalNfa, Nfa};
use crate::contour::{contour_graph, universal_grammar, ContourGraph};
use crate::error::{Error, Result};
use crate::grammar::{image, Cfg, CfgBuilder};
use crate::graph::{EdgeIx, Graph, PathArrow, PathFunctor};
use crate::species::{OpIx, Species};
use crate::spliced::{GapType, SplicedArrow};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bracket {
    Open(OpIx, usize),
    Close(OpIx, usize),
}

pub fn open_name(x: &str, i: usize) -> String {
    format!("[{x}.{i}")
}

pub fn close_name(x: &str, i: usize) -> String {
    format!("]{x}.{i}")
}

/// One pair of brackets per corner of a species, as a one-object graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketAlphabet {
    pub species: Arc<Species>,
    pub graph: Arc<Graph>,
    letters: Vec<Bracket>,
}

impl BracketAlphabet {
    pub fn new(species: Arc<Species>) -> BracketAlphabet {
        let mut names = Vec::new();
        for x in species.ops() {
            let id = species.op_name(x);
            for i in 0..=species.arity(x) {
                names.push((open_name(id, i), Bracket::Open(x, i)));
                names.push((close_name(id, i), Bracket::Close(x, i)));
            }
        }
        let graph =
            Graph::bouquet(&names.iter().map(|n| n.0.clone()).collect::<Vec<_>>()).expect("bracket names are distinct");
        let mut letters = vec![Bracket::Open(OpIx(0), 0); graph.edge_count()];
        for (n, b) in names {
            letters[graph.edge_named(&n).expect("letter").index()] = b;
        }
        BracketAlphabet {
            species,
            graph: Arc::new(graph),
            letters,
        }
    }

    /// Number of bracket pairs.
    pub fn pairs(&self) -> usize {
        self.letters.len() / 2
    }

    pub fn bracket(&self, e: EdgeIx) -> Bracket {
        self.letters[e.index()]
    }

    pub fn letter(&self, b: Bracket) -> EdgeIx {
        let name = self.name(b);
        self.graph.edge_named(&name).expect("letter of this alphabet")
    }

    pub fn name(&self, b: Bracket) -> String {
        match b {
            Bracket::Open(x, i) => open_name(self.species.op_name(x), i),
            Bracket::Close(x, i) => close_name(self.species.op_name(x), i),
        }
    }

    fn word(&self, brackets: &[Bracket]) -> PathArrow {
        let star = self.graph.node("*").expect("bouquet node");
        self.graph
            .path(star, brackets.iter().map(|&b| self.letter(b)).collect())
            .expect("letters are loops")
    }
}

/// The subdividing translation as a functor from the contour graph to the
/// bracket bouquet, sending each corner to two brackets.
pub fn s_functor(cg: &ContourGraph, alphabet: &BracketAlphabet) -> PathFunctor {
    let s = &cg.species;
    let star = alphabet.graph.node("*").expect("bouquet node");
    let edge_map = cg
        .graph
        .edges()
        .map(|e| {
            let (x, i) = cg.corner_of(e);
            let n = s.arity(x);
            let pair = if n == 0 {
                [Bracket::Open(x, 0), Bracket::Close(x, 0)]
            } else if i == 0 {
                [Bracket::Open(x, 0), Bracket::Open(x, 1)]
            } else if i < n {
                [Bracket::Close(x, i), Bracket::Open(x, i + 1)]
            } else {
                [Bracket::Close(x, n), Bracket::Close(x, 0)]
            };
            alphabet.word(&pair)
        })
        .collect();
    PathFunctor::new(
        cg.graph.clone(),
        alphabet.graph.clone(),
        vec![star; cg.graph.node_count()],
        edge_map,
    )
    .expect("corners go to loops")
}

pub fn s_translate(cg: &ContourGraph, alphabet: &BracketAlphabet, w: &PathArrow) -> Result<PathArrow> {
    s_functor(cg, alphabet).apply(w)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Side {
    /// Keeps `[x.0` and `]x.i` for `i > 0`.
    Green,
    /// Keeps `]x.0`, read as the last corner of `x`, and `[x.i` for `i > 0`,
    /// read as corner `i - 1`.
    Red,
}

/// Reads corners back from brackets, erasing the other half of each pair.
/// Fails when the kept corners do not form a path of the contour graph.
pub fn inverse_translate(
    cg: &ContourGraph,
    alphabet: &BracketAlphabet,
    w: &PathArrow,
    side: Side,
) -> Result<PathArrow> {
    let corners: Vec<EdgeIx> = w
        .edges()
        .iter()
        .filter_map(|&e| match (alphabet.bracket(e), side) {
            (Bracket::Open(x, 0), Side::Green) => Some(cg.corner(x, 0)),
            (Bracket::Close(x, i), Side::Green) if i > 0 => Some(cg.corner(x, i)),
            (Bracket::Close(x, 0), Side::Red) => Some(cg.corner(x, cg.species.arity(x))),
            (Bracket::Open(x, i), Side::Red) if i > 0 => Some(cg.corner(x, i - 1)),
            _ => None,
        })
        .collect();
    let first = corners
        .first()
        .ok_or_else(|| Error::Precondition("no corners to read back".into()))?;
    cg.graph.path(cg.graph.src(*first), corners)
}

/// Whether every closing bracket matches the nearest unmatched opening one
/// and nothing is left open.
pub fn is_balanced(alphabet: &BracketAlphabet, w: &PathArrow) -> bool {
    let mut stack = Vec::new();
    for &e in w.edges() {
        match alphabet.bracket(e) {
            Bracket::Open(x, i) => stack.push((x, i)),
            Bracket::Close(x, i) => {
                if stack.pop() != Some((x, i)) {
                    return false;
                }
            }
        }
    }
    stack.is_empty()
}

/// Grammar of the species-shaped Dyck words: the image of the universal
/// grammar under the subdividing translation, with rules
/// `R -> [x.0 [x.1 R1 ]x.1 [x.2 … Rn ]x.n ]x.0`.
pub fn sdyck_grammar(s: Arc<Species>, start: &str) -> Result<Cfg> {
    let universal = universal_grammar(s.clone(), start)?;
    let cg = contour_graph(s.clone());
    let alphabet = BracketAlphabet::new(s);
    image(&universal, &s_functor(&cg, &alphabet))
}

/// Grammar of all balanced words: `S -> ε` and `S -> [b S ]b S` per pair.
pub fn dyck_k_grammar(alphabet: &BracketAlphabet) -> Result<Cfg> {
    let g = &alphabet.graph;
    let star = g.node("*").expect("bouquet node");
    let gap = GapType::new(star, star);
    let id = PathArrow::identity(star);
    let mut b = CfgBuilder::default();
    b.color("S", gap);
    b.op("empty", vec![], "S", SplicedArrow::constant(id.clone()));
    for e in g.edges() {
        if let Bracket::Open(x, i) = alphabet.bracket(e) {
            let close = alphabet.letter(Bracket::Close(x, i));
            let rule = SplicedArrow::new(vec![
                g.path(star, vec![e]).expect("loop"),
                g.path(star, vec![close]).expect("loop"),
                id.clone(),
            ])?;
            b.op(
                format!("pair{}", g.edge_name(e)),
                vec!["S".to_string(), "S".to_string()],
                "S",
                rule,
            );
        }
    }
    b.finish(g.clone(), "S")
}

const START_STATE: &str = "start";

fn after(alphabet: &BracketAlphabet, b: Bracket) -> String {
    format!("after {}", alphabet.name(b))
}

/// Whether `next` may follow `prev` (or start the word when `prev` is
/// `None`). Openings of a subtree must produce the color its gap expects.
fn may_follow(s: &Species, start: usize, prev: Option<Bracket>, next: Bracket) -> bool {
    match (prev, next) {
        (None, Bracket::Open(y, 0)) => s.op(y).output.index() == start,
        (None, _) => false,
        (Some(Bracket::Open(x, 0)), n) => {
            if s.arity(x) == 0 {
                n == Bracket::Close(x, 0)
            } else {
                n == Bracket::Open(x, 1)
            }
        }
        (Some(Bracket::Open(x, i)), Bracket::Open(y, 0)) => s.op(y).output == s.op(x).inputs[i - 1],
        (Some(Bracket::Open(_, _)), _) => false,
        (Some(Bracket::Close(_, 0)), n) => matches!(n, Bracket::Close(_, _)),
        (Some(Bracket::Close(x, i)), n) => {
            if i < s.arity(x) {
                n == Bracket::Open(x, i + 1)
            } else {
                n == Bracket::Close(x, 0)
            }
        }
    }
}

/// The automaton checking the local adjacency conditions that cut the
/// species-shaped Dyck words out of all balanced words. Its state records
/// the last letter read.
pub fn index_automaton(s: Arc<Species>, start: &str) -> Result<ClassicalNfa> {
    let start = s.require_color(start)?.index();
    let alphabet = BracketAlphabet::new(s.clone());
    let brackets: Vec<Bracket> = alphabet.graph.edges().map(|e| alphabet.bracket(e)).collect();
    let mut states = vec![START_STATE.to_string()];
    states.extend(brackets.iter().map(|&b| after(&alphabet, b)));
    let mut transitions = Vec::new();
    let sources = std::iter::once(None).chain(brackets.iter().map(|&b| Some(b)));
    for prev in sources {
        let from = prev.map_or(START_STATE.to_string(), |b| after(&alphabet, b));
        for &next in &brackets {
            if may_follow(&s, start, prev, next) {
                transitions.push((from.clone(), alphabet.name(next), after(&alphabet, next)));
            }
        }
    }
    let accepting = brackets
        .iter()
        .filter(|b| matches!(b, Bracket::Close(x, 0) if s.op(*x).output.index() == start))
        .map(|&b| after(&alphabet, b))
        .collect();
    ClassicalNfa::new(
        brackets.iter().map(|&b| alphabet.name(b)).collect(),
        states,
        transitions,
        vec![START_STATE.to_string()],
        accepting,
    )
}

/// The image of an automaton over a contour graph under the subdividing
/// translation: each transition becomes two through a fresh middle state.
pub fn subdivide_nfa(m: &Nfa, cg: &ContourGraph, alphabet: &BracketAlphabet) -> Result<ClassicalNfa> {
    if **m.base() != *cg.graph {
        return Err(Error::Precondition("automaton is not over this contour graph".into()));
    }
    let s = s_functor(cg, alphabet);
    let states = m.states();
    let mut names: Vec<String> = states.nodes().map(|q| states.node_name(q).to_string()).collect();
    let mut transitions = Vec::new();
    for d in states.edges() {
        let mid = format!("{}/mid", states.edge_name(d));
        names.push(mid.clone());
        let image = s.map_edge(m.hom.map_edge(d));
        let [first, second] = [image.edges()[0], image.edges()[1]];
        transitions.push((
            states.node_name(states.src(d)).to_string(),
            alphabet.graph.edge_name(first).to_string(),
            mid.clone(),
        ));
        transitions.push((
            mid,
            alphabet.graph.edge_name(second).to_string(),
            states.node_name(states.tgt(d)).to_string(),
        ));
    }
    ClassicalNfa::new(
        alphabet
            .graph
            .edges()
            .map(|e| alphabet.graph.edge_name(e).to_string())
            .collect(),
        names,
        transitions,
        vec![states.node_name(m.q0).to_string()],
        vec![states.node_name(m.qf).to_string()],
    )
}

/// Letters of a word over the bracket bouquet.
pub fn letters(alphabet: &BracketAlphabet, w: &PathArrow) -> Vec<String> {
    w.edges()
        .iter()
        .map(|&e| alphabet.graph.edge_name(e).to_string())
        .collect()
}

/// The word over the bracket bouquet spelled by `letters`.
pub fn word_of<S: AsRef<str>>(alphabet: &BracketAlphabet, letters: &[S]) -> Result<PathArrow> {
    alphabet.graph.path_from_names("*", letters)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::contour::{chromatic_factorization, contour_of_tree, cs_decompose};
    use crate::fixtures;
    use crate::species::OpTree;

    fn setup(s: Species) -> (Arc<Species>, ContourGraph, BracketAlphabet) {
        let s = Arc::new(s);
        (s.clone(), contour_graph(s.clone()), BracketAlphabet::new(s))
    }

    #[test]
    fn constant_corner() {
        let (s, cg, a) = setup(fixtures::binary_species());
        let n0 = OpTree::parse(&s, "n0").unwrap();
        let c = contour_of_tree(&cg, &n0).unwrap();
        let d = s_translate(&cg, &a, &c).unwrap();
        assert_eq!(letters(&a, &d), vec!["[n0.0", "]n0.0"]);
    }

    #[test]
    fn example_tree_round_trip() {
        let (s, cg, a) = setup(fixtures::contour_species());
        let t = fixtures::contour_tree(&s);
        let c = contour_of_tree(&cg, &t).unwrap();
        let d = s_translate(&cg, &a, &c).unwrap();
        assert_eq!(d.len(), 26);
        assert!(is_balanced(&a, &d));
        assert_eq!(inverse_translate(&cg, &a, &d, Side::Green).unwrap(), c);
        assert_eq!(inverse_translate(&cg, &a, &d, Side::Red).unwrap(), c);
        let index = index_automaton(s.clone(), "1").unwrap();
        assert!(index.accepts(&letters(&a, &d)));
        assert_eq!(a.pairs(), 3 + 1 + 2 + 1 + 1 + 1 + 1 + 3);
    }

    #[test]
    fn index_rejects_mismatched_constant() {
        let s = Arc::new(fixtures::contour_species());
        let index = index_automaton(s, "1").unwrap();
        assert!(!index.accepts(&["[b.0", "]d.0"]));
        assert!(index.accepts(&["[b.0", "]b.0"]));
        assert!(!index.accepts::<&str>(&[]));
    }

    #[test]
    fn non_image_words_fail_path_validation() {
        let (_, cg, a) = setup(fixtures::sentence_species());
        let w = word_of(&a, &["[x2.0", "]x2.0", "[x3.0", "]x3.0"]).unwrap();
        assert!(is_balanced(&a, &w));
        assert!(inverse_translate(&cg, &a, &w, Side::Green).is_err());
    }

    #[test]
    fn catalan_counts() {
        let s = Species::new(["*"], [("x".to_string(), vec![], "*".to_string())]).unwrap();
        let a = BracketAlphabet::new(Arc::new(s));
        assert_eq!(a.pairs(), 1);
        let d = dyck_k_grammar(&a).unwrap();
        let lang = d.enumerate_language(6);
        let by_len: Vec<usize> = [0, 2, 4, 6]
            .iter()
            .map(|&n| lang.iter().filter(|w| w.len() == n).count())
            .collect();
        assert_eq!(by_len, vec![1, 1, 2, 5]);
        assert!(lang.iter().all(|w| is_balanced(&a, w)));
    }

    #[test]
    fn sdyck_is_translated_contour_language() {
        let (s, cg, a) = setup(fixtures::binary_species());
        let g = sdyck_grammar(s.clone(), "*").unwrap();
        assert_eq!(g.species.op_count(), 2);
        let u = universal_grammar(s.clone(), "*").unwrap();
        let sf = s_functor(&cg, &a);
        let translated: BTreeSet<PathArrow> = u.enumerate_language(7).iter().map(|c| sf.apply(c).unwrap()).collect();
        assert_eq!(g.enumerate_language(14), translated);
        let dk = dyck_k_grammar(&a).unwrap();
        assert!(g.enumerate_language(10).iter().all(|w| dk.accepts(w)));
    }

    #[test]
    fn classical_decomposition_of_sentence_grammar() {
        let g = fixtures::sentence_grammar();
        let d = cs_decompose(&g);
        let (chromatic, _) = chromatic_factorization(&g);
        let start = chromatic.species.color_name(chromatic.start).to_string();
        let sd = sdyck_grammar(chromatic.species.clone(), &start).unwrap();
        let cg = contour_graph(chromatic.species.clone());
        let a = BracketAlphabet::new(chromatic.species.clone());
        let regular = subdivide_nfa(&d.coloring, &cg, &a).unwrap();
        let words: BTreeSet<PathArrow> = sd
            .enumerate_language(14)
            .into_iter()
            .filter(|w| regular.accepts(&letters(&a, w)))
            .map(|w| {
                let c = inverse_translate(&cg, &a, &w, Side::Green).unwrap();
                d.output.apply(&c).unwrap()
            })
            .filter(|w| w.len() <= 5)
            .collect();
        assert_eq!(words, g.enumerate_language(5));
    }

    /// Whether some extension within `max_len` letters balances `prefix`.
    fn could_balance(prefix: &[String], max_len: usize) -> bool {
        let mut stack = Vec::new();
        for l in prefix {
            if let Some(body) = l.strip_prefix('[') {
                stack.push(body);
            } else if stack.pop() != l.strip_prefix(']') {
                return false;
            }
        }
        prefix.len() + stack.len() <= max_len
    }

    #[test]
    fn sdyck_is_dyck_cut_by_index_automaton() {
        for (species, start, max_len) in [
            (fixtures::binary_species(), "*", 12),
            (fixtures::sentence_species(), "S", 14),
            (fixtures::contour_species(), "1", 12),
        ] {
            let s = Arc::new(species);
            let a = BracketAlphabet::new(s.clone());
            let dk = dyck_k_grammar(&a).unwrap();
            let index = index_automaton(s.clone(), start).unwrap();
            let cut: BTreeSet<Vec<String>> = index
                .enumerate_where(max_len, |prefix| could_balance(prefix, max_len))
                .into_iter()
                .filter(|w| {
                    let w = word_of(&a, w).unwrap();
                    is_balanced(&a, &w) && dk.accepts(&w)
                })
                .collect();
            let sd: BTreeSet<Vec<String>> = sdyck_grammar(s.clone(), start)
                .unwrap()
                .enumerate_language(max_len)
                .iter()
                .map(|w| letters(&a, w))
                .collect();
            assert!(!sd.is_empty());
            assert_eq!(cut, sd);
        }
    }
}
