//! Small named grammars, species and automata used by tests and examples.

use std::collections::HashMap;
use std::sync::Arc;

use crate::automaton::Nfa;
use crate::grammar::{parse_classical, Cfg};
use crate::graph::{Graph, GraphHom};
use crate::species::{OpTree, Species, SpeciesMap};
use crate::tree_automaton::TreeNfa;

fn sig(id: &str, inputs: &[&str], output: &str) -> (String, Vec<String>, String) {
    (
        id.to_string(),
        inputs.iter().map(|s| s.to_string()).collect(),
        output.to_string(),
    )
}

/// One color `*`, a binary node `n2` and a constant `n0`.
pub fn binary_species() -> Species {
    Species::new(["*"], [sig("n2", &["*", "*"], "*"), sig("n0", &[], "*")]).expect("valid species")
}

/// `x1 : NP, VP → S`, `x2, x3 : → NP`, `x4 : NP → VP`.
pub fn sentence_species() -> Species {
    Species::new(
        ["S", "NP", "VP"],
        [
            sig("x1", &["NP", "VP"], "S"),
            sig("x2", &[], "NP"),
            sig("x3", &[], "NP"),
            sig("x4", &["NP"], "VP"),
        ],
    )
    .expect("valid species")
}

/// The sentence grammar over the bouquet `{mom, tom, loves, sp}`:
/// `x1 ↦ ε - sp - ε`, `x2 ↦ mom`, `x3 ↦ tom`, `x4 ↦ loves·sp - ε`.
pub fn sentence_grammar() -> Cfg {
    let base = Arc::new(Graph::bouquet(&["mom", "tom", "loves", "sp"]).expect("bouquet"));
    let star = ("*".to_string(), "*".to_string());
    let colors: HashMap<String, (String, String)> = ["S", "NP", "VP"]
        .iter()
        .map(|c| (c.to_string(), star.clone()))
        .collect();
    let seg = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let rules: HashMap<String, Vec<Vec<String>>> = [
        ("x1", vec![seg(&[]), seg(&["sp"]), seg(&[])]),
        ("x2", vec![seg(&["mom"])]),
        ("x3", vec![seg(&["tom"])]),
        ("x4", vec![seg(&["loves", "sp"]), seg(&[])]),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    Cfg::from_names(base, Arc::new(sentence_species()), "S", &colors, &rules).expect("valid grammar")
}

/// `x1(x2, x4(x3))`, deriving "mom sp loves sp tom".
pub fn sentence_tree(s: &Species) -> OpTree {
    OpTree::parse(s, "x1(x2, x4(x3))").expect("well-typed tree")
}

/// Monochrome species of the contour example: `a` ternary, `c` binary,
/// `f` unary, and constants `b, d, e, g`, all of color `1`.
pub fn contour_species() -> Species {
    Species::new(
        ["1"],
        [
            sig("a", &["1", "1", "1"], "1"),
            sig("b", &[], "1"),
            sig("c", &["1", "1"], "1"),
            sig("d", &[], "1"),
            sig("e", &[], "1"),
            sig("f", &["1"], "1"),
            sig("g", &[], "1"),
        ],
    )
    .expect("valid species")
}

/// `a(b, c(d, e), f(g))`.
pub fn contour_tree(s: &Species) -> OpTree {
    OpTree::parse(s, "a(b, c(d, e), f(g))").expect("well-typed tree")
}

/// `S -> ε | [ S ] S` over the bouquet `{[, ]}`.
pub fn dyck_grammar() -> Cfg {
    parse_classical("S -> [ S ] S | ε").expect("valid grammar")
}

fn automaton(
    base: Arc<Graph>,
    states: &[(&str, &str)],
    transitions: &[(&str, &str, &str, &str)],
    q0: &str,
    qf: &str,
) -> Nfa {
    let graph = Arc::new(
        Graph::new(
            states.iter().map(|s| s.0),
            transitions
                .iter()
                .map(|t| (t.0.to_string(), t.1.to_string(), t.2.to_string())),
        )
        .expect("valid state graph"),
    );
    let nodes: HashMap<String, String> = states.iter().map(|(q, b)| (q.to_string(), b.to_string())).collect();
    let edges: HashMap<String, String> = transitions.iter().map(|t| (t.0.to_string(), t.3.to_string())).collect();
    let hom = GraphHom::from_names(graph.clone(), base, &nodes, &edges).expect("valid homomorphism");
    Nfa::new(hom, graph.node(q0).expect("q0"), graph.node(qf).expect("qf")).expect("valid automaton")
}

/// Over the bouquet `{a, b}`: two runs `q0 → q1 → qf` and `q0 → q2 → qf`
/// over `a b`.
pub fn two_runs_automaton() -> Nfa {
    let base = Arc::new(Graph::bouquet(&["a", "b"]).expect("bouquet"));
    automaton(
        base,
        &[("q0", "*"), ("q1", "*"), ("q2", "*"), ("qf", "*")],
        &[
            ("t1", "q0", "q1", "a"),
            ("t2", "q0", "q2", "a"),
            ("t3", "q1", "qf", "b"),
            ("t4", "q2", "qf", "b"),
        ],
        "q0",
        "qf",
    )
}

/// Accepts the words over `letters` whose length is divisible by `modulus`.
pub fn parity_automaton(letters: &[&str], modulus: usize) -> Nfa {
    let base = Arc::new(Graph::bouquet(letters).expect("bouquet"));
    let names: Vec<String> = (0..modulus).map(|k| format!("p{k}")).collect();
    let states: Vec<(&str, &str)> = names.iter().map(|n| (n.as_str(), "*")).collect();
    let edge_names: Vec<(String, usize, usize, &str)> = (0..modulus)
        .flat_map(|k| {
            letters
                .iter()
                .map(move |l| (format!("{l}{k}"), k, (k + 1) % modulus, *l))
        })
        .collect();
    let transitions: Vec<(&str, &str, &str, &str)> = edge_names
        .iter()
        .map(|(n, k, j, l)| (n.as_str(), names[*k].as_str(), names[*j].as_str(), *l))
        .collect();
    automaton(base, &states, &transitions, "p0", "p0")
}

/// Ranked alphabet `and : b, b → b` and constants `true`, `false`.
pub fn boolean_species() -> Species {
    Species::new(
        ["b"],
        [
            sig("and", &["b", "b"], "b"),
            sig("true", &[], "b"),
            sig("false", &[], "b"),
        ],
    )
    .expect("valid species")
}

fn boolean_states(duplicate_true: bool) -> TreeNfa {
    let base = Arc::new(boolean_species());
    let mut ops = vec![
        (sig("and/TT", &["T", "T"], "T"), "and"),
        (sig("and/TF", &["T", "F"], "F"), "and"),
        (sig("and/FT", &["F", "T"], "F"), "and"),
        (sig("and/FF", &["F", "F"], "F"), "and"),
        (sig("true", &[], "T"), "true"),
        (sig("false", &[], "F"), "false"),
    ];
    if duplicate_true {
        ops.push((sig("true'", &[], "T"), "true"));
    }
    let states = Arc::new(Species::new(["T", "F"], ops.iter().map(|o| o.0.clone())).expect("valid states"));
    let colors: HashMap<String, String> = [("T", "b"), ("F", "b")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let nodes: HashMap<String, String> = ops.iter().map(|(s, b)| (s.0.clone(), b.to_string())).collect();
    let map = SpeciesMap::from_names(states.clone(), base, &colors, &nodes).expect("valid map");
    TreeNfa::new(map, states.require_color("T").expect("T")).expect("valid automaton")
}

/// Evaluates `and`/`true`/`false` terms; the root state `T` accepts the
/// terms that evaluate to true.
pub fn boolean_automaton() -> TreeNfa {
    boolean_states(false)
}

/// As [`boolean_automaton`] with a second transition `true'` for `true`.
pub fn boolean_automaton_with_duplicate_true() -> TreeNfa {
    boolean_states(true)
}
