//! Intersecting a context-free grammar with a finite automaton: balanced
//! brackets nested at most two deep.

use splicetool::automaton::ClassicalNfa;
use splicetool::grammar::{parse_classical, union};
use splicetool::intersection::{intersect_cfg_regular, pullback_grammar, PullbackOptions};

fn main() -> splicetool::Result<()> {
    let dyck = parse_classical("S -> [ S ] S | ε")?;
    let s = |x: &str| x.to_string();
    let depth = ClassicalNfa::new(
        vec![s("["), s("]")],
        vec![s("d0"), s("d1"), s("d2")],
        vec![
            (s("d0"), s("["), s("d1")),
            (s("d1"), s("["), s("d2")),
            (s("d1"), s("]"), s("d0")),
            (s("d2"), s("]"), s("d1")),
        ],
        vec![s("d0")],
        vec![s("d0")],
    )?;
    let automata = depth.to_nfas(dyck.base.clone())?;

    // The grammar of runs: colors are triples `state|color|state`.
    let runs = pullback_grammar(&dyck, &automata[0], PullbackOptions::default())?;
    println!("pullback grammar:");
    for p in runs.productions() {
        println!("  {p}");
    }

    let parts = automata
        .iter()
        .map(|m| intersect_cfg_regular(&dyck, m, PullbackOptions::default()))
        .collect::<splicetool::Result<Vec<_>>>()?;
    let shallow = union(&parts)?;
    println!("words up to length 8:");
    for w in shallow.enumerate_language(8) {
        let text = if w.is_identity() {
            "ε".to_string()
        } else {
            dyck.base.render_path(&w)
        };
        println!("  {text}");
    }

    // Same answer as filtering the grammar's words through the automaton.
    let filtered: Vec<_> = dyck
        .enumerate_language(8)
        .into_iter()
        .filter(|w| depth.accepts(&dyck.base.edge_names(w)))
        .collect();
    assert_eq!(filtered, shallow.enumerate_language(8).into_iter().collect::<Vec<_>>());
    Ok(())
}
