//! Closure operations on grammars (union, spliced concatenation, image
//! under a functor) and runs of a word automaton.

use std::sync::Arc;

use splicetool::grammar::{image, parse_classical, splice_concat, union};
use splicetool::{fixtures, Graph, PathFunctor, SplicedArrow};

fn show(title: &str, g: &splicetool::Cfg, bound: usize) {
    let words: Vec<String> = g
        .enumerate_language(bound)
        .iter()
        .map(|w| {
            if w.is_identity() {
                "ε".into()
            } else {
                g.base.render_path(w)
            }
        })
        .collect();
    println!("{title}: {}", words.join(", "));
}

fn main() -> splicetool::Result<()> {
    let ab = parse_classical("S -> a S b | ε")?;
    let ba = parse_classical("S -> b T a | b a\nT -> a | b")?;
    show("aⁿbⁿ", &ab, 6);
    show("b?a", &ba, 6);
    show("union", &union(&[ab.clone(), ba.clone()])?, 6);

    // a ⟨aⁿbⁿ⟩ a ⟨b?a⟩ b
    let seg = |names: &[&str]| ab.base.path_from_names("*", names);
    let frame = SplicedArrow::new(vec![seg(&["a"])?, seg(&["a"])?, seg(&["b"])?])?;
    show(
        "spliced",
        &splice_concat(ab.base.clone(), &frame, &[ab.clone(), ba])?,
        7,
    );

    // Image under the functor doubling every letter.
    let target = Arc::new(Graph::bouquet(&["a", "b"])?);
    let doubled_edges = ab
        .base
        .edges()
        .map(|e| {
            let letter = ab.base.edge_name(e);
            target.path_from_names("*", &[letter, letter])
        })
        .collect::<splicetool::Result<Vec<_>>>()?;
    let star = target.require_node("*")?;
    let double = PathFunctor::new(ab.base.clone(), target, vec![star], doubled_edges)?;
    show("doubled", &image(&ab, &double)?, 8);

    // A word with two runs through an automaton.
    let m = fixtures::two_runs_automaton();
    let w = m.base().parse_path("a b", None)?;
    for run in m.runs(&w)? {
        println!("run over `a b`: {}", m.states().render_path(&run));
    }
    println!("determinism: {:?}", m.determinism());
    Ok(())
}
