//! Splitting a grammar into three simple pieces: the tree-contour grammar
//! of its chromatic form, a finite coloring automaton over contours, and an
//! output functor. Composing them gives back the grammar's language.

use splicetool::contour::{cs_decompose, cs_verify, transition_table, CsRoute};
use splicetool::grammar::parse_classical;
use splicetool::{fixtures, Cfg};

fn show(name: &str, g: &Cfg, word_bound: usize) -> splicetool::Result<()> {
    let d = cs_decompose(g);
    println!("== {name}");
    println!("contour grammar:");
    for p in d.chromatic_universal.productions() {
        println!("  {p}");
    }
    println!("coloring automaton:");
    for (from, to, corner) in transition_table(&d.coloring) {
        println!("  {from} --{corner}--> {to}");
    }
    for route in [CsRoute::Pullback, CsRoute::Filter] {
        let rep = cs_verify(&d, g, None, word_bound, route)?;
        println!("{route:?} route, words up to {word_bound}: {rep}");
    }
    Ok(())
}

fn main() -> splicetool::Result<()> {
    show("sentences", &fixtures::sentence_grammar(), 5)?;
    show("ambiguous", &parse_classical("S -> S S | a | A b\nA -> a | S")?, 6)?;
    Ok(())
}
