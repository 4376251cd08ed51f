//! Bottom-up tree automata: evaluating Boolean formulas, and intersecting a
//! tree grammar with an automaton.

use splicetool::tree_automaton::{intersect_gcfg_regular, GCfgFree};
use splicetool::{fixtures, OpTree};

fn main() -> splicetool::Result<()> {
    let a = fixtures::boolean_automaton();
    let s = a.base().clone();
    for text in [
        "and(true, true)",
        "and(true, and(false, true))",
        "and(and(true, true), true)",
    ] {
        let t = OpTree::parse(&s, text)?;
        let runs = a.runs_tree(&t)?;
        let verdict = if a.accepts_tree(&t)? { "true" } else { "false" };
        println!("{text}: {verdict}");
        for r in runs {
            println!("  run {}", r.render(a.states()));
        }
    }

    // All formulas, cut down to the true ones.
    let all = GCfgFree::all_trees(s.clone(), s.require_color("b")?)?;
    let true_ones = intersect_gcfg_regular(&all, &a)?.trim()?;
    println!("true formulas with at most 5 nodes:");
    for t in true_ones.enumerate(5) {
        println!("  {}", t.render(&s));
    }
    Ok(())
}
