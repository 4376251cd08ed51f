//! Contour words: walking around a tree, the universal grammar that
//! generates such walks, and how a grammar's output functor turns a walk
//! into the tree's yield.

use std::sync::Arc;

use splicetool::contour::{contour_graph, contour_of_tree, q_functor, render_contour, universal_grammar};
use splicetool::{fixtures, OpTree, Species};

fn sig(x: &str, inputs: &[&str]) -> (String, Vec<String>, String) {
    (
        x.to_string(),
        inputs.iter().map(|c| c.to_string()).collect(),
        "1".to_string(),
    )
}

fn main() -> splicetool::Result<()> {
    let s = Arc::new(Species::new(
        ["1"],
        [
            sig("a", &["1", "1", "1"]),
            sig("b", &[]),
            sig("c", &["1", "1"]),
            sig("d", &[]),
            sig("e", &[]),
            sig("f", &["1"]),
            sig("g", &[]),
        ],
    )?);
    let cg = contour_graph(s.clone());
    let t = OpTree::parse(&s, "a(b, c(d, e), f(g))")?;
    let walk = contour_of_tree(&cg, &t)?;
    println!("tree:    {}", t.render(&s));
    println!("contour: {}", render_contour(&cg, &walk));

    let u = universal_grammar(s, "1")?;
    println!("universal grammar:");
    for p in u.productions() {
        println!("  {p}");
    }
    assert_eq!(u.yield_path(&t)?, walk);

    // Any grammar factors through its contour: corners go to the rule
    // segments, so the walk maps onto the derived word.
    let g = fixtures::sentence_grammar();
    let cg = contour_graph(g.species.clone());
    let t = OpTree::parse(&g.species, "x1(x3, x4(x2))")?;
    let walk = contour_of_tree(&cg, &t)?;
    let word = q_functor(&g).apply(&walk)?;
    println!("{}  ↦  {}", render_contour(&cg, &walk), g.base.render_path(&word));
    assert_eq!(word, g.yield_path(&t)?);
    Ok(())
}
