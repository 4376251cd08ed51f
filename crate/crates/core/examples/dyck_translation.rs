//! Contour words as bracket words: every corner becomes a bracket pair, the
//! result balances, and either half of each pair reads the contour back.
//! An automaton of local conditions cuts the tree-shaped bracket words out
//! of all balanced ones.

use std::collections::BTreeSet;
use std::sync::Arc;

use splicetool::contour::{contour_graph, contour_of_tree, render_contour};
use splicetool::dyck::{
    dyck_k_grammar, index_automaton, inverse_translate, letters, s_translate, sdyck_grammar, word_of, BracketAlphabet,
    Side,
};
use splicetool::oracle::balance_possible;
use splicetool::{fixtures, OpTree};

fn main() -> splicetool::Result<()> {
    let s = Arc::new(fixtures::contour_species());
    let cg = contour_graph(s.clone());
    let brackets = BracketAlphabet::new(s.clone());

    let t = OpTree::parse(&s, "a(b, c(d, e), f(g))")?;
    let walk = contour_of_tree(&cg, &t)?;
    let word = s_translate(&cg, &brackets, &walk)?;
    println!("contour:  {}", render_contour(&cg, &walk));
    println!("brackets: {}", letters(&brackets, &word).join(" "));
    for side in [Side::Green, Side::Red] {
        let back = inverse_translate(&cg, &brackets, &word, side)?;
        println!("{side:?} reading: {}", render_contour(&cg, &back));
    }

    let bound = 8;
    let trees = sdyck_grammar(s.clone(), "1")?;
    let balanced = dyck_k_grammar(&brackets)?;
    let index = index_automaton(s, "1")?;
    let from_trees: BTreeSet<Vec<String>> = trees
        .enumerate_language(bound)
        .iter()
        .map(|w| letters(&brackets, w))
        .collect();
    let cut: BTreeSet<Vec<String>> = index
        .enumerate_where(bound, |p| balance_possible(p, bound))
        .into_iter()
        .filter(|w| word_of(&brackets, w).is_ok_and(|p| balanced.accepts(&p)))
        .collect();
    println!(
        "bracket words up to {bound}: {} from trees, {} balanced and locally valid",
        from_trees.len(),
        cut.len()
    );
    for w in &from_trees {
        println!("  {}", w.join(" "));
    }
    assert_eq!(from_trees, cut);
    Ok(())
}
