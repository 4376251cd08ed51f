//! A four-word grammar of sentences: its language, and the parse of one
//! sentence.

use std::collections::HashMap;
use std::sync::Arc;

use splicetool::{Cfg, Graph, Species};

fn main() -> splicetool::Result<()> {
    let words = Arc::new(Graph::bouquet(&["mom", "tom", "loves", "sp"])?);
    let species = Arc::new(Species::new(
        ["S", "NP", "VP"],
        [
            ("x1", &["NP", "VP"][..], "S"),
            ("x2", &[], "NP"),
            ("x3", &[], "NP"),
            ("x4", &["NP"], "VP"),
        ]
        .map(|(x, ins, out)| {
            (
                x.to_string(),
                ins.iter().map(|c| c.to_string()).collect(),
                out.to_string(),
            )
        }),
    )?);
    let anywhere = ("*".to_string(), "*".to_string());
    let colors: HashMap<_, _> = ["S", "NP", "VP"]
        .iter()
        .map(|c| (c.to_string(), anywhere.clone()))
        .collect();
    let seg = |w: &str| w.split_whitespace().map(str::to_string).collect::<Vec<_>>();
    let rules: HashMap<_, _> = [
        ("x1", vec![seg(""), seg("sp"), seg("")]),
        ("x2", vec![seg("mom")]),
        ("x3", vec![seg("tom")]),
        ("x4", vec![seg("loves sp"), seg("")]),
    ]
    .into_iter()
    .map(|(x, r)| (x.to_string(), r))
    .collect();
    let g = Cfg::from_names(words.clone(), species, "S", &colors, &rules)?;

    println!("productions:");
    for p in g.productions() {
        println!("  {p}");
    }
    println!("sentences of length at most 5:");
    for w in g.enumerate_language(5) {
        println!("  {}", words.render_path(&w));
    }

    let w = words.parse_path("mom sp loves sp tom", None)?;
    let parses = g.parse_trees(&w, 10);
    println!("parses of `{}`: {}", words.render_path(&w), parses.count);
    for t in &parses.trees {
        println!("  {}", t.render(&g.species));
    }
    Ok(())
}
