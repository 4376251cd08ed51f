//! Bilinear normal form: every node gets at most two inputs, and each parse
//! of the original grammar corresponds to one parse of the new one.

use splicetool::grammar::{bilinearize, parse_classical};

fn main() -> splicetool::Result<()> {
    let g = parse_classical(
        "S -> if C then S else S fi | go
         C -> C and C | yes | no",
    )?;
    let (b, translation) = bilinearize(&g)?;
    println!(
        "original ({} nodes, bilinear: {}):",
        g.species.op_count(),
        g.is_bilinear()
    );
    for p in g.productions() {
        println!("  {p}");
    }
    println!("bilinear ({} nodes):", b.species.op_count());
    for p in b.productions() {
        println!("  {p}");
    }

    let w = g.base.parse_path("if yes and no and yes then go else go fi", None)?;
    println!(
        "parses of `{}`: {} before, {} after",
        g.base.render_path(&w),
        g.parse_count(&w),
        b.parse_count(&w)
    );
    for t in g.parse_trees(&w, 4).trees {
        let image = translation.translate_tree(&t)?;
        println!("  {}  ↦  {}", t.render(&g.species), image.render(&b.species));
        assert_eq!(b.yield_path(&image)?, w);
    }
    assert_eq!(g.enumerate_language(9), b.enumerate_language(9));
    Ok(())
}
