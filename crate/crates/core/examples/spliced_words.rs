//! Spliced arrows over a two-object graph: paths with typed holes, filled
//! by splicing.

use splicetool::{GapType, Graph, SplicedArrow};

fn main() -> splicetool::Result<()> {
    // `open` and `close` move between a "text" object T and a "markup" object M.
    let g = Graph::new(
        ["T", "M"],
        [
            ("open", "T", "M"),
            ("close", "M", "T"),
            ("word", "T", "T"),
            ("tag", "M", "M"),
        ]
        .map(|(e, s, t)| (e.to_string(), s.to_string(), t.to_string())),
    )?;
    let path = |from: &str, names: &[&str]| g.path_from_names(from, names);
    let m = g.require_node("M")?;

    // word · open ⟨hole: M→M⟩ close · word
    let frame = SplicedArrow::new(vec![path("T", &["word", "open"])?, path("M", &["close", "word"])?])?;
    println!("frame: {}  (gap {})", frame.render(&g), frame.gap_types()[0].render(&g));

    // tag ⟨hole: M→M⟩ tag, spliced into the frame's gap
    let inner = SplicedArrow::with_types(
        &g,
        vec![path("M", &["tag"])?, path("M", &["tag"])?],
        vec![GapType::new(m, m)],
        GapType::new(m, m),
    )?;
    let nested = frame.splice_at(0, &inner)?;
    println!("nested: {}", nested.render(&g));

    // Closing the last hole leaves a plain path.
    let filler = SplicedArrow::constant(path("M", &["tag"])?);
    let done = nested.splice_at(0, &filler)?;
    println!("closed: {}", done.render(&g));
    println!(
        "as a path: {}",
        g.render_path(done.as_constant().expect("no holes left"))
    );

    // Units: splicing the identity hole changes nothing.
    let unit = SplicedArrow::identity(GapType::new(m, m));
    assert_eq!(frame.splice_at(0, &unit)?, frame);

    // A hole of the wrong type is refused.
    let wrong = SplicedArrow::constant(path("T", &["word"])?);
    match frame.splice_at(0, &wrong) {
        Err(e) => println!("splicing a T-path into an M-gap: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
