//! Pulling a grammar back along an automaton, and the resulting
//! intersection of a context-free with a regular language of arrows.

use crate::automaton::Nfa;
use crate::error::{Error, Result};
use crate::grammar::{bilinearize, image, Cfg, CfgBuilder};
use crate::graph::{NodeIx, PathArrow};
use crate::species::OpIx;
use crate::spliced::SplicedArrow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PullbackOptions {
    /// Drop useless colors of the result.
    pub trim: bool,
    /// Bilinearize the grammar first when some rule has more run tuples
    /// than this.
    pub bilinearize_threshold: u128,
}

impl Default for PullbackOptions {
    fn default() -> Self {
        PullbackOptions {
            trim: true,
            bilinearize_threshold: 10_000,
        }
    }
}

/// Tuples of runs, one per segment, where segment `i` runs from
/// `boundary[2i]` to `boundary[2i + 1]`.
pub fn lift_spliced(m: &Nfa, f: &SplicedArrow, boundary: &[NodeIx]) -> Result<Vec<Vec<PathArrow>>> {
    let n = f.segments().len();
    if boundary.len() != 2 * n {
        return Err(Error::ArityMismatch {
            expected: 2 * n,
            found: boundary.len(),
        });
    }
    let mut per_segment = Vec::with_capacity(n);
    for (i, seg) in f.segments().iter().enumerate() {
        per_segment.push(m.hom.lift_runs(seg, Some(boundary[2 * i]), Some(boundary[2 * i + 1]))?);
    }
    let mut tuples: Vec<Vec<PathArrow>> = vec![Vec::new()];
    for runs in per_segment {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                runs.iter().map(move |r| {
                    let mut t = t.clone();
                    t.push(r.clone());
                    t
                })
            })
            .collect();
    }
    Ok(tuples)
}

/// Number of run tuples the pullback creates for node `x`.
fn tuple_count(g: &Cfg, m: &Nfa, x: OpIx) -> u128 {
    g.rule(x)
        .segments()
        .iter()
        .map(|seg| {
            m.hom
                .node_fiber(seg.src())
                .iter()
                .map(|&q| m.hom.count_runs(seg, Some(q), None).expect("segment over the base"))
                .sum::<u128>()
        })
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

fn check_compatible(g: &Cfg, m: &Nfa) -> Result<()> {
    if *g.base != **m.base() {
        return Err(Error::Precondition("grammar and automaton have different bases".into()));
    }
    let gap = g.start_gap();
    if (gap.left, gap.right) != m.boundary() {
        return Err(Error::Precondition(format!(
            "start color refines ({}) but the automaton runs from `{}` to `{}`",
            gap.render(&g.base),
            g.base.node_name(m.boundary().0),
            g.base.node_name(m.boundary().1)
        )));
    }
    Ok(())
}

/// The grammar over the state graph whose language is the set of runs
/// from `q0` to `qf` lying over words of `g`. Colors are triples `q|R|q'`;
/// nodes pair a rule with one run per segment.
pub fn pullback_grammar(g: &Cfg, m: &Nfa, opts: PullbackOptions) -> Result<Cfg> {
    check_compatible(g, m)?;
    let needs_split = !g.is_bilinear()
        && g.species
            .ops()
            .any(|x| tuple_count(g, m, x) > opts.bilinearize_threshold);
    if needs_split {
        let (b, _) = bilinearize(g)?;
        return pullback_grammar(&b, m, opts);
    }
    let s = &g.species;
    let states = m.states();
    let triple = |q: NodeIx, c: &str, r: NodeIx| format!("{}|{c}|{}", states.node_name(q), states.node_name(r));

    let mut b = CfgBuilder::default();
    for c in s.colors() {
        let gap = g.gap(c);
        for &q in m.hom.node_fiber(gap.left) {
            for &r in m.hom.node_fiber(gap.right) {
                b.color(triple(q, s.color_name(c), r), crate::spliced::GapType::new(q, r));
            }
        }
    }
    for x in s.ops() {
        let d = s.op(x);
        let segs = g.rule(x).segments();
        let mut runs: Vec<PathArrow> = Vec::with_capacity(segs.len());
        let mut emit = |runs: &[PathArrow]| {
            let inputs = d
                .inputs
                .iter()
                .enumerate()
                .map(|(k, &c)| triple(runs[k].tgt(), s.color_name(c), runs[k + 1].src()))
                .collect();
            let output = triple(runs[0].src(), s.color_name(d.output), runs[runs.len() - 1].tgt());
            let label: Vec<String> = runs.iter().map(|r| states.render_path(r)).collect();
            b.op(
                format!("{}@{}", d.id, label.join(";")),
                inputs,
                output,
                SplicedArrow::new(runs.to_vec()).expect("nonempty"),
            );
        };
        segment_runs(m, segs, 0, &mut runs, &mut emit);
    }
    let start = triple(m.q0, s.color_name(g.start), m.qf);
    let out = b.finish(m.states().clone(), &start)?;
    Ok(if opts.trim { out.trim() } else { out })
}

fn segment_runs(m: &Nfa, segs: &[PathArrow], k: usize, runs: &mut Vec<PathArrow>, emit: &mut dyn FnMut(&[PathArrow])) {
    if k == segs.len() {
        emit(runs);
        return;
    }
    for &q in m.hom.node_fiber(segs[k].src()) {
        for run in m.hom.lift_runs_unchecked(&segs[k], Some(q), None) {
            runs.push(run);
            segment_runs(m, segs, k + 1, runs, emit);
            runs.pop();
        }
    }
}

/// Grammar of `L(g) ∩ L(m)` over the common base: the pullback pushed
/// back down along the automaton.
pub fn intersect_cfg_regular(g: &Cfg, m: &Nfa, opts: PullbackOptions) -> Result<Cfg> {
    let p = pullback_grammar(g, m, opts)?;
    image(&p, &m.hom.to_functor())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;
    use std::sync::Arc;

    use super::*;
    use crate::automaton::{singleton_nfa, total_nfa};
    use crate::fixtures;
    use crate::grammar::parse_classical;
    use crate::graph::Graph;

    #[test]
    fn total_automaton_changes_nothing() {
        let g = fixtures::sentence_grammar();
        let m = total_nfa(g.base.clone(), "*", "*").unwrap();
        let p = pullback_grammar(&g, &m, PullbackOptions::default()).unwrap();
        assert_eq!(p.species.color_count(), g.species.color_count());
        assert_eq!(p.species.op_count(), g.species.op_count());
        let i = intersect_cfg_regular(&g, &m, PullbackOptions::default()).unwrap();
        assert_eq!(i.enumerate_language(7), g.enumerate_language(7));
    }

    #[test]
    fn dyck_against_a_single_word() {
        let g = fixtures::dyck_grammar();
        let w = g.base.parse_path("[ ] [ ]", Some("*")).unwrap();
        let m = singleton_nfa(g.base.clone(), &w).unwrap();
        let p = pullback_grammar(&g, &m, PullbackOptions::default()).unwrap();
        let runs = p.enumerate_language(8);
        assert_eq!(runs.len(), 1);
        let i = intersect_cfg_regular(&g, &m, PullbackOptions::default()).unwrap();
        assert_eq!(i.enumerate_language(8), [w].into());
    }

    #[test]
    fn untrimmed_color_count() {
        let g = fixtures::dyck_grammar();
        let m = fixtures::parity_automaton(&["[", "]"], 2);
        let opts = PullbackOptions {
            trim: false,
            ..Default::default()
        };
        let p = pullback_grammar(&g, &m, opts).unwrap();
        // one color, both ends over the single base node with two states each
        assert_eq!(p.species.color_count(), 2 * 2);
        let i = intersect_cfg_regular(&g, &m, PullbackOptions::default()).unwrap();
        assert_eq!(i.enumerate_language(8), g.enumerate_language(8));
    }

    #[test]
    fn dyck_without_double_close() {
        let g = fixtures::dyck_grammar();
        let base = g.base.clone();
        let states = Arc::new(
            Graph::new(
                ["s", "c"],
                vec![
                    ("o1".to_string(), "s".to_string(), "s".to_string()),
                    ("o2".to_string(), "c".to_string(), "s".to_string()),
                    ("c1".to_string(), "s".to_string(), "c".to_string()),
                ],
            )
            .unwrap(),
        );
        let open = base.require_edge("[").unwrap();
        let close = base.require_edge("]").unwrap();
        let star = base.node("*").unwrap();
        let hom = crate::graph::GraphHom::new(states.clone(), base.clone(), vec![star, star], vec![close, open, open])
            .unwrap();
        let s_state = states.node("s").unwrap();
        let finals: Vec<BTreeSet<PathArrow>> = ["s", "c"]
            .iter()
            .map(|f| {
                let m = Nfa::new(hom.clone(), s_state, states.node(f).unwrap()).unwrap();
                intersect_cfg_regular(&g, &m, PullbackOptions::default())
                    .unwrap()
                    .enumerate_language(8)
            })
            .collect();
        let union: BTreeSet<PathArrow> = finals.into_iter().flatten().collect();
        let want: BTreeSet<PathArrow> = g
            .enumerate_language(8)
            .into_iter()
            .filter(|w| !w.edges().windows(2).any(|p| p == [close, close]))
            .collect();
        assert_eq!(union, want);
    }

    #[test]
    fn lifting_spliced_arrows() {
        let g = fixtures::sentence_grammar();
        let m = fixtures::parity_automaton(&["mom", "tom", "loves", "sp"], 2);
        let states = m.states();
        let (p0, p1) = (states.node("p0").unwrap(), states.node("p1").unwrap());
        let x1 = g.rule(g.species.require_op("x1").unwrap());
        // ε - sp - ε: the identities pin their states and sp flips parity
        assert_eq!(lift_spliced(&m, x1, &[p0, p0, p0, p1, p1, p1]).unwrap().len(), 1);
        assert!(lift_spliced(&m, x1, &[p0, p1, p0, p1, p1, p1]).unwrap().is_empty());
        assert!(lift_spliced(&m, x1, &[p0, p0, p0, p0, p1, p1]).unwrap().is_empty());
        let x2 = g.rule(g.species.require_op("x2").unwrap());
        assert_eq!(lift_spliced(&m, x2, &[p1, p0]).unwrap().len(), 1);
    }

    #[test]
    fn forced_bilinearization_keeps_the_language() {
        let g = parse_classical("S -> a S b S c S | d").unwrap();
        let m = fixtures::parity_automaton(&["a", "b", "c", "d"], 2);
        let opts = PullbackOptions {
            trim: true,
            bilinearize_threshold: 1,
        };
        let split = intersect_cfg_regular(&g, &m, opts).unwrap();
        let plain = intersect_cfg_regular(&g, &m, PullbackOptions::default()).unwrap();
        assert!(split.is_bilinear());
        assert_eq!(split.enumerate_language(8), plain.enumerate_language(8));
    }

    #[test]
    fn precondition_on_start_gap() {
        let g = fixtures::dyck_grammar();
        let other = Arc::new(Graph::bouquet(&["x"]).unwrap());
        let m = total_nfa(other, "*", "*").unwrap();
        assert!(pullback_grammar(&g, &m, PullbackOptions::default()).is_err());
    }
}
