//! Randomized cross-checks between the constructions and brute-force
//! oracles. Each check runs a seeded batch of cases and reports failures.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automaton::Nfa;
use crate::contour::{
    chromatic_factorization, contour_graph, contour_of_tree, cs_decompose, cs_verify, q_functor, CsRoute,
};
use crate::dyck::{
    dyck_k_grammar, index_automaton, inverse_translate, is_balanced, letters, s_translate, sdyck_grammar, word_of,
    BracketAlphabet, Side,
};
use crate::fixtures;
use crate::grammar::{bilinearize, AmbiguityCount, Cfg};
use crate::graph::{EdgeIx, Graph, NodeIx, PathArrow};
use crate::intersection::{intersect_cfg_regular, pullback_grammar, PullbackOptions};
use crate::random::{self, GrammarShape};
use crate::species::{ColorIx, OpTree, Species};
use crate::spliced::{GapType, SplicedArrow};
use crate::tree_automaton::{intersect_gcfg_regular, TreeNfa};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> CheckReport {
        CheckReport {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(describe());
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} ({} cases", self.name, self.cases)?;
        if !self.failures.is_empty() {
            write!(f, ", {} failed; first: {}", self.failures.len(), self.failures[0])?;
        }
        write!(f, ")")
    }
}

fn small_shape() -> GrammarShape {
    GrammarShape::default()
}

/// Decomposition route against direct enumeration, on random grammars.
pub fn check_cs(seed: u64, grammars: usize, word_bound: usize) -> CheckReport {
    let mut r = CheckReport::new("cs-decomposition");
    let mut rng = random::rng(seed);
    for _ in 0..grammars {
        let g = random::random_grammar(&mut rng, &small_shape());
        let d = cs_decompose(&g);
        match cs_verify(&d, &g, None, word_bound, CsRoute::Pullback) {
            Ok(rep) => r.case(rep.equal(), || format!("{rep} for\n{}", g.productions().join("\n"))),
            Err(e) => r.case(false, || e.to_string()),
        }
    }
    r
}

/// Runs over `w` found by trying every transition letter by letter.
fn runs_by_search(m: &Nfa, w: &PathArrow) -> BTreeSet<PathArrow> {
    let states = m.states();
    let mut out = BTreeSet::new();
    let mut partial: Vec<(NodeIx, Vec<EdgeIx>)> = m.hom.node_fiber(w.src()).iter().map(|&q| (q, Vec::new())).collect();
    while let Some((start, run)) = partial.pop() {
        let at = run.last().map_or(start, |&d| states.tgt(d));
        if run.len() == w.len() {
            out.insert(states.path(start, run).expect("transitions chain"));
            continue;
        }
        for d in states.edges() {
            if states.src(d) == at && m.hom.map_edge(d) == w.edges()[run.len()] {
                let mut next = run.clone();
                next.push(d);
                partial.push((start, next));
            }
        }
    }
    out
}

/// Intersection grammars against filtering both languages, and pullback
/// grammars against filtering runs.
pub fn check_bar_hillel(seed: u64, pairs: usize, max_len: usize) -> CheckReport {
    let mut r = CheckReport::new("bar-hillel");
    let mut rng = random::rng(seed);
    for _ in 0..pairs {
        let g = random::random_grammar(&mut rng, &small_shape());
        let gap = g.start_gap();
        let m = random::random_nfa(&mut rng, g.base.clone(), gap.left, gap.right, 4, 0.5);
        let lang = g.enumerate_language(max_len);
        let want: BTreeSet<PathArrow> = lang
            .iter()
            .filter(|w| {
                runs_by_search(&m, w)
                    .iter()
                    .any(|run| (run.src(), run.tgt()) == (m.q0, m.qf))
            })
            .cloned()
            .collect();
        let regular = m.enumerate_regular(max_len);
        let also: BTreeSet<PathArrow> = lang.intersection(&regular).cloned().collect();
        let got = intersect_cfg_regular(&g, &m, PullbackOptions::default()).map(|i| i.enumerate_language(max_len));
        r.case(got.as_ref() == Ok(&want) && also == want, || {
            format!("intersection differs for\n{}", g.productions().join("\n"))
        });
        let runs_want: BTreeSet<PathArrow> = lang
            .iter()
            .flat_map(|w| runs_by_search(&m, w))
            .filter(|run| (run.src(), run.tgt()) == (m.q0, m.qf))
            .collect();
        let runs_got = pullback_grammar(&g, &m, PullbackOptions::default()).map(|p| p.enumerate_language(max_len));
        r.case(runs_got.as_ref() == Ok(&runs_want), || {
            format!("pullback runs differ for\n{}", g.productions().join("\n"))
        });
    }
    r
}

fn pick_word(rng: &mut impl Rng, g: &Cfg, max_len: usize) -> Option<PathArrow> {
    let gap = g.start_gap();
    if rng.gen_bool(0.5) {
        let lang: Vec<PathArrow> = g.enumerate_language(max_len).into_iter().collect();
        if let Some(w) = lang.choose(rng) {
            return Some(w.clone());
        }
    }
    random::random_word(rng, &g.base, gap.left, gap.right, max_len)
}

/// Chart recognition and derivation counts against leftmost-derivation
/// search. Returns the report and how many infinite counts were seen.
pub fn check_parser(seed: u64, pairs: usize, max_len: usize) -> (CheckReport, usize) {
    let mut r = CheckReport::new("parser");
    let mut rng = random::rng(seed);
    let mut infinite = 0;
    let mut done = 0;
    while done < pairs {
        let g = if done % 3 == 2 {
            random::random_cyclic_grammar(&mut rng)
        } else {
            random::random_grammar(&mut rng, &small_shape())
        };
        let Some(w) = pick_word(&mut rng, &g, max_len) else {
            continue;
        };
        done += 1;
        let accepted = g.accepts(&w);
        let render = || format!("{} in\n{}", g.base.render_path(&w), g.productions().join("\n"));
        let floor = w.len() + 6;
        if !accepted {
            r.case(!g.member_bruteforce(&w, floor), || {
                format!("brute force finds {}", render())
            });
            continue;
        }
        let smallest = g.min_derivation_cost(&w, |_| 1).unwrap_or(usize::MAX);
        let bound = floor.max(smallest);
        let low = g.count_trees_bruteforce(&w, bound);
        let high = g.count_trees_bruteforce(&w, bound + 3);
        match g.parse_count(&w) {
            AmbiguityCount::Finite(n) => r.case(low > 0 && low as u128 == n && high == low, || {
                format!("count {n} but brute force {low}/{high} for {}", render())
            }),
            AmbiguityCount::Infinite => {
                infinite += 1;
                r.case(low > 0 && high > low, || {
                    format!("infinite but brute force {low}/{high} for {}", render())
                })
            }
        }
    }
    (r, infinite)
}

/// Bilinear normal form keeps languages and per-word derivation counts.
pub fn check_bilinearize(seed: u64, grammars: usize, count_len: usize, lang_len: usize) -> CheckReport {
    let mut r = CheckReport::new("bilinearize");
    let mut rng = random::rng(seed);
    let shape = GrammarShape {
        max_arity: 3,
        ..small_shape()
    };
    let mut done = 0;
    while done < grammars {
        let g = random::random_grammar(&mut rng, &shape);
        let words = g.enumerate_language(count_len);
        if words.iter().any(|w| g.parse_count(w) == AmbiguityCount::Infinite) {
            continue;
        }
        done += 1;
        let (b, t) = match bilinearize(&g) {
            Ok(x) => x,
            Err(e) => {
                r.case(false, || e.to_string());
                continue;
            }
        };
        r.case(b.species.ops().all(|x| b.species.arity(x) <= 2), || {
            "arity above two".into()
        });
        r.case(b.enumerate_language(lang_len) == g.enumerate_language(lang_len), || {
            format!("languages differ for\n{}", g.productions().join("\n"))
        });
        let counts_agree = words.iter().all(|w| b.parse_count(w) == g.parse_count(w));
        r.case(counts_agree, || {
            format!("counts differ for\n{}", g.productions().join("\n"))
        });
        let trees_agree = words.iter().all(|w| {
            g.parse_trees(w, 16)
                .trees
                .iter()
                .all(|tree| t.translate_tree(tree).ok().and_then(|u| b.yield_path(&u).ok()).as_ref() == Some(w))
        });
        r.case(trees_agree, || "translated trees change the yield".into());
    }
    r
}

/// Round trips through bracket words, and the index automaton.
pub fn check_dyck(max_nodes: usize, max_len: usize) -> CheckReport {
    let mut r = CheckReport::new("dyck");
    let sentence = fixtures::sentence_grammar();
    let (chromatic, _) = chromatic_factorization(&sentence);
    let start = chromatic.species.color_name(chromatic.start).to_string();
    let cases: Vec<(Arc<Species>, String)> = vec![
        (Arc::new(fixtures::binary_species()), "*".to_string()),
        (chromatic.species.clone(), start),
    ];
    for (s, start) in &cases {
        let cg = contour_graph(s.clone());
        let a = BracketAlphabet::new(s.clone());
        for c in s.colors() {
            for t in s.enumerate_trees(c, max_nodes, true) {
                let contour = contour_of_tree(&cg, &t).expect("closed");
                let ok = s_translate(&cg, &a, &contour).is_ok_and(|d| {
                    is_balanced(&a, &d)
                        && inverse_translate(&cg, &a, &d, Side::Green).as_ref() == Ok(&contour)
                        && inverse_translate(&cg, &a, &d, Side::Red).as_ref() == Ok(&contour)
                });
                r.case(ok, || format!("round trip fails on {}", t.render(s)));
            }
        }
        let dk = dyck_k_grammar(&a).expect("valid");
        let index = index_automaton(s.clone(), start).expect("valid");
        let cut: BTreeSet<Vec<String>> = index
            .enumerate_where(max_len, |prefix| balance_possible(prefix, max_len))
            .into_iter()
            .filter(|w| dk.accepts(&word_of(&a, w).expect("letters")))
            .collect();
        let sd: BTreeSet<Vec<String>> = sdyck_grammar(s.clone(), start)
            .expect("valid")
            .enumerate_language(max_len)
            .iter()
            .map(|w| letters(&a, w))
            .collect();
        r.case(cut == sd, || {
            format!("index automaton cuts {} words, grammar has {}", cut.len(), sd.len())
        });
    }
    r
}

/// Whether the brackets read so far match and can still close in time.
pub fn balance_possible(prefix: &[String], max_len: usize) -> bool {
    let mut stack = Vec::new();
    for l in prefix {
        if let Some(body) = l.strip_prefix('[') {
            stack.push(body);
        } else if stack.pop() != l.strip_prefix(']') {
            return false;
        }
    }
    prefix.len() + stack.len() <= max_len
}

/// Accepted iff some tree of states over `t` has the root state on top.
fn accepts_by_search(a: &TreeNfa, t: &OpTree) -> bool {
    a.states()
        .enumerate_trees(a.root, t.node_count(), true)
        .iter()
        .any(|s| a.map.map_tree(s) == *t)
}

fn evaluate(s: &Species, t: &OpTree) -> bool {
    match t {
        OpTree::Leaf(_) => unreachable!("closed trees only"),
        OpTree::Node(x, kids) => match s.op_name(*x) {
            "true" => true,
            "false" => false,
            _ => kids.iter().all(|k| evaluate(s, k)),
        },
    }
}

/// Tree automata against run search, tree grammar intersection against
/// filtering, and the Boolean evaluator.
pub fn check_tree_automata(seed: u64, instances: usize, max_nodes: usize) -> CheckReport {
    let mut r = CheckReport::new("tree-automata");
    let mut rng = random::rng(seed);
    for _ in 0..instances {
        let s = Arc::new(random::random_species(&mut rng, 2, 4));
        let a = random::random_tree_nfa(&mut rng, s.clone(), 0.5);
        let root = a.map.map_color(a.root);
        if let Some(t) = random::random_tree(&mut rng, &s, root, 6, true) {
            let got = a.accepts_tree(&t);
            r.case(got == Ok(accepts_by_search(&a, &t)), || {
                format!("disagree on {}", t.render(&s))
            });
        }
        let g = random::random_gcfg(&mut rng, s.clone(), 4);
        let a = random::random_tree_nfa(&mut rng, s.clone(), 0.6);
        let a = TreeNfa::new(a.map.clone(), pick_root(&mut rng, &a, g.color_assign[g.start.index()])).unwrap();
        let want: BTreeSet<OpTree> = g
            .enumerate(max_nodes)
            .into_iter()
            .filter(|t| a.accepts_tree(t).unwrap_or(false))
            .collect();
        let got = intersect_gcfg_regular(&g, &a).map(|i| i.enumerate(max_nodes));
        r.case(got.as_ref() == Ok(&want), || "tree intersection differs".into());
    }
    let s = fixtures::boolean_species();
    let b = s.color("b").expect("color");
    for a in [
        fixtures::boolean_automaton(),
        fixtures::boolean_automaton_with_duplicate_true(),
    ] {
        for t in s.enumerate_trees(b, max_nodes, true) {
            r.case(a.accepts_tree(&t) == Ok(evaluate(&s, &t)), || {
                format!("boolean {}", t.render(&s))
            });
        }
    }
    r
}

fn pick_root(rng: &mut impl Rng, a: &TreeNfa, over: ColorIx) -> ColorIx {
    let states = a.states();
    let fits: Vec<ColorIx> = states.colors().filter(|&q| a.map.map_color(q) == over).collect();
    *fits.choose(rng).expect("every base color has a state")
}

/// Associativity and unit laws of grafting.
pub fn check_operad_laws(seed: u64, cases: usize) -> CheckReport {
    let mut r = CheckReport::new("operad-laws");
    let mut rng = random::rng(seed);
    while r.cases < cases {
        let s = random::random_species(&mut rng, 2, 4);
        let c = ColorIx(rng.gen_range(0..s.color_count()) as u32);
        let Some(f) = random::random_tree(&mut rng, &s, c, 3, false) else {
            continue;
        };
        if f.arity() == 0 {
            // units only
            let unit = OpTree::Leaf(c);
            r.case(unit.graft(&s, 0, &f).as_ref() == Ok(&f), || "left unit".into());
            continue;
        }
        let fr = f.frontier(&s);
        let i = rng.gen_range(0..f.arity());
        let unit = OpTree::Leaf(fr.inputs[i]);
        r.case(f.graft(&s, i, &unit).as_ref() == Ok(&f), || {
            format!("right unit on {}", f.render(&s))
        });
        let Some(g) = random::random_tree(&mut rng, &s, fr.inputs[i], 3, false) else {
            continue;
        };
        let fg = f.graft(&s, i, &g).expect("typed");
        if g.arity() > 0 {
            // sequential: (f ∘i g) ∘(i+j) h = f ∘i (g ∘j h)
            let j = rng.gen_range(0..g.arity());
            let Some(h) = random::random_tree(&mut rng, &s, g.frontier(&s).inputs[j], 3, false) else {
                continue;
            };
            let left = fg.graft(&s, i + j, &h);
            let right = g.graft(&s, j, &h).and_then(|gh| f.graft(&s, i, &gh));
            r.case(left.is_ok() && left == right, || {
                format!("sequential on {}", f.render(&s))
            });
        } else if f.arity() > 1 {
            // parallel: (f ∘i g) ∘(k-1) h = (f ∘k h) ∘i g for i < k
            let k = rng.gen_range(0..f.arity());
            if k == i {
                continue;
            }
            let (lo, hi) = (i.min(k), i.max(k));
            let Some(h) = random::random_tree(&mut rng, &s, fr.inputs[k], 3, false) else {
                continue;
            };
            let (first, second) = if lo == i { (&g, &h) } else { (&h, &g) };
            let left = f
                .graft(&s, lo, first)
                .and_then(|t| t.graft(&s, hi + first.arity() - 1, second));
            let right = f.graft(&s, hi, second).and_then(|t| t.graft(&s, lo, first));
            r.case(left.is_ok() && left == right, || {
                format!("parallel on {}", f.render(&s))
            });
        }
    }
    r
}

fn random_spliced(rng: &mut impl Rng, g: &Graph, outer: GapType, max_arity: usize) -> Option<SplicedArrow> {
    let nodes: Vec<NodeIx> = g.nodes().collect();
    let n = rng.gen_range(0..=max_arity);
    let gaps: Vec<GapType> = (0..n)
        .map(|_| GapType::new(*nodes.choose(rng).unwrap(), *nodes.choose(rng).unwrap()))
        .collect();
    let mut bounds = vec![outer.left];
    for gap in &gaps {
        bounds.push(gap.left);
        bounds.push(gap.right);
    }
    bounds.push(outer.right);
    let segs = bounds
        .chunks(2)
        .map(|p| random::random_word(rng, g, p[0], p[1], 2))
        .collect::<Option<Vec<_>>>()?;
    SplicedArrow::with_types(g, segs, gaps, outer).ok()
}

/// Associativity and unit laws of splicing.
pub fn check_splicing_laws(seed: u64, cases: usize) -> CheckReport {
    let mut r = CheckReport::new("splicing-laws");
    let mut rng = random::rng(seed);
    while r.cases < cases {
        let base = random::random_base(&mut rng, &small_shape());
        let nodes: Vec<NodeIx> = base.nodes().collect();
        let outer = GapType::new(*nodes.choose(&mut rng).unwrap(), *nodes.choose(&mut rng).unwrap());
        let Some(f) = random_spliced(&mut rng, &base, outer, 2) else {
            continue;
        };
        r.case(
            SplicedArrow::identity(outer).splice_at(0, &f).as_ref() == Ok(&f),
            || "left unit".into(),
        );
        if f.arity() == 0 {
            continue;
        }
        let i = rng.gen_range(0..f.arity());
        let gi = f.gap_types()[i];
        r.case(f.splice_at(i, &SplicedArrow::identity(gi)).as_ref() == Ok(&f), || {
            "right unit".into()
        });
        let Some(g) = random_spliced(&mut rng, &base, gi, 2) else {
            continue;
        };
        let fg = f.splice_at(i, &g).expect("typed");
        if g.arity() > 0 {
            let j = rng.gen_range(0..g.arity());
            let Some(h) = random_spliced(&mut rng, &base, g.gap_types()[j], 2) else {
                continue;
            };
            let left = fg.splice_at(i + j, &h);
            let right = g.splice_at(j, &h).and_then(|gh| f.splice_at(i, &gh));
            r.case(left.is_ok() && left == right, || "sequential".into());
        } else if f.arity() > 1 {
            let k = (i + 1) % f.arity();
            let Some(h) = random_spliced(&mut rng, &base, f.gap_types()[k], 2) else {
                continue;
            };
            let (lo, hi, first, second) = if i < k { (i, k, &g, &h) } else { (k, i, &h, &g) };
            let left = f
                .splice_at(lo, first)
                .and_then(|t| t.splice_at(hi + first.arity() - 1, second));
            let right = f.splice_at(hi, second).and_then(|t| t.splice_at(lo, first));
            r.case(left.is_ok() && left == right, || "parallel".into());
        }
    }
    r
}

/// Runs over `u·v` are exactly the composites of runs over `u` and `v`
/// meeting in a state, and split uniquely.
pub fn check_run_factorization(seed: u64, cases: usize) -> CheckReport {
    let mut r = CheckReport::new("run-factorization");
    let mut rng = random::rng(seed);
    while r.cases < cases {
        let base = Arc::new(random::random_base(&mut rng, &small_shape()));
        let nodes: Vec<NodeIx> = base.nodes().collect();
        let (a, b) = (*nodes.choose(&mut rng).unwrap(), *nodes.choose(&mut rng).unwrap());
        let m = random::random_nfa(&mut rng, base.clone(), a, b, 4, 0.6);
        let Some(w) = random::random_word(&mut rng, &base, a, b, 5) else {
            continue;
        };
        let k = rng.gen_range(0..=w.len());
        let (u, v) = (w.slice(&base, 0, k), w.slice(&base, k, w.len()));
        let runs: BTreeSet<PathArrow> = m
            .hom
            .lift_runs(&w, None, None)
            .expect("over the base")
            .into_iter()
            .collect();
        let searched = runs_by_search(&m, &w);
        let mut composed = BTreeSet::new();
        for ru in m.hom.lift_runs(&u, None, None).expect("prefix") {
            for rv in m.hom.lift_runs(&v, Some(ru.tgt()), None).expect("suffix") {
                composed.insert(ru.compose(&rv).expect("meet"));
            }
        }
        let split_ok = runs.iter().all(|run| {
            let (x, y) = (run.slice(m.states(), 0, k), run.slice(m.states(), k, w.len()));
            m.hom.map_path(&x) == u && m.hom.map_path(&y) == v
        });
        r.case(runs == searched && runs == composed && split_ok, || {
            format!("runs over {} do not factor", base.render_path(&w))
        });
    }
    r
}

/// The output functor applied to a tree's contour gives the tree's yield.
pub fn check_contour_yield(seed: u64, cases: usize) -> CheckReport {
    let mut r = CheckReport::new("contour-yield");
    let mut rng = random::rng(seed);
    while r.cases < cases {
        let g = random::random_grammar(&mut rng, &small_shape());
        let cg = contour_graph(g.species.clone());
        let q = q_functor(&g);
        for _ in 0..10 {
            let c = ColorIx(rng.gen_range(0..g.species.color_count()) as u32);
            let Some(t) = random::random_tree(&mut rng, &g.species, c, 5, true) else {
                continue;
            };
            let contour = contour_of_tree(&cg, &t).expect("closed");
            let ok = q.apply(&contour).ok() == g.yield_path(&t).ok();
            r.case(ok, || format!("contour of {} misses its yield", t.render(&g.species)));
        }
    }
    r
}

/// Every check at the given scale: `1` is the documented suite size.
pub fn run_all(seed: u64, scale: usize) -> Vec<CheckReport> {
    let scale = scale.max(1);
    vec![
        check_cs(seed, 20 * scale, 8),
        check_bar_hillel(seed, 50 * scale, 8),
        check_parser(seed, 100 * scale, 5).0,
        check_bilinearize(seed, 20 * scale, 6, 8),
        check_dyck(6, 12),
        check_tree_automata(seed, 50 * scale, 7),
        check_operad_laws(seed, 1000 * scale),
        check_splicing_laws(seed, 1000 * scale),
        check_run_factorization(seed, 1000 * scale),
        check_contour_yield(seed, 1000 * scale),
    ]
}
