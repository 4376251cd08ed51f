//! Acceptance run: one line per criterion, each with its bound and time
//! limit pinned here. Worked-example values are literals; everything else is
//! compared against brute-force oracles.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use splicetool::contour::{
    coloring_automaton, contour_graph, contour_of_tree, cs_decompose, cs_verify, render_contour, transition_table,
    universal_grammar, CsRoute,
};
use splicetool::dyck::{letters, s_translate, BracketAlphabet};
use splicetool::grammar::parse_classical;
use splicetool::oracle::{self, CheckReport};
use splicetool::{fixtures, AmbiguityCount, OpTree, Species};

const SEED: u64 = 20261016;

type Verdict = Result<String, String>;

struct Run {
    failed: Vec<usize>,
}

impl Run {
    fn criterion(&mut self, n: usize, title: &str, limit_secs: u64, body: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let verdict = body();
        let took = start.elapsed();
        let limit = Duration::from_secs(limit_secs);
        let (ok, detail) = match verdict {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {limit_secs} s limit")),
            Err(e) => (false, e),
        };
        println!(
            "criterion {n:>2} {}: {title}: {detail} [{:.2} s, limit {limit_secs} s]",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
        if !ok {
            self.failed.push(n);
        }
    }
}

fn reports(rs: &[CheckReport]) -> Verdict {
    let text = rs.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("; ");
    if rs.iter().all(|r| r.passed()) {
        Ok(text)
    } else {
        Err(text)
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalan(n: u64) -> u64 {
    (0..n).fold(1, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

/// Truth value of a closed tree over `and`, `true`, `false`.
fn evaluate(s: &Species, t: &OpTree) -> bool {
    match t {
        OpTree::Node(x, kids) => match s.op_name(*x) {
            "true" => true,
            "false" => false,
            "and" => kids.iter().all(|k| evaluate(s, k)),
            other => panic!("unexpected node {other}"),
        },
        OpTree::Leaf(_) => panic!("open tree"),
    }
}

fn balanced(word: &[String]) -> bool {
    let mut stack = Vec::new();
    for l in word {
        if let Some(b) = l.strip_prefix('[') {
            stack.push(b);
        } else if stack.pop() != l.strip_prefix(']') {
            return false;
        }
    }
    stack.is_empty()
}

fn sentence_worked_example() -> Verdict {
    let g = fixtures::sentence_grammar();
    let words: BTreeSet<String> = g.enumerate_language(5).iter().map(|w| g.base.render_path(w)).collect();
    let want: BTreeSet<String> = [
        "mom sp loves sp mom",
        "mom sp loves sp tom",
        "tom sp loves sp mom",
        "tom sp loves sp tom",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    ensure(words == want, || format!("language {words:?}"))?;
    let w = g
        .base
        .parse_path("mom sp loves sp tom", None)
        .map_err(|e| e.to_string())?;
    let count = g.parse_count(&w);
    ensure(count == AmbiguityCount::Finite(1), || format!("count {count}"))?;
    let trees = g.parse_trees(&w, 10).trees;
    let rendered: Vec<String> = trees.iter().map(|t| t.render(&g.species)).collect();
    ensure(rendered == ["x1(x2, x4(x3))"], || format!("trees {rendered:?}"))?;
    Ok("4 sentences; one parse x1(x2, x4(x3))".into())
}

fn contour_worked_example() -> Verdict {
    let s = Arc::new(fixtures::contour_species());
    let cg = contour_graph(s.clone());
    let t = OpTree::parse(&s, "a(b, c(d, e), f(g))").map_err(|e| e.to_string())?;
    let w = contour_of_tree(&cg, &t).map_err(|e| e.to_string())?;
    let text = render_contour(&cg, &w);
    ensure(text == "a.0 b.0 a.1 c.0 d.0 c.1 e.0 c.2 a.2 f.0 g.0 f.1 a.3", || {
        text.clone()
    })?;
    let alphabet = BracketAlphabet::new(s);
    let d = letters(&alphabet, &s_translate(&cg, &alphabet, &w).map_err(|e| e.to_string())?);
    ensure(d.len() == 26 && balanced(&d), || format!("brackets {d:?}"))?;
    Ok(format!("{text}; 26 balanced brackets"))
}

fn universal_and_coloring() -> Verdict {
    let g = fixtures::sentence_grammar();
    let u = universal_grammar(g.species.clone(), "S").map_err(|e| e.to_string())?;
    let prods: BTreeSet<String> = u.productions().into_iter().collect();
    let want: BTreeSet<String> = [
        "S -> x1.0 NP x1.1 VP x1.2",
        "NP -> x2.0",
        "NP -> x3.0",
        "VP -> x4.0 NP x4.1",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    ensure(prods == want, || format!("productions {prods:?}"))?;
    let m = coloring_automaton(&g);
    let states: BTreeSet<&str> = m.states().nodes().map(|q| m.states().node_name(q)).collect();
    let want_states: BTreeSet<&str> = ["S↑", "S↓", "NP↑", "NP↓", "VP↑", "VP↓"].into_iter().collect();
    ensure(states == want_states, || format!("states {states:?}"))?;
    let want_table: BTreeSet<(String, String, String)> = [
        ("S↑", "NP↑", "x1.0"),
        ("NP↑", "NP↓", "x2.0"),
        ("NP↑", "NP↓", "x3.0"),
        ("NP↓", "VP↑", "x1.1"),
        ("VP↑", "NP↑", "x4.0"),
        ("NP↓", "VP↓", "x4.1"),
        ("VP↓", "S↓", "x1.2"),
    ]
    .iter()
    .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
    .collect();
    let table = transition_table(&m);
    ensure(table == want_table, || format!("transitions {table:?}"))?;
    Ok("4 productions; 6 states, 7 transitions".into())
}

fn decomposition_matches_grammar() -> Verdict {
    let g = fixtures::sentence_grammar();
    let rep = cs_verify(&cs_decompose(&g), &g, None, 5, CsRoute::Pullback).map_err(|e| e.to_string())?;
    ensure(rep.equal() && rep.from_grammar.len() == 4, || {
        format!("sentence grammar: {rep}")
    })?;
    let r = oracle::check_cs(SEED, 20, 8);
    let text = format!("sentence grammar {rep}; {}", reports(std::slice::from_ref(&r))?);
    ensure(r.cases >= 20, || text.clone())?;
    Ok(text)
}

fn parser_oracle() -> Verdict {
    let (r, infinite) = oracle::check_parser(SEED, 100, 5);
    let mut notes = vec![format!("{r}, {infinite} with infinitely many trees")];
    ensure(r.passed() && r.cases >= 100 && infinite > 0, || notes.join("; "))?;

    // Catalan counts for `S -> S S | a`, counted independently.
    let g = parse_classical("S -> S S | a").map_err(|e| e.to_string())?;
    for n in 1..=7u64 {
        let w = g
            .base
            .parse_path(&vec!["a"; n as usize].join(" "), None)
            .map_err(|e| e.to_string())?;
        let got = g.parse_count(&w);
        ensure(got == AmbiguityCount::Finite(catalan(n - 1) as u128), || {
            format!("a^{n}: {got}, want {}", catalan(n - 1))
        })?;
    }
    notes.push("Catalan counts to a^7".into());

    // Unit and nullable cycles give infinitely many trees on every word
    // they derive.
    for (text, word) in [
        ("S -> S | a", "a"),
        ("S -> A b\nA -> B | a\nB -> A", "a b"),
        ("S -> S E | a\nE -> ε", "a"),
        ("S -> S S | a | ε", "a a"),
    ] {
        let g = parse_classical(text).map_err(|e| e.to_string())?;
        let w = g.base.parse_path(word, None).map_err(|e| e.to_string())?;
        let got = g.parse_count(&w);
        ensure(got == AmbiguityCount::Infinite, || format!("{text:?} on {word}: {got}"))?;
        ensure(g.accepts(&w) && g.member_bruteforce(&w, 8), || {
            format!("{text:?} rejects {word}")
        })?;
    }
    notes.push("4 cyclic fixtures infinite".into());
    Ok(notes.join("; "))
}

fn boolean_fixture() -> Verdict {
    let a = fixtures::boolean_automaton();
    let s = a.base().clone();
    let root = s.require_color("b").map_err(|e| e.to_string())?;
    let trees = s.enumerate_trees(root, 7, true);
    let mut truths = 0;
    for t in &trees {
        let acc = a.accepts_tree(t).map_err(|e| e.to_string())?;
        ensure(acc == evaluate(&s, t), || format!("{} accepted={acc}", t.render(&s)))?;
        truths += usize::from(acc);
    }
    Ok(format!("{} trees up to 7 nodes, {truths} true", trees.len()))
}

#[test]
fn acceptance() {
    let mut run = Run { failed: Vec::new() };

    run.criterion(1, "sentence grammar language and parse", 1, sentence_worked_example);
    run.criterion(
        2,
        "contour and bracket word of a(b, c(d, e), f(g))",
        1,
        contour_worked_example,
    );
    run.criterion(3, "universal grammar and coloring automaton", 1, universal_and_coloring);
    run.criterion(
        4,
        "decomposition equals grammar (words <= 8, 20 grammars)",
        60,
        decomposition_matches_grammar,
    );
    run.criterion(5, "grammar-automaton intersection (50 pairs, words <= 8)", 120, || {
        let r = oracle::check_bar_hillel(SEED, 50, 8);
        ensure(r.cases >= 50, || r.to_string())?;
        reports(&[r])
    });
    run.criterion(
        6,
        "recognizer and counts against brute force (100 pairs)",
        60,
        parser_oracle,
    );
    run.criterion(7, "bilinear form (counts <= 6, languages <= 8)", 30, || {
        reports(&[oracle::check_bilinearize(SEED, 20, 6, 8)])
    });
    run.criterion(
        8,
        "bracket round trips (trees <= 6) and index automaton (length <= 12)",
        30,
        || reports(&[oracle::check_dyck(6, 12)]),
    );
    run.criterion(9, "tree automata (50 instances, trees <= 7)", 60, || {
        let r = oracle::check_tree_automata(SEED, 50, 7);
        let b = boolean_fixture()?;
        reports(&[r]).map(|t| format!("{t}; boolean fixture: {b}"))
    });
    run.criterion(10, "structural laws (1000 cases each)", 60, || {
        let rs = [
            oracle::check_operad_laws(SEED, 1000),
            oracle::check_splicing_laws(SEED, 1000),
            oracle::check_run_factorization(SEED, 1000),
            oracle::check_contour_yield(SEED, 1000),
        ];
        ensure(rs.iter().all(|r| r.cases >= 1000), || format!("{rs:?}"))?;
        reports(&rs)
    });

    assert!(run.failed.is_empty(), "failed criteria: {:?}", run.failed);
}
