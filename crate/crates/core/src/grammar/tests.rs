use super::*;
use crate::fixtures;

fn words(g: &Cfg, set: &BTreeSet<PathArrow>) -> BTreeSet<String> {
    set.iter().map(|p| g.base.render_path(p)).collect()
}

fn word(g: &Cfg, text: &str) -> PathArrow {
    g.base.parse_path(text, Some("*")).unwrap()
}

#[test]
fn sentence_grammar_is_valid() {
    let g = fixtures::sentence_grammar();
    assert!(g.validate().is_valid());
    assert_eq!(
        g.productions(),
        vec!["S -> NP sp VP", "NP -> mom", "NP -> tom", "VP -> loves sp NP"]
    );
}

#[test]
fn typing_violations_are_reported() {
    let g = fixtures::sentence_grammar();
    let mut bad = g.clone();
    let x2 = g.species.require_op("x2").unwrap();
    bad.rule_assign[x2.index()] = g.rule(g.species.require_op("x4").unwrap()).clone();
    assert_eq!(bad.validate().violations.len(), 1);

    let base = Arc::new(Graph::new(["A", "B"], vec![("e".into(), "A".into(), "B".into())]).unwrap());
    let s = Arc::new(Species::new(["R"], [("x".to_string(), vec![], "R".to_string())]).unwrap());
    let (a, b) = (base.node("A").unwrap(), base.node("B").unwrap());
    let r = Cfg {
        base: base.clone(),
        species: s,
        start: ColorIx(0),
        color_assign: vec![GapType::new(a, a)],
        rule_assign: vec![SplicedArrow::constant(base.path_from_names("A", &["e"]).unwrap())],
    };
    let report = r.validate();
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].subject.as_deref(), Some("x"));
    assert!(Cfg::new(
        r.base.clone(),
        r.species.clone(),
        r.start,
        vec![GapType::new(a, b)],
        r.rule_assign.clone()
    )
    .is_ok());
}

#[test]
fn yield_of_sentence_tree() {
    let g = fixtures::sentence_grammar();
    let t = fixtures::sentence_tree(&g.species);
    let p = g.yield_path(&t).unwrap();
    assert_eq!(g.base.render_path(&p), "mom sp loves sp tom");
    let np = g.species.require_color("NP").unwrap();
    let leaf = g.yield_of(&OpTree::Leaf(np)).unwrap();
    assert_eq!(leaf, SplicedArrow::identity(g.gap(np)));
    assert!(matches!(g.yield_path(&OpTree::Leaf(np)), Err(Error::OpenTree)));
}

#[test]
fn chart_of_sentence() {
    let g = fixtures::sentence_grammar();
    let w = word(&g, "mom sp loves sp tom");
    let chart = g.recognize(&w);
    let c = |n: &str| g.species.require_color(n).unwrap();
    assert!(chart.contains(0, 5, c("S")));
    assert!(chart.contains(0, 1, c("NP")));
    assert!(chart.contains(4, 5, c("NP")));
    assert!(chart.contains(2, 5, c("VP")));
    assert!(!chart.contains(0, 4, c("S")));
    let empty = g.recognize(&PathArrow::identity(g.base.node("*").unwrap()));
    assert!(empty.colors_at(0, 0).is_empty());
}

#[test]
fn single_parse_of_sentence() {
    let g = fixtures::sentence_grammar();
    let w = word(&g, "mom sp loves sp tom");
    let r = g.parse_trees(&w, 10);
    assert_eq!(r.trees, vec![fixtures::sentence_tree(&g.species)]);
    assert_eq!(r.count, AmbiguityCount::Finite(1));
    assert!(!r.truncated);
    let bad = word(&g, "mom mom");
    assert!(g.parse_trees(&bad, 10).trees.is_empty());
    assert_eq!(g.parse_count(&bad), AmbiguityCount::Finite(0));
    assert!(!g.member_bruteforce(&bad, 6));
}

#[test]
fn unit_cycle_is_infinitely_ambiguous() {
    let g = parse_classical("S -> S | a").unwrap();
    let w = word(&g, "a");
    assert!(g.accepts(&w));
    assert_eq!(g.parse_count(&w), AmbiguityCount::Infinite);
    let r = g.parse_trees(&w, 4);
    assert!(r.truncated);
    assert_eq!(r.trees.len(), 4);
    let heights: Vec<usize> = r.trees.iter().map(OpTree::height).collect();
    assert_eq!(heights, vec![1, 2, 3, 4]);
    for t in &r.trees {
        assert_eq!(g.yield_path(t).unwrap(), w);
    }
}

#[test]
fn nullable_colors_are_recognized() {
    let g = parse_classical("S -> A a A\nA -> ε | A A").unwrap();
    let w = word(&g, "a");
    assert!(g.accepts(&w));
    assert_eq!(g.parse_count(&w), AmbiguityCount::Infinite);
    let a = g.species.require_color("A").unwrap();
    assert!(g.analyze().nullable.contains(&a));
}

#[test]
fn ambiguous_counts_are_catalan() {
    let g = parse_classical("S -> S S | a").unwrap();
    let counts: Vec<AmbiguityCount> = (1..=5)
        .map(|n| g.parse_count(&word(&g, &vec!["a"; n].join(" "))))
        .collect();
    let want: Vec<AmbiguityCount> = [1, 1, 2, 5, 14].map(AmbiguityCount::Finite).to_vec();
    assert_eq!(counts, want);
    let r = g.parse_trees(&word(&g, "a a a a"), 100);
    assert_eq!(r.trees.len(), 5);
    let distinct: BTreeSet<&OpTree> = r.trees.iter().collect();
    assert_eq!(distinct.len(), 5);
}

#[test]
fn sentence_language() {
    let g = fixtures::sentence_grammar();
    let lang = words(&g, &g.enumerate_language(5));
    let want: BTreeSet<String> = [
        "mom sp loves sp mom",
        "mom sp loves sp tom",
        "tom sp loves sp mom",
        "tom sp loves sp tom",
    ]
    .map(String::from)
    .into();
    assert_eq!(lang, want);
    assert!(g.enumerate_language(4).is_empty());
}

#[test]
fn dyck_language() {
    let g = fixtures::dyck_grammar();
    let lang = words(&g, &g.enumerate_language(4));
    let want: BTreeSet<String> = ["id[*]", "[ ]", "[ ] [ ]", "[ [ ] ]"].map(String::from).into();
    assert_eq!(lang, want);
    for w in g.enumerate_language(6) {
        assert!(g.accepts(&w));
    }
    let empty = Cfg::new(
        g.base.clone(),
        Arc::new(Species::new(["S"], Vec::<(String, Vec<String>, String)>::new()).unwrap()),
        ColorIx(0),
        vec![g.start_gap()],
        vec![],
    )
    .unwrap();
    assert!(empty.enumerate_language(4).is_empty());
}

#[test]
fn union_adds_languages_and_counts() {
    let a = parse_classical("S -> a").unwrap();
    let base = a.base.clone();
    let u = union(&[a.clone(), a.clone()]).unwrap();
    assert_eq!(u.enumerate_language(3), a.enumerate_language(3));
    let w = word(&a, "a");
    assert_eq!(u.parse_count(&w), AmbiguityCount::Finite(2));
    let one = union(std::slice::from_ref(&a)).unwrap();
    assert_eq!(one.enumerate_language(3), a.enumerate_language(3));
    assert_eq!(*u.base, *base);
}

#[test]
fn union_of_singletons() {
    let ab = Arc::new(Graph::bouquet(&["a", "b"]).unwrap());
    let single = |letter: &str| {
        let species = Arc::new(Species::new(["S"], [("x".to_string(), vec![], "S".to_string())]).unwrap());
        let star = ab.node("*").unwrap();
        Cfg::new(
            ab.clone(),
            species,
            ColorIx(0),
            vec![GapType::new(star, star)],
            vec![SplicedArrow::constant(ab.path_from_names("*", &[letter]).unwrap())],
        )
        .unwrap()
    };
    let u = union(&[single("a"), single("b")]).unwrap();
    let lang = words(&u, &u.enumerate_language(3));
    assert_eq!(lang, ["a", "b"].map(String::from).into());
}

#[test]
fn splice_concat_builds_the_sentence_language() {
    let g = fixtures::sentence_grammar();
    let np = parse_classical("NP -> mom | tom").unwrap();
    let vp = parse_classical("VP -> loves sp NP\nNP -> mom | tom").unwrap();
    let base = g.base.clone();
    let rebase = |h: &Cfg| {
        let names: HashMap<String, String> = h
            .base
            .edges()
            .map(|e| (h.base.edge_name(e).to_string(), h.base.edge_name(e).to_string()))
            .collect();
        let nodes: HashMap<String, String> = [("*".to_string(), "*".to_string())].into();
        let hom = crate::graph::GraphHom::from_names(h.base.clone(), base.clone(), &nodes, &names).unwrap();
        image(h, &hom.to_functor()).unwrap()
    };
    let f = SplicedArrow::new(vec![
        PathArrow::identity(base.node("*").unwrap()),
        word(&g, "sp"),
        PathArrow::identity(base.node("*").unwrap()),
    ])
    .unwrap();
    let sent = splice_concat(base.clone(), &f, &[rebase(&np), rebase(&vp)]).unwrap();
    assert_eq!(sent.enumerate_language(6), g.enumerate_language(6));

    let constant = splice_concat(base.clone(), &SplicedArrow::constant(word(&g, "mom")), &[]).unwrap();
    assert_eq!(
        words(&constant, &constant.enumerate_language(4)),
        ["mom".to_string()].into()
    );
}

#[test]
fn image_under_erasing_functor() {
    let g = fixtures::dyck_grammar();
    let star = g.base.node("*").unwrap();
    let id = PathFunctor::identity(g.base.clone());
    assert_eq!(image(&g, &id).unwrap(), g);
    let erase = PathFunctor::new(
        g.base.clone(),
        g.base.clone(),
        vec![star],
        g.base.edges().map(|_| PathArrow::identity(star)).collect(),
    )
    .unwrap();
    let e = image(&g, &erase).unwrap();
    assert_eq!(e.enumerate_language(4), [PathArrow::identity(star)].into());
}

#[test]
fn bilinearize_preserves_language_and_counts() {
    let g = parse_classical("S -> a S b S c | d\nS -> S S S").unwrap();
    assert!(!g.is_bilinear());
    let (b, tr) = bilinearize(&g).unwrap();
    assert!(b.is_bilinear());
    assert_eq!(b.enumerate_language(7), g.enumerate_language(7));
    for w in g.enumerate_language(7) {
        assert_eq!(b.parse_count(&w), g.parse_count(&w));
    }
    for t in g.species.enumerate_trees(g.start, 4, true) {
        let u = tr.translate_tree(&t).unwrap();
        assert_eq!(b.yield_path(&u).unwrap(), g.yield_path(&t).unwrap());
    }
}

#[test]
fn bilinearize_sentence_grammar() {
    let g = fixtures::sentence_grammar();
    let (b, tr) = bilinearize(&g).unwrap();
    assert!(b.is_bilinear());
    assert_eq!(b.enumerate_language(6), g.enumerate_language(6));
    // x1 and x4 are expanded, with one accumulator color per input
    assert_eq!(b.species.color_count(), 3 + 2 + 1);
    assert_eq!(b.species.op_count(), 3 + 2 + 2);
    let t = fixtures::sentence_tree(&g.species);
    let u = tr.translate_tree(&t).unwrap();
    assert!(u.is_closed());
    assert_eq!(b.yield_path(&u).unwrap(), g.yield_path(&t).unwrap());
    let leaf = OpTree::Leaf(g.start);
    assert_eq!(tr.translate_tree(&leaf).unwrap(), OpTree::Leaf(b.start));
}

#[test]
fn translation_respects_grafting() {
    let g = fixtures::sentence_grammar();
    let (_, tr) = bilinearize(&g).unwrap();
    let s = &g.species;
    let x1 = OpTree::generator(s, s.require_op("x1").unwrap());
    let x4 = OpTree::generator(s, s.require_op("x4").unwrap());
    let grafted = x1.graft(s, 1, &x4).unwrap();
    let left = tr.translate_tree(&grafted).unwrap();
    let right = tr
        .translate_tree(&x1)
        .unwrap()
        .graft(&tr.target.species, 1, &tr.translate_tree(&x4).unwrap())
        .unwrap();
    assert_eq!(left, right);
}

#[test]
fn analysis_and_trim() {
    let g = fixtures::sentence_grammar();
    let a = g.analyze();
    assert!(a.nullable.is_empty());
    assert_eq!(a.useful.len(), 3);
    assert_eq!(g.trim(), g);

    let junk = parse_classical("S -> a | B\nB -> B b\nC -> c").unwrap();
    let t = junk.trim();
    assert_eq!(t.species.color_count(), 1);
    assert_eq!(t.enumerate_language(4), junk.enumerate_language(4));
    let eps = parse_classical("S -> ε").unwrap();
    assert!(eps.analyze().nullable.contains(&eps.start));
}

#[test]
fn functoriality_of_yield() {
    let g = fixtures::sentence_grammar();
    let s = &g.species;
    let x1 = OpTree::generator(s, s.require_op("x1").unwrap());
    let x4 = OpTree::generator(s, s.require_op("x4").unwrap());
    let t = x1.graft(s, 1, &x4).unwrap();
    assert_eq!(
        g.yield_of(&t).unwrap(),
        g.yield_of(&x1)
            .unwrap()
            .splice_at(1, &g.yield_of(&x4).unwrap())
            .unwrap()
    );
}

#[test]
fn recognize_agrees_with_bruteforce_on_dyck() {
    let g = fixtures::dyck_grammar();
    let star = g.base.node("*").unwrap();
    for w in g.base.enumerate_paths(star, star, 6) {
        assert_eq!(g.accepts(&w), g.member_bruteforce(&w, 7), "{}", g.base.render_path(&w));
    }
}

#[test]
fn min_cost_of_sentence() {
    let g = fixtures::sentence_grammar();
    let w = word(&g, "mom sp loves sp tom");
    let cost = g.min_derivation_cost(&w, |x| g.species.arity(x) + 1);
    assert_eq!(cost, Some(3 + 1 + 2 + 1));
}

#[test]
fn classical_reader_errors() {
    assert!(parse_classical("").is_err());
    assert!(parse_classical("S a").is_err());
    let g = parse_classical("# comment\nS -> a S b | \n").unwrap();
    assert_eq!(g.productions(), vec!["S -> a S b", "S -> ε"]);
}
