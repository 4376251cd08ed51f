use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splicetool"))
        .args(args)
        .env_remove("SPLICETOOL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parse_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("t.dot");
    let json = dir.path().join("t.json");
    let o = run(&[
        "parse",
        "-g",
        &data("sent.json"),
        "-w",
        "mom sp loves sp tom",
        "--dot",
        dot.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 tree (count 1)\nx1(x2, x4(x3))\n");
    let dot = std::fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph tree {"));
    assert_eq!(dot.matches("->").count(), 3);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["count"], "1");
    assert_eq!(
        v["trees"][0],
        serde_json::json!(["x1", [["x2", []], ["x4", [["x3", []]]]]])
    );
}

#[test]
fn cs_verify_sentence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cs");
    let o = run(&[
        "cs",
        "-g",
        &data("sent.json"),
        "--verify",
        "--contour-bound",
        "auto",
        "--word-bound",
        "5",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "EQUAL (4 words)\n");
    for f in ["contour_grammar.json", "coloring_automaton.json", "output_functor.json"] {
        let text = std::fs::read_to_string(out.join(f)).unwrap();
        serde_json::from_str::<serde_json::Value>(&text).unwrap();
    }
}

/// Bracket words of length at most `max_len` that balance and never nest
/// deeper than `depth`.
fn shallow_dyck(max_len: usize, depth: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for len in (0..=max_len).step_by(2) {
        for bits in 0u32..(1 << len) {
            let word: Vec<&str> = (0..len).map(|i| if bits >> i & 1 == 0 { "[" } else { "]" }).collect();
            let mut d = 0i32;
            let ok = word.iter().all(|&l| {
                d += if l == "[" { 1 } else { -1 };
                d >= 0 && d as usize <= depth
            });
            if ok && d == 0 {
                out.insert(if len == 0 { "ε".to_string() } else { word.join(" ") });
            }
        }
    }
    out
}

#[test]
fn intersect_dyck_with_depth_automaton() {
    let o = run(&[
        "intersect",
        "-g",
        &data("dyck.json"),
        "-a",
        &data("nfa.json"),
        "--enumerate",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let got: BTreeSet<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(got, shallow_dyck(8, 2));
}

#[test]
fn intersect_with_classical_automaton() {
    let o = run(&[
        "intersect",
        "-g",
        &data("dyck.json"),
        "-a",
        &data("even.json"),
        "--enumerate",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let got: BTreeSet<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(got, shallow_dyck(6, 3));
}

#[test]
fn recognize_classical_grammar() {
    let ok = run(&["recognize", "-g", &data("arith.cfg"), "-w", "( 1 + 1 ) * 1"]);
    assert_eq!((ok.status.code(), stdout(&ok).as_str()), (Some(0), "accepted\n"));
    let no = run(&["recognize", "-g", &data("arith.cfg"), "-w", "1 + * 1"]);
    assert_eq!((no.status.code(), stdout(&no).as_str()), (Some(0), "rejected\n"));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["enumerate", "-g", &data("arith.cfg"), "--max-len", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["pullback", "-g", &data("dyck.json"), "-a", &data("nfa.json")];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn validation_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"base":{"bouquet":["a"]},"species":{"colors":["S"],"nodes":[]},"start":"Q","colorMap":{},"ruleMap":{}}"#,
    )
    .unwrap();
    let o = run(&["analyze", "-g", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.json") && err.contains("`Q`"), "{err}");

    let o = run(&["parse", "-g", &data("sent.json"), "-w", "mom nobody"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["parse", "-g", &data("sent.json")]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--max-len", "many"]).status.code(), Some(2));
}

#[test]
fn seed_variable_overrides_flag() {
    let o = Command::new(env!("CARGO_BIN_EXE_splicetool"))
        .args(["check-oracle", "--seed", "1"])
        .env("SPLICETOOL_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("seed 7\n"));
}

#[test]
fn dyck_subcommands() {
    let species = data("contour_species.json");
    let o = run(&["dyck", "translate", "-s", &species, "-t", "a(b, c(d, e), f(g))"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let brackets = text.lines().find_map(|l| l.strip_prefix("brackets: ")).unwrap();
    assert_eq!(brackets.split(' ').count(), 26);
    let contour = "a.0 b.0 a.1 c.0 d.0 c.1 e.0 c.2 a.2 f.0 g.0 f.1 a.3";
    assert!(text.contains(&format!("green: {contour}")) && text.contains(&format!("red: {contour}")));

    let o = run(&["dyck", "verify", "-s", &species, "--max-len", "10", "--max-nodes", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn tree_automaton_commands() {
    let a = data("boolean.json");
    let o = run(&["tree-accept", "-a", &a, "-t", "and(true, and(true, true))"]);
    assert!(stdout(&o).starts_with("accepted (1 runs)"));
    let o = run(&["tree-accept", "-a", &a, "-t", "and(false, true)"]);
    assert!(stdout(&o).starts_with("rejected"));
}
