//! The `splicetool` command line.
//!
//! Exit status is 0 on success, 1 when an input fails validation or a
//! verification reports a difference, and 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::automaton::Nfa;
use crate::contour::{
    contour_graph, contour_of_tree, cs_decompose, cs_verify, render_contour, universal_grammar, CsRoute,
};
use crate::dot;
use crate::dyck::{
    dyck_k_grammar, index_automaton, inverse_translate, letters, s_translate, sdyck_grammar, BracketAlphabet, Side,
};
use crate::error::Error;
use crate::grammar::{bilinearize, AmbiguityCount, Cfg};
use crate::graph::{Graph, PathArrow};
use crate::intersection::{intersect_cfg_regular, pullback_grammar, PullbackOptions};
use crate::io::{self, AutomatonFile};
use crate::oracle;
use crate::species::{OpTree, Species};
use crate::tree_automaton::intersect_gcfg_regular;

pub const SEED_ENV: &str = "SPLICETOOL_SEED";

#[derive(Parser, Debug)]
#[command(name = "splicetool", version, about = "Grammars and automata over free categories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Grammar file (JSON, or classical productions).
    #[arg(short = 'g', long = "grammar", global = true)]
    grammar: Option<PathBuf>,
    /// Automaton file (word, classical or tree automaton).
    #[arg(short = 'a', long = "automaton", global = true)]
    automaton: Option<PathBuf>,
    /// Whitespace-separated edge names.
    #[arg(short = 'w', long = "word", global = true, allow_hyphen_values = true)]
    word: Option<String>,
    /// Source node of the word (needed for empty words over many nodes).
    #[arg(long, global = true)]
    from: Option<String>,
    /// Target node, checked against the word.
    #[arg(long, global = true)]
    to: Option<String>,
    /// Species file, for commands that only need a species.
    #[arg(short = 's', long = "species", global = true)]
    species: Option<PathBuf>,
    /// Graph file, for `dot`.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// A tree, as `x1(x2, x4(x3))` or as JSON.
    #[arg(short = 't', long, global = true)]
    tree: Option<String>,
    /// Start color, for commands that only take a species.
    #[arg(long, global = true)]
    start: Option<String>,
    /// Longest word or path to enumerate.
    #[arg(long = "max-len", default_value_t = 8, global = true)]
    max_len: usize,
    /// Most parse trees to list.
    #[arg(long = "max-trees", default_value_t = 16, global = true)]
    max_trees: usize,
    /// Largest tree, in nodes, to enumerate.
    #[arg(long = "max-nodes", default_value_t = 6, global = true)]
    max_nodes: usize,
    /// Seed for randomized checks; the SPLICETOOL_SEED variable wins.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Keep useless colors in constructed grammars.
    #[arg(long = "no-trim", global = true)]
    no_trim: bool,
    /// Write GraphViz output here.
    #[arg(long, global = true)]
    dot: Option<PathBuf>,
    /// Write machine-readable output here.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the parse trees of a word.
    Parse(Plain),
    /// Decide membership of a word.
    Recognize(Plain),
    /// List the words of a grammar up to a length.
    Enumerate(Plain),
    /// List the words of an automaton up to a length.
    EnumerateNfa(Plain),
    /// Intersect a grammar with a word automaton.
    Intersect(IntersectArgs),
    /// The grammar of runs of an automaton over words of a grammar.
    Pullback(Plain),
    /// Put a grammar in bilinear normal form.
    Bilinearize(Plain),
    /// Drop useless colors and nodes.
    Trim(Plain),
    /// Validation, nullable, productive and useful colors.
    Analyze(Plain),
    /// The contour graph of a species, or the contour word of a tree.
    Contour(Plain),
    /// The universal grammar of tree contours.
    Universal(Plain),
    /// Decompose a grammar into contour grammar, automaton and functor.
    Cs(CsArgs),
    /// Bracket-word constructions.
    Dyck(DyckArgs),
    /// Run a tree automaton on a tree.
    TreeAccept(Plain),
    /// Intersect a tree grammar with a tree automaton.
    TreeIntersect(Plain),
    /// Randomized cross-checks against brute-force oracles.
    CheckOracle(OracleArgs),
    /// GraphViz output for a graph, grammar base, automaton or tree.
    Dot(Plain),
}

#[derive(Args, Debug)]
struct Plain {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct IntersectArgs {
    #[command(flatten)]
    common: Common,
    /// Also list the intersection's words up to this length.
    #[arg(long)]
    enumerate: Option<usize>,
}

#[derive(Args, Debug)]
struct CsArgs {
    #[command(flatten)]
    common: Common,
    /// Compare the decomposition with the grammar on bounded words.
    #[arg(long)]
    verify: bool,
    /// Contour length to enumerate, or `auto` for the witness bound.
    #[arg(long = "contour-bound", default_value = "auto")]
    contour_bound: String,
    /// Longest word compared.
    #[arg(long = "word-bound", default_value_t = 8)]
    word_bound: usize,
    /// Enumerate the contour language and filter it instead of pulling back.
    #[arg(long)]
    filter: bool,
    /// Directory for the three component files.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DyckArgs {
    #[command(subcommand)]
    action: DyckAction,
}

#[derive(Subcommand, Debug)]
enum DyckAction {
    /// Contour word and bracket word of a tree, and both readings back.
    Translate(Plain),
    /// The grammar of species-shaped bracket words.
    Grammar(Plain),
    /// The local-conditions automaton on bracket words.
    IndexAutomaton(Plain),
    /// Round trips and the index automaton, on bounded words.
    Verify(Plain),
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Multiplier on the suite sizes.
    #[arg(long, default_value_t = 1)]
    scale: usize,
}

/// What went wrong, and which exit status it earns.
enum Failure {
    Usage(String),
    Invalid(String),
    /// A verification ran and found a difference; its output is printed.
    Different,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}");
            2
        }
        Err(Failure::Invalid(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Different) => 1,
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Parse(a) => parse(&a.common, out),
        Command::Recognize(a) => recognize(&a.common, out),
        Command::Enumerate(a) => enumerate(&a.common, out),
        Command::EnumerateNfa(a) => enumerate_nfa(&a.common, out),
        Command::Intersect(a) => intersect(&a.common, a.enumerate, out),
        Command::Pullback(a) => pullback(&a.common, out),
        Command::Bilinearize(a) => bilinear(&a.common, out),
        Command::Trim(a) => trim(&a.common, out),
        Command::Analyze(a) => analyze(&a.common, out),
        Command::Contour(a) => contour(&a.common, out),
        Command::Universal(a) => universal(&a.common, out),
        Command::Cs(a) => cs(&a, out),
        Command::Dyck(a) => match a.action {
            DyckAction::Translate(p) => dyck_translate(&p.common, out),
            DyckAction::Grammar(p) => dyck_grammar(&p.common, out),
            DyckAction::IndexAutomaton(p) => dyck_index(&p.common, out),
            DyckAction::Verify(p) => dyck_verify(&p.common, out),
        },
        Command::TreeAccept(a) => tree_accept(&a.common, out),
        Command::TreeIntersect(a) => tree_intersect(&a.common, out),
        Command::CheckOracle(a) => check_oracle(&a.common, a.scale, out),
        Command::Dot(a) => dot_cmd(&a.common, out),
    }
}

// inputs

fn need<'a, T>(v: &'a Option<T>, flag: &str) -> std::result::Result<&'a T, Failure> {
    v.as_ref()
        .ok_or_else(|| Failure::Usage(format!("this command needs {flag}")))
}

fn grammar(c: &Common) -> std::result::Result<Cfg, Failure> {
    Ok(io::load_grammar(need(&c.grammar, "-g/--grammar FILE")?)?)
}

/// The species and start color from `--species`/`--start`, or from the
/// grammar.
fn species_and_start(c: &Common) -> std::result::Result<(Arc<Species>, String), Failure> {
    if let Some(path) = &c.species {
        let s = Arc::new(io::load_species(path)?);
        let start = match &c.start {
            Some(st) => st.clone(),
            None => s.color_name(crate::species::ColorIx(0)).to_string(),
        };
        return Ok((s, start));
    }
    if c.grammar.is_none() {
        return Err(Failure::Usage(
            "this command needs -s/--species FILE or -g/--grammar FILE".into(),
        ));
    }
    let g = grammar(c)?;
    let start = c
        .start
        .clone()
        .unwrap_or_else(|| g.species.color_name(g.start).to_string());
    Ok((g.species.clone(), start))
}

fn word(c: &Common, g: &Graph, default_from: &str) -> std::result::Result<PathArrow, Failure> {
    let tokens = need(&c.word, "-w/--word TOKENS")?;
    let from = c.from.as_deref().or(if tokens.trim().is_empty() {
        Some(default_from)
    } else {
        None
    });
    let w = g
        .parse_path(tokens, from)
        .map_err(|e| Failure::Invalid(format!("--word: {e}")))?;
    if let Some(to) = &c.to {
        if g.node_name(w.tgt()) != to {
            return Err(Failure::Invalid(format!(
                "--word ends at `{}`, not `{to}`",
                g.node_name(w.tgt())
            )));
        }
    }
    Ok(w)
}

fn tree(c: &Common, s: &Species) -> std::result::Result<OpTree, Failure> {
    let text = need(&c.tree, "-t/--tree TREE")?;
    io::parse_tree_arg(s, text).map_err(|e| Failure::Invalid(format!("--tree: {e}")))
}

/// Word automata from a file: classical automata over a one-object base
/// become one automaton per initial/accepting pair.
fn automata(c: &Common, base: Option<&Arc<Graph>>) -> std::result::Result<Vec<Nfa>, Failure> {
    let path = need(&c.automaton, "-a/--automaton FILE")?;
    match io::load_automaton(path)? {
        AutomatonFile::Categorical(m) => Ok(vec![m]),
        AutomatonFile::Classical(k) => {
            let base = match base {
                Some(b) => b.clone(),
                None => Arc::new(Graph::bouquet(&k.alphabet)?),
            };
            Ok(k.to_nfas(base)
                .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?)
        }
    }
}

// outputs

fn write_file(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn emit_json(c: &Common, v: &Value) -> Outcome {
    match &c.json {
        Some(p) => write_file(p, &io::to_pretty(v)),
        None => Ok(()),
    }
}

fn emit_dot(c: &Common, text: &str) -> Outcome {
    match &c.dot {
        Some(p) => write_file(p, text),
        None => Ok(()),
    }
}

fn render_word(g: &Graph, w: &PathArrow) -> String {
    if w.is_identity() && g.node_count() == 1 {
        "ε".to_string()
    } else {
        g.render_path(w)
    }
}

fn words_json(g: &Graph, words: impl IntoIterator<Item = PathArrow>) -> Value {
    Value::Array(words.into_iter().map(|w| json!(g.edge_names(&w))).collect())
}

fn print_grammar(out: &mut dyn Write, g: &Cfg) -> Outcome {
    for p in g.productions() {
        writeln!(out, "{p}")?;
    }
    Ok(())
}

fn count_json(n: &AmbiguityCount) -> Value {
    match n {
        AmbiguityCount::Finite(k) => json!(k.to_string()),
        AmbiguityCount::Infinite => json!("infinite"),
    }
}

// commands

fn parse(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?;
    let w = word(c, &g.base, g.base.node_name(g.start_gap().left))?;
    let res = g.parse_trees(&w, c.max_trees);
    let n = res.trees.len();
    writeln!(out, "{} tree{} (count {})", n, if n == 1 { "" } else { "s" }, res.count)?;
    for t in &res.trees {
        writeln!(out, "{}", t.render(&g.species))?;
    }
    if res.truncated {
        writeln!(out, "(more trees exist; raise --max-trees)")?;
    }
    let dots: String = res.trees.iter().map(|t| dot::tree_dot(&g.species, t)).collect();
    emit_dot(c, &dots)?;
    emit_json(
        c,
        &json!({
            "word": g.base.edge_names(&w),
            "count": count_json(&res.count),
            "truncated": res.truncated,
            "trees": res.trees.iter().map(|t| io::tree_to_json(&g.species, t)).collect::<Vec<_>>(),
        }),
    )
}

fn recognize(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?;
    let w = word(c, &g.base, g.base.node_name(g.start_gap().left))?;
    let chart = g.recognize(&w);
    let accepted = g.accepts(&w);
    writeln!(out, "{}", if accepted { "accepted" } else { "rejected" })?;
    let mut cells = Vec::new();
    for i in 0..=chart.len() {
        for j in i..=chart.len() {
            for col in chart.colors_at(i, j) {
                cells.push(json!([i, j, g.species.color_name(col)]));
            }
        }
    }
    emit_json(
        c,
        &json!({ "word": g.base.edge_names(&w), "accepted": accepted, "chart": cells }),
    )
}

fn enumerate(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?;
    let words = g.enumerate_language(c.max_len);
    for w in &words {
        writeln!(out, "{}", render_word(&g.base, w))?;
    }
    emit_json(c, &words_json(&g.base, words))
}

fn enumerate_nfa(c: &Common, out: &mut dyn Write) -> Outcome {
    let path = need(&c.automaton, "-a/--automaton FILE")?;
    match io::load_automaton(path)? {
        AutomatonFile::Categorical(m) => {
            let words = m.enumerate_regular(c.max_len);
            for w in &words {
                writeln!(out, "{}", render_word(m.base(), w))?;
            }
            emit_dot(c, &dot::nfa_dot(&m))?;
            emit_json(c, &words_json(m.base(), words))
        }
        AutomatonFile::Classical(k) => {
            let words = k.enumerate(c.max_len);
            for w in &words {
                writeln!(out, "{}", if w.is_empty() { "ε".to_string() } else { w.join(" ") })?;
            }
            emit_dot(c, &dot::classical_nfa_dot(&k))?;
            emit_json(c, &json!(words))
        }
    }
}

fn options(c: &Common) -> PullbackOptions {
    PullbackOptions {
        trim: !c.no_trim,
        ..PullbackOptions::default()
    }
}

fn intersect(c: &Common, enumerate: Option<usize>, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?;
    let parts = automata(c, Some(&g.base))?
        .iter()
        .map(|m| intersect_cfg_regular(&g, m, options(c)))
        .collect::<crate::Result<Vec<_>>>()?;
    let result = if parts.len() == 1 {
        parts.into_iter().next().expect("one part")
    } else {
        crate::grammar::union(&parts)?
    };
    match enumerate {
        Some(n) => {
            for w in result.enumerate_language(n) {
                writeln!(out, "{}", render_word(&result.base, &w))?;
            }
        }
        None => print_grammar(out, &result)?,
    }
    emit_json(c, &io::grammar_to_json(&result))
}

fn pullback(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?;
    let ms = automata(c, Some(&g.base))?;
    if ms.len() != 1 {
        return Err(Failure::Invalid(
            "pullback needs a single initial and accepting state".into(),
        ));
    }
    let p = pullback_grammar(&g, &ms[0], options(c))?;
    print_grammar(out, &p)?;
    emit_json(c, &io::grammar_to_json(&p))
}

fn bilinear(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?;
    let (b, _) = bilinearize(&g)?;
    let b = if c.no_trim { b } else { b.trim() };
    print_grammar(out, &b)?;
    emit_json(c, &io::grammar_to_json(&b))
}

fn trim(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?.trim();
    print_grammar(out, &g)?;
    emit_json(c, &io::grammar_to_json(&g))
}

fn analyze(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = grammar(c)?;
    let a = g.analyze();
    let s = &g.species;
    let names = |set: &std::collections::BTreeSet<crate::species::ColorIx>| {
        set.iter().map(|&c| s.color_name(c).to_string()).collect::<Vec<_>>()
    };
    writeln!(out, "colors: {}  nodes: {}", s.color_count(), s.op_count())?;
    writeln!(out, "nullable: {}", names(&a.nullable).join(" "))?;
    writeln!(out, "productive: {}", names(&a.productive).join(" "))?;
    writeln!(out, "useful: {}", names(&a.useful).join(" "))?;
    writeln!(out, "chromatic: {}  bilinear: {}", g.is_chromatic(), g.is_bilinear())?;
    emit_json(
        c,
        &json!({
            "colors": s.color_count(),
            "nodes": s.op_count(),
            "nullable": names(&a.nullable),
            "productive": names(&a.productive),
            "useful": names(&a.useful),
            "chromatic": g.is_chromatic(),
            "bilinear": g.is_bilinear(),
        }),
    )
}

fn contour(c: &Common, out: &mut dyn Write) -> Outcome {
    let (s, _) = species_and_start(c)?;
    let cg = contour_graph(s.clone());
    if c.tree.is_some() {
        let t = tree(c, &s)?;
        let w = contour_of_tree(&cg, &t)?;
        writeln!(out, "{}", render_contour(&cg, &w))?;
        emit_json(c, &json!(cg.graph.edge_names(&w)))?;
    } else {
        for e in cg.graph.edges() {
            writeln!(
                out,
                "{}: {} -> {}",
                cg.graph.edge_name(e),
                cg.graph.node_name(cg.graph.src(e)),
                cg.graph.node_name(cg.graph.tgt(e))
            )?;
        }
        emit_json(c, &io::graph_to_json(&cg.graph))?;
    }
    emit_dot(c, &dot::graph_dot(&cg.graph, "contour"))
}

fn universal(c: &Common, out: &mut dyn Write) -> Outcome {
    let (s, start) = species_and_start(c)?;
    let u = universal_grammar(s, &start)?;
    print_grammar(out, &u)?;
    emit_json(c, &io::grammar_to_json(&u))
}

fn cs(a: &CsArgs, out: &mut dyn Write) -> Outcome {
    let c = &a.common;
    let g = grammar(c)?;
    let d = cs_decompose(&g);
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Invalid(format!("{}: {e}", dir.display())))?;
        write_file(
            &dir.join("contour_grammar.json"),
            &io::to_pretty(&io::grammar_to_json(&d.chromatic_universal)),
        )?;
        write_file(
            &dir.join("coloring_automaton.json"),
            &io::to_pretty(&io::nfa_to_json(&d.coloring)),
        )?;
        write_file(
            &dir.join("output_functor.json"),
            &io::to_pretty(&io::functor_to_json(&d.output)),
        )?;
    }
    emit_dot(c, &dot::nfa_dot(&d.coloring))?;
    if !a.verify {
        writeln!(out, "contour grammar:")?;
        print_grammar(out, &d.chromatic_universal)?;
        writeln!(
            out,
            "coloring automaton: {} states, {} transitions",
            d.coloring.states().node_count(),
            d.coloring.transition_count()
        )?;
        return Ok(());
    }
    let bound = match a.contour_bound.as_str() {
        "auto" => None,
        n => Some(
            n.parse::<usize>()
                .map_err(|_| Failure::Usage(format!("--contour-bound: expected `auto` or a number, got `{n}`")))?,
        ),
    };
    let route = if a.filter { CsRoute::Filter } else { CsRoute::Pullback };
    let rep = cs_verify(&d, &g, bound, a.word_bound, route)?;
    writeln!(out, "{rep}")?;
    let base = &g.base;
    emit_json(
        c,
        &json!({
            "equal": rep.equal(),
            "wordBound": rep.word_bound,
            "contourBound": rep.contour_bound,
            "witnessBound": rep.witness_bound,
            "fromDecomposition": words_json(base, rep.from_decomposition.iter().cloned()),
            "fromGrammar": words_json(base, rep.from_grammar.iter().cloned()),
        }),
    )?;
    if rep.equal() {
        Ok(())
    } else {
        Err(Failure::Different)
    }
}

fn dyck_translate(c: &Common, out: &mut dyn Write) -> Outcome {
    let (s, _) = species_and_start(c)?;
    let cg = contour_graph(s.clone());
    let alphabet = BracketAlphabet::new(s.clone());
    let t = tree(c, &s)?;
    let w = contour_of_tree(&cg, &t)?;
    let d = s_translate(&cg, &alphabet, &w)?;
    let green = inverse_translate(&cg, &alphabet, &d, Side::Green)?;
    let red = inverse_translate(&cg, &alphabet, &d, Side::Red)?;
    writeln!(out, "contour: {}", render_contour(&cg, &w))?;
    writeln!(out, "brackets: {}", letters(&alphabet, &d).join(" "))?;
    writeln!(out, "green: {}", render_contour(&cg, &green))?;
    writeln!(out, "red: {}", render_contour(&cg, &red))?;
    emit_json(
        c,
        &json!({
            "contour": cg.graph.edge_names(&w),
            "brackets": letters(&alphabet, &d),
            "green": cg.graph.edge_names(&green),
            "red": cg.graph.edge_names(&red),
        }),
    )
}

fn dyck_grammar(c: &Common, out: &mut dyn Write) -> Outcome {
    let (s, start) = species_and_start(c)?;
    let g = sdyck_grammar(s, &start)?;
    print_grammar(out, &g)?;
    emit_json(c, &io::grammar_to_json(&g))
}

fn dyck_index(c: &Common, out: &mut dyn Write) -> Outcome {
    let (s, start) = species_and_start(c)?;
    let m = index_automaton(s, &start)?;
    for (p, a, q) in &m.transitions {
        writeln!(out, "{p} --{a}--> {q}")?;
    }
    emit_dot(c, &dot::classical_nfa_dot(&m))?;
    emit_json(c, &io::classical_nfa_to_json(&m))
}

fn dyck_verify(c: &Common, out: &mut dyn Write) -> Outcome {
    let (s, start) = species_and_start(c)?;
    let cg = contour_graph(s.clone());
    let alphabet = BracketAlphabet::new(s.clone());
    let mut trips = 0;
    let mut bad = Vec::new();
    for col in s.colors() {
        for t in s.enumerate_trees(col, c.max_nodes, true) {
            trips += 1;
            let w = contour_of_tree(&cg, &t)?;
            let d = s_translate(&cg, &alphabet, &w)?;
            for side in [Side::Green, Side::Red] {
                if inverse_translate(&cg, &alphabet, &d, side).as_ref() != Ok(&w) {
                    bad.push(t.render(&s));
                }
            }
        }
    }
    let dk = dyck_k_grammar(&alphabet)?;
    let index = index_automaton(s.clone(), &start)?;
    let cut: std::collections::BTreeSet<Vec<String>> = index
        .enumerate_where(c.max_len, |prefix| oracle::balance_possible(prefix, c.max_len))
        .into_iter()
        .filter(|w| crate::dyck::word_of(&alphabet, w).is_ok_and(|p| dk.accepts(&p)))
        .collect();
    let sd: std::collections::BTreeSet<Vec<String>> = sdyck_grammar(s.clone(), &start)?
        .enumerate_language(c.max_len)
        .iter()
        .map(|w| letters(&alphabet, w))
        .collect();
    let same = cut == sd;
    writeln!(out, "round trips: {} trees, {} failures", trips, bad.len())?;
    writeln!(
        out,
        "index automaton: {} ({} words up to length {})",
        if same { "EQUAL" } else { "DIFFERENT" },
        sd.len(),
        c.max_len
    )?;
    emit_json(
        c,
        &json!({ "roundTrips": trips, "roundTripFailures": bad, "indexEqual": same, "words": sd.len() }),
    )?;
    if bad.is_empty() && same {
        Ok(())
    } else {
        Err(Failure::Different)
    }
}

fn tree_accept(c: &Common, out: &mut dyn Write) -> Outcome {
    let a = io::load_tree_nfa(need(&c.automaton, "-a/--automaton FILE")?)?;
    let t = tree(c, a.base())?;
    let runs = a.runs_tree(&t)?;
    let accepted = a.accepts_tree(&t)?;
    writeln!(
        out,
        "{} ({} runs)",
        if accepted { "accepted" } else { "rejected" },
        runs.len()
    )?;
    for r in &runs {
        writeln!(out, "{}", r.render(a.states()))?;
    }
    emit_json(
        c,
        &json!({
            "accepted": accepted,
            "runs": runs.iter().map(|r| io::tree_to_json(a.states(), r)).collect::<Vec<_>>(),
        }),
    )
}

fn tree_intersect(c: &Common, out: &mut dyn Write) -> Outcome {
    let g = io::load_gcfg(need(&c.grammar, "-g/--grammar FILE")?)?;
    let a = io::load_tree_nfa(need(&c.automaton, "-a/--automaton FILE")?)?;
    let i = intersect_gcfg_regular(&g, &a)?;
    let i = if c.no_trim { i } else { i.trim()? };
    for t in i.enumerate(c.max_nodes) {
        writeln!(out, "{}", t.render(&i.base))?;
    }
    emit_json(c, &io::gcfg_to_json(&i))
}

/// The seed from the environment if set, else from `--seed`.
fn seed(c: &Common) -> std::result::Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}: expected an unsigned integer, got `{v}`"))),
        Err(_) => Ok(c.seed),
    }
}

fn check_oracle(c: &Common, scale: usize, out: &mut dyn Write) -> Outcome {
    let seed = seed(c)?;
    let reports = oracle::run_all(seed, scale);
    writeln!(out, "seed {seed}")?;
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    emit_json(
        c,
        &json!({
            "seed": seed,
            "checks": reports
                .iter()
                .map(|r| json!({ "name": r.name, "cases": r.cases, "passed": r.passed(), "failures": r.failures }))
                .collect::<Vec<_>>(),
        }),
    )?;
    if reports.iter().all(|r| r.passed()) {
        Ok(())
    } else {
        Err(Failure::Different)
    }
}

fn dot_cmd(c: &Common, out: &mut dyn Write) -> Outcome {
    let text = if let Some(path) = &c.graph {
        dot::graph_dot(&io::load_graph(path)?, "graph")
    } else if c.tree.is_some() {
        let (s, _) = species_and_start(c)?;
        dot::tree_dot(&s, &tree(c, &s)?)
    } else if let Some(path) = &c.automaton {
        match io::load_automaton(path)? {
            AutomatonFile::Categorical(m) => dot::nfa_dot(&m),
            AutomatonFile::Classical(k) => dot::classical_nfa_dot(&k),
        }
    } else if c.grammar.is_some() {
        dot::graph_dot(&grammar(c)?.base, "base")
    } else {
        return Err(Failure::Usage(
            "dot needs --graph, -a, -g, or a species with --tree".into(),
        ));
    };
    match &c.dot {
        Some(p) => write_file(p, &text),
        None => Ok(write!(out, "{text}")?),
    }
}
