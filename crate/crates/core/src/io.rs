//! JSON file formats for graphs, species, trees, grammars and automata.
//!
//! Wherever a file expects a graph or a species it also accepts a string,
//! read as a path relative to the referring file. A graph may also be given
//! as `{"bouquet": [letters]}`.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automaton::{ClassicalNfa, Nfa};
use crate::error::{Error, Result};
use crate::grammar::{parse_classical, Cfg};
use crate::graph::{Graph, GraphHom, PathFunctor};
use crate::species::{OpTree, Species, SpeciesMap};
use crate::tree_automaton::{GCfgFree, TreeNfa};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeFile {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    File(String),
    Bouquet { bouquet: Vec<String> },
    Inline(GraphFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeFile {
    pub id: String,
    pub inputs: Vec<String>,
    pub output: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpeciesFile {
    pub colors: Vec<String>,
    pub nodes: Vec<NodeFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeciesRef {
    File(String),
    Inline(SpeciesFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HomFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<GraphRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<GraphRef>,
    pub node_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrammarFile {
    pub base: GraphRef,
    pub species: SpeciesRef,
    pub start: String,
    pub color_map: BTreeMap<String, (String, String)>,
    pub rule_map: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NfaFile {
    pub base: GraphRef,
    pub states: GraphRef,
    pub hom: HomFile,
    pub q0: String,
    pub qf: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassicalNfaFile {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
    pub initial: Vec<String>,
    pub accepting: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeNfaFile {
    pub base: SpeciesRef,
    pub states: SpeciesRef,
    pub color_map: BTreeMap<String, String>,
    pub node_map: BTreeMap<String, String>,
    pub root: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GCfgFile {
    pub base: SpeciesRef,
    pub species: SpeciesRef,
    pub start: String,
    pub color_map: BTreeMap<String, String>,
    pub rule_map: BTreeMap<String, Value>,
}

/// Reads a file, naming it in the error.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn dir_of(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn string_map(m: &BTreeMap<String, String>) -> HashMap<String, String> {
    m.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

// graphs

impl GraphFile {
    pub fn build(&self) -> Result<Graph> {
        Graph::new(
            &self.nodes,
            self.edges.iter().map(|e| (e.id.clone(), e.src.clone(), e.tgt.clone())),
        )
    }

    pub fn of(g: &Graph) -> GraphFile {
        GraphFile {
            nodes: g.nodes().map(|n| g.node_name(n).to_string()).collect(),
            edges: g
                .edges()
                .map(|e| EdgeFile {
                    id: g.edge_name(e).to_string(),
                    src: g.node_name(g.src(e)).to_string(),
                    tgt: g.node_name(g.tgt(e)).to_string(),
                })
                .collect(),
        }
    }
}

impl GraphRef {
    pub fn resolve(&self, dir: &Path) -> Result<Graph> {
        match self {
            GraphRef::File(p) => load_graph(&dir.join(p)),
            GraphRef::Bouquet { bouquet } => Graph::bouquet(bouquet),
            GraphRef::Inline(g) => g.build(),
        }
    }
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    let f: GraphFile = parse_json(&read_text(path)?, &path.display().to_string())?;
    f.build()
}

pub fn graph_to_json(g: &Graph) -> Value {
    serde_json::to_value(GraphFile::of(g)).expect("serializable")
}

impl HomFile {
    pub fn build(&self, source: Arc<Graph>, target: Arc<Graph>) -> Result<GraphHom> {
        GraphHom::from_names(source, target, &string_map(&self.node_map), &string_map(&self.edge_map))
    }

    pub fn of(h: &GraphHom) -> HomFile {
        let (s, t) = (&h.source, &h.target);
        HomFile {
            source: None,
            target: None,
            node_map: s
                .nodes()
                .map(|n| (s.node_name(n).to_string(), t.node_name(h.map_node(n)).to_string()))
                .collect(),
            edge_map: s
                .edges()
                .map(|e| (s.edge_name(e).to_string(), t.edge_name(h.map_edge(e)).to_string()))
                .collect(),
        }
    }
}

/// A homomorphism file carrying its own source and target references.
pub fn load_hom(path: &Path) -> Result<GraphHom> {
    let f: HomFile = parse_json(&read_text(path)?, &path.display().to_string())?;
    let dir = dir_of(path);
    let missing = |field: &str| Error::Parse(format!("{}: missing `{field}`", path.display()));
    let source = f.source.as_ref().ok_or_else(|| missing("source"))?.resolve(&dir)?;
    let target = f.target.as_ref().ok_or_else(|| missing("target"))?.resolve(&dir)?;
    f.build(Arc::new(source), Arc::new(target))
}

// species and trees

impl SpeciesFile {
    pub fn build(&self) -> Result<Species> {
        Species::new(
            &self.colors,
            self.nodes
                .iter()
                .map(|n| (n.id.clone(), n.inputs.clone(), n.output.clone())),
        )
    }

    pub fn of(s: &Species) -> SpeciesFile {
        SpeciesFile {
            colors: s.colors().map(|c| s.color_name(c).to_string()).collect(),
            nodes: s
                .ops()
                .map(|x| {
                    let d = s.op(x);
                    NodeFile {
                        id: d.id.clone(),
                        inputs: d.inputs.iter().map(|&c| s.color_name(c).to_string()).collect(),
                        output: s.color_name(d.output).to_string(),
                    }
                })
                .collect(),
        }
    }
}

impl SpeciesRef {
    pub fn resolve(&self, dir: &Path) -> Result<Species> {
        match self {
            SpeciesRef::File(p) => load_species(&dir.join(p)),
            SpeciesRef::Inline(s) => s.build(),
        }
    }
}

pub fn load_species(path: &Path) -> Result<Species> {
    let f: SpeciesFile = parse_json(&read_text(path)?, &path.display().to_string())?;
    f.build()
}

pub fn species_to_json(s: &Species) -> Value {
    serde_json::to_value(SpeciesFile::of(s)).expect("serializable")
}

/// Trees are `["x", [children]]` with open slots written `{"leaf": "c"}`.
pub fn tree_to_json(s: &Species, t: &OpTree) -> Value {
    match t {
        OpTree::Leaf(c) => json!({ "leaf": s.color_name(*c) }),
        OpTree::Node(x, kids) => {
            let kids: Vec<Value> = kids.iter().map(|k| tree_to_json(s, k)).collect();
            json!([s.op_name(*x), kids])
        }
    }
}

pub fn tree_from_json(s: &Species, v: &Value) -> Result<OpTree> {
    let t = tree_from_json_unchecked(s, v)?;
    t.check(s)?;
    Ok(t)
}

fn tree_from_json_unchecked(s: &Species, v: &Value) -> Result<OpTree> {
    let bad = || Error::Parse(format!("not a tree: {v}"));
    match v {
        Value::Object(m) => {
            let c = m.get("leaf").and_then(Value::as_str).ok_or_else(bad)?;
            Ok(OpTree::Leaf(s.require_color(c)?))
        }
        Value::Array(items) => {
            let name = items.first().and_then(Value::as_str).ok_or_else(bad)?;
            let kids = match items.get(1) {
                None => Vec::new(),
                Some(Value::Array(kids)) => kids
                    .iter()
                    .map(|k| tree_from_json_unchecked(s, k))
                    .collect::<Result<_>>()?,
                Some(_) => return Err(bad()),
            };
            Ok(OpTree::Node(s.require_op(name)?, kids))
        }
        Value::String(name) => Ok(OpTree::Node(s.require_op(name)?, Vec::new())),
        _ => Err(bad()),
    }
}

/// A tree given either as JSON or in the bracket syntax `x1(x2, x3)`.
pub fn parse_tree_arg(s: &Species, text: &str) -> Result<OpTree> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        tree_from_json(s, &parse_json(trimmed, "tree")?)
    } else {
        OpTree::parse(s, trimmed)
    }
}

// grammars

impl GrammarFile {
    pub fn build(&self, dir: &Path) -> Result<Cfg> {
        let base = Arc::new(self.base.resolve(dir)?);
        let species = Arc::new(self.species.resolve(dir)?);
        let colors: HashMap<String, (String, String)> =
            self.color_map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let rules: HashMap<String, Vec<Vec<String>>> =
            self.rule_map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        Cfg::from_names(base, species, &self.start, &colors, &rules)
    }

    pub fn of(g: &Cfg) -> GrammarFile {
        let (b, s) = (&g.base, &g.species);
        GrammarFile {
            base: GraphRef::Inline(GraphFile::of(b)),
            species: SpeciesRef::Inline(SpeciesFile::of(s)),
            start: s.color_name(g.start).to_string(),
            color_map: s
                .colors()
                .map(|c| {
                    let gap = g.gap(c);
                    (
                        s.color_name(c).to_string(),
                        (b.node_name(gap.left).to_string(), b.node_name(gap.right).to_string()),
                    )
                })
                .collect(),
            rule_map: s
                .ops()
                .map(|x| {
                    let segs = g.rule(x).segments().iter().map(|p| b.edge_names(p)).collect();
                    (s.op_name(x).to_string(), segs)
                })
                .collect(),
        }
    }
}

/// Reads a grammar file. JSON objects use the grammar format; anything
/// else is read as classical productions.
pub fn grammar_from_str(text: &str, dir: &Path) -> Result<Cfg> {
    if text.trim_start().starts_with('{') {
        parse_json::<GrammarFile>(text, "grammar")?.build(dir)
    } else {
        parse_classical(text)
    }
}

pub fn load_grammar(path: &Path) -> Result<Cfg> {
    grammar_from_str(&read_text(path)?, &dir_of(path)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn grammar_to_json(g: &Cfg) -> Value {
    serde_json::to_value(GrammarFile::of(g)).expect("serializable")
}

// automata

impl NfaFile {
    pub fn build(&self, dir: &Path) -> Result<Nfa> {
        let base = Arc::new(self.base.resolve(dir)?);
        let states = Arc::new(self.states.resolve(dir)?);
        let q0 = states.require_node(&self.q0)?;
        let qf = states.require_node(&self.qf)?;
        Nfa::new(self.hom.build(states, base)?, q0, qf)
    }

    pub fn of(m: &Nfa) -> NfaFile {
        let states = m.states();
        NfaFile {
            base: GraphRef::Inline(GraphFile::of(m.base())),
            states: GraphRef::Inline(GraphFile::of(states)),
            hom: HomFile::of(&m.hom),
            q0: states.node_name(m.q0).to_string(),
            qf: states.node_name(m.qf).to_string(),
        }
    }
}

impl ClassicalNfaFile {
    pub fn build(self) -> Result<ClassicalNfa> {
        ClassicalNfa::new(
            self.alphabet,
            self.states,
            self.transitions,
            self.initial,
            self.accepting,
        )
    }

    pub fn of(c: &ClassicalNfa) -> ClassicalNfaFile {
        ClassicalNfaFile {
            alphabet: c.alphabet.clone(),
            states: c.states.clone(),
            transitions: c.transitions.clone(),
            initial: c.initial.clone(),
            accepting: c.accepting.clone(),
        }
    }
}

/// Either kind of word automaton file.
#[derive(Clone, Debug)]
pub enum AutomatonFile {
    Categorical(Nfa),
    Classical(ClassicalNfa),
}

pub fn automaton_from_str(text: &str, dir: &Path) -> Result<AutomatonFile> {
    let v: Value = parse_json(text, "automaton")?;
    if v.get("alphabet").is_some() {
        let f: ClassicalNfaFile = serde_json::from_value(v)?;
        Ok(AutomatonFile::Classical(f.build()?))
    } else {
        let f: NfaFile = serde_json::from_value(v)?;
        Ok(AutomatonFile::Categorical(f.build(dir)?))
    }
}

pub fn load_automaton(path: &Path) -> Result<AutomatonFile> {
    automaton_from_str(&read_text(path)?, &dir_of(path)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn nfa_to_json(m: &Nfa) -> Value {
    serde_json::to_value(NfaFile::of(m)).expect("serializable")
}

pub fn classical_nfa_to_json(c: &ClassicalNfa) -> Value {
    serde_json::to_value(ClassicalNfaFile::of(c)).expect("serializable")
}

// tree automata and tree grammars

impl TreeNfaFile {
    pub fn build(&self, dir: &Path) -> Result<TreeNfa> {
        let base = Arc::new(self.base.resolve(dir)?);
        let states = Arc::new(self.states.resolve(dir)?);
        let root = states.require_color(&self.root)?;
        let map = SpeciesMap::from_names(states, base, &string_map(&self.color_map), &string_map(&self.node_map))?;
        TreeNfa::new(map, root)
    }

    pub fn of(a: &TreeNfa) -> TreeNfaFile {
        let (s, t) = (a.states(), a.base());
        TreeNfaFile {
            base: SpeciesRef::Inline(SpeciesFile::of(t)),
            states: SpeciesRef::Inline(SpeciesFile::of(s)),
            color_map: s
                .colors()
                .map(|c| {
                    (
                        s.color_name(c).to_string(),
                        t.color_name(a.map.map_color(c)).to_string(),
                    )
                })
                .collect(),
            node_map: s
                .ops()
                .map(|x| (s.op_name(x).to_string(), t.op_name(a.map.map_op(x)).to_string()))
                .collect(),
            root: s.color_name(a.root).to_string(),
        }
    }
}

pub fn load_tree_nfa(path: &Path) -> Result<TreeNfa> {
    let f: TreeNfaFile = parse_json(&read_text(path)?, &path.display().to_string())?;
    f.build(&dir_of(path))
}

pub fn tree_nfa_to_json(a: &TreeNfa) -> Value {
    serde_json::to_value(TreeNfaFile::of(a)).expect("serializable")
}

impl GCfgFile {
    pub fn build(&self, dir: &Path) -> Result<GCfgFree> {
        let base = Arc::new(self.base.resolve(dir)?);
        let species = Arc::new(self.species.resolve(dir)?);
        let start = species.require_color(&self.start)?;
        let colors = species
            .colors()
            .map(|c| {
                let name = species.color_name(c);
                let img = self
                    .color_map
                    .get(name)
                    .ok_or_else(|| Error::UnknownColor(format!("colorMap has no entry for `{name}`")))?;
                base.require_color(img)
            })
            .collect::<Result<Vec<_>>>()?;
        let rules = species
            .ops()
            .map(|x| {
                let name = species.op_name(x);
                let v = self
                    .rule_map
                    .get(name)
                    .ok_or_else(|| Error::UnknownOp(format!("ruleMap has no entry for `{name}`")))?;
                tree_from_json(&base, v)
            })
            .collect::<Result<Vec<_>>>()?;
        GCfgFree::new(base, species, start, colors, rules)
    }

    pub fn of(g: &GCfgFree) -> GCfgFile {
        let (b, s) = (&g.base, &g.species);
        GCfgFile {
            base: SpeciesRef::Inline(SpeciesFile::of(b)),
            species: SpeciesRef::Inline(SpeciesFile::of(s)),
            start: s.color_name(g.start).to_string(),
            color_map: s
                .colors()
                .map(|c| {
                    (
                        s.color_name(c).to_string(),
                        b.color_name(g.color_assign[c.index()]).to_string(),
                    )
                })
                .collect(),
            rule_map: s
                .ops()
                .map(|x| (s.op_name(x).to_string(), tree_to_json(b, &g.rule_assign[x.index()])))
                .collect(),
        }
    }
}

pub fn load_gcfg(path: &Path) -> Result<GCfgFree> {
    let f: GCfgFile = parse_json(&read_text(path)?, &path.display().to_string())?;
    f.build(&dir_of(path))
}

pub fn gcfg_to_json(g: &GCfgFree) -> Value {
    serde_json::to_value(GCfgFile::of(g)).expect("serializable")
}

/// A functor between free categories: nodes to nodes, edges to lists of
/// edges.
pub fn functor_to_json(f: &PathFunctor) -> Value {
    let (s, t) = (&f.source, &f.target);
    let node_map: BTreeMap<&str, &str> = s
        .nodes()
        .map(|n| (s.node_name(n), t.node_name(f.map_node(n))))
        .collect();
    let edge_map: BTreeMap<&str, Vec<String>> = s
        .edges()
        .map(|e| (s.edge_name(e), t.edge_names(f.map_edge(e))))
        .collect();
    json!({
        "source": graph_to_json(s),
        "target": graph_to_json(t),
        "nodeMap": node_map,
        "edgeMap": edge_map,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
