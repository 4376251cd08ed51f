//! Seeded generators of small graphs, grammars, automata and trees for
//! randomized checks. Every generator is a pure function of its seed.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::Nfa;
use crate::grammar::Cfg;
use crate::graph::{Graph, GraphHom, NodeIx, PathArrow};
use crate::species::{ColorIx, OpTree, Species, SpeciesMap};
use crate::spliced::{GapType, SplicedArrow};
use crate::tree_automaton::{GCfgFree, TreeNfa};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size limits for random grammars.
#[derive(Clone, Copy, Debug)]
pub struct GrammarShape {
    pub max_colors: usize,
    pub max_nodes: usize,
    pub max_arity: usize,
    /// Longest segment, in edges.
    pub max_segment: usize,
    pub base_nodes: usize,
    pub letters: usize,
    /// Least number of words of length at most 6 the start color must
    /// derive, and least number of useful nodes.
    pub min_words: usize,
    pub min_useful_nodes: usize,
}

impl Default for GrammarShape {
    fn default() -> Self {
        GrammarShape {
            max_colors: 4,
            max_nodes: 6,
            max_arity: 2,
            max_segment: 2,
            base_nodes: 2,
            letters: 3,
            min_words: 3,
            min_useful_nodes: 3,
        }
    }
}

const COLOR_NAMES: [&str; 6] = ["S", "T", "U", "V", "W", "X"];
const LETTERS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const BASE_NODES: [&str; 4] = ["A", "B", "C", "D"];

/// A graph on `1..=shape.base_nodes` nodes with `shape.letters` edges, at
/// least one of them a loop so every node pair has some long path.
pub fn random_base(rng: &mut impl Rng, shape: &GrammarShape) -> Graph {
    let n = rng.gen_range(1..=shape.base_nodes.max(1));
    if n == 1 {
        return Graph::bouquet(&LETTERS[..shape.letters]).expect("distinct letters");
    }
    let nodes = &BASE_NODES[..n];
    let edges: Vec<(String, String, String)> = LETTERS[..shape.letters]
        .iter()
        .enumerate()
        .map(|(k, e)| {
            // the first edges form a cycle through every node
            let (s, t) = if k < n {
                (nodes[k], nodes[(k + 1) % n])
            } else {
                (*nodes.choose(rng).unwrap(), *nodes.choose(rng).unwrap())
            };
            (e.to_string(), s.to_string(), t.to_string())
        })
        .collect();
    Graph::new(nodes.iter().copied(), edges).expect("valid random graph")
}

fn random_path(rng: &mut impl Rng, g: &Graph, from: NodeIx, to: NodeIx, max_len: usize) -> Option<PathArrow> {
    let paths = g.enumerate_paths(from, to, max_len);
    paths.choose(rng).cloned()
}

/// A grammar meeting the shape's lower bounds on words and useful nodes.
pub fn random_grammar(rng: &mut impl Rng, shape: &GrammarShape) -> Cfg {
    loop {
        let Some(g) = try_grammar(rng, shape) else { continue };
        if !g.analyze().productive.contains(&g.start) {
            continue;
        }
        let useful = g.trim().species.op_count();
        if useful >= shape.min_useful_nodes.min(g.species.op_count())
            && g.enumerate_language(6).len() >= shape.min_words
        {
            return g;
        }
    }
}

fn try_grammar(rng: &mut impl Rng, shape: &GrammarShape) -> Option<Cfg> {
    let base = Arc::new(random_base(rng, shape));
    let k = rng.gen_range(1..=shape.max_colors);
    let nodes: Vec<NodeIx> = base.nodes().collect();
    let gaps: Vec<GapType> = (0..k)
        .map(|_| GapType::new(*nodes.choose(rng).unwrap(), *nodes.choose(rng).unwrap()))
        .collect();
    let n = rng.gen_range((k + 1).min(shape.max_nodes)..=shape.max_nodes.max(k));
    let mut ops = Vec::with_capacity(n);
    let mut rules = Vec::with_capacity(n);
    for i in 0..n {
        // every color gets a constant, the other nodes have inputs
        let output = if i < k { i } else { rng.gen_range(0..k) };
        let arity = if i < k { 0 } else { rng.gen_range(1..=shape.max_arity) };
        let inputs: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..k)).collect();
        let mut bounds = vec![gaps[output].left];
        for &c in &inputs {
            bounds.push(gaps[c].left);
            bounds.push(gaps[c].right);
        }
        bounds.push(gaps[output].right);
        let segments = bounds
            .chunks(2)
            .map(|p| random_path(rng, &base, p[0], p[1], shape.max_segment))
            .collect::<Option<Vec<_>>>()?;
        ops.push((
            format!("x{}", i + 1),
            inputs.iter().map(|&c| COLOR_NAMES[c].to_string()).collect::<Vec<_>>(),
            COLOR_NAMES[output].to_string(),
        ));
        rules.push(SplicedArrow::new(segments).ok()?);
    }
    let species = Arc::new(Species::new(COLOR_NAMES[..k].iter().copied(), ops).ok()?);
    // names like x10 sort before x2, so look rules up by name
    let rule_assign = species
        .ops()
        .map(|x| {
            let i: usize = species.op_name(x)[1..].parse().unwrap();
            rules[i - 1].clone()
        })
        .collect();
    Cfg::new(base, species, ColorIx(0), gaps, rule_assign).ok()
}

/// A grammar over a one-object base in which some color is nullable and
/// some unit rule closes a cycle, so ambiguity is infinite.
pub fn random_cyclic_grammar(rng: &mut impl Rng) -> Cfg {
    let shape = GrammarShape {
        base_nodes: 1,
        letters: 2,
        ..GrammarShape::default()
    };
    loop {
        let g = random_grammar(rng, &shape);
        let k = g.species.color_count();
        let colors: Vec<String> = g
            .species
            .colors()
            .map(|c| g.species.color_name(c).to_string())
            .collect();
        let from = rng.gen_range(0..k);
        let mut ops: Vec<(String, Vec<String>, String)> = g
            .species
            .ops()
            .map(|x| {
                let d = g.species.op(x);
                (
                    d.id.clone(),
                    d.inputs.iter().map(|&c| colors[c.index()].clone()).collect(),
                    colors[d.output.index()].clone(),
                )
            })
            .collect();
        ops.push(("unit".into(), vec![colors[from].clone()], colors[from].clone()));
        ops.push(("void".into(), vec![], colors[from].clone()));
        let species = Arc::new(Species::new(&colors, ops).expect("extends a valid species"));
        let star = g.base.node("*").expect("bouquet");
        let id = PathArrow::identity(star);
        let rules = species
            .ops()
            .map(|x| match species.op_name(x) {
                "unit" => SplicedArrow::new(vec![id.clone(), id.clone()]).unwrap(),
                "void" => SplicedArrow::constant(id.clone()),
                name => g.rule(g.species.require_op(name).unwrap()).clone(),
            })
            .collect();
        let out = Cfg::new(g.base.clone(), species, g.start, g.color_assign.clone(), rules).expect("same gaps");
        if out.analyze().useful.contains(&ColorIx(from as u32)) {
            return out;
        }
    }
}

/// An automaton with at most `max_states` states running between the
/// given base nodes. Each possible transition is kept with probability
/// `density`.
pub fn random_nfa(
    rng: &mut impl Rng,
    base: Arc<Graph>,
    from: NodeIx,
    to: NodeIx,
    max_states: usize,
    density: f64,
) -> Nfa {
    let n = rng.gen_range(2..=max_states.max(2));
    let base_nodes: Vec<NodeIx> = base.nodes().collect();
    let mut over: Vec<NodeIx> = (0..n).map(|_| *base_nodes.choose(rng).unwrap()).collect();
    over[0] = from;
    let last = n - 1;
    over[last] = to;
    let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut edges = Vec::new();
    let mut edge_over = Vec::new();
    for e in base.edges() {
        for p in 0..n {
            for q in 0..n {
                if over[p] == base.src(e) && over[q] == base.tgt(e) && rng.gen_bool(density) {
                    edges.push((format!("d{}", edges.len()), names[p].clone(), names[q].clone()));
                    edge_over.push(base.edge_name(e).to_string());
                }
            }
        }
    }
    let node_map = names
        .iter()
        .zip(&over)
        .map(|(q, &b)| (q.clone(), base.node_name(b).to_string()))
        .collect();
    let edge_map = edges.iter().zip(edge_over).map(|(d, e)| (d.0.clone(), e)).collect();
    let states = Arc::new(Graph::new(&names, edges).expect("fresh names"));
    let hom = GraphHom::from_names(states.clone(), base, &node_map, &edge_map).expect("built over the base");
    let q0 = states.node("q0").unwrap();
    let finals: Vec<&String> = names
        .iter()
        .zip(&over)
        .filter(|(_, &b)| b == to)
        .map(|(q, _)| q)
        .collect();
    let qf = states.node(finals.choose(rng).unwrap()).unwrap();
    Nfa::new(hom, q0, qf).unwrap()
}

/// A random path `from → to` with at most `max_len` edges, if any.
pub fn random_word(rng: &mut impl Rng, g: &Graph, from: NodeIx, to: NodeIx, max_len: usize) -> Option<PathArrow> {
    random_path(rng, g, from, to, max_len)
}

/// A species with at most `max_colors` colors and `max_ops` nodes of
/// arity at most 3, with a constant of every color.
pub fn random_species(rng: &mut impl Rng, max_colors: usize, max_ops: usize) -> Species {
    let k = rng.gen_range(1..=max_colors);
    let mut ops: Vec<(String, Vec<String>, String)> = (0..k)
        .map(|c| (format!("k{c}"), vec![], COLOR_NAMES[c].to_string()))
        .collect();
    let extra = rng.gen_range(1..=max_ops.saturating_sub(k).max(1));
    for i in 0..extra {
        let arity = rng.gen_range(1..=3);
        ops.push((
            format!("o{i}"),
            (0..arity)
                .map(|_| COLOR_NAMES[rng.gen_range(0..k)].to_string())
                .collect(),
            COLOR_NAMES[rng.gen_range(0..k)].to_string(),
        ));
    }
    Species::new(COLOR_NAMES[..k].iter().copied(), ops).expect("fresh names")
}

/// A uniformly chosen tree among those of color `root` with at most
/// `max_nodes` nodes.
pub fn random_tree(
    rng: &mut impl Rng,
    s: &Species,
    root: ColorIx,
    max_nodes: usize,
    closed_only: bool,
) -> Option<OpTree> {
    s.enumerate_trees(root, max_nodes, closed_only).choose(rng).cloned()
}

/// A tree automaton with one or two states over every base color; each
/// typed transition is kept with probability `density`.
pub fn random_tree_nfa(rng: &mut impl Rng, base: Arc<Species>, density: f64) -> TreeNfa {
    let mut colors = Vec::new();
    let mut color_map = std::collections::HashMap::new();
    let mut over: Vec<Vec<String>> = Vec::new();
    for c in base.colors() {
        let n = rng.gen_range(1..=2);
        let names: Vec<String> = (0..n).map(|i| format!("{}{i}", base.color_name(c))).collect();
        for q in &names {
            colors.push(q.clone());
            color_map.insert(q.clone(), base.color_name(c).to_string());
        }
        over.push(names);
    }
    let mut ops = Vec::new();
    let mut op_map = std::collections::HashMap::new();
    for x in base.ops() {
        let d = base.op(x);
        let mut choices: Vec<Vec<String>> = vec![Vec::new()];
        for c in d.inputs.iter().chain(std::iter::once(&d.output)) {
            choices = choices
                .into_iter()
                .flat_map(|prefix| {
                    over[c.index()].iter().map(move |q| {
                        let mut p = prefix.clone();
                        p.push(q.clone());
                        p
                    })
                })
                .collect();
        }
        for mut sig in choices {
            if rng.gen_bool(density) {
                let output = sig.pop().unwrap();
                let name = format!("{}/{}", d.id, ops.len());
                op_map.insert(name.clone(), d.id.clone());
                ops.push((name, sig, output));
            }
        }
    }
    let states = Arc::new(Species::new(&colors, ops).expect("fresh names"));
    let map = SpeciesMap::from_names(states.clone(), base, &color_map, &op_map).expect("typed over the base");
    let root = ColorIx(rng.gen_range(0..states.color_count()) as u32);
    TreeNfa::new(map, root).expect("valid root")
}

/// A tree grammar over `base`: each node of a fresh species is sent to a
/// random tree of the base, open at the right colors.
pub fn random_gcfg(rng: &mut impl Rng, base: Arc<Species>, max_nodes: usize) -> GCfgFree {
    loop {
        let k = rng.gen_range(1..=base.color_count().min(3));
        let color_assign: Vec<ColorIx> = (0..k)
            .map(|_| ColorIx(rng.gen_range(0..base.color_count()) as u32))
            .collect();
        let mut ops = Vec::new();
        let mut rules = Vec::new();
        for i in 0..rng.gen_range(k..=max_nodes.max(k)) {
            let output = if i < k { i } else { rng.gen_range(0..k) };
            let Some(rule) = random_tree(rng, &base, color_assign[output], 2, false) else {
                continue;
            };
            // open slots must be colored by grammar colors lying over them
            let mut inputs = Vec::new();
            let mut ok = true;
            for c in rule.frontier(&base).inputs {
                let fits: Vec<usize> = (0..k).filter(|&j| color_assign[j] == c).collect();
                match fits.choose(rng) {
                    Some(&j) => inputs.push(COLOR_NAMES[j].to_string()),
                    None => ok = false,
                }
            }
            if ok {
                ops.push((format!("r{i}"), inputs, COLOR_NAMES[output].to_string()));
                rules.push(rule);
            }
        }
        let Ok(species) = Species::new(COLOR_NAMES[..k].iter().copied(), ops.clone()) else {
            continue;
        };
        let species = Arc::new(species);
        let rule_assign = species
            .ops()
            .map(|x| {
                let pos = ops.iter().position(|o| o.0 == species.op_name(x)).unwrap();
                rules[pos].clone()
            })
            .collect();
        if let Ok(g) = GCfgFree::new(base.clone(), species, ColorIx(0), color_assign, rule_assign) {
            if !g.enumerate(max_nodes.max(4)).is_empty() {
                return g;
            }
        }
    }
}
