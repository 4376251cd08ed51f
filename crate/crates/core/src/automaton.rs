//! Automata over free categories: graph homomorphisms from a state graph
//! with an initial and an accepting state.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{
    pullback_graphs, DeterminismFlags, EdgeIx, Graph, GraphHom, NodeIx, PathArrow, PathFunctor, BOTTOM, BOW, EOW, TOP,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    /// From the state graph to the base graph.
    pub hom: GraphHom,
    pub q0: NodeIx,
    pub qf: NodeIx,
}

impl Nfa {
    pub fn new(hom: GraphHom, q0: NodeIx, qf: NodeIx) -> Result<Nfa> {
        for q in [q0, qf] {
            if !hom.source.contains_node(q) {
                return Err(Error::UnknownNode(format!("#{}", q.0)));
            }
        }
        Ok(Nfa { hom, q0, qf })
    }

    pub fn base(&self) -> &Arc<Graph> {
        &self.hom.target
    }

    pub fn states(&self) -> &Arc<Graph> {
        &self.hom.source
    }

    /// Base nodes of the initial and accepting states.
    pub fn boundary(&self) -> (NodeIx, NodeIx) {
        (self.hom.map_node(self.q0), self.hom.map_node(self.qf))
    }

    fn check_endpoints(&self, w: &PathArrow) -> Result<()> {
        self.base().check_path(w)?;
        let (a, b) = self.boundary();
        let name = |n| self.base().node_name(n).to_string();
        if w.src() != a {
            return Err(Error::EndpointMismatch {
                left: name(a),
                right: name(w.src()),
            });
        }
        if w.tgt() != b {
            return Err(Error::EndpointMismatch {
                left: name(w.tgt()),
                right: name(b),
            });
        }
        Ok(())
    }

    /// Runs from `q0` to `qf` over `w`.
    pub fn runs(&self, w: &PathArrow) -> Result<Vec<PathArrow>> {
        self.check_endpoints(w)?;
        Ok(self.hom.lift_runs_unchecked(w, Some(self.q0), Some(self.qf)))
    }

    pub fn accepts(&self, w: &PathArrow) -> Result<bool> {
        self.check_endpoints(w)?;
        Ok(self.hom.count_runs(w, Some(self.q0), Some(self.qf))? > 0)
    }

    /// Accepted arrows of length at most `max_len`, by a subset search over
    /// base paths.
    pub fn enumerate_regular(&self, max_len: usize) -> BTreeSet<PathArrow> {
        let states = self.states();
        let dist = states.distances_to(self.qf);
        let mut out = BTreeSet::new();
        let mut current = vec![false; states.node_count()];
        current[self.q0.index()] = true;
        let mut word = Vec::new();
        self.subset_dfs(self.boundary().0, &current, &dist, max_len, &mut word, &mut out);
        out
    }

    fn subset_dfs(
        &self,
        at: NodeIx,
        current: &[bool],
        dist: &[usize],
        budget: usize,
        word: &mut Vec<EdgeIx>,
        out: &mut BTreeSet<PathArrow>,
    ) {
        if current[self.qf.index()] {
            out.insert(PathArrow::from_raw(self.boundary().0, at, word.clone()));
        }
        if budget == 0 {
            return;
        }
        let base = self.base();
        for &e in base.outgoing(at) {
            let mut next = vec![false; current.len()];
            let mut viable = false;
            for &d in self.hom.edge_fiber(e) {
                if current[self.states().src(d).index()] {
                    let t = self.states().tgt(d);
                    next[t.index()] = true;
                    viable |= dist[t.index()] < budget;
                }
            }
            if viable {
                word.push(e);
                self.subset_dfs(base.tgt(e), &next, dist, budget - 1, word, out);
                word.pop();
            }
        }
    }

    pub fn determinism(&self) -> DeterminismFlags {
        self.hom.determinism_flags()
    }

    /// Number of transitions.
    pub fn transition_count(&self) -> usize {
        self.states().edge_count()
    }
}

/// Product automaton: the pullback of the two state graphs over the base.
pub fn intersect_nfa(m1: &Nfa, m2: &Nfa) -> Result<Nfa> {
    if **m1.base() != **m2.base() {
        return Err(Error::Precondition("automata are over different bases".into()));
    }
    let pb = pullback_graphs(&m1.hom, &m2.hom)?;
    let q0 = pb
        .node_of(m1.q0, m2.q0)
        .ok_or_else(|| Error::Precondition("initial states lie over different nodes".into()))?;
    let qf = pb
        .node_of(m1.qf, m2.qf)
        .ok_or_else(|| Error::Precondition("accepting states lie over different nodes".into()))?;
    Nfa::new(pb.left.then(&m1.hom)?, q0, qf)
}

/// The automaton of factorizations of `w`: states `0, 1, …, n` in a line.
pub fn singleton_nfa(base: Arc<Graph>, w: &PathArrow) -> Result<Nfa> {
    base.check_path(w)?;
    let n = w.len();
    let nodes: Vec<String> = (0..=n).map(|k| k.to_string()).collect();
    let edges: Vec<(String, String, String)> = (0..n)
        .map(|k| (format!("t{}", k + 1), nodes[k].clone(), nodes[k + 1].clone()))
        .collect();
    let states = Arc::new(Graph::new(nodes.iter().cloned(), edges.clone())?);
    let node_map = (0..=n).map(|k| w.node_at(&base, k)).collect::<Vec<_>>();
    let node_map = states
        .nodes()
        .map(|q| node_map[states.node_name(q).parse::<usize>().expect("numeric state")])
        .collect();
    let edge_map = states
        .edges()
        .map(|d| {
            let k: usize = states.edge_name(d)[1..].parse().expect("numbered edge");
            w.edges()[k - 1]
        })
        .collect();
    let q0 = states.node("0").expect("state 0");
    let qf = states.node(&n.to_string()).expect("last state");
    Nfa::new(GraphHom::new(states, base, node_map, edge_map)?, q0, qf)
}

/// Accepts every path from `a` to `b`.
pub fn total_nfa(g: Arc<Graph>, a: &str, b: &str) -> Result<Nfa> {
    let (q0, qf) = (g.require_node(a)?, g.require_node(b)?);
    Nfa::new(GraphHom::identity(g), q0, qf)
}

/// Homset-restricted inverse image along a functor `f` into the base:
/// accepts the arrows `u : r → s` with `f(u)` accepted by `m`.
pub fn preimage_nfa(m: &Nfa, f: &PathFunctor, r: &str, s: &str) -> Result<Nfa> {
    if *f.target != **m.base() {
        return Err(Error::Precondition("functor target is not the automaton's base".into()));
    }
    let z = &f.source;
    let (r, s) = (z.require_node(r)?, z.require_node(s)?);
    let (a, b) = m.boundary();
    if f.map_node(r) != a || f.map_node(s) != b {
        return Err(Error::Precondition(
            "endpoints do not lie over the automaton's initial and accepting nodes".into(),
        ));
    }
    let states = m.states();
    let pair = |n: NodeIx, q: NodeIx| format!("({},{})", z.node_name(n), states.node_name(q));
    let mut nodes = Vec::new();
    let mut node_over = HashMap::new();
    for n in z.nodes() {
        for &q in m.hom.node_fiber(f.map_node(n)) {
            nodes.push(pair(n, q));
            node_over.insert(pair(n, q), n);
        }
    }
    let mut edges = Vec::new();
    let mut edge_over = HashMap::new();
    for e in z.edges() {
        let image = f.map_edge(e);
        for &q in m.hom.node_fiber(f.map_node(z.src(e))) {
            for run in m.hom.lift_runs_unchecked(image, Some(q), None) {
                let name = format!("({},{})", z.edge_name(e), states.render_path(&run));
                edges.push((name.clone(), pair(z.src(e), q), pair(z.tgt(e), run.tgt())));
                edge_over.insert(name, e);
            }
        }
    }
    let graph = Arc::new(Graph::new(nodes, edges)?);
    let node_map = graph.nodes().map(|n| node_over[graph.node_name(n)]).collect();
    let edge_map = graph.edges().map(|d| edge_over[graph.edge_name(d)]).collect();
    let q0 = graph.require_node(&pair(r, m.q0))?;
    let qf = graph.require_node(&pair(s, m.qf))?;
    Nfa::new(GraphHom::new(graph, z.clone(), node_map, edge_map)?, q0, qf)
}

/// Image along a homomorphism out of the base.
pub fn pushforward_nfa(m: &Nfa, h: &GraphHom) -> Result<Nfa> {
    Nfa::new(m.hom.then(h)?, m.q0, m.qf)
}

/// A classical automaton over an alphabet, with sets of initial and
/// accepting states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalNfa {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
    pub initial: Vec<String>,
    pub accepting: Vec<String>,
}

impl ClassicalNfa {
    pub fn new(
        alphabet: Vec<String>,
        states: Vec<String>,
        transitions: Vec<(String, String, String)>,
        initial: Vec<String>,
        accepting: Vec<String>,
    ) -> Result<ClassicalNfa> {
        let known_state = |q: &String| {
            if states.contains(q) {
                Ok(())
            } else {
                Err(Error::UnknownNode(q.clone()))
            }
        };
        for (p, a, q) in &transitions {
            known_state(p)?;
            known_state(q)?;
            if !alphabet.contains(a) {
                return Err(Error::UnknownEdge(a.clone()));
            }
        }
        initial.iter().chain(&accepting).try_for_each(known_state)?;
        Ok(ClassicalNfa {
            alphabet,
            states,
            transitions,
            initial,
            accepting,
        })
    }

    fn step(&self, from: &BTreeSet<&str>, letter: &str) -> BTreeSet<&str> {
        self.transitions
            .iter()
            .filter(|(p, a, _)| a == letter && from.contains(p.as_str()))
            .map(|(_, _, q)| q.as_str())
            .collect()
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut current: BTreeSet<&str> = self.initial.iter().map(String::as_str).collect();
        for a in word {
            current = self.step(&current, a.as_ref());
            if current.is_empty() {
                return false;
            }
        }
        self.accepting.iter().any(|q| current.contains(q.as_str()))
    }

    /// The automaton over a one-object base whose edges are the letters,
    /// split into one categorical automaton per initial/accepting pair.
    /// The union of their languages is the classical language.
    pub fn to_nfas(&self, base: Arc<Graph>) -> Result<Vec<Nfa>> {
        let star = match base.node_count() {
            1 => NodeIx(0),
            _ => return Err(Error::Precondition("base must have a single node".into())),
        };
        let edges: Vec<(String, String, String)> = self
            .transitions
            .iter()
            .enumerate()
            .map(|(k, (p, _, q))| (format!("t{k}"), p.clone(), q.clone()))
            .collect();
        let states = Arc::new(Graph::new(&self.states, edges)?);
        let edge_map = self
            .transitions
            .iter()
            .enumerate()
            .map(|(k, (_, a, _))| Ok((states.require_edge(&format!("t{k}"))?, base.require_edge(a)?)))
            .collect::<Result<HashMap<_, _>>>()?;
        let edge_map = states.edges().map(|d| edge_map[&d]).collect();
        let hom = GraphHom::new(states.clone(), base, vec![star; states.node_count()], edge_map)?;
        let mut out = Vec::new();
        for i in &self.initial {
            for f in &self.accepting {
                out.push(Nfa::new(hom.clone(), states.require_node(i)?, states.require_node(f)?)?);
            }
        }
        Ok(out)
    }

    /// Accepted words of length at most `max_len`.
    pub fn enumerate(&self, max_len: usize) -> BTreeSet<Vec<String>> {
        self.enumerate_where(max_len, |_| true)
    }

    /// Accepted words of length at most `max_len`, exploring only prefixes
    /// that `keep` approves.
    pub fn enumerate_where(&self, max_len: usize, mut keep: impl FnMut(&[String]) -> bool) -> BTreeSet<Vec<String>> {
        let dist = self.distances_to_accepting();
        let mut out = BTreeSet::new();
        let start: BTreeSet<&str> = self.initial.iter().map(String::as_str).collect();
        let mut word = Vec::new();
        self.enumerate_from(&start, &dist, max_len, &mut keep, &mut word, &mut out);
        out
    }

    /// Fewest letters from each state to an accepting one.
    fn distances_to_accepting(&self) -> HashMap<&str, usize> {
        let mut dist: HashMap<&str, usize> = self.accepting.iter().map(|q| (q.as_str(), 0)).collect();
        let mut queue: VecDeque<&str> = self.accepting.iter().map(String::as_str).collect();
        while let Some(q) = queue.pop_front() {
            let d = dist[q] + 1;
            for (p, _, r) in &self.transitions {
                if r == q && !dist.contains_key(p.as_str()) {
                    dist.insert(p, d);
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    fn enumerate_from(
        &self,
        current: &BTreeSet<&str>,
        dist: &HashMap<&str, usize>,
        budget: usize,
        keep: &mut dyn FnMut(&[String]) -> bool,
        word: &mut Vec<String>,
        out: &mut BTreeSet<Vec<String>>,
    ) {
        if self.accepting.iter().any(|q| current.contains(q.as_str())) {
            out.insert(word.clone());
        }
        if budget == 0 {
            return;
        }
        for a in &self.alphabet {
            let next = self.step(current, a);
            if next.iter().any(|q| dist.get(q).is_some_and(|&d| d < budget)) {
                word.push(a.clone());
                if keep(word) {
                    self.enumerate_from(&next, dist, budget - 1, keep, word, out);
                }
                word.pop();
            }
        }
    }
}

/// Embeds a classical automaton over the bracketed bouquet: a fresh
/// initial state `⊥` with a `bow` edge to each initial state and a fresh
/// accepting state `⊤` with an `eow` edge from each accepting state.
pub fn bracket_embed(c: &ClassicalNfa) -> Result<Nfa> {
    let base = Arc::new(Graph::bracket_bouquet(&c.alphabet)?);
    let mut nodes: Vec<String> = c.states.clone();
    nodes.push(BOTTOM.to_string());
    nodes.push(TOP.to_string());
    let mut edges = Vec::new();
    let mut label = HashMap::new();
    for (k, (p, a, q)) in c.transitions.iter().enumerate() {
        let name = format!("{p}-{a}->{q}#{k}");
        label.insert(name.clone(), a.clone());
        edges.push((name, p.clone(), q.clone()));
    }
    for q in &c.initial {
        let name = format!("{BOW}>{q}");
        label.insert(name.clone(), BOW.to_string());
        edges.push((name, BOTTOM.to_string(), q.clone()));
    }
    for q in &c.accepting {
        let name = format!("{q}>{EOW}");
        label.insert(name.clone(), EOW.to_string());
        edges.push((name, q.clone(), TOP.to_string()));
    }
    let states = Arc::new(Graph::new(nodes, edges)?);
    let star = base.node("*").expect("bouquet node");
    let node_map = states
        .nodes()
        .map(|q| match states.node_name(q) {
            BOTTOM => base.node(BOTTOM).expect("bottom"),
            TOP => base.node(TOP).expect("top"),
            _ => star,
        })
        .collect();
    let edge_map = states
        .edges()
        .map(|d| base.require_edge(&label[states.edge_name(d)]))
        .collect::<Result<Vec<_>>>()?;
    let q0 = states.require_node(BOTTOM)?;
    let qf = states.require_node(TOP)?;
    Nfa::new(GraphHom::new(states, base, node_map, edge_map)?, q0, qf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rendered(m: &Nfa, set: &BTreeSet<PathArrow>) -> BTreeSet<String> {
        set.iter().map(|p| m.base().render_path(p)).collect()
    }

    fn ab() -> Arc<Graph> {
        Arc::new(Graph::bouquet(&["a", "b"]).unwrap())
    }

    #[test]
    fn two_runs_over_ab() {
        let m = fixtures::two_runs_automaton();
        let w = m.base().parse_path("a b", Some("*")).unwrap();
        assert_eq!(m.runs(&w).unwrap().len(), 2);
        assert!(m.accepts(&w).unwrap());
        let aa = m.base().parse_path("a a", Some("*")).unwrap();
        assert!(!m.accepts(&aa).unwrap());
        assert_eq!(rendered(&m, &m.enumerate_regular(4)), ["a b".to_string()].into());
    }

    #[test]
    fn singleton_accepts_only_its_word() {
        let g = ab();
        let w = g.parse_path("a b", Some("*")).unwrap();
        let m = singleton_nfa(g.clone(), &w).unwrap();
        assert_eq!(m.states().node_count(), 3);
        assert_eq!(m.enumerate_regular(5), [w.clone()].into());
        let flags = m.determinism();
        assert!(flags.partial_deterministic && flags.partial_codeterministic);
        let star = g.node("*").unwrap();
        let e = singleton_nfa(g, &PathArrow::identity(star)).unwrap();
        assert_eq!(e.states().node_count(), 1);
        assert_eq!(e.enumerate_regular(3), [PathArrow::identity(star)].into());
    }

    #[test]
    fn total_language() {
        let g = Arc::new(Graph::bouquet(&["a"]).unwrap());
        let m = total_nfa(g, "*", "*").unwrap();
        let lang = rendered(&m, &m.enumerate_regular(3));
        assert_eq!(lang, ["id[*]", "a", "a a", "a a a"].map(String::from).into());
        let f = m.determinism();
        assert!(f.deterministic && f.codeterministic);
    }

    #[test]
    fn parity_products() {
        let two = fixtures::parity_automaton(&["a"], 2);
        let three = fixtures::parity_automaton(&["a"], 3);
        let six = intersect_nfa(&two, &three).unwrap();
        let lens: Vec<usize> = six.enumerate_regular(12).iter().map(PathArrow::len).collect();
        assert_eq!(lens, vec![0, 6, 12]);
        let same = intersect_nfa(&two, &two).unwrap();
        assert_eq!(same.enumerate_regular(8), two.enumerate_regular(8));
        let total = total_nfa(two.base().clone(), "*", "*").unwrap();
        assert_eq!(
            intersect_nfa(&two, &total).unwrap().enumerate_regular(8),
            two.enumerate_regular(8)
        );
    }

    #[test]
    fn endpoint_mismatch_is_an_error() {
        let c = ClassicalNfa::new(
            vec!["a".into()],
            vec!["s".into()],
            vec![],
            vec!["s".into()],
            vec!["s".into()],
        )
        .unwrap();
        let m = bracket_embed(&c).unwrap();
        let star = m.base().node("*").unwrap();
        assert!(matches!(
            m.accepts(&PathArrow::identity(star)),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn bracket_embedding() {
        let c = ClassicalNfa::new(
            vec!["a".into()],
            vec!["s".into()],
            vec![],
            vec!["s".into()],
            vec!["s".into()],
        )
        .unwrap();
        let m = bracket_embed(&c).unwrap();
        assert_eq!(m.states().node_count(), 3);
        assert_eq!(rendered(&m, &m.enumerate_regular(6)), ["bow eow".to_string()].into());

        let star = ClassicalNfa::new(
            vec!["a".into()],
            vec!["s".into()],
            vec![("s".into(), "a".into(), "s".into())],
            vec!["s".into()],
            vec!["s".into()],
        )
        .unwrap();
        let m = bracket_embed(&star).unwrap();
        let lang = rendered(&m, &m.enumerate_regular(4));
        assert_eq!(lang, ["bow eow", "bow a eow", "bow a a eow"].map(String::from).into());
        assert!(star.accepts(&["a", "a"]));
        assert_eq!(star.enumerate(2).len(), 3);
    }

    #[test]
    fn preimage_and_pushforward() {
        let two = fixtures::parity_automaton(&["a"], 2);
        let g = two.base().clone();
        let star = g.node("*").unwrap();
        let a = g.require_edge("a").unwrap();
        let aa = g.path(star, vec![a, a]).unwrap();
        let doubling = PathFunctor::new(g.clone(), g.clone(), vec![star], vec![aa]).unwrap();
        let pre = preimage_nfa(&two, &doubling, "*", "*").unwrap();
        let total = total_nfa(g.clone(), "*", "*").unwrap();
        assert_eq!(pre.enumerate_regular(5), total.enumerate_regular(5));

        let id = preimage_nfa(&two, &PathFunctor::identity(g.clone()), "*", "*").unwrap();
        assert_eq!(id.enumerate_regular(6), two.enumerate_regular(6));

        let single = singleton_nfa(g.clone(), &PathArrow::identity(star)).unwrap();
        let collapse = PathFunctor::new(g.clone(), g.clone(), vec![star], vec![PathArrow::identity(star)]).unwrap();
        let pre = preimage_nfa(&single, &collapse, "*", "*").unwrap();
        assert_eq!(pre.enumerate_regular(4), total.enumerate_regular(4));

        let m = fixtures::two_runs_automaton();
        let h = m.base().clone();
        let names = |pairs: &[(&str, &str)]| -> HashMap<String, String> {
            pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
        };
        let swap = GraphHom::from_names(
            h.clone(),
            h.clone(),
            &names(&[("*", "*")]),
            &names(&[("a", "b"), ("b", "a")]),
        )
        .unwrap();
        let pushed = pushforward_nfa(&m, &swap).unwrap();
        assert_eq!(
            rendered(&pushed, &pushed.enumerate_regular(3)),
            ["b a".to_string()].into()
        );
    }

    #[test]
    fn classical_split_by_endpoints() {
        let strs = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let c = ClassicalNfa::new(
            strs(&["a", "b"]),
            strs(&["i", "j", "f"]),
            [("i", "a", "f"), ("j", "b", "f"), ("f", "a", "f")]
                .iter()
                .map(|&(p, a, q)| (p.to_string(), a.to_string(), q.to_string()))
                .collect(),
            strs(&["i", "j"]),
            strs(&["f"]),
        )
        .unwrap();
        let ms = c.to_nfas(ab()).unwrap();
        assert_eq!(ms.len(), 2);
        let union: BTreeSet<String> = ms.iter().flat_map(|m| rendered(m, &m.enumerate_regular(3))).collect();
        let want: BTreeSet<String> = c.enumerate(3).iter().map(|w| w.join(" ")).collect();
        assert_eq!(union, want);
    }
}
