//! Finite directed multigraphs and the free categories they generate.
//!
//! Arrows of a free category are paths ([`PathArrow`]); functors out of a
//! free category are determined by their action on generating edges
//! ([`PathFunctor`]). Graph homomorphisms ([`GraphHom`]) present the ULF
//! functors that serve as automata: their fibers over a path are the runs
//! of the automaton over that path.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIx(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIx(pub u32);

impl NodeIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeData {
    pub id: String,
    pub src: NodeIx,
    pub tgt: NodeIx,
}

/// A finite directed multigraph with string identifiers.
///
/// Nodes and edges are stored sorted by identifier, so index order is
/// lexicographic order and every traversal is deterministic.
#[derive(Clone)]
pub struct Graph {
    nodes: Vec<String>,
    edges: Vec<EdgeData>,
    node_lookup: HashMap<String, NodeIx>,
    edge_lookup: HashMap<String, EdgeIx>,
    outgoing: Vec<Vec<EdgeIx>>,
    incoming: Vec<Vec<EdgeIx>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| {
                format!(
                    "{}: {} -> {}",
                    e.id,
                    self.nodes[e.src.index()],
                    self.nodes[e.tgt.index()]
                )
            })
            .collect();
        f.debug_struct("Graph")
            .field("nodes", &self.nodes)
            .field("edges", &edges)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from node names and `(id, src, tgt)` edge triples.
    pub fn new<N, S, E>(nodes: N, edges: E) -> Result<Graph>
    where
        N: IntoIterator<Item = S>,
        S: Into<String>,
        E: IntoIterator<Item = (String, String, String)>,
    {
        let mut names: Vec<String> = nodes.into_iter().map(Into::into).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Duplicate(w[0].clone()));
        }
        let node_lookup: HashMap<String, NodeIx> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), NodeIx(i as u32)))
            .collect();

        let mut raw: Vec<(String, String, String)> = edges.into_iter().collect();
        raw.sort();
        if let Some(w) = raw.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Duplicate(w[0].0.clone()));
        }
        let mut edges = Vec::with_capacity(raw.len());
        for (id, src, tgt) in raw {
            let lookup = |n: &String| {
                node_lookup.get(n).copied().ok_or_else(|| Error::DanglingEdge {
                    edge: id.clone(),
                    node: n.clone(),
                })
            };
            let (s, t) = (lookup(&src)?, lookup(&tgt)?);
            edges.push(EdgeData { id, src: s, tgt: t });
        }
        let edge_lookup = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), EdgeIx(i as u32)))
            .collect();
        let mut outgoing = vec![Vec::new(); names.len()];
        let mut incoming = vec![Vec::new(); names.len()];
        for (i, e) in edges.iter().enumerate() {
            outgoing[e.src.index()].push(EdgeIx(i as u32));
            incoming[e.tgt.index()].push(EdgeIx(i as u32));
        }
        Ok(Graph {
            nodes: names,
            edges,
            node_lookup,
            edge_lookup,
            outgoing,
            incoming,
        })
    }

    pub fn empty() -> Graph {
        Graph::new(Vec::<String>::new(), Vec::new()).expect("empty graph is valid")
    }

    /// The one-node graph with a loop for every letter.
    pub fn bouquet<S: AsRef<str>>(alphabet: &[S]) -> Result<Graph> {
        Graph::new(
            ["*"],
            alphabet
                .iter()
                .map(|a| (a.as_ref().to_string(), "*".to_string(), "*".to_string())),
        )
    }

    /// The bouquet extended with begin- and end-of-word markers
    /// `bow : ⊥ → *` and `eow : * → ⊤`.
    pub fn bracket_bouquet<S: AsRef<str>>(alphabet: &[S]) -> Result<Graph> {
        if let Some(a) = alphabet.iter().find(|a| a.as_ref() == BOW || a.as_ref() == EOW) {
            return Err(Error::Duplicate(a.as_ref().to_string()));
        }
        let mut edges: Vec<(String, String, String)> = alphabet
            .iter()
            .map(|a| (a.as_ref().to_string(), "*".to_string(), "*".to_string()))
            .collect();
        edges.push((BOW.into(), BOTTOM.into(), "*".into()));
        edges.push((EOW.into(), "*".into(), TOP.into()));
        Graph::new([BOTTOM, "*", TOP], edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeIx> + '_ {
        (0..self.nodes.len() as u32).map(NodeIx)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeIx> + '_ {
        (0..self.edges.len() as u32).map(EdgeIx)
    }

    pub fn node_name(&self, n: NodeIx) -> &str {
        &self.nodes[n.index()]
    }

    pub fn edge_name(&self, e: EdgeIx) -> &str {
        &self.edges[e.index()].id
    }

    pub fn edge(&self, e: EdgeIx) -> &EdgeData {
        &self.edges[e.index()]
    }

    pub fn src(&self, e: EdgeIx) -> NodeIx {
        self.edges[e.index()].src
    }

    pub fn tgt(&self, e: EdgeIx) -> NodeIx {
        self.edges[e.index()].tgt
    }

    pub fn node(&self, name: &str) -> Option<NodeIx> {
        self.node_lookup.get(name).copied()
    }

    pub fn edge_named(&self, name: &str) -> Option<EdgeIx> {
        self.edge_lookup.get(name).copied()
    }

    pub fn require_node(&self, name: &str) -> Result<NodeIx> {
        self.node(name).ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn require_edge(&self, name: &str) -> Result<EdgeIx> {
        self.edge_named(name)
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn outgoing(&self, n: NodeIx) -> &[EdgeIx] {
        &self.outgoing[n.index()]
    }

    pub fn incoming(&self, n: NodeIx) -> &[EdgeIx] {
        &self.incoming[n.index()]
    }

    pub fn contains_node(&self, n: NodeIx) -> bool {
        n.index() < self.nodes.len()
    }

    pub fn identity_path(&self, n: NodeIx) -> Result<PathArrow> {
        if !self.contains_node(n) {
            return Err(Error::UnknownNode(format!("#{}", n.0)));
        }
        Ok(PathArrow::identity(n))
    }

    /// Builds the path from `src` through the given edges.
    pub fn path(&self, src: NodeIx, edges: Vec<EdgeIx>) -> Result<PathArrow> {
        if let Some(e) = edges.iter().find(|e| e.index() >= self.edge_count()) {
            return Err(Error::ForeignPath(format!("edge #{} outside graph", e.0)));
        }
        let p = PathArrow {
            src,
            tgt: edges.last().map_or(src, |&e| self.tgt(e)),
            edges,
        };
        self.check_path(&p)?;
        Ok(p)
    }

    /// Builds a path from edge names; the empty list denotes the identity at `src`.
    pub fn path_from_names<S: AsRef<str>>(&self, src: &str, names: &[S]) -> Result<PathArrow> {
        let src = self.require_node(src)?;
        let edges = names
            .iter()
            .map(|n| self.require_edge(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.path(src, edges)
    }

    /// Parses whitespace-separated edge names. The empty word needs `from`.
    pub fn parse_path(&self, tokens: &str, from: Option<&str>) -> Result<PathArrow> {
        let names: Vec<&str> = tokens.split_whitespace().collect();
        let src = match (from, names.first()) {
            (Some(f), _) => f.to_string(),
            (None, Some(first)) => {
                let e = self.require_edge(first)?;
                self.node_name(self.src(e)).to_string()
            }
            (None, None) => {
                if self.node_count() == 1 {
                    self.nodes[0].clone()
                } else {
                    return Err(Error::Precondition(
                        "the empty word needs an explicit source node".into(),
                    ));
                }
            }
        };
        self.path_from_names(&src, &names)
    }

    /// Checks that a path only uses this graph's edges and is endpoint-compatible.
    pub fn check_path(&self, p: &PathArrow) -> Result<()> {
        if !self.contains_node(p.src) || !self.contains_node(p.tgt) {
            return Err(Error::ForeignPath("endpoint outside graph".into()));
        }
        let mut at = p.src;
        for &e in &p.edges {
            if e.index() >= self.edges.len() {
                return Err(Error::ForeignPath(format!("edge #{} outside graph", e.0)));
            }
            let d = self.edge(e);
            if d.src != at {
                return Err(Error::EndpointMismatch {
                    left: self.node_name(at).to_string(),
                    right: self.node_name(d.src).to_string(),
                });
            }
            at = d.tgt;
        }
        if at != p.tgt {
            return Err(Error::ForeignPath("target does not match last edge".into()));
        }
        Ok(())
    }

    /// All paths `from → to` with at most `max_len` edges, depth-first in
    /// edge-identifier order (so every prefix precedes its extensions).
    pub fn enumerate_paths(&self, from: NodeIx, to: NodeIx, max_len: usize) -> Vec<PathArrow> {
        let dist = self.distances_to(to);
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.paths_dfs(from, from, to, max_len, &dist, &mut stack, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn paths_dfs(
        &self,
        origin: NodeIx,
        at: NodeIx,
        to: NodeIx,
        budget: usize,
        dist: &[usize],
        stack: &mut Vec<EdgeIx>,
        out: &mut Vec<PathArrow>,
    ) {
        if at == to {
            out.push(PathArrow {
                src: origin,
                tgt: to,
                edges: stack.clone(),
            });
        }
        if budget == 0 {
            return;
        }
        for &e in self.outgoing(at) {
            let next = self.tgt(e);
            if dist[next.index()] < budget {
                stack.push(e);
                self.paths_dfs(origin, next, to, budget - 1, dist, stack, out);
                stack.pop();
            }
        }
    }

    /// Shortest edge distance from every node to `to` (`usize::MAX` if unreachable).
    pub fn distances_to(&self, to: NodeIx) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        dist[to.index()] = 0;
        queue.push_back(to);
        while let Some(n) = queue.pop_front() {
            for &e in self.incoming(n) {
                let s = self.src(e);
                if dist[s.index()] == usize::MAX {
                    dist[s.index()] = dist[n.index()] + 1;
                    queue.push_back(s);
                }
            }
        }
        dist
    }

    /// Renders a path as space-separated edge names, or `id[A]` for an identity.
    pub fn render_path(&self, p: &PathArrow) -> String {
        if p.edges.is_empty() {
            format!("id[{}]", self.node_name(p.src))
        } else {
            p.edges.iter().map(|&e| self.edge_name(e)).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn edge_names(&self, p: &PathArrow) -> Vec<String> {
        p.edges.iter().map(|&e| self.edge_name(e).to_string()).collect()
    }
}

pub const BOW: &str = "bow";
pub const EOW: &str = "eow";
pub const BOTTOM: &str = "⊥";
pub const TOP: &str = "⊤";

/// An arrow of a free category: a possibly empty sequence of composable edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathArrow {
    src: NodeIx,
    tgt: NodeIx,
    edges: Vec<EdgeIx>,
}

impl PathArrow {
    pub fn identity(n: NodeIx) -> PathArrow {
        PathArrow {
            src: n,
            tgt: n,
            edges: Vec::new(),
        }
    }

    /// Assembles a path without consulting a graph. Callers guarantee
    /// that `edges` runs from `src` to `tgt`.
    pub(crate) fn from_raw(src: NodeIx, tgt: NodeIx, edges: Vec<EdgeIx>) -> PathArrow {
        PathArrow { src, tgt, edges }
    }

    pub fn src(&self) -> NodeIx {
        self.src
    }

    pub fn tgt(&self) -> NodeIx {
        self.tgt
    }

    pub fn edges(&self) -> &[EdgeIx] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }

    /// Sequential composition `self · other`.
    pub fn compose(&self, other: &PathArrow) -> Result<PathArrow> {
        if self.tgt != other.src {
            return Err(Error::EndpointMismatch {
                left: format!("#{}", self.tgt.0),
                right: format!("#{}", other.src.0),
            });
        }
        let mut edges = Vec::with_capacity(self.len() + other.len());
        edges.extend_from_slice(&self.edges);
        edges.extend_from_slice(&other.edges);
        Ok(PathArrow {
            src: self.src,
            tgt: other.tgt,
            edges,
        })
    }

    /// Like [`compose`](Self::compose), but names the mismatching nodes using `g`.
    pub fn compose_in(&self, g: &Graph, other: &PathArrow) -> Result<PathArrow> {
        self.compose(other).map_err(|_| Error::EndpointMismatch {
            left: g.node_name(self.tgt).to_string(),
            right: g.node_name(other.src).to_string(),
        })
    }

    /// Concatenates paths already known to be composable.
    pub(crate) fn concat_unchecked<'a>(parts: impl IntoIterator<Item = &'a PathArrow>) -> PathArrow {
        let mut it = parts.into_iter();
        let first = it.next().expect("at least one path");
        let mut out = first.clone();
        for p in it {
            debug_assert_eq!(out.tgt, p.src);
            out.edges.extend_from_slice(&p.edges);
            out.tgt = p.tgt;
        }
        out
    }

    /// The sub-path between edge positions `i` and `j`.
    pub fn slice(&self, g: &Graph, i: usize, j: usize) -> PathArrow {
        let node_at = |k: usize| {
            if k == 0 {
                self.src
            } else {
                g.tgt(self.edges[k - 1])
            }
        };
        PathArrow {
            src: node_at(i),
            tgt: node_at(j),
            edges: self.edges[i..j].to_vec(),
        }
    }

    /// The node reached after `k` edges.
    pub fn node_at(&self, g: &Graph, k: usize) -> NodeIx {
        if k == 0 {
            self.src
        } else {
            g.tgt(self.edges[k - 1])
        }
    }
}

/// compose_paths(p, q) = p · q.
pub fn compose_paths(p: &PathArrow, q: &PathArrow) -> Result<PathArrow> {
    p.compose(q)
}

/// A functor between free categories, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathFunctor {
    pub source: Arc<Graph>,
    pub target: Arc<Graph>,
    node_map: Vec<NodeIx>,
    edge_map: Vec<PathArrow>,
}

impl PathFunctor {
    pub fn new(
        source: Arc<Graph>,
        target: Arc<Graph>,
        node_map: Vec<NodeIx>,
        edge_map: Vec<PathArrow>,
    ) -> Result<PathFunctor> {
        if node_map.len() != source.node_count() || edge_map.len() != source.edge_count() {
            return Err(Error::InvalidHom("functor maps have the wrong size".into()));
        }
        for &n in &node_map {
            if !target.contains_node(n) {
                return Err(Error::InvalidHom("node image outside target".into()));
            }
        }
        for e in source.edges() {
            let img = &edge_map[e.index()];
            target.check_path(img)?;
            let d = source.edge(e);
            if img.src != node_map[d.src.index()] || img.tgt != node_map[d.tgt.index()] {
                return Err(Error::InvalidHom(format!(
                    "image of edge `{}` has the wrong endpoints",
                    d.id
                )));
            }
        }
        Ok(PathFunctor {
            source,
            target,
            node_map,
            edge_map,
        })
    }

    pub fn identity(g: Arc<Graph>) -> PathFunctor {
        let node_map = g.nodes().collect();
        let edge_map = g
            .edges()
            .map(|e| PathArrow {
                src: g.src(e),
                tgt: g.tgt(e),
                edges: vec![e],
            })
            .collect();
        PathFunctor {
            source: g.clone(),
            target: g,
            node_map,
            edge_map,
        }
    }

    pub fn map_node(&self, n: NodeIx) -> NodeIx {
        self.node_map[n.index()]
    }

    pub fn map_edge(&self, e: EdgeIx) -> &PathArrow {
        &self.edge_map[e.index()]
    }

    /// The action on arrows: concatenation of the edge images.
    pub fn apply(&self, w: &PathArrow) -> Result<PathArrow> {
        self.source.check_path(w)?;
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &PathArrow) -> PathArrow {
        let mut edges = Vec::new();
        for &e in &w.edges {
            edges.extend_from_slice(&self.edge_map[e.index()].edges);
        }
        PathArrow {
            src: self.node_map[w.src.index()],
            tgt: self.node_map[w.tgt.index()],
            edges,
        }
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &PathFunctor) -> Result<PathFunctor> {
        if *self.target != *then.source {
            return Err(Error::InvalidHom("functors are not composable".into()));
        }
        Ok(PathFunctor {
            source: self.source.clone(),
            target: then.target.clone(),
            node_map: self.node_map.iter().map(|&n| then.map_node(n)).collect(),
            edge_map: self.edge_map.iter().map(|p| then.apply_unchecked(p)).collect(),
        })
    }
}

/// apply_functor(F, w).
pub fn apply_functor(f: &PathFunctor, w: &PathArrow) -> Result<PathArrow> {
    f.apply(w)
}

/// A graph homomorphism; presents a finitary ULF functor between free categories.
#[derive(Clone, Debug)]
pub struct GraphHom {
    pub source: Arc<Graph>,
    pub target: Arc<Graph>,
    node_map: Vec<NodeIx>,
    edge_map: Vec<EdgeIx>,
    node_fibers: Vec<Vec<NodeIx>>,
    edge_fibers: Vec<Vec<EdgeIx>>,
}

impl PartialEq for GraphHom {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.node_map == other.node_map
            && self.edge_map == other.edge_map
    }
}

impl Eq for GraphHom {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeterminismFlags {
    pub deterministic: bool,
    pub codeterministic: bool,
    pub partial_deterministic: bool,
    pub partial_codeterministic: bool,
}

impl GraphHom {
    pub fn new(
        source: Arc<Graph>,
        target: Arc<Graph>,
        node_map: Vec<NodeIx>,
        edge_map: Vec<EdgeIx>,
    ) -> Result<GraphHom> {
        if node_map.len() != source.node_count() || edge_map.len() != source.edge_count() {
            return Err(Error::InvalidHom("maps have the wrong size".into()));
        }
        if node_map.iter().any(|&n| !target.contains_node(n)) {
            return Err(Error::InvalidHom("node image outside target".into()));
        }
        for e in source.edges() {
            let img = edge_map[e.index()];
            if img.index() >= target.edge_count() {
                return Err(Error::InvalidHom("edge image outside target".into()));
            }
            let d = source.edge(e);
            let t = target.edge(img);
            if t.src != node_map[d.src.index()] || t.tgt != node_map[d.tgt.index()] {
                return Err(Error::InvalidHom(format!(
                    "edge `{}` maps to `{}` but its endpoints map to ({}, {})",
                    d.id,
                    t.id,
                    target.node_name(node_map[d.src.index()]),
                    target.node_name(node_map[d.tgt.index()])
                )));
            }
        }
        let mut node_fibers = vec![Vec::new(); target.node_count()];
        for (i, &n) in node_map.iter().enumerate() {
            node_fibers[n.index()].push(NodeIx(i as u32));
        }
        let mut edge_fibers = vec![Vec::new(); target.edge_count()];
        for (i, &e) in edge_map.iter().enumerate() {
            edge_fibers[e.index()].push(EdgeIx(i as u32));
        }
        Ok(GraphHom {
            source,
            target,
            node_map,
            edge_map,
            node_fibers,
            edge_fibers,
        })
    }

    /// Builds a homomorphism from name maps.
    pub fn from_names(
        source: Arc<Graph>,
        target: Arc<Graph>,
        node_map: &HashMap<String, String>,
        edge_map: &HashMap<String, String>,
    ) -> Result<GraphHom> {
        let nodes = source
            .nodes()
            .map(|n| {
                let name = source.node_name(n);
                let img = node_map
                    .get(name)
                    .ok_or_else(|| Error::InvalidHom(format!("node `{name}` is unmapped")))?;
                target.require_node(img)
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = source
            .edges()
            .map(|e| {
                let name = source.edge_name(e);
                let img = edge_map
                    .get(name)
                    .ok_or_else(|| Error::InvalidHom(format!("edge `{name}` is unmapped")))?;
                target.require_edge(img)
            })
            .collect::<Result<Vec<_>>>()?;
        GraphHom::new(source, target, nodes, edges)
    }

    pub fn identity(g: Arc<Graph>) -> GraphHom {
        let nodes = g.nodes().collect();
        let edges = g.edges().collect();
        GraphHom::new(g.clone(), g, nodes, edges).expect("identity is a homomorphism")
    }

    pub fn map_node(&self, n: NodeIx) -> NodeIx {
        self.node_map[n.index()]
    }

    pub fn map_edge(&self, e: EdgeIx) -> EdgeIx {
        self.edge_map[e.index()]
    }

    pub fn node_fiber(&self, n: NodeIx) -> &[NodeIx] {
        &self.node_fibers[n.index()]
    }

    pub fn edge_fiber(&self, e: EdgeIx) -> &[EdgeIx] {
        &self.edge_fibers[e.index()]
    }

    pub fn map_path(&self, p: &PathArrow) -> PathArrow {
        PathArrow {
            src: self.map_node(p.src),
            tgt: self.map_node(p.tgt),
            edges: p.edges.iter().map(|&e| self.map_edge(e)).collect(),
        }
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &GraphHom) -> Result<GraphHom> {
        if *self.target != *then.source {
            return Err(Error::InvalidHom("homomorphisms are not composable".into()));
        }
        GraphHom::new(
            self.source.clone(),
            then.target.clone(),
            self.node_map.iter().map(|&n| then.map_node(n)).collect(),
            self.edge_map.iter().map(|&e| then.map_edge(e)).collect(),
        )
    }

    pub fn to_functor(&self) -> PathFunctor {
        PathFunctor {
            source: self.source.clone(),
            target: self.target.clone(),
            node_map: self.node_map.clone(),
            edge_map: self
                .edge_map
                .iter()
                .map(|&e| PathArrow {
                    src: self.target.src(e),
                    tgt: self.target.tgt(e),
                    edges: vec![e],
                })
                .collect(),
        }
    }

    fn check_over(&self, q: Option<NodeIx>, base: NodeIx) -> Result<()> {
        if let Some(q) = q {
            if !self.source.contains_node(q) {
                return Err(Error::UnknownNode(format!("#{}", q.0)));
            }
            if self.map_node(q) != base {
                return Err(Error::Precondition(format!(
                    "state `{}` lies over `{}`, not over `{}`",
                    self.source.node_name(q),
                    self.target.node_name(self.map_node(q)),
                    self.target.node_name(base)
                )));
            }
        }
        Ok(())
    }

    /// Forward reachability layers: `layers[k]` marks source nodes reachable
    /// by a lifting of the first `k` edges of `w`.
    fn forward_layers(&self, w: &PathArrow, from: Option<NodeIx>) -> Vec<Vec<bool>> {
        let n = self.source.node_count();
        let mut layer = vec![false; n];
        match from {
            Some(q) => layer[q.index()] = true,
            None => {
                for &q in self.node_fiber(w.src) {
                    layer[q.index()] = true;
                }
            }
        }
        let mut layers = vec![layer];
        for &e in &w.edges {
            let prev = layers.last().expect("nonempty");
            let mut next = vec![false; n];
            for &d in self.edge_fiber(e) {
                if prev[self.source.src(d).index()] {
                    next[self.source.tgt(d).index()] = true;
                }
            }
            layers.push(next);
        }
        layers
    }

    /// All runs over `w`: paths in the source graph lying over `w`, optionally
    /// pinned at either end.
    pub fn lift_runs(&self, w: &PathArrow, from: Option<NodeIx>, to: Option<NodeIx>) -> Result<Vec<PathArrow>> {
        self.target.check_path(w)?;
        self.check_over(from, w.src)?;
        self.check_over(to, w.tgt)?;
        Ok(self.lift_runs_unchecked(w, from, to))
    }

    pub(crate) fn lift_runs_unchecked(
        &self,
        w: &PathArrow,
        from: Option<NodeIx>,
        to: Option<NodeIx>,
    ) -> Vec<PathArrow> {
        let layers = self.forward_layers(w, from);
        let n = self.source.node_count();
        let len = w.len();
        // alive[k]: reachable at k and able to finish the lifting.
        let mut alive = vec![vec![false; n]; len + 1];
        for q in 0..n {
            alive[len][q] = layers[len][q] && to.is_none_or(|t| t.index() == q);
        }
        for k in (0..len).rev() {
            for &d in self.edge_fiber(w.edges[k]) {
                let (s, t) = (self.source.src(d), self.source.tgt(d));
                if layers[k][s.index()] && alive[k + 1][t.index()] {
                    alive[k][s.index()] = true;
                }
            }
        }
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(len);
        for q in 0..n {
            if alive[0][q] {
                self.runs_dfs(w, NodeIx(q as u32), NodeIx(q as u32), 0, &alive, &mut stack, &mut out);
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn runs_dfs(
        &self,
        w: &PathArrow,
        origin: NodeIx,
        at: NodeIx,
        k: usize,
        alive: &[Vec<bool>],
        stack: &mut Vec<EdgeIx>,
        out: &mut Vec<PathArrow>,
    ) {
        if k == w.len() {
            out.push(PathArrow {
                src: origin,
                tgt: at,
                edges: stack.clone(),
            });
            return;
        }
        for &d in self.edge_fiber(w.edges[k]) {
            let t = self.source.tgt(d);
            if self.source.src(d) == at && alive[k + 1][t.index()] {
                stack.push(d);
                self.runs_dfs(w, origin, t, k + 1, alive, stack, out);
                stack.pop();
            }
        }
    }

    /// Number of runs over `w`, by the same dynamic program without backtracking.
    pub fn count_runs(&self, w: &PathArrow, from: Option<NodeIx>, to: Option<NodeIx>) -> Result<u128> {
        self.target.check_path(w)?;
        self.check_over(from, w.src)?;
        self.check_over(to, w.tgt)?;
        let n = self.source.node_count();
        let mut counts = vec![0u128; n];
        match from {
            Some(q) => counts[q.index()] = 1,
            None => {
                for &q in self.node_fiber(w.src) {
                    counts[q.index()] = 1;
                }
            }
        }
        for &e in &w.edges {
            let mut next = vec![0u128; n];
            for &d in self.edge_fiber(e) {
                let c = counts[self.source.src(d).index()];
                let slot = &mut next[self.source.tgt(d).index()];
                *slot = slot.checked_add(c).expect("run count overflows u128");
            }
            counts = next;
        }
        Ok(match to {
            Some(q) => counts[q.index()],
            None => counts.iter().sum(),
        })
    }

    pub fn determinism_flags(&self) -> DeterminismFlags {
        let mut flags = DeterminismFlags {
            deterministic: true,
            codeterministic: true,
            partial_deterministic: true,
            partial_codeterministic: true,
        };
        for q in self.source.nodes() {
            let base = self.map_node(q);
            for (dir_out, base_edges, own_edges) in [
                (true, self.target.outgoing(base), self.source.outgoing(q)),
                (false, self.target.incoming(base), self.source.incoming(q)),
            ] {
                for &e in base_edges {
                    let count = own_edges.iter().filter(|&&d| self.map_edge(d) == e).count();
                    let (total, partial) = if dir_out {
                        (&mut flags.deterministic, &mut flags.partial_deterministic)
                    } else {
                        (&mut flags.codeterministic, &mut flags.partial_codeterministic)
                    };
                    if count != 1 {
                        *total = false;
                    }
                    if count > 1 {
                        *partial = false;
                    }
                }
            }
        }
        flags
    }
}

/// lift_runs(h, w, q_src, q_tgt).
pub fn lift_runs(h: &GraphHom, w: &PathArrow, from: Option<NodeIx>, to: Option<NodeIx>) -> Result<Vec<PathArrow>> {
    h.lift_runs(w, from, to)
}

/// The pullback of two homomorphisms into a common graph, with its projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub graph: Arc<Graph>,
    pub left: GraphHom,
    pub right: GraphHom,
    pairs: HashMap<(NodeIx, NodeIx), NodeIx>,
}

impl Pullback {
    /// The node of the pullback over the pair `(a, b)`, if the pair lies over a common node.
    pub fn node_of(&self, a: NodeIx, b: NodeIx) -> Option<NodeIx> {
        self.pairs.get(&(a, b)).copied()
    }
}

pub fn pullback_graphs(h1: &GraphHom, h2: &GraphHom) -> Result<Pullback> {
    if *h1.target != *h2.target {
        return Err(Error::Precondition(
            "pullback needs homomorphisms into the same graph".into(),
        ));
    }
    let (g1, g2, base) = (&h1.source, &h2.source, &h1.target);
    let pair_name = |a: &str, b: &str| format!("({a},{b})");
    let mut node_pairs = Vec::new();
    for t in base.nodes() {
        for &a in h1.node_fiber(t) {
            for &b in h2.node_fiber(t) {
                node_pairs.push((a, b));
            }
        }
    }
    let mut edge_pairs = Vec::new();
    for t in base.edges() {
        for &a in h1.edge_fiber(t) {
            for &b in h2.edge_fiber(t) {
                edge_pairs.push((a, b));
            }
        }
    }
    let graph = Graph::new(
        node_pairs
            .iter()
            .map(|&(a, b)| pair_name(g1.node_name(a), g2.node_name(b))),
        edge_pairs.iter().map(|&(a, b)| {
            let (ea, eb) = (g1.edge(a), g2.edge(b));
            (
                pair_name(&ea.id, &eb.id),
                pair_name(g1.node_name(ea.src), g2.node_name(eb.src)),
                pair_name(g1.node_name(ea.tgt), g2.node_name(eb.tgt)),
            )
        }),
    )?;
    let graph = Arc::new(graph);
    let mut left_nodes = vec![NodeIx(0); graph.node_count()];
    let mut right_nodes = vec![NodeIx(0); graph.node_count()];
    let mut pairs = HashMap::new();
    for &(a, b) in &node_pairs {
        let n = graph.require_node(&pair_name(g1.node_name(a), g2.node_name(b)))?;
        left_nodes[n.index()] = a;
        right_nodes[n.index()] = b;
        pairs.insert((a, b), n);
    }
    let mut left_edges = vec![EdgeIx(0); graph.edge_count()];
    let mut right_edges = vec![EdgeIx(0); graph.edge_count()];
    for &(a, b) in &edge_pairs {
        let e = graph.require_edge(&pair_name(g1.edge_name(a), g2.edge_name(b)))?;
        left_edges[e.index()] = a;
        right_edges[e.index()] = b;
    }
    Ok(Pullback {
        left: GraphHom::new(graph.clone(), g1.clone(), left_nodes, left_edges)?,
        right: GraphHom::new(graph.clone(), g2.clone(), right_nodes, right_edges)?,
        graph,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Graph {
        Graph::new(
            ["A", "B", "C"],
            vec![
                ("e1".into(), "A".into(), "B".into()),
                ("e2".into(), "B".into(), "C".into()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn compose_concatenates() {
        let g = line();
        let p = g.path_from_names("A", &["e1"]).unwrap();
        let q = g.path_from_names("B", &["e2"]).unwrap();
        let pq = p.compose(&q).unwrap();
        assert_eq!(g.render_path(&pq), "e1 e2");
        assert_eq!(pq.src(), g.node("A").unwrap());
        assert_eq!(pq.tgt(), g.node("C").unwrap());
        let err = q.compose_in(&g, &p).unwrap_err();
        assert_eq!(
            err,
            Error::EndpointMismatch {
                left: "C".into(),
                right: "A".into()
            }
        );
    }

    #[test]
    fn identities_are_units() {
        let g = line();
        let p = g.path_from_names("A", &["e1", "e2"]).unwrap();
        let ida = g.identity_path(g.node("A").unwrap()).unwrap();
        let idc = g.identity_path(g.node("C").unwrap()).unwrap();
        assert_eq!(ida.compose(&p).unwrap(), p);
        assert_eq!(p.compose(&idc).unwrap(), p);
        assert!(g.identity_path(NodeIx(9)).is_err());
    }

    #[test]
    fn bouquet_shapes() {
        let g = Graph::bouquet(&["a", "b"]).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 2));
        let empty = Graph::bouquet::<&str>(&[]).unwrap();
        let star = empty.node("*").unwrap();
        assert_eq!(empty.enumerate_paths(star, star, 5).len(), 1);
        assert!(Graph::bouquet(&["a", "a"]).is_err());
        let sent = Graph::bouquet(&["mom", "tom", "loves", "sp"]).unwrap();
        let w = sent.parse_path("mom sp", None).unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn bracket_bouquet_shapes() {
        let g = Graph::bracket_bouquet(&["a"]).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
        assert!(Graph::bracket_bouquet(&["bow"]).is_err());
        let g = Graph::bracket_bouquet(&["a", "b"]).unwrap();
        let paths = g.enumerate_paths(g.node(BOTTOM).unwrap(), g.node(TOP).unwrap(), 4);
        assert_eq!(paths.len(), 7);
        assert!(paths.iter().all(|p| p.len() >= 2));
    }

    #[test]
    fn enumerate_small() {
        let g = Graph::bouquet(&["a"]).unwrap();
        let s = g.node("*").unwrap();
        let ps: Vec<String> = g.enumerate_paths(s, s, 2).iter().map(|p| g.render_path(p)).collect();
        assert_eq!(ps, ["id[*]", "a", "a a"]);
        let two = Graph::new(["A", "B"], vec![("e".into(), "A".into(), "B".into())]).unwrap();
        let a = two.node("A").unwrap();
        assert_eq!(two.enumerate_paths(a, a, 5), vec![PathArrow::identity(a)]);
    }

    #[test]
    fn functor_action() {
        let g = Arc::new(Graph::bouquet(&["a", "b"]).unwrap());
        let w = g.parse_path("a b a", None).unwrap();
        assert_eq!(PathFunctor::identity(g.clone()).apply(&w).unwrap(), w);
        let star = g.node("*").unwrap();
        let collapse = PathFunctor::new(g.clone(), g.clone(), vec![star], vec![PathArrow::identity(star); 2]).unwrap();
        assert!(collapse.apply(&w).unwrap().is_identity());
    }

    #[test]
    fn hom_rejects_bad_edge_image() {
        let g = Arc::new(line());
        let b = Arc::new(Graph::bouquet(&["x"]).unwrap());
        let err = GraphHom::new(
            g.clone(),
            g.clone(),
            vec![NodeIx(0), NodeIx(1), NodeIx(2)],
            vec![EdgeIx(1), EdgeIx(0)],
        );
        assert!(err.is_err());
        let ok = GraphHom::new(g, b, vec![NodeIx(0); 3], vec![EdgeIx(0); 2]);
        assert!(ok.is_ok());
    }

    #[test]
    fn lift_runs_over_identity_is_fiber() {
        let base = Arc::new(Graph::bouquet(&["a"]).unwrap());
        let states = Arc::new(Graph::new(["p", "q"], vec![("t".into(), "p".into(), "q".into())]).unwrap());
        let h = GraphHom::new(states.clone(), base.clone(), vec![NodeIx(0); 2], vec![EdgeIx(0)]).unwrap();
        let id = PathArrow::identity(NodeIx(0));
        let runs = h.lift_runs(&id, None, None).unwrap();
        assert_eq!(runs.len(), 2);
        assert!(runs.iter().all(|r| r.is_identity()));
        let runs = h.lift_runs(&id, Some(NodeIx(0)), Some(NodeIx(1))).unwrap();
        assert!(runs.is_empty());
        let a = base.parse_path("a", None).unwrap();
        assert_eq!(h.count_runs(&a, None, None).unwrap(), 1);
    }

    #[test]
    fn lift_runs_checks_endpoints() {
        let base = Arc::new(Graph::new(["X", "Y"], vec![("e".into(), "X".into(), "Y".into())]).unwrap());
        let h = GraphHom::identity(base.clone());
        let w = base.parse_path("e", None).unwrap();
        assert!(h.lift_runs(&w, Some(base.node("Y").unwrap()), None).is_err());
        assert_eq!(h.lift_runs(&w, None, None).unwrap(), vec![w]);
    }

    #[test]
    fn identity_hom_is_bideterministic() {
        let g = Arc::new(Graph::bouquet(&["a", "b"]).unwrap());
        let f = GraphHom::identity(g).determinism_flags();
        assert!(f.deterministic && f.codeterministic);
        assert!(f.partial_deterministic && f.partial_codeterministic);
    }

    #[test]
    fn pullback_with_identity_and_empty() {
        let base = Arc::new(Graph::bouquet(&["a"]).unwrap());
        let states = Arc::new(
            Graph::new(
                ["p", "q"],
                vec![
                    ("t1".into(), "p".into(), "q".into()),
                    ("t2".into(), "q".into(), "p".into()),
                ],
            )
            .unwrap(),
        );
        let h = GraphHom::new(states.clone(), base.clone(), vec![NodeIx(0); 2], vec![EdgeIx(0); 2]).unwrap();
        let pb = pullback_graphs(&h, &GraphHom::identity(base.clone())).unwrap();
        assert_eq!(pb.graph.node_count(), 2);
        assert_eq!(pb.graph.edge_count(), 2);
        let empty = Arc::new(Graph::empty());
        let e = GraphHom::new(empty, base, vec![], vec![]).unwrap();
        let pb = pullback_graphs(&h, &e).unwrap();
        assert_eq!((pb.graph.node_count(), pb.graph.edge_count()), (0, 0));
    }
}
