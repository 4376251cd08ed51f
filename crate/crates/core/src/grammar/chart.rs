//! Generalized CYK recognition, parse-tree enumeration and ambiguity counting.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use super::Cfg;
use crate::graph::{NodeIx, PathArrow};
use crate::species::{ColorIx, OpIx, OpTree};

/// Parse matrix: for every span `(i, j)` of a word, the colors deriving
/// the sub-arrow between positions `i` and `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    word: PathArrow,
    /// Node of the base at each position `0..=n`.
    boundary: Vec<NodeIx>,
    colors: usize,
    cells: Vec<bool>,
}

/// A derivable triple: color `color` derives the span `(i, j)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub color: ColorIx,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AmbiguityCount {
    Finite(u128),
    Infinite,
}

impl fmt::Display for AmbiguityCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbiguityCount::Finite(n) => write!(f, "{n}"),
            AmbiguityCount::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseResult {
    pub trees: Vec<OpTree>,
    pub count: AmbiguityCount,
    /// Set when more derivations exist than were returned.
    pub truncated: bool,
}

impl Chart {
    pub fn word(&self) -> &PathArrow {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_identity()
    }

    fn slot(&self, i: usize, j: usize, c: ColorIx) -> usize {
        (i * (self.len() + 1) + j) * self.colors + c.index()
    }

    pub fn contains(&self, i: usize, j: usize, c: ColorIx) -> bool {
        i <= j && j <= self.len() && self.cells[self.slot(i, j, c)]
    }

    pub fn colors_at(&self, i: usize, j: usize) -> Vec<ColorIx> {
        (0..self.colors as u32)
            .map(ColorIx)
            .filter(|&c| self.contains(i, j, c))
            .collect()
    }

    fn set(&mut self, i: usize, j: usize, c: ColorIx) -> bool {
        let k = self.slot(i, j, c);
        !std::mem::replace(&mut self.cells[k], true)
    }
}

/// Child spans of one rule application, in left-to-right order.
type Split = Vec<(usize, usize)>;

impl Cfg {
    fn segment_end(&self, chart: &Chart, seg: &PathArrow, at: usize, limit: usize) -> Option<usize> {
        if seg.is_identity() {
            return (chart.boundary[at] == seg.src()).then_some(at);
        }
        let end = at + seg.len();
        (end <= limit && chart.word.edges()[at..end] == *seg.edges()).then_some(end)
    }

    /// Visits every way node `x` derives span `(i, j)` given the chart's
    /// current contents. The visitor returns `false` to stop early.
    fn visit_splits(&self, chart: &Chart, x: OpIx, i: usize, j: usize, visit: &mut dyn FnMut(&Split) -> bool) -> bool {
        let rule = self.rule(x);
        let gap = rule.outer();
        if chart.boundary[i] != gap.left || chart.boundary[j] != gap.right {
            return true;
        }
        let Some(first) = self.segment_end(chart, &rule.segments()[0], i, j) else {
            return true;
        };
        let mut split = Vec::with_capacity(rule.arity());
        self.splits_from(chart, x, 0, first, j, &mut split, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn splits_from(
        &self,
        chart: &Chart,
        x: OpIx,
        k: usize,
        at: usize,
        j: usize,
        split: &mut Split,
        visit: &mut dyn FnMut(&Split) -> bool,
    ) -> bool {
        let d = self.species.op(x);
        if k == d.arity() {
            return if at == j { visit(split) } else { true };
        }
        let child = d.inputs[k];
        let next_seg = &self.rule(x).segments()[k + 1];
        for b in at..=j {
            if !chart.contains(at, b, child) {
                continue;
            }
            if let Some(after) = self.segment_end(chart, next_seg, b, j) {
                split.push((at, b));
                let go_on = self.splits_from(chart, x, k + 1, after, j, split, visit);
                split.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    fn derives(&self, chart: &Chart, x: OpIx, i: usize, j: usize) -> bool {
        let mut found = false;
        self.visit_splits(chart, x, i, j, &mut |_| {
            found = true;
            false
        });
        found
    }

    /// Computes the parse matrix of `w` as the least fixed point of the
    /// rule closure, span length by span length.
    pub fn recognize(&self, w: &PathArrow) -> Chart {
        let n = w.len();
        let colors = self.species.color_count();
        let boundary = (0..=n).map(|k| w.node_at(&self.base, k)).collect();
        let mut chart = Chart {
            word: w.clone(),
            boundary,
            colors,
            cells: vec![false; (n + 1) * (n + 1) * colors],
        };
        for span in 0..=n {
            loop {
                let mut changed = false;
                for i in 0..=n - span {
                    let j = i + span;
                    for x in self.species.ops() {
                        let out = self.species.op(x).output;
                        if !chart.contains(i, j, out) && self.derives(&chart, x, i, j) {
                            changed |= chart.set(i, j, out);
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        chart
    }

    /// Whether `w` belongs to the language.
    pub fn accepts(&self, w: &PathArrow) -> bool {
        if w.src() != self.start_gap().left || w.tgt() != self.start_gap().right {
            return false;
        }
        let chart = self.recognize(w);
        chart.contains(0, w.len(), self.start)
    }

    /// Rule applications deriving each item reachable from the root item.
    fn item_graph(&self, chart: &Chart, root: Item) -> HashMap<Item, Vec<(OpIx, Vec<Item>)>> {
        let mut graph = HashMap::new();
        let mut stack = vec![root];
        while let Some(item) = stack.pop() {
            if graph.contains_key(&item) {
                continue;
            }
            let mut edges = Vec::new();
            for x in self.species.ops_with_output(item.color) {
                let inputs = &self.species.op(x).inputs;
                self.visit_splits(chart, x, item.i, item.j, &mut |split| {
                    let children: Vec<Item> = split
                        .iter()
                        .zip(inputs)
                        .map(|(&(i, j), &color)| Item { color, i, j })
                        .collect();
                    edges.push((x, children));
                    true
                });
            }
            for (_, children) in &edges {
                stack.extend(children.iter().copied());
            }
            graph.insert(item, edges);
        }
        graph
    }

    fn root_item(&self, chart: &Chart) -> Option<Item> {
        let root = Item {
            color: self.start,
            i: 0,
            j: chart.len(),
        };
        (chart.word.src() == self.start_gap().left
            && chart.word.tgt() == self.start_gap().right
            && chart.contains(0, chart.len(), self.start))
        .then_some(root)
    }

    /// Number of derivations of `w`; infinite exactly when a derivable item
    /// reachable from the root lies on a cycle.
    pub fn parse_count(&self, w: &PathArrow) -> AmbiguityCount {
        let chart = self.recognize(w);
        match self.root_item(&chart) {
            None => AmbiguityCount::Finite(0),
            Some(root) => count_derivations(&self.item_graph(&chart, root), root),
        }
    }

    /// Derivation trees of `w`, smallest first. When more than `max_trees`
    /// exist (possibly infinitely many) the first `max_trees` are returned
    /// and the result is flagged as truncated.
    pub fn parse_trees(&self, w: &PathArrow, max_trees: usize) -> ParseResult {
        let chart = self.recognize(w);
        let Some(root) = self.root_item(&chart) else {
            return ParseResult {
                trees: Vec::new(),
                count: AmbiguityCount::Finite(0),
                truncated: false,
            };
        };
        let graph = self.item_graph(&chart, root);
        let count = count_derivations(&graph, root);
        let wanted = match count {
            AmbiguityCount::Finite(c) => (c.min(max_trees as u128)) as usize,
            AmbiguityCount::Infinite => max_trees,
        };
        let truncated = match count {
            AmbiguityCount::Finite(c) => c > max_trees as u128,
            AmbiguityCount::Infinite => true,
        };
        let mut trees = Vec::new();
        let mut budget = 1;
        while trees.len() < wanted {
            let mut builder = TreeBuilder {
                graph: &graph,
                memo: HashMap::new(),
            };
            trees = builder.trees(root, budget).as_ref().clone();
            budget += 1;
        }
        trees.sort_by_key(OpTree::node_count);
        trees.truncate(wanted);
        ParseResult {
            trees,
            count,
            truncated,
        }
    }

    /// Minimal total cost of a derivation of `w`, where each use of node `x`
    /// costs `cost(x)` (which must be positive).
    pub fn min_derivation_cost(&self, w: &PathArrow, cost: impl Fn(OpIx) -> usize) -> Option<usize> {
        let chart = self.recognize(w);
        let root = self.root_item(&chart)?;
        let graph = self.item_graph(&chart, root);
        let mut best: HashMap<Item, usize> = HashMap::new();
        loop {
            let mut changed = false;
            for (item, edges) in &graph {
                for (x, children) in edges {
                    let total = children
                        .iter()
                        .try_fold(cost(*x), |acc, c| best.get(c).map(|v| acc + v));
                    if let Some(total) = total {
                        if best.get(item).is_none_or(|&b| total < b) {
                            best.insert(*item, total);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        best.get(&root).copied()
    }
}

fn count_derivations(graph: &HashMap<Item, Vec<(OpIx, Vec<Item>)>>, root: Item) -> AmbiguityCount {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit(
        graph: &HashMap<Item, Vec<(OpIx, Vec<Item>)>>,
        item: Item,
        marks: &mut HashMap<Item, Mark>,
        counts: &mut HashMap<Item, u128>,
    ) -> bool {
        match marks.get(&item) {
            Some(Mark::Open) => return false,
            Some(Mark::Done) => return true,
            None => {}
        }
        marks.insert(item, Mark::Open);
        let mut total: u128 = 0;
        for (_, children) in &graph[&item] {
            let mut product: u128 = 1;
            for &c in children {
                if !visit(graph, c, marks, counts) {
                    return false;
                }
                product = product
                    .checked_mul(counts[&c])
                    .expect("derivation count overflows u128");
            }
            total = total.checked_add(product).expect("derivation count overflows u128");
        }
        marks.insert(item, Mark::Done);
        counts.insert(item, total);
        true
    }
    let mut marks = HashMap::new();
    let mut counts = HashMap::new();
    if visit(graph, root, &mut marks, &mut counts) {
        AmbiguityCount::Finite(counts[&root])
    } else {
        AmbiguityCount::Infinite
    }
}

struct TreeBuilder<'a> {
    graph: &'a HashMap<Item, Vec<(OpIx, Vec<Item>)>>,
    memo: HashMap<(Item, usize), Rc<Vec<OpTree>>>,
}

impl TreeBuilder<'_> {
    /// All derivations of `item` with at most `budget` nodes.
    fn trees(&mut self, item: Item, budget: usize) -> Rc<Vec<OpTree>> {
        if let Some(done) = self.memo.get(&(item, budget)) {
            return done.clone();
        }
        let mut out = Vec::new();
        if budget > 0 {
            let graph = self.graph;
            for (x, children) in &graph[&item] {
                let mut acc = Vec::new();
                self.combine(children, budget - 1, &mut Vec::new(), &mut acc);
                out.extend(acc.into_iter().map(|ch| OpTree::Node(*x, ch)));
            }
        }
        let out = Rc::new(out);
        self.memo.insert((item, budget), out.clone());
        out
    }

    fn combine(&mut self, children: &[Item], budget: usize, prefix: &mut Vec<OpTree>, out: &mut Vec<Vec<OpTree>>) {
        let Some((&first, rest)) = children.split_first() else {
            out.push(prefix.clone());
            return;
        };
        if budget < children.len() {
            return;
        }
        let options = self.trees(first, budget - rest.len());
        for t in options.iter() {
            prefix.push(t.clone());
            self.combine(rest, budget - t.node_count(), prefix, out);
            prefix.pop();
        }
    }
}
