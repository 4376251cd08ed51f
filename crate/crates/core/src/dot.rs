//! GraphViz output.

use std::fmt::Write;

use crate::automaton::{ClassicalNfa, Nfa};
use crate::graph::Graph;
use crate::species::{OpTree, Species};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

/// One DOT node per graph node, one labeled edge per graph edge.
pub fn graph_dot(g: &Graph, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for n in g.nodes() {
        writeln!(out, "  {};", quote(g.node_name(n))).unwrap();
    }
    for e in g.edges() {
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(g.node_name(g.src(e))),
            quote(g.node_name(g.tgt(e))),
            quote(g.edge_name(e))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Trees top-down; open slots are drawn as boxes labeled by their color.
pub fn tree_dot(s: &Species, t: &OpTree) -> String {
    fn walk(s: &Species, t: &OpTree, next: &mut usize, out: &mut String) -> usize {
        let me = *next;
        *next += 1;
        match t {
            OpTree::Leaf(c) => {
                writeln!(out, "  n{me} [shape=box, label={}];", quote(s.color_name(*c))).unwrap();
            }
            OpTree::Node(x, kids) => {
                writeln!(out, "  n{me} [label={}];", quote(s.op_name(*x))).unwrap();
                for k in kids {
                    let child = walk(s, k, next, out);
                    writeln!(out, "  n{me} -> n{child};").unwrap();
                }
            }
        }
        me
    }
    let mut out = String::from("digraph tree {\n");
    walk(s, t, &mut 0, &mut out);
    out.push_str("}\n");
    out
}

/// The state graph with each transition labeled `name / letter`; the
/// accepting state is a double circle.
pub fn nfa_dot(m: &Nfa) -> String {
    let states = m.states();
    let base = m.base();
    let mut out = String::from("digraph nfa {\n  rankdir=LR;\n  start [shape=point];\n");
    for q in states.nodes() {
        let shape = if q == m.qf { "doublecircle" } else { "circle" };
        writeln!(out, "  {} [shape={shape}];", quote(states.node_name(q))).unwrap();
    }
    writeln!(out, "  start -> {};", quote(states.node_name(m.q0))).unwrap();
    for d in states.edges() {
        let label = format!("{} / {}", states.edge_name(d), base.edge_name(m.hom.map_edge(d)));
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(states.node_name(states.src(d))),
            quote(states.node_name(states.tgt(d))),
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn classical_nfa_dot(c: &ClassicalNfa) -> String {
    let mut out = String::from("digraph nfa {\n  rankdir=LR;\n");
    for q in &c.states {
        let shape = if c.accepting.contains(q) {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(out, "  {} [shape={shape}];", quote(q)).unwrap();
    }
    for (k, q) in c.initial.iter().enumerate() {
        writeln!(out, "  start{k} [shape=point];\n  start{k} -> {};", quote(q)).unwrap();
    }
    for (p, a, q) in &c.transitions {
        writeln!(out, "  {} -> {} [label={}];", quote(p), quote(q), quote(a)).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn accepting_state_is_doubled() {
        let m = fixtures::parity_automaton(&["a"], 2);
        let d = nfa_dot(&m);
        assert!(d.contains("\"p0\" [shape=doublecircle]"));
        assert!(d.contains("\"p1\" [shape=circle]"));
        assert_eq!(d.matches("->").count(), 3);
    }

    #[test]
    fn tree_has_one_line_per_node() {
        let s = fixtures::sentence_species();
        let t = fixtures::sentence_tree(&s);
        let d = tree_dot(&s, &t);
        assert_eq!(d.matches("[label=").count(), 4);
        assert_eq!(d.matches("->").count(), 3);
    }

    #[test]
    fn quoting() {
        let g = Graph::bouquet(&["a\"b"]).unwrap();
        assert!(graph_dot(&g, "g").contains("label=\"a\\\"b\""));
    }
}
