//! Graphviz rendering of game trees.
//!
//! Max nodes are white and Min nodes gray. Internal subtrees that occur
//! more than once are drawn with a double border. With a horizon `d`,
//! nodes deeper than `d` are dotted.

use std::collections::HashMap;
use std::fmt::Write;

use crate::tree::{Color, Node};

pub fn to_dot(u: &Node, horizon: Option<usize>) -> String {
    let mut occurrences: HashMap<&Node, usize> = HashMap::new();
    for n in u.preorder() {
        if !n.is_leaf() {
            *occurrences.entry(n).or_default() += 1;
        }
    }

    let mut out = String::from("digraph tree {\n  node [shape=circle, style=filled];\n");
    let mut next = 0usize;
    let mut stack = vec![(u, 0usize, None::<usize>)];
    while let Some((n, level, parent)) = stack.pop() {
        let id = next;
        next += 1;
        let fill = match n.color() {
            Color::Max => "white",
            Color::Min => "gray",
        };
        let mut attrs = format!("label=\"{}\", fillcolor={fill}", n.eval());
        if occurrences.get(n).copied().unwrap_or(0) > 1 {
            attrs.push_str(", peripheries=2");
        }
        if horizon.is_some_and(|d| level > d) {
            attrs.push_str(", style=\"filled,dotted\"");
        }
        let _ = writeln!(out, "  n{id} [{attrs}];");
        if let Some(p) = parent {
            let _ = writeln!(out, "  n{p} -> n{id};");
        }
        for c in n.children().iter().rev() {
            stack.push((c, level + 1, Some(id)));
        }
    }
    out.push_str("}\n");
    out
}
