//! Graphviz export.
//!
//! Output is deterministic: vertices are ordered by `(level, label)`,
//! edges by `(source, target)`, and levels are laid out left to right.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::Result;
use crate::graph::{Mult, MultGraph};
use crate::model::BratteliDiagram;
use crate::num::Count;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

const HEADER: &str = "digraph G {\n  rankdir=LR;\n";
const FOOTER: &str = "}\n";

fn edge_attrs<C: Count>(m: &Mult<C>) -> String {
    match m {
        Mult::Finite(c) => format!("label={}", quote(&c.to_string())),
        Mult::Infinite => format!("style=bold, label={}", quote("∞")),
    }
}

/// Renders the first `depth` levels of a diagram; nodes show `label (degree)`.
pub fn diagram_to_dot<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<String> {
    let m = d.materialize(depth)?;
    let mut out = String::from(HEADER);
    for level in m.levels() {
        let mut labels: Vec<_> = level.vertices.iter().collect();
        labels.sort_by(|a, b| a.label.cmp(&b.label));
        writeln!(out, "  {{ rank=same;").expect("string write");
        for v in labels {
            writeln!(
                out,
                "    {} [label={}];",
                quote(&v.label),
                quote(&format!("{} ({})", v.label, v.degree))
            )
            .expect("string write");
        }
        writeln!(out, "  }}").expect("string write");
    }
    for mat in m.matrices() {
        for ((s, t), c) in &mat.entries {
            writeln!(
                out,
                "  {} -> {} [{}];",
                quote(s),
                quote(t),
                edge_attrs(&Mult::Finite(c.clone()))
            )
            .expect("string write");
        }
    }
    out.push_str(FOOTER);
    Ok(out)
}

/// Renders a graph. Vertices without a level annotation come first;
/// annotated vertices are grouped into one rank per level.
pub fn graph_to_dot<C: Count>(g: &MultGraph<C>) -> String {
    let mut by_level: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for v in g.vertices() {
        by_level.entry(g.level(v).unwrap_or(0)).or_default().push(v);
    }
    let mut out = String::from(HEADER);
    for (level, mut vs) in by_level {
        vs.sort_unstable();
        let indent = if level == 0 { "  " } else { "    " };
        if level > 0 {
            writeln!(out, "  {{ rank=same;").expect("string write");
        }
        for v in vs {
            let attrs = if g.is_infinite_emitter(v) { " [peripheries=2]" } else { "" };
            writeln!(out, "{indent}{}{attrs};", quote(v)).expect("string write");
        }
        if level > 0 {
            writeln!(out, "  }}").expect("string write");
        }
    }
    for ((s, t), m) in g.edges() {
        writeln!(out, "  {} -> {} [{}];", quote(s), quote(t), edge_attrs(m)).expect("string write");
    }
    out.push_str(FOOTER);
    out
}
