use std::fmt::Write;

use super::Hierarchy;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz text with one cluster per controller.
pub fn to_dot(h: &Hierarchy) -> String {
    let mut out = String::from("digraph hierarchy {\n  rankdir=LR;\n");
    for (i, c) in h.controllers.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "    label=\"{}[{}]\";", escape(&c.name), escape(&c.params.join(", ")));
        for q in 0..h.num_states {
            let shape = if q == h.terminal() { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "    c{i}_q{q} [label=\"Q{q}\", shape={shape}];");
        }
        for (&(q, b), t) in &c.transitions {
            let label = format!("{}/{}: {}", c.gamma[&q], b as u8, t.instruction.label(h));
            let _ = writeln!(out, "    c{i}_q{q} -> c{i}_q{} [label=\"{}\"];", t.next, escape(&label));
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
