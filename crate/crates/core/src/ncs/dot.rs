use std::fmt::Write;

use crate::fts::System;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

/// Graphviz rendering: one node per state labelled with its name and output,
/// initial states as targets of thick sourceless arrows, edges labelled by
/// input. Node and edge order follow state and input order.
pub fn to_dot(system: &System) -> String {
    let mut out = String::new();
    writeln!(out, "digraph ncs {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=box, style=rounded];").unwrap();
    for s in system.states() {
        let label = format!(
            "\"{}\\n{}\"",
            escape(system.state_name(s)),
            escape(&system.output(s).to_string())
        );
        writeln!(out, "  n{} [label={label}];", s.0).unwrap();
    }
    for &s in system.initial() {
        writeln!(out, "  init{0} [shape=point, style=invis];", s.0).unwrap();
        writeln!(out, "  init{0} -> n{0} [penwidth=2.5];", s.0).unwrap();
    }
    for (s, u, t) in system.transitions() {
        writeln!(out, "  n{} -> n{} [label={}];", s.0, t.0, quote(system.input_name(u))).unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fts::{two_state_plant, Metric, SystemBuilder};

    #[test]
    fn two_state_plant_graph() {
        let dot = to_dot(&two_state_plant());
        assert_eq!(dot.matches(" -> n").count(), 4 + 2);
        assert!(dot.contains("n0 -> n1 [label=\"b\"]"));
        assert!(dot.contains("label=\"x\\nZ\""));
    }

    #[test]
    fn empty_graph() {
        let dot = to_dot(&SystemBuilder::new(Metric::Discrete).build().unwrap());
        assert_eq!(dot.lines().count(), 4);
    }
}
