//! Graphviz export: solid child edges labelled with the rule and premise
//! index, dashed back-edges.

use std::fmt::Write;

use crate::bundle::{Body, Loaded};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(l: &Loaded) -> String {
    let mut out = String::from("digraph proof {\n  node [shape=box, fontname=\"monospace\"];\n");
    let mut node = |a: &resetproof_core::Address, label: String| {
        let _ = writeln!(out, "  \"{a}\" [label=\"{}\"];", escape(&label));
    };
    let mut edges = Vec::new();
    let mut back = Vec::new();
    match &l.body {
        Body::Plain(p) => {
            for (a, n) in p.nodes() {
                node(a, format!("{a}: {}", l.system.display(n.label)));
                if let Some(r) = n.rule {
                    let name = &l.system.rho(r).name;
                    for (i, c) in p.children(a).iter().enumerate() {
                        edges.push((a.clone(), c.clone(), format!("{name} #{}", i + 1)));
                    }
                }
            }
            back.extend(p.beta().iter().map(|(t, c)| (t.clone(), c.clone())));
        }
        Body::Reset(rp) => {
            for (a, n) in rp.nodes() {
                node(a, format!("{a}: {}\n{}", l.system.display(n.label.base), n.label.board.render()));
                if let Some(k) = &n.rule {
                    let name = match k {
                        resetproof_core::reset::StepKind::Lifted(r) => l.system.rho(*r).name.clone(),
                        resetproof_core::reset::StepKind::Weak => "Weak".into(),
                        resetproof_core::reset::StepKind::Reset(g) => format!("Reset {g}"),
                        resetproof_core::reset::StepKind::Pop => "Pop".into(),
                    };
                    for (i, c) in rp.children(a).iter().enumerate() {
                        edges.push((a.clone(), c.clone(), format!("{name} #{}", i + 1)));
                    }
                }
            }
            back.extend(rp.beta().iter().map(|(t, c)| (t.clone(), c.clone())));
        }
    }
    for (a, c, label) in edges {
        let _ = writeln!(out, "  \"{a}\" -> \"{c}\" [label=\"{}\"];", escape(&label));
    }
    for (t, c) in back {
        let _ = writeln!(out, "  \"{t}\" -> \"{c}\" [style=dashed];");
    }
    out.push_str("}\n");
    out
}
