use std::fmt::Write;

use super::model::Trace;
use super::text::term_text;
use crate::store::{Label, LabelSet};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

struct Dot<'a> {
    out: String,
    edges: Vec<(Label, Label, String)>,
    kept: Option<&'a LabelSet>,
    clusters: usize,
}

impl Dot<'_> {
    fn node(&mut self, l: &Label, text: &str, indent: usize) {
        let pad = " ".repeat(indent);
        let dim = self.kept.is_some_and(|k| !k.contains(l));
        let style = if dim { ", color=gray, fontcolor=gray, style=dashed" } else { "" };
        let _ = writeln!(self.out, "{pad}{} [label={}{style}];", quote(l.as_str()), quote(&format!("{l}: {text}")));
    }

    fn trace(&mut self, t: &Trace, indent: usize) {
        match t {
            Trace::Assign { out, term } => {
                self.node(out, &term_text(term, false), indent);
                for a in term.args() {
                    self.edges.push((a.clone(), out.clone(), String::new()));
                }
            }
            Trace::Proj { out, field, rec, src } => {
                self.node(out, &format!("proj_{field}"), indent);
                self.edges.push((rec.clone(), out.clone(), format!("proj_{field}")));
                self.edges.push((src.clone(), out.clone(), String::new()));
            }
            Trace::Seq { first, second } => {
                self.trace(first, indent);
                self.trace(second, indent);
            }
            Trace::Cond { out, test, branch, body, .. } => {
                self.cluster(indent, &format!("cond({test},{})", if *branch { "t" } else { "f" }), |d, i| d.trace(body, i));
                self.edges.push((test.clone(), out.clone(), "cond".into()));
            }
            Trace::Iter { iter, out, src, theta, .. } => {
                self.cluster(indent, &format!("{}({src})", iter.keyword()), |d, i| {
                    for (l, (t, _)) in theta {
                        d.cluster(i, &format!("[{l}]"), |d, j| d.trace(t, j));
                        d.edges.push((t.out().clone(), out.clone(), String::new()));
                    }
                });
                self.node(out, iter.keyword(), indent);
                self.edges.push((src.clone(), out.clone(), String::new()));
            }
        }
    }

    fn cluster(&mut self, indent: usize, title: &str, body: impl FnOnce(&mut Self, usize)) {
        let pad = " ".repeat(indent);
        self.clusters += 1;
        let _ = writeln!(self.out, "{pad}subgraph cluster_{} {{", self.clusters);
        let _ = writeln!(self.out, "{pad}  label={};", quote(title));
        body(self, indent + 2);
        let _ = writeln!(self.out, "{pad}}}");
    }
}

/// Graphviz rendering: one node per label, data-flow edges, and a cluster
/// per conditional and per iteration entry. Labels outside `kept`, when
/// given, are drawn dimmed.
pub fn trace_to_dot(t: &Trace, kept: Option<&LabelSet>) -> String {
    let mut d = Dot { out: String::from("digraph trace {\n  rankdir=LR;\n  node [shape=box];\n"), edges: Vec::new(), kept, clusters: 0 };
    d.trace(t, 2);
    let written = t.written_labels();
    let mut inputs = LabelSet::new();
    for (a, b, _) in &d.edges {
        for l in [a, b] {
            if !written.contains(l) {
                inputs.insert(l.clone());
            }
        }
    }
    for l in &inputs {
        d.node(l, "input", 2);
    }
    let edges = std::mem::take(&mut d.edges);
    for (a, b, lbl) in edges {
        let attr = if lbl.is_empty() { String::new() } else { format!(" [label={}]", quote(&lbl)) };
        let _ = writeln!(d.out, "  {} -> {}{attr};", quote(a.as_str()), quote(b.as_str()));
    }
    d.out.push_str("}\n");
    d.out
}
