//! Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write;

use binet::{Agent, Binet, Label, Wire};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum End {
    Port { node: usize, principal: bool },
    Free(usize),
}

fn sorted(agents: &[Agent]) -> Vec<Agent> {
    let mut out: Vec<Agent> = agents
        .iter()
        .map(|a| Agent {
            children: sorted(&a.children),
            ..a.clone()
        })
        .collect();
    out.sort();
    out
}

fn find(parent: &mut BTreeMap<Label, Label>, l: &Label) -> Label {
    let p = parent.get(l).cloned().unwrap_or_else(|| l.clone());
    if &p == l {
        return p;
    }
    let root = find(parent, &p);
    parent.insert(l.clone(), root.clone());
    root
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders a binet as a DOT digraph.
///
/// Agents with children or internal ports become clusters. Edges follow
/// wires through to their agent ends; an arrowhead marks a principal port.
/// Free ports are point nodes.
pub fn export_dot(binet: &Binet) -> String {
    let agents = sorted(&binet.agents);
    let counts = binet.occurrences();

    let mut parent: BTreeMap<Label, Label> = BTreeMap::new();
    for Wire(a, b) in &binet.wires {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent.insert(hi, lo);
        }
    }

    let mut ends: BTreeMap<Label, Vec<End>> = BTreeMap::new();
    let mut names: BTreeMap<Label, Vec<&Label>> = BTreeMap::new();
    let mut free: Vec<&Label> = Vec::new();
    for (l, n) in &counts {
        let root = find(&mut parent, l);
        names.entry(root.clone()).or_default().push(l);
        if *n == 1 {
            ends.entry(root).or_default().push(End::Free(free.len()));
            free.push(l);
        }
    }

    let mut body = String::new();
    let mut next = 0;
    fn emit(
        agents: &[Agent],
        depth: usize,
        next: &mut usize,
        body: &mut String,
        parent: &mut BTreeMap<Label, Label>,
        ends: &mut BTreeMap<Label, Vec<End>>,
    ) {
        let pad = "  ".repeat(depth);
        for a in agents {
            let node = *next;
            *next += 1;
            let boxed = !a.children.is_empty() || !a.internal.is_empty();
            if boxed {
                let _ = writeln!(body, "{pad}subgraph cluster_n{node} {{");
                let _ = writeln!(body, "{pad}  label={};", quote(a.symbol.as_str()));
            }
            let inner = if boxed {
                format!("{pad}  ")
            } else {
                pad.clone()
            };
            let _ = writeln!(body, "{inner}n{node} [label={}];", quote(a.symbol.as_str()));
            for (i, l) in a.ports().enumerate() {
                let root = find(parent, l);
                ends.entry(root).or_default().push(End::Port {
                    node,
                    principal: i == 0,
                });
            }
            emit(
                &a.children,
                depth + usize::from(boxed),
                next,
                body,
                parent,
                ends,
            );
            if boxed {
                let _ = writeln!(body, "{pad}}}");
            }
        }
    }
    emit(&agents, 1, &mut next, &mut body, &mut parent, &mut ends);

    for (i, l) in free.iter().enumerate() {
        let _ = writeln!(body, "  p{i} [shape=point, xlabel={}];", quote(l.as_str()));
    }

    let mut edges = Vec::new();
    for (root, mut es) in ends {
        if es.len() != 2 {
            continue;
        }
        es.sort();
        let label = names[&root]
            .iter()
            .copied()
            .min_by_key(|l| (l.is_reserved(), *l))
            .expect("component has a label");
        edges.push((es[0], es[1], label));
    }
    edges.sort();
    for (a, b, label) in edges {
        let (from, tail) = end(a);
        let (to, head) = end(b);
        let _ = writeln!(
            body,
            "  {from} -> {to} [dir=both, arrowtail={tail}, arrowhead={head}, label={}];",
            quote(label.as_str())
        );
    }

    if body.is_empty() {
        return "digraph binet {\n}\n".to_string();
    }
    format!("digraph binet {{\n  node [shape=box];\n{body}}}\n")
}

fn end(e: End) -> (String, &'static str) {
    match e {
        End::Port { node, principal } => (
            format!("n{node}"),
            if principal { "normal" } else { "none" },
        ),
        End::Free(i) => (format!("p{i}"), "none"),
    }
}
