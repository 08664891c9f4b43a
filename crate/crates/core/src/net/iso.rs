//! Structural isomorphism up to label renaming and sibling reordering.
//!
//! Agents are matched by backtracking in a connectivity-driven order; every
//! agent carries a local invariant (symbol, depth, arity, child count and
//! what sits at the other end of each port) that prunes candidates early.

use std::collections::{BTreeMap, HashMap};

use super::{Agent, Binet, Label, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Partner {
    Free,
    Wire,
    /// Other end is on an agent: (symbol, port position, same agent).
    Port(Symbol, usize, bool),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct NodeKey {
    symbol: Symbol,
    depth: usize,
    external: usize,
    internal: usize,
    children: usize,
    partners: Vec<Partner>,
}

struct Flat<'a> {
    nodes: Vec<FlatNode<'a>>,
    wires: Vec<(&'a Label, &'a Label)>,
    /// label -> nodes carrying it
    carriers: HashMap<&'a Label, Vec<usize>>,
}

struct FlatNode<'a> {
    parent: Option<usize>,
    ports: Vec<&'a Label>,
    key: NodeKey,
}

impl<'a> Flat<'a> {
    fn new(b: &'a Binet) -> Self {
        let mut raw: Vec<(Option<usize>, usize, &'a Agent)> = Vec::new();
        fn go<'a>(
            agents: &'a [Agent],
            parent: Option<usize>,
            depth: usize,
            raw: &mut Vec<(Option<usize>, usize, &'a Agent)>,
        ) {
            for a in agents {
                let id = raw.len();
                raw.push((parent, depth, a));
                go(&a.children, Some(id), depth + 1, raw);
            }
        }
        go(&b.agents, None, 0, &mut raw);

        let mut occ: HashMap<&'a Label, Vec<Option<(usize, usize)>>> = HashMap::new();
        for (i, (_, _, a)) in raw.iter().enumerate() {
            for (p, l) in a.ports().enumerate() {
                occ.entry(l).or_default().push(Some((i, p)));
            }
        }
        let mut wires = Vec::new();
        for w in &b.wires {
            occ.entry(&w.0).or_default().push(None);
            occ.entry(&w.1).or_default().push(None);
            wires.push((&w.0, &w.1));
        }

        let mut carriers: HashMap<&'a Label, Vec<usize>> = HashMap::new();
        let nodes = raw
            .iter()
            .enumerate()
            .map(|(i, &(parent, depth, a))| {
                let ports: Vec<&Label> = a.ports().collect();
                let partners = ports
                    .iter()
                    .enumerate()
                    .map(|(p, l)| {
                        let others = &occ[*l];
                        let other = others.iter().find(|o| **o != Some((i, p)));
                        match other {
                            None => Partner::Free,
                            Some(None) => Partner::Wire,
                            Some(Some((j, q))) => {
                                Partner::Port(raw[*j].2.symbol.clone(), *q, *j == i)
                            }
                        }
                    })
                    .collect();
                for l in &ports {
                    let c = carriers.entry(*l).or_default();
                    if c.last() != Some(&i) {
                        c.push(i);
                    }
                }
                FlatNode {
                    parent,
                    ports,
                    key: NodeKey {
                        symbol: a.symbol.clone(),
                        depth,
                        external: a.external.len(),
                        internal: a.internal.len(),
                        children: a.children.len(),
                        partners,
                    },
                }
            })
            .collect();
        Flat {
            nodes,
            wires,
            carriers,
        }
    }

    fn key_census(&self) -> BTreeMap<&NodeKey, usize> {
        let mut m = BTreeMap::new();
        for n in &self.nodes {
            *m.entry(&n.key).or_default() += 1;
        }
        m
    }

    /// Visit order: parents first, preferring agents connected to ones
    /// already placed.
    fn search_order(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut placed = vec![false; n];
        let mut seen: HashMap<&Label, ()> = HashMap::new();
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let mut best: Option<(usize, usize)> = None;
            for (i, node) in self.nodes.iter().enumerate() {
                if placed[i] || node.parent.is_some_and(|p| !placed[p]) {
                    continue;
                }
                let score = node.ports.iter().filter(|l| seen.contains_key(*l)).count();
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((i, score));
                }
            }
            let (i, _) = best.expect("some agent is always placeable");
            placed[i] = true;
            for l in &self.nodes[i].ports {
                seen.insert(l, ());
            }
            order.push(i);
        }
        order
    }
}

struct Search<'a, 'b> {
    left: &'b Flat<'a>,
    right: &'b Flat<'a>,
    order: Vec<usize>,
    fwd: HashMap<&'a Label, &'a Label>,
    bwd: HashMap<&'a Label, &'a Label>,
    undo: Vec<&'a Label>,
    node_map: Vec<Option<usize>>,
    used: Vec<bool>,
    wire_used: Vec<bool>,
    by_key: HashMap<&'b NodeKey, Vec<usize>>,
}

impl<'a, 'b> Search<'a, 'b> {
    fn bind(&mut self, l: &'a Label, r: &'a Label) -> bool {
        match (self.fwd.get(l), self.bwd.get(r)) {
            (Some(&x), _) => x == r,
            (None, Some(_)) => false,
            (None, None) => {
                self.fwd.insert(l, r);
                self.bwd.insert(r, l);
                self.undo.push(l);
                true
            }
        }
    }

    fn rollback(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let l = self.undo.pop().unwrap();
            let r = self.fwd.remove(l).unwrap();
            self.bwd.remove(r);
        }
    }

    fn candidates(&self, li: usize) -> Vec<usize> {
        let node = &self.left.nodes[li];
        for l in &node.ports {
            if let Some(r) = self.fwd.get(*l) {
                return self.right.carriers.get(*r).cloned().unwrap_or_default();
            }
        }
        self.by_key.get(&node.key).cloned().unwrap_or_default()
    }

    fn solve(&mut self, k: usize) -> bool {
        if k == self.order.len() {
            return self.solve_wires(0);
        }
        let li = self.order[k];
        let lnode = &self.left.nodes[li];
        let want_parent = lnode
            .parent
            .map(|p| self.node_map[p].expect("parent placed first"));
        for ri in self.candidates(li) {
            let rnode = &self.right.nodes[ri];
            if self.used[ri] || rnode.key != lnode.key || rnode.parent != want_parent {
                continue;
            }
            let mark = self.undo.len();
            let ok = lnode
                .ports
                .iter()
                .zip(&rnode.ports)
                .all(|(l, r)| self.bind(l, r));
            if ok {
                self.used[ri] = true;
                self.node_map[li] = Some(ri);
                if self.solve(k + 1) {
                    return true;
                }
                self.used[ri] = false;
                self.node_map[li] = None;
            }
            self.rollback(mark);
        }
        false
    }

    fn solve_wires(&mut self, k: usize) -> bool {
        if k == self.left.wires.len() {
            return true;
        }
        let (a, b) = self.left.wires[k];
        for j in 0..self.right.wires.len() {
            if self.wire_used[j] {
                continue;
            }
            let (c, d) = self.right.wires[j];
            for (x, y) in [(c, d), (d, c)] {
                let mark = self.undo.len();
                if self.bind(a, x) && self.bind(b, y) {
                    self.wire_used[j] = true;
                    if self.solve_wires(k + 1) {
                        return true;
                    }
                    self.wire_used[j] = false;
                }
                self.rollback(mark);
            }
        }
        false
    }
}

/// Finds a label bijection witnessing `left ≅ right`, if one exists.
pub fn iso_witness(left: &Binet, right: &Binet) -> Option<BTreeMap<Label, Label>> {
    if left.wires.len() != right.wires.len() {
        return None;
    }
    let lf = Flat::new(left);
    let rf = Flat::new(right);
    if lf.nodes.len() != rf.nodes.len() || lf.key_census() != rf.key_census() {
        return None;
    }
    let mut by_key: HashMap<&NodeKey, Vec<usize>> = HashMap::new();
    for (i, n) in rf.nodes.iter().enumerate() {
        by_key.entry(&n.key).or_default().push(i);
    }
    let mut search = Search {
        left: &lf,
        right: &rf,
        order: lf.search_order(),
        fwd: HashMap::new(),
        bwd: HashMap::new(),
        undo: Vec::new(),
        node_map: vec![None; lf.nodes.len()],
        used: vec![false; rf.nodes.len()],
        wire_used: vec![false; rf.wires.len()],
        by_key,
    };
    if search.solve(0) {
        Some(
            search
                .fwd
                .iter()
                .map(|(l, r)| ((*l).clone(), (*r).clone()))
                .collect(),
        )
    } else {
        None
    }
}

/// True iff the binets are equal up to a label bijection and reordering of
/// sibling agents. Port order, principal ports, symbols and nesting must
/// agree exactly. Signatures are not compared.
pub fn iso(left: &Binet, right: &Binet) -> bool {
    iso_witness(left, right).is_some()
}
