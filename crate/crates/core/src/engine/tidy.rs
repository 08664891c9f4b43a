use std::collections::{BTreeMap, HashMap};

use crate::net::{Binet, Label, Wire};

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Preferred survivor among labels that get merged: user-written before
/// reserved, then smallest.
fn preferred<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Option<&'a Label> {
    labels
        .into_iter()
        .min_by(|a, b| (a.is_reserved(), a).cmp(&(b.is_reserved(), b)))
}

/// Removes explicit wires by label substitution.
///
/// Each maximal wire path is contracted. Its two ends are labels whose other
/// occurrence is an agent port or nowhere (free). Agent ends are renamed to a
/// free end when there is one. A path with two free ends stays as a single
/// wire and a closed wire cycle disappears.
pub fn tidy(binet: &Binet) -> Binet {
    if binet.wires.is_empty() {
        return binet.clone();
    }
    let mut on_agents: HashMap<&Label, usize> = HashMap::new();
    binet.walk(|_, a| {
        for l in a.ports() {
            *on_agents.entry(l).or_insert(0) += 1;
        }
    });
    let mut ids: BTreeMap<&Label, usize> = BTreeMap::new();
    for Wire(a, b) in &binet.wires {
        let n = ids.len();
        ids.entry(a).or_insert(n);
        let n = ids.len();
        ids.entry(b).or_insert(n);
    }
    let mut dsu = Dsu((0..ids.len()).collect());
    for Wire(a, b) in &binet.wires {
        dsu.union(ids[a], ids[b]);
    }
    let mut wire_degree: HashMap<&Label, usize> = HashMap::new();
    for Wire(a, b) in &binet.wires {
        *wire_degree.entry(a).or_insert(0) += 1;
        *wire_degree.entry(b).or_insert(0) += 1;
    }
    let mut components: BTreeMap<usize, Vec<&Label>> = BTreeMap::new();
    for (l, &i) in &ids {
        components.entry(dsu.find(i)).or_default().push(l);
    }
    let mut rename: HashMap<Label, Label> = HashMap::new();
    let mut wires = Vec::new();
    for labels in components.values() {
        let ends: Vec<&Label> = labels
            .iter()
            .copied()
            .filter(|l| wire_degree[l] == 1)
            .collect();
        let (free, attached): (Vec<&Label>, Vec<&Label>) = ends
            .iter()
            .partition(|l| on_agents.get(*l).copied().unwrap_or(0) == 0);
        match (free.as_slice(), attached.as_slice()) {
            ([], []) => {}
            ([f1, f2], []) => wires.push(Wire((*f1).clone(), (*f2).clone())),
            ([f], rest) => {
                for a in rest {
                    rename.insert((*a).clone(), (*f).clone());
                }
            }
            ([], both) => {
                let keep = preferred(both.iter().copied()).expect("non-empty").clone();
                for a in both {
                    if **a != keep {
                        rename.insert((*a).clone(), keep.clone());
                    }
                }
            }
            // a path has exactly two ends in a valid binet
            _ => wires.extend(
                binet
                    .wires
                    .iter()
                    .filter(|Wire(a, _)| labels.contains(&a))
                    .cloned(),
            ),
        }
    }
    let mut out = Binet {
        agents: binet.agents.clone(),
        wires,
        signature: binet.signature.clone(),
    };
    if !rename.is_empty() {
        for a in &mut out.agents {
            a.relabel(&mut |l| {
                if let Some(n) = rename.get(l) {
                    *l = n.clone();
                }
            });
        }
    }
    out
}
