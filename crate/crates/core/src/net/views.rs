//! Place graph and link graph views of a binet.

use std::collections::BTreeMap;

use super::{Agent, AgentId, Binet, Label, Signature, Symbol, Wire};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceNode {
    pub id: AgentId,
    pub symbol: Symbol,
    pub children: Vec<PlaceNode>,
}

/// The nesting forest.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaceForest {
    pub roots: Vec<PlaceNode>,
}

impl PlaceForest {
    pub fn node_count(&self) -> usize {
        fn count(n: &PlaceNode) -> usize {
            1 + n.children.iter().map(count).sum::<usize>()
        }
        self.roots.iter().map(count).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortPosition {
    Principal,
    External(usize),
    Internal(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortRef {
    Agent(AgentId, PortPosition),
    /// Wire index and end (0 or 1).
    Wire(usize, u8),
}

/// Every label with the port positions that carry it.
pub type LinkView = BTreeMap<Label, Vec<PortRef>>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ViewError {
    #[error("agent {0:?} has no port {1:?} in the link view")]
    MissingPort(AgentId, PortPosition),
    #[error("wire {0} has a missing end")]
    MissingWireEnd(usize),
}

impl Binet {
    pub fn place_view(&self) -> PlaceForest {
        fn go(agents: &[Agent], next: &mut usize) -> Vec<PlaceNode> {
            agents
                .iter()
                .map(|a| {
                    let id = AgentId(*next);
                    *next += 1;
                    PlaceNode {
                        id,
                        symbol: a.symbol.clone(),
                        children: go(&a.children, next),
                    }
                })
                .collect()
        }
        PlaceForest {
            roots: go(&self.agents, &mut 0),
        }
    }

    pub fn link_view(&self) -> LinkView {
        let mut links: LinkView = BTreeMap::new();
        let idx = self.index();
        for n in idx.iter() {
            let a = n.agent;
            links
                .entry(a.principal.clone())
                .or_default()
                .push(PortRef::Agent(n.id, PortPosition::Principal));
            for (i, l) in a.external.iter().enumerate() {
                links
                    .entry(l.clone())
                    .or_default()
                    .push(PortRef::Agent(n.id, PortPosition::External(i)));
            }
            for (i, l) in a.internal.iter().enumerate() {
                links
                    .entry(l.clone())
                    .or_default()
                    .push(PortRef::Agent(n.id, PortPosition::Internal(i)));
            }
        }
        for (i, Wire(a, b)) in self.wires.iter().enumerate() {
            links
                .entry(a.clone())
                .or_default()
                .push(PortRef::Wire(i, 0));
            links
                .entry(b.clone())
                .or_default()
                .push(PortRef::Wire(i, 1));
        }
        links
    }

    /// Rebuilds a binet from its two views. Arities come from `signature`.
    pub fn from_views(
        place: &PlaceForest,
        links: &LinkView,
        signature: &Signature,
    ) -> Result<Binet, ViewError> {
        let mut ports: BTreeMap<PortRef, &Label> = BTreeMap::new();
        let mut wire_count = 0;
        for (l, refs) in links {
            for r in refs {
                ports.insert(*r, l);
                if let PortRef::Wire(i, _) = r {
                    wire_count = wire_count.max(i + 1);
                }
            }
        }
        let port = |id: AgentId, pos: PortPosition| -> Result<Label, ViewError> {
            ports
                .get(&PortRef::Agent(id, pos))
                .map(|l| (*l).clone())
                .ok_or(ViewError::MissingPort(id, pos))
        };
        fn count_positions(
            ports: &BTreeMap<PortRef, &Label>,
            id: AgentId,
            make: fn(usize) -> PortPosition,
        ) -> usize {
            (0..)
                .take_while(|&i| ports.contains_key(&PortRef::Agent(id, make(i))))
                .count()
        }
        fn build(
            node: &PlaceNode,
            signature: &Signature,
            ports: &BTreeMap<PortRef, &Label>,
            port: &dyn Fn(AgentId, PortPosition) -> Result<Label, ViewError>,
        ) -> Result<Agent, ViewError> {
            let (ext, int) = match signature.get(&node.symbol) {
                Some(a) => (a.external, a.internal),
                None => (
                    count_positions(ports, node.id, PortPosition::External),
                    count_positions(ports, node.id, PortPosition::Internal),
                ),
            };
            Ok(Agent {
                symbol: node.symbol.clone(),
                principal: port(node.id, PortPosition::Principal)?,
                external: (0..ext)
                    .map(|i| port(node.id, PortPosition::External(i)))
                    .collect::<Result<_, _>>()?,
                internal: (0..int)
                    .map(|i| port(node.id, PortPosition::Internal(i)))
                    .collect::<Result<_, _>>()?,
                children: node
                    .children
                    .iter()
                    .map(|c| build(c, signature, ports, port))
                    .collect::<Result<_, _>>()?,
            })
        }
        let agents = place
            .roots
            .iter()
            .map(|r| build(r, signature, &ports, &port))
            .collect::<Result<_, _>>()?;
        let wires = (0..wire_count)
            .map(|i| {
                let a = ports.get(&PortRef::Wire(i, 0));
                let b = ports.get(&PortRef::Wire(i, 1));
                match (a, b) {
                    (Some(a), Some(b)) => Ok(Wire((*a).clone(), (*b).clone())),
                    _ => Err(ViewError::MissingWireEnd(i)),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(Binet {
            agents,
            wires,
            signature: signature.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::iso;

    #[test]
    fn single_agent_forest() {
        let b = Binet::from_parts(vec![Agent::new("H", "c")], vec![]).unwrap();
        let p = b.place_view();
        assert_eq!(p.roots.len(), 1);
        assert!(p.roots[0].children.is_empty());
    }

    #[test]
    fn link_view_counts_wire_ends() {
        let b = Binet::from_parts(vec![Agent::new("H", "w")], vec![Wire::new("u", "w")]).unwrap();
        let links = b.link_view();
        assert_eq!(links[&Label::from("w")].len(), 2);
        assert_eq!(links[&Label::from("u")].len(), 1);
    }

    #[test]
    fn views_round_trip() {
        let b = Binet::from_parts(
            vec![
                Agent::new("Abs", "y")
                    .with_external(["f"])
                    .with_internal(["g"])
                    .with_children([Agent::new("F", "g")]),
                Agent::new("App", "y").with_external(["d", "e"]),
            ],
            vec![Wire::new("d", "e2")],
        )
        .unwrap();
        let back = Binet::from_views(&b.place_view(), &b.link_view(), &b.signature).unwrap();
        assert_eq!(back, b);
        assert!(iso(&back, &b));
    }
}
