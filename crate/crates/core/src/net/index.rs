use std::collections::HashMap;

use super::{Agent, Binet, Label};

/// Preorder position of an agent in a particular binet. Only meaningful for
/// the binet the index was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

#[derive(Clone, Debug)]
pub struct IndexedAgent<'a> {
    pub id: AgentId,
    pub agent: &'a Agent,
    pub path: Vec<usize>,
    pub parent: Option<AgentId>,
    /// One past the last descendant's id.
    pub subtree_end: usize,
}

impl IndexedAgent<'_> {
    pub fn depth(&self) -> usize {
        self.path.len() - 1
    }

    pub fn contains(&self, other: AgentId) -> bool {
        other.0 >= self.id.0 && other.0 < self.subtree_end
    }
}

/// Flattened, preorder view of a binet with a principal-port index.
#[derive(Clone, Debug)]
pub struct NetIndex<'a> {
    pub binet: &'a Binet,
    nodes: Vec<IndexedAgent<'a>>,
    principal: HashMap<&'a Label, Vec<AgentId>>,
}

impl<'a> NetIndex<'a> {
    pub fn new(binet: &'a Binet) -> Self {
        let mut nodes = Vec::with_capacity(binet.agent_count());
        fn go<'a>(
            agents: &'a [Agent],
            parent: Option<AgentId>,
            path: &mut Vec<usize>,
            nodes: &mut Vec<IndexedAgent<'a>>,
        ) {
            for (i, a) in agents.iter().enumerate() {
                path.push(i);
                let id = AgentId(nodes.len());
                nodes.push(IndexedAgent {
                    id,
                    agent: a,
                    path: path.clone(),
                    parent,
                    subtree_end: 0,
                });
                go(&a.children, Some(id), path, nodes);
                nodes[id.0].subtree_end = nodes.len();
                path.pop();
            }
        }
        go(&binet.agents, None, &mut Vec::new(), &mut nodes);
        let mut principal: HashMap<&Label, Vec<AgentId>> = HashMap::new();
        for n in &nodes {
            principal.entry(&n.agent.principal).or_default().push(n.id);
        }
        NetIndex {
            binet,
            nodes,
            principal,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: AgentId) -> &IndexedAgent<'a> {
        &self.nodes[id.0]
    }

    pub fn agent(&self, id: AgentId) -> &'a Agent {
        self.nodes[id.0].agent
    }

    pub fn iter(&self) -> impl Iterator<Item = &IndexedAgent<'a>> {
        self.nodes.iter()
    }

    /// Agents whose principal port carries `label`.
    pub fn by_principal(&self, label: &Label) -> &[AgentId] {
        self.principal.get(label).map_or(&[], Vec::as_slice)
    }

    /// Labels that sit on two principal ports, in first-seen preorder.
    pub fn principal_pairs(&self) -> Vec<(&'a Label, AgentId, AgentId)> {
        let mut out = Vec::new();
        for n in &self.nodes {
            let l = &n.agent.principal;
            if let [a, b] = self.by_principal(l) {
                if *a == n.id {
                    out.push((l, *a, *b));
                }
            }
        }
        out
    }

    /// Ids of `id` and all its descendants.
    pub fn subtree(&self, id: AgentId) -> impl Iterator<Item = AgentId> {
        (id.0..self.nodes[id.0].subtree_end).map(AgentId)
    }

    /// Direct children of `id`.
    pub fn children(&self, id: AgentId) -> Vec<AgentId> {
        let mut out = Vec::new();
        let mut next = id.0 + 1;
        let end = self.nodes[id.0].subtree_end;
        while next < end {
            out.push(AgentId(next));
            next = self.nodes[next].subtree_end;
        }
        out
    }

    /// True if either agent lies in the other's subtree.
    pub fn nested(&self, a: AgentId, b: AgentId) -> bool {
        self.nodes[a.0].contains(b) || self.nodes[b.0].contains(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_ids_and_subtrees() {
        let b = Binet::from_parts(
            vec![
                Agent::new("M", "f")
                    .with_external(["d"])
                    .with_children([Agent::new("F", "e")]),
                Agent::new("G", "e"),
                Agent::new("I", "f"),
            ],
            vec![],
        )
        .unwrap();
        let idx = b.index();
        assert_eq!(idx.len(), 4);
        assert_eq!(idx.get(AgentId(1)).path, vec![0, 0]);
        assert_eq!(idx.get(AgentId(1)).parent, Some(AgentId(0)));
        assert_eq!(idx.subtree(AgentId(0)).count(), 2);
        assert_eq!(idx.children(AgentId(0)), vec![AgentId(1)]);
        let pairs = idx.principal_pairs();
        assert_eq!(pairs.len(), 2);
        assert!(idx.nested(AgentId(0), AgentId(1)));
        assert!(!idx.nested(AgentId(2), AgentId(1)));
    }
}
