//! Anchored pattern matching.
//!
//! Active patterns are anchored at labels carried by two principal ports.
//! Inactive patterns are matched agent by agent; once a pattern agent's
//! principal variable is bound, candidates come from the principal index.

use std::collections::BTreeMap;

use super::{AgentPattern, ChildrenPattern, PortSlot, Rule, RuleKind, SymbolPattern};
use crate::net::{Agent, AgentId, Label, NetIndex, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubnetBinding {
    pub host: AgentId,
    pub agents: Vec<Agent>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    pub labels: BTreeMap<String, Label>,
    pub vectors: BTreeMap<String, Vec<Label>>,
    pub subnets: BTreeMap<String, SubnetBinding>,
    pub symbols: BTreeMap<String, Symbol>,
}

impl Bindings {
    fn bind_label(&mut self, var: &str, label: &Label) -> bool {
        match self.labels.get(var) {
            Some(l) => l == label,
            None => {
                self.labels.insert(var.to_string(), label.clone());
                true
            }
        }
    }

    fn bind_symbol(&mut self, var: &str, symbol: Symbol) -> bool {
        match self.symbols.get(var) {
            Some(s) => *s == symbol,
            None => {
                self.symbols.insert(var.to_string(), symbol);
                true
            }
        }
    }

    fn bind_slot(&mut self, slot: &PortSlot, labels: &[Label]) -> bool {
        match slot {
            PortSlot::Labels(vars) => {
                vars.len() == labels.len()
                    && vars.iter().zip(labels).all(|(v, l)| self.bind_label(v, l))
            }
            PortSlot::Vector(v) => match self.vectors.get(v) {
                Some(existing) => existing == labels,
                None => {
                    self.vectors.insert(v.clone(), labels.to_vec());
                    true
                }
            },
        }
    }
}

/// One occurrence of a rule's left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub rule: usize,
    /// Agents matched by the top-level pattern agents, in pattern order.
    pub agents: Vec<AgentId>,
    /// Agents matched by explicit children patterns.
    pub nested: Vec<AgentId>,
    pub bindings: Bindings,
    /// Where the right-hand side is placed: the parent of the deepest
    /// matched agent (`None` = top level).
    pub host: Option<AgentId>,
    /// Sibling-index path of `host`.
    pub host_path: Vec<usize>,
    /// Smallest path among the matched agents, used for stable ordering.
    pub anchor: Vec<usize>,
}

impl Match {
    /// Matched agents and their full subtrees.
    pub fn region(&self, idx: &NetIndex<'_>) -> Vec<AgentId> {
        let mut out: Vec<AgentId> = self.agents.iter().flat_map(|&a| idx.subtree(a)).collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone)]
struct State {
    bindings: Bindings,
    nested: Vec<AgentId>,
}

fn match_symbol(p: &SymbolPattern, s: &Symbol, b: &mut Bindings) -> bool {
    match p {
        SymbolPattern::Concrete(c) => c == s,
        SymbolPattern::Var(v) => b.bind_symbol(v, s.clone()),
        SymbolPattern::Derived { var, suffix } => {
            let name = s.as_str();
            match name
                .strip_suffix(suffix.as_str())
                .and_then(|r| r.strip_suffix('_'))
            {
                Some(base) if !base.is_empty() => b.bind_symbol(var, Symbol::new(base)),
                _ => false,
            }
        }
    }
}

/// All ways `pat` matches the agent `id`, extending `state`.
fn match_agent(pat: &AgentPattern, id: AgentId, idx: &NetIndex<'_>, state: State) -> Vec<State> {
    let agent = idx.agent(id);
    let mut st = state;
    let b = &mut st.bindings;
    if !match_symbol(&pat.symbol, &agent.symbol, b)
        || !b.bind_label(&pat.principal, &agent.principal)
        || !b.bind_slot(&pat.external, &agent.external)
        || !b.bind_slot(&pat.internal, &agent.internal)
    {
        return Vec::new();
    }
    match &pat.children {
        ChildrenPattern::Empty => {
            if agent.children.is_empty() {
                vec![st]
            } else {
                Vec::new()
            }
        }
        ChildrenPattern::Subnet(x) => {
            if st.bindings.subnets.contains_key(x) {
                return Vec::new();
            }
            st.bindings.subnets.insert(
                x.clone(),
                SubnetBinding {
                    host: id,
                    agents: agent.children.clone(),
                },
            );
            vec![st]
        }
        ChildrenPattern::Agents(pats) => {
            let kids = idx.children(id);
            if kids.len() != pats.len() {
                return Vec::new();
            }
            let mut used = vec![false; kids.len()];
            let mut out = Vec::new();
            match_children(pats, &kids, &mut used, idx, st, &mut out);
            out
        }
    }
}

fn match_children(
    pats: &[AgentPattern],
    kids: &[AgentId],
    used: &mut [bool],
    idx: &NetIndex<'_>,
    state: State,
    out: &mut Vec<State>,
) {
    let Some((first, rest)) = pats.split_first() else {
        out.push(state);
        return;
    };
    for (i, &kid) in kids.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut start = state.clone();
        start.nested.push(kid);
        for next in match_agent(first, kid, idx, start) {
            match_children(rest, kids, used, idx, next, out);
        }
        used[i] = false;
    }
}

fn finish(rule_index: usize, agents: Vec<AgentId>, st: State, idx: &NetIndex<'_>) -> Match {
    let deepest = agents
        .iter()
        .copied()
        .max_by(|a, b| {
            idx.get(*a)
                .depth()
                .cmp(&idx.get(*b).depth())
                // earliest pattern agent wins ties
                .then_with(|| b.cmp(a))
        })
        .expect("patterns have at least one agent");
    let host = idx.get(deepest).parent;
    let host_path = host.map(|h| idx.get(h).path.clone()).unwrap_or_default();
    let anchor = agents
        .iter()
        .map(|a| idx.get(*a).path.clone())
        .min()
        .unwrap_or_default();
    Match {
        rule: rule_index,
        agents,
        nested: st.nested,
        bindings: st.bindings,
        host,
        host_path,
        anchor,
    }
}

/// Matches an active rule against one specific pair of agents, trying both
/// orientations. Returns the first orientation that matches.
pub fn match_pair(
    rule_index: usize,
    rule: &Rule,
    a: AgentId,
    b: AgentId,
    idx: &NetIndex<'_>,
) -> Option<Match> {
    let [p, q] = rule.pattern.agents.as_slice() else {
        return None;
    };
    for (x, y) in [(a, b), (b, a)] {
        let start = State {
            bindings: Bindings::default(),
            nested: Vec::new(),
        };
        for s1 in match_agent(p, x, idx, start) {
            if let Some(s2) = match_agent(q, y, idx, s1).into_iter().next() {
                return Some(finish(rule_index, vec![x, y], s2, idx));
            }
        }
    }
    None
}

/// Every match of `rules[rule_index]` in the indexed binet.
///
/// Active rules are anchored at labels on two principal ports. Matched
/// top-level agents are pairwise distinct and never nested in each other.
pub fn match_pattern(rule_index: usize, rule: &Rule, idx: &NetIndex<'_>) -> Vec<Match> {
    let mut out = Vec::new();
    match rule.pattern.kind {
        RuleKind::Active => {
            let [p, q] = rule.pattern.agents.as_slice() else {
                return out;
            };
            if p.principal != q.principal {
                return out;
            }
            for (_, a, b) in idx.principal_pairs() {
                if idx.nested(a, b) {
                    continue;
                }
                for (x, y) in [(a, b), (b, a)] {
                    let start = State {
                        bindings: Bindings::default(),
                        nested: Vec::new(),
                    };
                    for s1 in match_agent(p, x, idx, start) {
                        for s2 in match_agent(q, y, idx, s1) {
                            out.push(finish(rule_index, vec![x, y], s2, idx));
                        }
                    }
                }
            }
        }
        RuleKind::Inactive => {
            let start = State {
                bindings: Bindings::default(),
                nested: Vec::new(),
            };
            let mut chosen = Vec::new();
            inactive_search(
                rule_index,
                &rule.pattern.agents,
                idx,
                start,
                &mut chosen,
                &mut out,
            );
        }
    }
    out
}

fn inactive_search(
    rule_index: usize,
    pats: &[AgentPattern],
    idx: &NetIndex<'_>,
    state: State,
    chosen: &mut Vec<AgentId>,
    out: &mut Vec<Match>,
) {
    let k = chosen.len();
    if k == pats.len() {
        out.push(finish(rule_index, chosen.clone(), state, idx));
        return;
    }
    let pat = &pats[k];
    let candidates: Vec<AgentId> = match state.bindings.labels.get(&pat.principal) {
        Some(l) => idx.by_principal(l).to_vec(),
        None => idx.iter().map(|n| n.id).collect(),
    };
    for id in candidates {
        if chosen.iter().any(|&c| idx.nested(c, id)) {
            continue;
        }
        for next in match_agent(pat, id, idx, state.clone()) {
            chosen.push(id);
            inactive_search(rule_index, pats, idx, next, chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Binet;
    use crate::{corpus, parse_binet, rho_rules};

    fn rule(id: &str) -> (usize, Rule) {
        let rs = rho_rules();
        let i = rs.rules.iter().position(|r| r.id == id).unwrap();
        (i, rs.rules[i].clone())
    }

    #[test]
    fn generic_rule_on_second_binet() {
        let second = parse_binet(corpus::SECOND).unwrap();
        let (i, r) = rule("match");
        let ms = match_pattern(i, &r, &second.index());
        let m = ms
            .iter()
            .find(|m| m.bindings.labels["a"].as_str() == "f")
            .expect("match at f");
        assert_eq!(m.bindings.symbols["alpha"].as_str(), "I");
        assert_eq!(m.bindings.labels["b"].as_str(), "d");
        assert!(m.bindings.vectors["Y"].is_empty());
        assert_eq!(m.bindings.subnets["X"].agents, vec![Agent::new("F", "e")]);
        assert!(m.host.is_none());
    }

    #[test]
    fn inactive_rule_on_second_binet() {
        let second = parse_binet(corpus::SECOND).unwrap();
        let (i, r) = rule("done");
        let ms = match_pattern(i, &r, &second.index());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].bindings.labels["b"].as_str(), "c");
        assert_eq!(second.index().agent(ms[0].agents[0]).symbol.as_str(), "M");
    }

    #[test]
    fn empty_binet_has_no_matches() {
        let empty = Binet::new();
        for (i, r) in rho_rules().rules.iter().enumerate() {
            assert!(match_pattern(i, r, &empty.index()).is_empty());
        }
    }

    #[test]
    fn derived_symbols_match_by_suffix() {
        let net = parse_binet("eps^a(), H_M^a( | | G^c())").unwrap();
        let (i, r) = rule("eps_moved");
        let ms = match_pattern(i, &r, &net.index());
        assert_eq!(ms.len(), 1);
        let (i, r) = rule("eps_m");
        assert!(match_pattern(i, &r, &net.index()).is_empty());
    }

    #[test]
    fn pair_matching_is_orientation_free() {
        let net = parse_binet("H^a(), M^a(c)").unwrap();
        let idx = net.index();
        let (i, r) = rule("match");
        let one = match_pair(i, &r, AgentId(0), AgentId(1), &idx).unwrap();
        let two = match_pair(i, &r, AgentId(1), AgentId(0), &idx).unwrap();
        assert_eq!(one.bindings, two.bindings);
        assert_eq!(one.agents, vec![AgentId(1), AgentId(0)]);
    }
}
