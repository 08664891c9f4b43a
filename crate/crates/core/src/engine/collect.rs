use std::collections::BTreeSet;

use crate::net::{AgentId, Binet, Label, NetIndex};
use crate::rules::{match_pair, match_pattern, Match, Rule, RuleKind, RuleSet};

/// A rewrite that could fire in the current pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub m: Match,
    /// The shared principal label for active pairs.
    pub label: Option<Label>,
    pub kind: RuleKind,
    pub moves_subnet: bool,
    /// Agents removed or rewritten: the matched agents with their subtrees.
    pub region: Vec<AgentId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Candidates {
    pub active: Vec<Candidate>,
    pub inactive: Vec<Candidate>,
    /// Active pairs for which no rule applies.
    pub stuck: Vec<Label>,
}

impl Candidates {
    pub fn is_empty(&self) -> bool {
        self.active.is_empty() && self.inactive.is_empty()
    }

    pub fn len(&self) -> usize {
        self.active.len() + self.inactive.len()
    }

    pub fn active_labels(&self) -> BTreeSet<&Label> {
        self.active
            .iter()
            .filter_map(|c| c.label.as_ref())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Candidate> {
        self.active.iter().chain(&self.inactive)
    }
}

/// Active rules ordered most specific first, ties by position in the file.
pub(crate) fn active_order(rs: &RuleSet) -> Vec<usize> {
    let mut order: Vec<usize> = rs.active().map(|(i, _)| i).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(rs.rules[i].pattern.specificity()), i));
    order
}

fn candidate(rule: &Rule, m: Match, label: Option<Label>, idx: &NetIndex<'_>) -> Candidate {
    Candidate {
        region: m.region(idx),
        label,
        kind: rule.kind(),
        moves_subnet: rule.moves_subnet(),
        m,
    }
}

/// Finds every active pair with an applicable rule and every inactive match.
pub fn collect(binet: &Binet, rs: &RuleSet) -> Candidates {
    collect_with(&binet.index(), rs, &active_order(rs))
}

pub(crate) fn collect_with(idx: &NetIndex<'_>, rs: &RuleSet, order: &[usize]) -> Candidates {
    let mut out = Candidates::default();
    for (label, a, b) in idx.principal_pairs() {
        if idx.nested(a, b) {
            continue;
        }
        let found = order
            .iter()
            .find_map(|&i| match_pair(i, &rs.rules[i], a, b, idx).map(|m| (i, m)));
        match found {
            Some((i, m)) => out
                .active
                .push(candidate(&rs.rules[i], m, Some(label.clone()), idx)),
            None => out.stuck.push(label.clone()),
        }
    }
    for (i, rule) in rs.inactive() {
        let mut seen = BTreeSet::new();
        for m in match_pattern(i, rule, idx) {
            let mut key = m.agents.clone();
            key.extend(&m.nested);
            key.sort();
            if seen.insert(key) {
                out.inactive.push(candidate(rule, m, None, idx));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rho::nat_rules;
    use crate::{corpus, parse_binet, rho_rules};

    fn labels(c: &Candidates) -> Vec<&str> {
        c.active_labels().into_iter().map(|l| l.as_str()).collect()
    }

    #[test]
    fn second_binet_census() {
        let c = collect(&parse_binet(corpus::SECOND).unwrap(), &rho_rules());
        assert_eq!(labels(&c), ["a", "e", "f"]);
        assert_eq!(c.inactive.len(), 1);
        assert!(c.stuck.is_empty());
        let rs = rho_rules();
        let rule = |l: &str| {
            let cand = c
                .active
                .iter()
                .find(|x| x.label.as_ref().unwrap().as_str() == l)
                .unwrap();
            rs.rules[cand.m.rule].id.as_str()
        };
        assert_eq!(
            (rule("a"), rule("e"), rule("f")),
            ("match", "clash", "match")
        );
    }

    #[test]
    fn first_binet_census() {
        let c = collect(&parse_binet(corpus::FIRST).unwrap(), &rho_rules());
        assert_eq!(labels(&c), ["x", "y"]);
        assert!(c.inactive.is_empty());
    }

    #[test]
    fn empty_binet_has_no_candidates() {
        let c = collect(&Binet::new(), &rho_rules());
        assert!(c.is_empty());
        assert_eq!(c.len(), 0);
    }

    #[test]
    fn pairs_without_rules_are_stuck() {
        let c = collect(
            &parse_binet("A^a(), B^a(), Z^b(), eps^b()").unwrap(),
            &nat_rules(),
        );
        assert_eq!(c.stuck, vec![Label::new("a")]);
        assert_eq!(labels(&c), ["b"]);
    }

    #[test]
    fn regions_cover_moved_subnets() {
        let net = parse_binet(corpus::SECOND).unwrap();
        let c = collect(&net, &rho_rules());
        let f = c
            .active
            .iter()
            .find(|x| x.label.as_ref().unwrap().as_str() == "f")
            .unwrap();
        assert!(f.moves_subnet);
        assert_eq!(f.region.len(), 3);
        let e = c
            .active
            .iter()
            .find(|x| x.label.as_ref().unwrap().as_str() == "e")
            .unwrap();
        assert!(e.region.iter().any(|id| f.region.contains(id)));
    }

    #[test]
    fn nested_principal_pair_is_not_active() {
        let net = parse_binet("K^a( | | Z^a())\nsig K(0, 0)").unwrap();
        assert!(collect(&net, &nat_rules()).is_empty());
    }
}
