//! Brute-force reference implementations, exponential and only meant for
//! small binets: matching by enumerating agent tuples, candidate collection
//! by scanning principal labels, isomorphism by enumerating agent
//! permutations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::net::{Agent, AgentId, Binet, Label, NetIndex, Symbol, Wire};
use crate::rules::{
    AgentPattern, ChildrenPattern, PortSlot, Rule, RuleKind, RuleSet, SymbolPattern,
};

/// A match as plain data, comparable across implementations.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlatMatch {
    pub agents: Vec<AgentId>,
    pub labels: BTreeMap<String, Label>,
    pub vectors: BTreeMap<String, Vec<Label>>,
    pub subnets: BTreeMap<String, Vec<Agent>>,
    pub symbols: BTreeMap<String, Symbol>,
}

impl From<&crate::rules::Match> for FlatMatch {
    fn from(m: &crate::rules::Match) -> Self {
        FlatMatch {
            agents: m.agents.clone(),
            labels: m.bindings.labels.clone(),
            vectors: m.bindings.vectors.clone(),
            subnets: m
                .bindings
                .subnets
                .iter()
                .map(|(k, v)| (k.clone(), v.agents.clone()))
                .collect(),
            symbols: m.bindings.symbols.clone(),
        }
    }
}

fn bind<K: Ord + Clone, V: PartialEq + Clone>(map: &mut BTreeMap<K, V>, k: &K, v: V) -> bool {
    match map.get(k) {
        Some(old) => *old == v,
        None => {
            map.insert(k.clone(), v);
            true
        }
    }
}

fn unify_symbol(p: &SymbolPattern, s: &Symbol, m: &mut FlatMatch) -> bool {
    match p {
        SymbolPattern::Concrete(c) => c == s,
        SymbolPattern::Var(v) => bind(&mut m.symbols, v, s.clone()),
        SymbolPattern::Derived { var, suffix } => {
            let tail = format!("_{suffix}");
            let name = s.as_str();
            name.len() > tail.len()
                && name.ends_with(&tail)
                && bind(
                    &mut m.symbols,
                    var,
                    Symbol::new(&name[..name.len() - tail.len()]),
                )
        }
    }
}

fn unify_slot(p: &PortSlot, ls: &[Label], m: &mut FlatMatch) -> bool {
    match p {
        PortSlot::Vector(v) => bind(&mut m.vectors, v, ls.to_vec()),
        PortSlot::Labels(vs) => {
            vs.len() == ls.len()
                && vs
                    .iter()
                    .zip(ls)
                    .all(|(v, l)| bind(&mut m.labels, v, l.clone()))
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every way `pat` unifies with `agent`, starting from `m`.
fn unify(pat: &AgentPattern, agent: &Agent, m: FlatMatch) -> Vec<FlatMatch> {
    let mut m = m;
    if !unify_symbol(&pat.symbol, &agent.symbol, &mut m)
        || !bind(&mut m.labels, &pat.principal, agent.principal.clone())
        || !unify_slot(&pat.external, &agent.external, &mut m)
        || !unify_slot(&pat.internal, &agent.internal, &mut m)
    {
        return Vec::new();
    }
    match &pat.children {
        ChildrenPattern::Empty => {
            if agent.children.is_empty() {
                vec![m]
            } else {
                Vec::new()
            }
        }
        ChildrenPattern::Subnet(x) => {
            if m.subnets.contains_key(x) {
                return Vec::new();
            }
            m.subnets.insert(x.clone(), agent.children.clone());
            vec![m]
        }
        ChildrenPattern::Agents(ps) => {
            if ps.len() != agent.children.len() {
                return Vec::new();
            }
            let mut out = Vec::new();
            for perm in permutations(ps.len()) {
                let mut states = vec![m.clone()];
                for (pi, &ci) in perm.iter().enumerate() {
                    states = states
                        .into_iter()
                        .flat_map(|s| unify(&ps[pi], &agent.children[ci], s))
                        .collect();
                }
                out.extend(states);
            }
            out
        }
    }
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for t in tuples(n, k - 1) {
        for i in 0..n {
            if !t.contains(&i) {
                let mut u = t.clone();
                u.push(i);
                out.push(u);
            }
        }
    }
    out
}

/// All matches of `rule` found by trying every tuple of distinct, mutually
/// non-nested agents.
pub fn brute_match(rule: &Rule, binet: &Binet) -> BTreeSet<FlatMatch> {
    let idx = binet.index();
    let k = rule.pattern.agents.len();
    let mut out = BTreeSet::new();
    for t in tuples(idx.len(), k) {
        let ids: Vec<AgentId> = t.iter().map(|&i| AgentId(i)).collect();
        let nested = ids.iter().enumerate().any(|(i, a)| {
            ids[i + 1..]
                .iter()
                .any(|b| idx.get(*a).contains(*b) || idx.get(*b).contains(*a))
        });
        if nested {
            continue;
        }
        let mut states = vec![FlatMatch {
            agents: ids.clone(),
            ..FlatMatch::default()
        }];
        for (p, id) in rule.pattern.agents.iter().zip(&ids) {
            states = states
                .into_iter()
                .flat_map(|s| unify(p, idx.agent(*id), s))
                .collect();
        }
        out.extend(states);
    }
    out
}

/// Labels occurring on exactly two principal ports of non-nested agents for
/// which some active rule matches.
pub fn brute_collect(binet: &Binet, rs: &RuleSet) -> BTreeSet<Label> {
    let idx = binet.index();
    let matched: BTreeSet<Vec<AgentId>> = rs
        .rules
        .iter()
        .filter(|r| r.kind() == RuleKind::Active)
        .flat_map(|r| brute_match(r, binet))
        .map(|m| m.agents)
        .collect();
    let mut by_label: HashMap<&Label, Vec<AgentId>> = HashMap::new();
    for n in idx.iter() {
        by_label.entry(&n.agent.principal).or_default().push(n.id);
    }
    by_label
        .into_iter()
        .filter(|(_, ids)| match ids[..] {
            [a, b] => matched.contains(&vec![a, b]) || matched.contains(&vec![b, a]),
            _ => false,
        })
        .map(|(l, _)| l.clone())
        .collect()
}

struct Flat {
    symbol: Symbol,
    parent: Option<usize>,
    ports: Vec<Label>,
    arity: (usize, usize),
}

fn flatten(b: &Binet) -> Vec<Flat> {
    let idx: NetIndex<'_> = b.index();
    idx.iter()
        .map(|n| Flat {
            symbol: n.agent.symbol.clone(),
            parent: n.parent.map(|p| p.0),
            ports: n.agent.ports().cloned().collect(),
            arity: (n.agent.internal.len(), n.agent.external.len()),
        })
        .collect()
}

fn extend_map(
    fwd: &mut HashMap<Label, Label>,
    bwd: &mut HashMap<Label, Label>,
    a: &Label,
    b: &Label,
) -> bool {
    match (fwd.get(a), bwd.get(b)) {
        (Some(x), _) if x != b => false,
        (_, Some(y)) if y != a => false,
        _ => {
            fwd.insert(a.clone(), b.clone());
            bwd.insert(b.clone(), a.clone());
            true
        }
    }
}

/// Isomorphism by trying every agent bijection and every wire matching.
pub fn brute_iso(x: &Binet, y: &Binet) -> bool {
    let (fx, fy) = (flatten(x), flatten(y));
    if fx.len() != fy.len() || x.wires.len() != y.wires.len() {
        return false;
    }
    'perm: for perm in permutations(fx.len()) {
        let mut fwd = HashMap::new();
        let mut bwd = HashMap::new();
        for (i, &j) in perm.iter().enumerate() {
            let (a, b) = (&fx[i], &fy[j]);
            if a.symbol != b.symbol || a.arity != b.arity || a.parent.map(|p| perm[p]) != b.parent {
                continue 'perm;
            }
            for (la, lb) in a.ports.iter().zip(&b.ports) {
                if !extend_map(&mut fwd, &mut bwd, la, lb) {
                    continue 'perm;
                }
            }
        }
        if wires_match(
            &x.wires,
            &y.wires,
            &mut vec![false; y.wires.len()],
            &fwd,
            &bwd,
        ) {
            return true;
        }
    }
    false
}

fn wires_match(
    xs: &[Wire],
    ys: &[Wire],
    used: &mut Vec<bool>,
    fwd: &HashMap<Label, Label>,
    bwd: &HashMap<Label, Label>,
) -> bool {
    let Some((Wire(a, b), rest)) = xs.split_first() else {
        return true;
    };
    for j in 0..ys.len() {
        if used[j] {
            continue;
        }
        let Wire(c, d) = &ys[j];
        for (c, d) in [(c, d), (d, c)] {
            let (mut f, mut g) = (fwd.clone(), bwd.clone());
            if extend_map(&mut f, &mut g, a, c) && extend_map(&mut f, &mut g, b, d) {
                used[j] = true;
                if wires_match(rest, ys, used, &f, &g) {
                    return true;
                }
                used[j] = false;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::match_pattern;
    use crate::{corpus, iso, parse_binet, rho_rules};

    #[test]
    fn brute_collect_on_table_binets() {
        let rs = rho_rules();
        let second = brute_collect(&parse_binet(corpus::SECOND).unwrap(), &rs);
        let names: Vec<&str> = second.iter().map(|l| l.as_str()).collect();
        assert_eq!(names, ["a", "e", "f"]);
        assert_eq!(
            brute_collect(&parse_binet(corpus::FIRST).unwrap(), &rs).len(),
            2
        );
    }

    #[test]
    fn brute_match_agrees_on_second_binet() {
        let rs = rho_rules();
        let net = parse_binet(corpus::SECOND).unwrap();
        for (i, r) in rs.rules.iter().enumerate() {
            let fast: BTreeSet<FlatMatch> = match_pattern(i, r, &net.index())
                .iter()
                .map(FlatMatch::from)
                .collect();
            assert_eq!(fast, brute_match(r, &net), "{}", r.id);
        }
    }

    #[test]
    fn brute_iso_cases() {
        let a = parse_binet("A^x(y), B^y( | | C^z()), D^z()\nsig B(0, 0)").unwrap();
        let b = parse_binet("D^q(), B^p( | | C^q()), A^r(p)\nsig B(0, 0)").unwrap();
        let c = parse_binet("D^q(), B^p(), C^q(), A^r(p)").unwrap();
        assert!(brute_iso(&a, &b));
        assert!(!brute_iso(&a, &c));
        assert_eq!(iso(&a, &c), brute_iso(&a, &c));
        let w1 = parse_binet("H^a(), a1 - b").unwrap();
        let w2 = parse_binet("H^c(), d - c1").unwrap();
        assert!(brute_iso(&w1, &w2));
    }
}
