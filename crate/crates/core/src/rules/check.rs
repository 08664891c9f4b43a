//! Static checks on rules: interface preservation, well-bound
//! metavariables, and at most one active rule per pair key.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{
    AgentPattern, ChildrenPattern, GeneratorKind, PairKey, PortSlot, Rule, RuleKind, RuleSet,
    SymbolPattern, TemplateItem,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleViolation {
    InterfaceViolation {
        rule: String,
        detail: String,
    },
    UnboundVariable {
        rule: String,
        var: String,
    },
    MetavariableConflict {
        rule: String,
        var: String,
        detail: String,
    },
    MalformedPattern {
        rule: String,
        detail: String,
    },
    DuplicatePairRule {
        key: PairKey,
        rules: Vec<String>,
    },
    DuplicateRuleId(String),
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleViolation::InterfaceViolation { rule, detail } => {
                write!(f, "rule `{rule}` does not preserve its interface: {detail}")
            }
            RuleViolation::UnboundVariable { rule, var } => {
                write!(
                    f,
                    "rule `{rule}`: `{var}` is used on the right but never bound"
                )
            }
            RuleViolation::MetavariableConflict { rule, var, detail } => {
                write!(f, "rule `{rule}`: metavariable `{var}` {detail}")
            }
            RuleViolation::MalformedPattern { rule, detail } => {
                write!(f, "rule `{rule}`: {detail}")
            }
            RuleViolation::DuplicatePairRule { key, rules } => {
                write!(
                    f,
                    "more than one active rule for {key}: {}",
                    rules.join(", ")
                )
            }
            RuleViolation::DuplicateRuleId(id) => write!(f, "rule id `{id}` used twice"),
        }
    }
}

/// Violations of a rule set. Empty means the set is usable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleReport {
    pub violations: Vec<RuleViolation>,
}

impl RuleReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for RuleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Label,
    Vector,
    Subnet,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Label => "label",
            Kind::Vector => "label vector",
            Kind::Subnet => "subnet",
        })
    }
}

#[derive(Default)]
struct Lhs {
    kinds: BTreeMap<String, Kind>,
    labels: BTreeMap<String, usize>,
    vectors: BTreeMap<String, usize>,
    subnets: BTreeMap<String, usize>,
    symbols: BTreeSet<String>,
}

#[derive(Default)]
struct Rhs {
    labels: BTreeMap<String, usize>,
    vectors: BTreeMap<String, usize>,
    splices: BTreeMap<String, usize>,
    generators: BTreeMap<String, Vec<GeneratorKind>>,
    symbols: BTreeSet<String>,
}

struct Checker<'a> {
    rule: &'a Rule,
    out: Vec<RuleViolation>,
}

impl Checker<'_> {
    fn id(&self) -> String {
        self.rule.id.clone()
    }

    fn kind(&mut self, kinds: &mut BTreeMap<String, Kind>, name: &str, kind: Kind) {
        match kinds.get(name) {
            Some(&k) if k != kind => self.out.push(RuleViolation::MetavariableConflict {
                rule: self.id(),
                var: name.to_string(),
                detail: format!("is used both as a {k} and as a {kind}"),
            }),
            Some(_) => {}
            None => {
                kinds.insert(name.to_string(), kind);
            }
        }
    }

    fn lhs_slot(&mut self, lhs: &mut Lhs, slot: &PortSlot) {
        match slot {
            PortSlot::Labels(vs) => {
                for v in vs {
                    self.kind(&mut lhs.kinds, v, Kind::Label);
                    *lhs.labels.entry(v.clone()).or_default() += 1;
                }
            }
            PortSlot::Vector(v) => {
                self.kind(&mut lhs.kinds, v, Kind::Vector);
                *lhs.vectors.entry(v.clone()).or_default() += 1;
            }
        }
    }

    fn lhs_agent(&mut self, lhs: &mut Lhs, p: &AgentPattern) {
        if let Some(v) = p.symbol.var() {
            lhs.symbols.insert(v.to_string());
        }
        self.kind(&mut lhs.kinds, &p.principal, Kind::Label);
        *lhs.labels.entry(p.principal.clone()).or_default() += 1;
        self.lhs_slot(lhs, &p.external);
        self.lhs_slot(lhs, &p.internal);
        match &p.children {
            ChildrenPattern::Empty => {}
            ChildrenPattern::Subnet(x) => {
                self.kind(&mut lhs.kinds, x, Kind::Subnet);
                *lhs.subnets.entry(x.clone()).or_default() += 1;
            }
            ChildrenPattern::Agents(cs) => cs.iter().for_each(|c| self.lhs_agent(lhs, c)),
        }
    }

    fn rhs_symbol(&mut self, rhs: &mut Rhs, p: &SymbolPattern) {
        if let Some(v) = p.var() {
            rhs.symbols.insert(v.to_string());
        }
    }

    /// Walks template items. `body` is set while inside a generator body,
    /// where label counts go to a separate map.
    fn rhs_items(
        &mut self,
        rhs: &mut Rhs,
        items: &[TemplateItem],
        body: &mut Option<BTreeMap<String, usize>>,
    ) {
        for item in items {
            match item {
                TemplateItem::Agent(a) => {
                    self.rhs_symbol(rhs, &a.symbol);
                    let in_body = body.is_some();
                    let labels = match body {
                        Some(b) => b,
                        None => &mut rhs.labels,
                    };
                    *labels.entry(a.principal.clone()).or_default() += 1;
                    for slot in [&a.external, &a.internal] {
                        match slot {
                            PortSlot::Labels(vs) => {
                                for v in vs {
                                    *labels.entry(v.clone()).or_default() += 1;
                                }
                            }
                            // a vector repeated per iteration can never be used exactly once
                            PortSlot::Vector(v) => {
                                *rhs.vectors.entry(v.clone()).or_default() +=
                                    if in_body { 2 } else { 1 };
                            }
                        }
                    }
                    self.rhs_items(rhs, &a.children, body);
                }
                TemplateItem::Wire(x, y) => {
                    let labels = match body {
                        Some(b) => b,
                        None => &mut rhs.labels,
                    };
                    *labels.entry(x.clone()).or_default() += 1;
                    *labels.entry(y.clone()).or_default() += 1;
                }
                TemplateItem::Splice(x) => {
                    let n = if body.is_some() { 2 } else { 1 };
                    *rhs.splices.entry(x.clone()).or_default() += n;
                }
                TemplateItem::Foreach(g) => {
                    if body.is_some() {
                        self.out.push(RuleViolation::MalformedPattern {
                            rule: self.id(),
                            detail: "generators cannot be nested".into(),
                        });
                        continue;
                    }
                    rhs.generators
                        .entry(g.subnet.clone())
                        .or_default()
                        .push(g.kind);
                    let mut inner = Some(BTreeMap::new());
                    self.rhs_items(rhs, &g.body, &mut inner);
                    let counts = inner.unwrap();
                    self.check_body(g.kind, &g.var, &counts);
                }
            }
        }
    }

    fn check_body(&mut self, kind: GeneratorKind, var: &str, counts: &BTreeMap<String, usize>) {
        let bar = format!("{var}'");
        for (name, &n) in counts {
            let expected = if name == var {
                Some(1)
            } else if name == &bar {
                match kind {
                    GeneratorKind::Interface => Some(1),
                    GeneratorKind::Unique => None,
                }
            } else {
                Some(2)
            };
            match expected {
                Some(e) if e == n => {}
                Some(1) => self.out.push(RuleViolation::InterfaceViolation {
                    rule: self.id(),
                    detail: format!("generator variable `{name}` must occur exactly once per iteration, found {n}"),
                }),
                Some(_) if n == 1 => self.out.push(RuleViolation::UnboundVariable {
                    rule: self.id(),
                    var: name.clone(),
                }),
                _ => self.out.push(RuleViolation::InterfaceViolation {
                    rule: self.id(),
                    detail: format!("`{name}` occurs {n} times in a generator body"),
                }),
            }
        }
        if counts.get(var).is_none() {
            self.out.push(RuleViolation::InterfaceViolation {
                rule: self.id(),
                detail: format!("generator variable `{var}` is never used"),
            });
        }
        if kind == GeneratorKind::Interface && counts.get(&bar).is_none() {
            self.out.push(RuleViolation::InterfaceViolation {
                rule: self.id(),
                detail: format!("interface generator never uses `{bar}`"),
            });
        }
    }

    fn run(mut self) -> Vec<RuleViolation> {
        let rule = self.rule;
        let mut lhs = Lhs::default();
        for p in &rule.pattern.agents {
            self.lhs_agent(&mut lhs, p);
        }
        match rule.pattern.kind {
            RuleKind::Active => match rule.pattern.agents.as_slice() {
                [p, q] if p.principal == q.principal && lhs.labels[&p.principal] == 2 => {}
                [_, _] => self.out.push(RuleViolation::MalformedPattern {
                    rule: self.id(),
                    detail:
                        "an active pattern's two agents must share exactly their principal label"
                            .into(),
                }),
                _ => self.out.push(RuleViolation::MalformedPattern {
                    rule: self.id(),
                    detail: "an active pattern has exactly two agents".into(),
                }),
            },
            RuleKind::Inactive => {
                if rule.pattern.agents.is_empty() {
                    self.out.push(RuleViolation::MalformedPattern {
                        rule: self.id(),
                        detail: "an inactive pattern needs at least one agent".into(),
                    });
                }
            }
        }
        for (name, &n) in &lhs.labels {
            if n > 2 {
                self.out.push(RuleViolation::MetavariableConflict {
                    rule: self.id(),
                    var: name.clone(),
                    detail: format!("occurs {n} times on the left (a label occurs at most twice)"),
                });
            }
        }
        for (name, &n) in lhs.vectors.iter().chain(&lhs.subnets) {
            if n > 1 {
                self.out.push(RuleViolation::MetavariableConflict {
                    rule: self.id(),
                    var: name.clone(),
                    detail: format!("binds {n} times on the left"),
                });
            }
        }

        let mut rhs = Rhs::default();
        self.rhs_items(&mut rhs, &rule.template.items, &mut None);

        for s in &rhs.symbols {
            if !lhs.symbols.contains(s) {
                self.out.push(RuleViolation::UnboundVariable {
                    rule: self.id(),
                    var: format!("?{s}"),
                });
            }
        }
        for (name, &n) in &lhs.labels {
            let m = rhs.labels.get(name).copied().unwrap_or(0);
            let ok = match n {
                1 => m == 1,
                _ => m == 0 || m == 2,
            };
            if !ok {
                self.out.push(RuleViolation::InterfaceViolation {
                    rule: self.id(),
                    detail: if n == 1 {
                        format!("free port `{name}` occurs {m} times on the right, expected once")
                    } else {
                        format!("consumed label `{name}` occurs {m} times on the right")
                    },
                });
            }
        }
        for (name, &m) in &rhs.labels {
            if lhs.labels.contains_key(name) {
                continue;
            }
            if lhs.kinds.contains_key(name) {
                self.out.push(RuleViolation::MetavariableConflict {
                    rule: self.id(),
                    var: name.clone(),
                    detail: "is bound on the left with another kind".into(),
                });
            } else if m == 1 {
                self.out.push(RuleViolation::UnboundVariable {
                    rule: self.id(),
                    var: name.clone(),
                });
            } else if m != 2 {
                self.out.push(RuleViolation::InterfaceViolation {
                    rule: self.id(),
                    detail: format!("intermediary label `{name}` occurs {m} times, expected twice"),
                });
            }
        }
        for (name, &m) in &rhs.vectors {
            if !lhs.vectors.contains_key(name) {
                self.out.push(RuleViolation::UnboundVariable {
                    rule: self.id(),
                    var: name.clone(),
                });
            } else if m != 1 {
                self.out.push(RuleViolation::InterfaceViolation {
                    rule: self.id(),
                    detail: format!("label vector `{name}` used {m} times on the right"),
                });
            }
        }
        for name in lhs.vectors.keys() {
            if !rhs.vectors.contains_key(name) {
                self.out.push(RuleViolation::InterfaceViolation {
                    rule: self.id(),
                    detail: format!("label vector `{name}` is dropped"),
                });
            }
        }
        let subnet_names: BTreeSet<&String> =
            rhs.splices.keys().chain(rhs.generators.keys()).collect();
        for name in subnet_names {
            if !lhs.subnets.contains_key(name) {
                self.out.push(RuleViolation::UnboundVariable {
                    rule: self.id(),
                    var: name.clone(),
                });
            }
        }
        for name in lhs.subnets.keys() {
            let splices = rhs.splices.get(name).copied().unwrap_or(0);
            let gens = rhs.generators.get(name).cloned().unwrap_or_default();
            let ok = matches!(
                (splices, gens.as_slice()),
                (1, []) | (0, [GeneratorKind::Unique]) | (1, [GeneratorKind::Interface])
            );
            if !ok {
                self.out.push(RuleViolation::InterfaceViolation {
                    rule: self.id(),
                    detail: format!(
                        "subnet `{name}` must be kept once, removed under `unique-in L({name})`, \
                         or kept once under `in I({name})` (found {splices} splices, {} generators)",
                        gens.len()
                    ),
                });
            }
        }
        self.out
    }
}

/// Checks a single rule in isolation.
pub fn check_rule(rule: &Rule) -> Vec<RuleViolation> {
    Checker {
        rule,
        out: Vec::new(),
    }
    .run()
}

/// Checks every rule and the one-rule-per-pair discipline.
pub fn check_ruleset(rs: &RuleSet) -> RuleReport {
    let mut violations = Vec::new();
    let mut ids = BTreeSet::new();
    for r in &rs.rules {
        if !ids.insert(&r.id) {
            violations.push(RuleViolation::DuplicateRuleId(r.id.clone()));
        }
        violations.extend(check_rule(r));
    }
    for (key, rules) in rs.pair_index() {
        if rules.len() > 1 {
            violations.push(RuleViolation::DuplicatePairRule {
                key,
                rules: rules.iter().map(|&i| rs.rules[i].id.clone()).collect(),
            });
        }
    }
    RuleReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse_rules, rho_rules};

    fn rules(src: &str) -> RuleSet {
        parse_rules(src).unwrap()
    }

    #[test]
    fn bundled_libraries_are_clean() {
        assert!(check_ruleset(&rho_rules()).is_valid());
        assert!(check_ruleset(&crate::rho_rules_naive()).is_valid());
        assert!(check_ruleset(&crate::rho::nat_rules()).is_valid());
    }

    #[test]
    fn generic_rule_preserves_interface() {
        let rs = rules("m: M^a(b || X), ?alpha^a(Y) => ?alpha_M^b(Y || X)");
        assert!(check_rule(&rs.rules[0]).is_empty());
    }

    #[test]
    fn duplicate_pair_rule() {
        let mut rs = rules("one: eps^a(), eps^a() =>");
        rs.rules.extend(rules("two: eps^b(), eps^b() =>").rules);
        let report = check_ruleset(&rs);
        assert!(matches!(
            report.violations.as_slice(),
            [RuleViolation::DuplicatePairRule { rules, .. }] if rules == &["one", "two"]
        ));
    }

    #[test]
    fn reversed_pair_is_the_same_pair() {
        let mut rs = rules("one: A^a(), B^a() =>");
        rs.rules.extend(rules("two: B^a(), A^a() =>").rules);
        assert_eq!(check_ruleset(&rs).violations.len(), 1);
    }

    #[test]
    fn wildcards_do_not_clash_with_concrete_pairs() {
        let rs = rules(
            "same: ?alpha^a(), ?alpha^a() =>\nclash: ?alpha^a(), ?beta^a() => Fail^z(z)\nee: eps^a(), eps^a() =>",
        );
        assert!(check_ruleset(&rs).is_valid(), "{:?}", check_ruleset(&rs));
    }

    #[test]
    fn duplicate_ids() {
        let mut rs = rules("r: A^a(), B^a() =>");
        rs.rules.extend(rules("r: C^a(), D^a() =>").rules);
        assert_eq!(
            check_ruleset(&rs).violations,
            vec![RuleViolation::DuplicateRuleId("r".into())]
        );
    }

    #[test]
    fn nonlinear_lhs_is_rejected() {
        let rs = rules("bad: A^a(x), B^a(y) => x - y");
        let mut bad = rs.rules[0].clone();
        if let PortSlot::Labels(v) = &mut bad.pattern.agents[1].external {
            v[0] = "x".into();
        }
        assert!(!check_rule(&bad).is_empty());
    }

    #[test]
    fn dropped_port_violates_interface() {
        let rs = rules("ok: A^a(x, y), B^a() => x - y");
        let mut bad = rs.rules[0].clone();
        bad.template.items.clear();
        assert!(check_rule(&bad)
            .iter()
            .any(|v| matches!(v, RuleViolation::InterfaceViolation { .. })));
    }
}
