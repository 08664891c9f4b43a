//! Rules: left-hand patterns with metavariables, right-hand templates with
//! generator clauses, matching and instantiation.
//!
//! Metavariables come in four kinds:
//!
//! * label variables (`a`, `b`) bind a single port label,
//! * vector variables (`Y`) bind a whole port list,
//! * subnet variables (`X`) bind the entire children list of their host,
//! * symbol variables (`?alpha`) bind an agent symbol. `?alpha_M` binds
//!   `alpha` against symbols ending in `_M` on the left and builds the
//!   derived symbol on the right.
//!
//! A label name used on the right-hand side but bound nowhere is an
//! intermediary label: it must occur exactly twice and is replaced by a fresh
//! label at instantiation.

mod check;
mod fresh;
mod instantiate;
mod matching;

use std::collections::BTreeMap;
use std::fmt;

use crate::net::{Signature, Symbol};

pub use check::{check_rule, check_ruleset, RuleReport, RuleViolation};
pub use fresh::{AllocatorExhausted, FreshLabels, LabelAllocator};
pub use instantiate::{apply_deltas, instantiate, Delta, RewriteError};
pub use matching::{match_pair, match_pattern, Bindings, Match, SubnetBinding};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymbolPattern {
    Concrete(Symbol),
    Var(String),
    /// `?base_suffix`
    Derived {
        var: String,
        suffix: String,
    },
}

impl SymbolPattern {
    /// 2 for a concrete symbol, 1 for a derived pattern, 0 for a bare variable.
    pub fn specificity(&self) -> u8 {
        match self {
            SymbolPattern::Concrete(_) => 2,
            SymbolPattern::Derived { .. } => 1,
            SymbolPattern::Var(_) => 0,
        }
    }

    pub fn var(&self) -> Option<&str> {
        match self {
            SymbolPattern::Concrete(_) => None,
            SymbolPattern::Var(v) | SymbolPattern::Derived { var: v, .. } => Some(v),
        }
    }
}

impl fmt::Display for SymbolPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolPattern::Concrete(s) => write!(f, "{s}"),
            SymbolPattern::Var(v) => write!(f, "?{v}"),
            SymbolPattern::Derived { var, suffix } => write!(f, "?{var}_{suffix}"),
        }
    }
}

/// An external or internal port slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PortSlot {
    Labels(Vec<String>),
    Vector(String),
}

impl PortSlot {
    pub fn empty() -> Self {
        PortSlot::Labels(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PortSlot::Labels(v) if v.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ChildrenPattern {
    /// The agent must have no children.
    Empty,
    /// Binds the whole children list.
    Subnet(String),
    /// Exactly these children, in any order.
    Agents(Vec<AgentPattern>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AgentPattern {
    pub symbol: SymbolPattern,
    pub principal: String,
    pub external: PortSlot,
    pub internal: PortSlot,
    pub children: ChildrenPattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Two agents connected through their principal ports.
    Active,
    /// A configuration rewritten without an active pair.
    Inactive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub kind: RuleKind,
    pub agents: Vec<AgentPattern>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// `foreach x in I(X)`: each interface port of X, with a fresh `x'`
    /// replacing `x` inside the spliced copy of X.
    Interface,
    /// `foreach x unique-in L(X)`: each label occurring once in X.
    Unique,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub var: String,
    pub subnet: String,
    pub body: Vec<TemplateItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentTemplate {
    pub symbol: SymbolPattern,
    pub principal: String,
    pub external: PortSlot,
    pub internal: PortSlot,
    pub children: Vec<TemplateItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemplateItem {
    Agent(AgentTemplate),
    Wire(String, String),
    Splice(String),
    Foreach(Generator),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Template {
    pub items: Vec<TemplateItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub pattern: Pattern,
    pub template: Template,
    pub priority: Option<i64>,
}

impl Rule {
    pub fn kind(&self) -> RuleKind {
        self.pattern.kind
    }

    /// True when some subnet variable does not stay put: it is dropped,
    /// duplicated, spliced at the top level, renamed by a generator, or its
    /// host changes symbol or principal port.
    pub fn moves_subnet(&self) -> bool {
        let mut hosts: BTreeMap<&str, (&SymbolPattern, &str)> = BTreeMap::new();
        fn lhs<'a>(
            p: &'a AgentPattern,
            hosts: &mut BTreeMap<&'a str, (&'a SymbolPattern, &'a str)>,
        ) {
            match &p.children {
                ChildrenPattern::Subnet(x) => {
                    hosts.insert(x, (&p.symbol, &p.principal));
                }
                ChildrenPattern::Agents(cs) => cs.iter().for_each(|c| lhs(c, hosts)),
                ChildrenPattern::Empty => {}
            }
        }
        self.pattern.agents.iter().for_each(|p| lhs(p, &mut hosts));
        if hosts.is_empty() {
            return false;
        }
        let mut splices: BTreeMap<&str, Vec<Option<(&SymbolPattern, &str)>>> = BTreeMap::new();
        let mut generated = false;
        fn rhs<'a>(
            items: &'a [TemplateItem],
            host: Option<(&'a SymbolPattern, &'a str)>,
            splices: &mut BTreeMap<&'a str, Vec<Option<(&'a SymbolPattern, &'a str)>>>,
            generated: &mut bool,
        ) {
            for item in items {
                match item {
                    TemplateItem::Splice(x) => splices.entry(x).or_default().push(host),
                    TemplateItem::Agent(a) => rhs(
                        &a.children,
                        Some((&a.symbol, &a.principal)),
                        splices,
                        generated,
                    ),
                    TemplateItem::Foreach(g) => {
                        *generated = true;
                        rhs(&g.body, host, splices, generated);
                    }
                    TemplateItem::Wire(..) => {}
                }
            }
        }
        rhs(&self.template.items, None, &mut splices, &mut generated);
        if generated {
            return true;
        }
        hosts
            .iter()
            .any(|(x, host)| match splices.get(x).map(Vec::as_slice) {
                Some([Some(h)]) => h != host,
                _ => true,
            })
    }
}

/// Key under which at most one active rule may be registered.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairKey {
    Pair(SideKey, SideKey),
    /// Both sides use the same symbol variable.
    Same(SideKey),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SideKey {
    Concrete(Symbol),
    Derived(String),
    Any,
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(s: &SideKey) -> String {
            match s {
                SideKey::Concrete(c) => c.to_string(),
                SideKey::Derived(suffix) => format!("?_{suffix}"),
                SideKey::Any => "?".to_string(),
            }
        }
        match self {
            PairKey::Pair(a, b) => write!(f, "({}, {})", side(a), side(b)),
            PairKey::Same(a) => write!(f, "({0}, {0}) same symbol", side(a)),
        }
    }
}

fn side_key(p: &SymbolPattern) -> SideKey {
    match p {
        SymbolPattern::Concrete(s) => SideKey::Concrete(s.clone()),
        SymbolPattern::Derived { suffix, .. } => SideKey::Derived(suffix.clone()),
        SymbolPattern::Var(_) => SideKey::Any,
    }
}

impl Pattern {
    /// The pair key of an active pattern with two agents.
    pub fn pair_key(&self) -> Option<PairKey> {
        if self.kind != RuleKind::Active || self.agents.len() != 2 {
            return None;
        }
        let (a, b) = (&self.agents[0].symbol, &self.agents[1].symbol);
        let (ka, kb) = (side_key(a), side_key(b));
        match (a.var(), b.var()) {
            (Some(x), Some(y)) if x == y && ka == kb => Some(PairKey::Same(ka)),
            _ => {
                let (lo, hi) = if ka <= kb { (ka, kb) } else { (kb, ka) };
                Some(PairKey::Pair(lo, hi))
            }
        }
    }

    /// Ordering weight for choosing among several applicable active rules.
    pub fn specificity(&self) -> (u8, u8) {
        let sum = self.agents.iter().map(|a| a.symbol.specificity()).sum();
        let same = match self.pair_key() {
            Some(PairKey::Same(_)) => 1,
            _ => 0,
        };
        (sum, same)
    }
}

/// An ordered collection of rules plus any declared signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub signature: Signature,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Self {
        RuleSet {
            rules,
            signature: Signature::new(),
        }
    }

    pub fn active(&self) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind() == RuleKind::Active)
    }

    pub fn inactive(&self) -> impl Iterator<Item = (usize, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind() == RuleKind::Inactive)
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    /// Active rules grouped by pair key, in rule order.
    pub fn pair_index(&self) -> BTreeMap<PairKey, Vec<usize>> {
        let mut idx: BTreeMap<PairKey, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.active() {
            if let Some(k) = r.pattern.pair_key() {
                idx.entry(k).or_default().push(i);
            }
        }
        idx
    }

    /// Concatenates two rule sets. Ids from `other` that clash get a suffix.
    pub fn extend(&mut self, other: RuleSet) -> Result<(), crate::net::ArityConflict> {
        self.signature.merge(&other.signature)?;
        for mut r in other.rules {
            while self.get(&r.id).is_some() {
                r.id.push('\'');
            }
            self.rules.push(r);
        }
        Ok(())
    }

    /// Replaces the rule with the same id, or appends.
    pub fn replace(&mut self, rule: Rule) {
        match self.rules.iter_mut().find(|r| r.id == rule.id) {
            Some(slot) => *slot = rule,
            None => self.rules.push(rule),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::{parse_rules, rho_rules};

    #[test]
    fn moving_rules() {
        let rs = rho_rules();
        let moves = |id: &str| rs.get(id).unwrap().moves_subnet();
        assert!(moves("match"));
        assert!(moves("beta"));
        assert!(moves("eps_m"));
        assert!(!moves("done"));
        assert!(!moves("same"));
        assert!(!moves("eps_const"));
        let naive = crate::rho_rules_naive();
        assert!(naive.get("eps_m").unwrap().moves_subnet());
    }

    #[test]
    fn staying_subnet_does_not_move() {
        let rs = parse_rules("keep: K^a(c || X), T^c() =>inactive K^a(c || X), U^c()").unwrap();
        assert!(!rs.rules[0].moves_subnet());
        let rs = parse_rules("swap: K^a(b || X), E^a() => L^b( || X)").unwrap();
        assert!(rs.rules[0].moves_subnet());
    }

    #[test]
    fn specificity_orders_rules() {
        let rs = rho_rules();
        let spec = |id: &str| rs.get(id).unwrap().pattern.specificity();
        assert!(spec("eps_eps") > spec("eps_moved"));
        assert!(spec("eps_moved") > spec("eps_const"));
        assert!(spec("same") > spec("clash"));
    }
}
