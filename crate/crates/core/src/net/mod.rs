//! Agents, wires and binets.
//!
//! A [`Binet`] is a set of top-level [`Agent`]s plus explicit [`Wire`]s. Each
//! agent owns its nested children, so the place graph is the ownership tree
//! and the link graph is induced by shared [`Label`]s. A label occurs at most
//! twice in a valid binet; the labels occurring exactly once form the net
//! interface.

mod index;
mod iso;
mod views;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use index::{AgentId, IndexedAgent, NetIndex};
pub use iso::{iso, iso_witness};
pub use views::{LinkView, PlaceForest, PlaceNode, PortPosition, PortRef};

/// Prefix reserved for labels minted by the engine.
pub const RESERVED_PREFIX: char = '%';

/// A port label. Case-sensitive identifier token.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True for labels in the engine's fresh namespace.
    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

/// An agent name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Self {
        Symbol(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol(s.to_string())
    }
}

/// Number of ports in the internal and external interface of a symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arity {
    pub internal: usize,
    pub external: usize,
}

impl Arity {
    pub const fn new(internal: usize, external: usize) -> Self {
        Arity { internal, external }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.internal, self.external)
    }
}

/// A declared symbol together with its arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentSymbol {
    pub name: Symbol,
    pub arity: Arity,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("symbol {symbol} declared with arity {existing}, used with {requested}")]
pub struct ArityConflict {
    pub symbol: Symbol,
    pub existing: Arity,
    pub requested: Arity,
}

/// The symbols a binet may use, each with a fixed arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<Symbol, Arity>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, symbol: &Symbol) -> Option<Arity> {
        self.symbols.get(symbol).copied()
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.symbols.contains_key(symbol)
    }

    /// Declares `symbol`, or checks the arity against an earlier declaration.
    pub fn declare(&mut self, symbol: Symbol, arity: Arity) -> Result<(), ArityConflict> {
        match self.symbols.get(&symbol) {
            Some(&existing) if existing != arity => Err(ArityConflict {
                symbol,
                existing,
                requested: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert(symbol, arity);
                Ok(())
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = AgentSymbol> + '_ {
        self.symbols.iter().map(|(name, &arity)| AgentSymbol {
            name: name.clone(),
            arity,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Adds every declaration of `other`, failing on the first conflict.
    pub fn merge(&mut self, other: &Signature) -> Result<(), ArityConflict> {
        for s in other.iter() {
            self.declare(s.name, s.arity)?;
        }
        Ok(())
    }
}

/// `A^l<E | I | N>`: symbol, principal port, external and internal
/// interfaces (order significant), and nested children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent {
    pub symbol: Symbol,
    pub principal: Label,
    pub external: Vec<Label>,
    pub internal: Vec<Label>,
    pub children: Vec<Agent>,
}

impl Agent {
    pub fn new(symbol: impl Into<Symbol>, principal: impl Into<Label>) -> Self {
        Agent {
            symbol: symbol.into(),
            principal: principal.into(),
            external: Vec::new(),
            internal: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_external<L: Into<Label>>(mut self, labels: impl IntoIterator<Item = L>) -> Self {
        self.external = labels.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_internal<L: Into<Label>>(mut self, labels: impl IntoIterator<Item = L>) -> Self {
        self.internal = labels.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_children(mut self, children: impl IntoIterator<Item = Agent>) -> Self {
        self.children = children.into_iter().collect();
        self
    }

    pub fn arity(&self) -> Arity {
        Arity::new(self.internal.len(), self.external.len())
    }

    /// Principal, then external, then internal labels of this agent only.
    pub fn ports(&self) -> impl Iterator<Item = &Label> {
        std::iter::once(&self.principal)
            .chain(self.external.iter())
            .chain(self.internal.iter())
    }

    pub(crate) fn ports_mut(&mut self) -> impl Iterator<Item = &mut Label> {
        std::iter::once(&mut self.principal)
            .chain(self.external.iter_mut())
            .chain(self.internal.iter_mut())
    }

    /// Number of agents in this subtree, including `self`.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Agent::size).sum::<usize>()
    }

    /// Applies `f` to every label in this subtree.
    pub fn relabel(&mut self, f: &mut impl FnMut(&mut Label)) {
        for l in self.ports_mut() {
            f(l);
        }
        for c in &mut self.children {
            c.relabel(f);
        }
    }

    fn count_labels<'a>(&'a self, counts: &mut BTreeMap<&'a Label, usize>) {
        for l in self.ports() {
            *counts.entry(l).or_default() += 1;
        }
        for c in &self.children {
            c.count_labels(counts);
        }
    }
}

/// An explicit connection `a-b` between two ports.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wire(pub Label, pub Label);

impl Wire {
    pub fn new(a: impl Into<Label>, b: impl Into<Label>) -> Self {
        Wire(a.into(), b.into())
    }
}

/// Where in a binet something lives.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    /// Sibling indices from the top level down.
    Agent(Vec<usize>),
    Wire(usize),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Agent(path) => {
                f.write_str("agent ")?;
                for (i, p) in path.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Site::Wire(i) => write!(f, "wire {i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    LabelOveruse {
        label: Label,
        count: usize,
        sites: Vec<Site>,
    },
    ArityMismatch {
        site: Site,
        symbol: Symbol,
        declared: Arity,
        found: Arity,
    },
    UndeclaredSymbol {
        site: Site,
        symbol: Symbol,
    },
    DegenerateWire {
        site: Site,
        label: Label,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LabelOveruse {
                label,
                count,
                sites,
            } => {
                write!(
                    f,
                    "label `{label}` occurs {count} times (at most 2 allowed):"
                )?;
                for s in sites {
                    write!(f, " {s};")?;
                }
                Ok(())
            }
            Violation::ArityMismatch {
                site,
                symbol,
                declared,
                found,
            } => write!(
                f,
                "{site}: symbol `{symbol}` has arity {declared}, agent uses {found}"
            ),
            Violation::UndeclaredSymbol { site, symbol } => {
                write!(f, "{site}: symbol `{symbol}` is not in the signature")
            }
            Violation::DegenerateWire { site, label } => {
                write!(f, "{site}: wire joins `{label}` to itself")
            }
        }
    }
}

/// Result of [`Binet::validate`]. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid binet:\n{0}")]
pub struct InvalidBinet(pub ValidationReport);

/// A set of agents and wires over a signature.
///
/// Sibling order carries no meaning; [`iso`] compares binets up to sibling
/// reordering and label renaming.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binet {
    pub agents: Vec<Agent>,
    pub wires: Vec<Wire>,
    pub signature: Signature,
}

impl Binet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a binet whose signature is inferred from the agents it contains.
    pub fn from_parts(agents: Vec<Agent>, wires: Vec<Wire>) -> Result<Self, ArityConflict> {
        let mut signature = Signature::new();
        fn declare(sig: &mut Signature, a: &Agent) -> Result<(), ArityConflict> {
            sig.declare(a.symbol.clone(), a.arity())?;
            a.children.iter().try_for_each(|c| declare(sig, c))
        }
        for a in &agents {
            declare(&mut signature, a)?;
        }
        Ok(Binet {
            agents,
            wires,
            signature,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty() && self.wires.is_empty()
    }

    /// Total number of agents at every depth.
    pub fn agent_count(&self) -> usize {
        self.agents.iter().map(Agent::size).sum()
    }

    /// Visits agents in preorder with their paths.
    pub fn walk<'a>(&'a self, mut f: impl FnMut(&[usize], &'a Agent)) {
        fn go<'a>(
            agents: &'a [Agent],
            path: &mut Vec<usize>,
            f: &mut impl FnMut(&[usize], &'a Agent),
        ) {
            for (i, a) in agents.iter().enumerate() {
                path.push(i);
                f(path, a);
                go(&a.children, path, f);
                path.pop();
            }
        }
        go(&self.agents, &mut Vec::new(), &mut f);
    }

    /// Occurrence count of every label, across all port positions at every
    /// depth and both ends of every wire.
    pub fn occurrences(&self) -> BTreeMap<&Label, usize> {
        let mut counts = BTreeMap::new();
        for a in &self.agents {
            a.count_labels(&mut counts);
        }
        for Wire(a, b) in &self.wires {
            *counts.entry(a).or_default() += 1;
            *counts.entry(b).or_default() += 1;
        }
        counts
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.occurrences().into_keys().cloned().collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut sites: BTreeMap<&Label, Vec<Site>> = BTreeMap::new();
        self.walk(|path, a| {
            let site = Site::Agent(path.to_vec());
            match self.signature.get(&a.symbol) {
                None => violations.push(Violation::UndeclaredSymbol {
                    site: site.clone(),
                    symbol: a.symbol.clone(),
                }),
                Some(declared) if declared != a.arity() => {
                    violations.push(Violation::ArityMismatch {
                        site: site.clone(),
                        symbol: a.symbol.clone(),
                        declared,
                        found: a.arity(),
                    })
                }
                Some(_) => {}
            }
            for l in a.ports() {
                sites.entry(l).or_default().push(site.clone());
            }
        });
        for (i, Wire(a, b)) in self.wires.iter().enumerate() {
            if a == b {
                violations.push(Violation::DegenerateWire {
                    site: Site::Wire(i),
                    label: a.clone(),
                });
            }
            sites.entry(a).or_default().push(Site::Wire(i));
            sites.entry(b).or_default().push(Site::Wire(i));
        }
        for (label, sites) in sites {
            if sites.len() > 2 {
                violations.push(Violation::LabelOveruse {
                    label: label.clone(),
                    count: sites.len(),
                    sites,
                });
            }
        }
        ValidationReport { violations }
    }

    /// Labels occurring exactly once, without validating first.
    pub fn free_labels(&self) -> BTreeSet<Label> {
        self.occurrences()
            .into_iter()
            .filter(|&(_, n)| n == 1)
            .map(|(l, _)| l.clone())
            .collect()
    }

    /// The net interface: labels occurring exactly once.
    pub fn interface(&self) -> Result<BTreeSet<Label>, InvalidBinet> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(InvalidBinet(report));
        }
        Ok(self.free_labels())
    }

    pub fn index(&self) -> NetIndex<'_> {
        NetIndex::new(self)
    }

    pub fn agent_at(&self, path: &[usize]) -> Option<&Agent> {
        let (first, rest) = path.split_first()?;
        let mut a = self.agents.get(*first)?;
        for &i in rest {
            a = a.children.get(i)?;
        }
        Some(a)
    }

    /// Applies `f` to every label of every agent and wire.
    pub fn relabel(&mut self, mut f: impl FnMut(&mut Label)) {
        for a in &mut self.agents {
            a.relabel(&mut f);
        }
        for Wire(a, b) in &mut self.wires {
            f(a);
            f(b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nullary(sym: &str, l: &str) -> Agent {
        Agent::new(sym, l)
    }

    #[test]
    fn empty_binet_is_valid_with_empty_interface() {
        let b = Binet::new();
        assert!(b.validate().is_valid());
        assert!(b.interface().unwrap().is_empty());
    }

    #[test]
    fn three_occurrences_is_overuse() {
        let b = Binet::from_parts(
            vec![nullary("eps", "a"), nullary("H", "a"), nullary("I", "a")],
            vec![],
        )
        .unwrap();
        let report = b.validate();
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::LabelOveruse { label, count, .. } => {
                assert_eq!(label.as_str(), "a");
                assert_eq!(*count, 3);
            }
            v => panic!("unexpected {v:?}"),
        }
        assert!(b.interface().is_err());
    }

    #[test]
    fn single_agent_interface() {
        let b = Binet::from_parts(vec![nullary("eps", "a")], vec![]).unwrap();
        assert_eq!(b.interface().unwrap(), BTreeSet::from([Label::from("a")]));
    }

    #[test]
    fn wire_ends_count_as_occurrences() {
        let b = Binet::from_parts(vec![nullary("H", "w")], vec![Wire::new("u", "w")]).unwrap();
        assert_eq!(b.interface().unwrap(), BTreeSet::from([Label::from("u")]));
        let looped = Binet::from_parts(vec![], vec![Wire::new("u", "u")]).unwrap();
        assert!(matches!(
            looped.validate().violations[0],
            Violation::DegenerateWire { .. }
        ));
    }

    #[test]
    fn arity_checked_against_signature() {
        let mut b =
            Binet::from_parts(vec![Agent::new("M", "a").with_external(["b"])], vec![]).unwrap();
        b.agents.push(Agent::new("M", "c"));
        let report = b.validate();
        assert!(matches!(
            report.violations[0],
            Violation::ArityMismatch { .. }
        ));
        b.agents.push(Agent::new("Q", "d"));
        assert!(b
            .validate()
            .violations
            .iter()
            .any(|v| matches!(v, Violation::UndeclaredSymbol { .. })));
    }

    #[test]
    fn children_allowed_without_internal_ports() {
        let m = Agent::new("M", "f")
            .with_external(["d"])
            .with_children([Agent::new("F", "e")]);
        let b = Binet::from_parts(vec![m, Agent::new("G", "e")], vec![]).unwrap();
        assert!(b.validate().is_valid());
        assert_eq!(
            b.interface().unwrap(),
            BTreeSet::from([Label::from("d"), Label::from("f")])
        );
    }
}
