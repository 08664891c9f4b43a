//! Template instantiation and delta application.

use std::collections::{BTreeMap, HashMap};

use super::{
    AllocatorExhausted, Bindings, FreshLabels, GeneratorKind, Match, PortSlot, Rule, SymbolPattern,
    TemplateItem,
};
use crate::net::{Agent, AgentId, ArityConflict, Binet, Label, Symbol, Wire};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error(transparent)]
    Exhausted(#[from] AllocatorExhausted),
    #[error("rule `{rule}`: metavariable `{var}` is not bound")]
    Unbound { rule: String, var: String },
    #[error("conflicting rewrites both touch agent {0:?}")]
    ConflictDetected(AgentId),
    #[error(transparent)]
    Arity(#[from] ArityConflict),
}

/// What one rule firing removes from and adds to a binet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Delta {
    pub rule: usize,
    /// Removed agents; their subtrees go with them.
    pub remove: Vec<AgentId>,
    /// Where `agents` are inserted (`None` = top level).
    pub host: Option<AgentId>,
    pub agents: Vec<Agent>,
    pub wires: Vec<Wire>,
}

/// Labels occurring exactly once within `agents`, in preorder of first
/// occurrence.
pub(crate) fn unique_labels(agents: &[Agent]) -> Vec<Label> {
    let mut order = Vec::new();
    let mut counts: HashMap<Label, usize> = HashMap::new();
    fn go(agents: &[Agent], order: &mut Vec<Label>, counts: &mut HashMap<Label, usize>) {
        for a in agents {
            for l in a.ports() {
                let n = counts.entry(l.clone()).or_insert(0);
                if *n == 0 {
                    order.push(l.clone());
                }
                *n += 1;
            }
            go(&a.children, order, counts);
        }
    }
    go(agents, &mut order, &mut counts);
    order.into_iter().filter(|l| counts[l] == 1).collect()
}

struct Ctx<'a> {
    rule: &'a Rule,
    bindings: &'a Bindings,
    fresh: &'a dyn FreshLabels,
    intermediary: HashMap<String, Label>,
    /// subnet -> interface label -> replacement inside the spliced copy
    renames: HashMap<String, BTreeMap<Label, Label>>,
    /// subnet -> (x, x') pairs for interface generators
    interface: HashMap<String, Vec<(Label, Label)>>,
    wires: Vec<Wire>,
}

type Scope = HashMap<String, Label>;

impl Ctx<'_> {
    fn unbound(&self, var: &str) -> RewriteError {
        RewriteError::Unbound {
            rule: self.rule.id.clone(),
            var: var.to_string(),
        }
    }

    fn label(&mut self, name: &str, scope: &mut Option<Scope>) -> Result<Label, RewriteError> {
        if let Some(s) = scope {
            if let Some(l) = s.get(name) {
                return Ok(l.clone());
            }
        }
        if let Some(l) = self.bindings.labels.get(name) {
            return Ok(l.clone());
        }
        let map = match scope {
            Some(s) => s,
            None => &mut self.intermediary,
        };
        if let Some(l) = map.get(name) {
            return Ok(l.clone());
        }
        let l = self.fresh.fresh()?;
        map.insert(name.to_string(), l.clone());
        Ok(l)
    }

    fn slot(
        &mut self,
        slot: &PortSlot,
        scope: &mut Option<Scope>,
    ) -> Result<Vec<Label>, RewriteError> {
        match slot {
            PortSlot::Labels(names) => names.iter().map(|n| self.label(n, scope)).collect(),
            PortSlot::Vector(v) => self
                .bindings
                .vectors
                .get(v)
                .cloned()
                .ok_or_else(|| self.unbound(v)),
        }
    }

    fn symbol(&self, p: &SymbolPattern) -> Result<Symbol, RewriteError> {
        match p {
            SymbolPattern::Concrete(s) => Ok(s.clone()),
            SymbolPattern::Var(v) => self
                .bindings
                .symbols
                .get(v)
                .cloned()
                .ok_or_else(|| self.unbound(v)),
            SymbolPattern::Derived { var, suffix } => self
                .bindings
                .symbols
                .get(var)
                .map(|s| Symbol::new(format!("{s}_{suffix}")))
                .ok_or_else(|| self.unbound(var)),
        }
    }

    fn subnet(&self, x: &str) -> Result<&[Agent], RewriteError> {
        self.bindings
            .subnets
            .get(x)
            .map(|s| s.agents.as_slice())
            .ok_or_else(|| self.unbound(x))
    }

    fn prepare_generators(&mut self, items: &[TemplateItem]) -> Result<(), RewriteError> {
        for item in items {
            match item {
                TemplateItem::Foreach(g) => {
                    if g.kind == GeneratorKind::Interface && !self.interface.contains_key(&g.subnet)
                    {
                        let mut pairs = Vec::new();
                        for x in unique_labels(self.subnet(&g.subnet)?) {
                            pairs.push((x, self.fresh.fresh()?));
                        }
                        self.renames
                            .insert(g.subnet.clone(), pairs.iter().cloned().collect());
                        self.interface.insert(g.subnet.clone(), pairs);
                    }
                    self.prepare_generators(&g.body)?;
                }
                TemplateItem::Agent(a) => self.prepare_generators(&a.children)?,
                _ => {}
            }
        }
        Ok(())
    }

    fn emit(
        &mut self,
        items: &[TemplateItem],
        scope: &mut Option<Scope>,
        out: &mut Vec<Agent>,
    ) -> Result<(), RewriteError> {
        for item in items {
            match item {
                TemplateItem::Agent(t) => {
                    let symbol = self.symbol(&t.symbol)?;
                    let principal = self.label(&t.principal, scope)?;
                    let external = self.slot(&t.external, scope)?;
                    let internal = self.slot(&t.internal, scope)?;
                    let mut children = Vec::new();
                    self.emit(&t.children, scope, &mut children)?;
                    out.push(Agent {
                        symbol,
                        principal,
                        external,
                        internal,
                        children,
                    });
                }
                TemplateItem::Wire(a, b) => {
                    let a = self.label(a, scope)?;
                    let b = self.label(b, scope)?;
                    // a wire closing on itself is a loop and vanishes
                    if a != b {
                        self.wires.push(Wire(a, b));
                    }
                }
                TemplateItem::Splice(x) => {
                    let mut agents = self.subnet(x)?.to_vec();
                    if let Some(map) = self.renames.get(x) {
                        for a in &mut agents {
                            a.relabel(&mut |l| {
                                if let Some(n) = map.get(l) {
                                    *l = n.clone();
                                }
                            });
                        }
                    }
                    out.extend(agents);
                }
                TemplateItem::Foreach(g) => {
                    let pairs: Vec<(Label, Option<Label>)> = match g.kind {
                        GeneratorKind::Interface => self.interface[&g.subnet]
                            .iter()
                            .map(|(x, y)| (x.clone(), Some(y.clone())))
                            .collect(),
                        GeneratorKind::Unique => unique_labels(self.subnet(&g.subnet)?)
                            .into_iter()
                            .map(|x| (x, None))
                            .collect(),
                    };
                    for (x, bar) in pairs {
                        let mut inner: Scope = scope.clone().unwrap_or_default();
                        inner.insert(g.var.clone(), x);
                        if let Some(bar) = bar {
                            inner.insert(format!("{}'", g.var), bar);
                        }
                        let mut inner = Some(inner);
                        self.emit(&g.body, &mut inner, out)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds the delta for one match. New labels come from `fresh`.
pub fn instantiate(rule: &Rule, m: &Match, fresh: &dyn FreshLabels) -> Result<Delta, RewriteError> {
    let mut ctx = Ctx {
        rule,
        bindings: &m.bindings,
        fresh,
        intermediary: HashMap::new(),
        renames: HashMap::new(),
        interface: HashMap::new(),
        wires: Vec::new(),
    };
    ctx.prepare_generators(&rule.template.items)?;
    let mut agents = Vec::new();
    ctx.emit(&rule.template.items, &mut None, &mut agents)?;
    Ok(Delta {
        rule: m.rule,
        remove: m.agents.clone(),
        host: m.host,
        agents,
        wires: ctx.wires,
    })
}

/// Applies deltas computed against `binet`. Deltas must touch disjoint
/// regions; overlapping removals or an insertion into a removed host abort
/// with [`RewriteError::ConflictDetected`].
pub fn apply_deltas(binet: &Binet, deltas: &[Delta]) -> Result<Binet, RewriteError> {
    let idx = binet.index();
    let mut removed = vec![false; idx.len()];
    for d in deltas {
        for &root in &d.remove {
            for id in idx.subtree(root) {
                if std::mem::replace(&mut removed[id.0], true) {
                    return Err(RewriteError::ConflictDetected(id));
                }
            }
        }
    }
    let mut additions: HashMap<Option<AgentId>, Vec<Agent>> = HashMap::new();
    for d in deltas {
        if let Some(h) = d.host {
            if removed[h.0] {
                return Err(RewriteError::ConflictDetected(h));
            }
        }
        additions
            .entry(d.host)
            .or_default()
            .extend(d.agents.iter().cloned());
    }

    fn rebuild(
        agents: &[Agent],
        next: &mut usize,
        removed: &[bool],
        additions: &mut HashMap<Option<AgentId>, Vec<Agent>>,
    ) -> Vec<Agent> {
        let mut out = Vec::with_capacity(agents.len());
        for a in agents {
            let id = *next;
            *next += 1;
            if removed[id] {
                *next += a.size() - 1;
                continue;
            }
            let mut children = rebuild(&a.children, next, removed, additions);
            if let Some(extra) = additions.remove(&Some(AgentId(id))) {
                children.extend(extra);
            }
            out.push(Agent {
                symbol: a.symbol.clone(),
                principal: a.principal.clone(),
                external: a.external.clone(),
                internal: a.internal.clone(),
                children,
            });
        }
        out
    }

    let mut agents = rebuild(&binet.agents, &mut 0, &removed, &mut additions);
    if let Some(top) = additions.remove(&None) {
        agents.extend(top);
    }
    let mut signature = binet.signature.clone();
    fn declare(sig: &mut crate::net::Signature, a: &Agent) -> Result<(), ArityConflict> {
        sig.declare(a.symbol.clone(), a.arity())?;
        a.children.iter().try_for_each(|c| declare(sig, c))
    }
    for d in deltas {
        for a in &d.agents {
            declare(&mut signature, a)?;
        }
    }
    let mut wires = binet.wires.clone();
    wires.extend(deltas.iter().flat_map(|d| d.wires.iter().cloned()));
    Ok(Binet {
        agents,
        wires,
        signature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{match_pattern, LabelAllocator};
    use crate::{iso, parse_binet, rho_rules, rho_rules_naive, RuleSet};

    fn fire(rs: &RuleSet, id: &str, src: &str) -> (Binet, Delta) {
        let net = parse_binet(src).unwrap();
        let i = rs.rules.iter().position(|r| r.id == id).unwrap();
        let ms = match_pattern(i, &rs.rules[i], &net.index());
        assert!(!ms.is_empty(), "{id} on {src}");
        let d = instantiate(&rs.rules[i], &ms[0], &LabelAllocator::new()).unwrap();
        (net, d)
    }

    fn symbols(d: &Delta) -> Vec<&str> {
        let mut s: Vec<&str> = d.agents.iter().map(|a| a.symbol.as_str()).collect();
        s.sort();
        s
    }

    #[test]
    fn naive_erasure_cuts_interface() {
        let (net, d) = fire(&rho_rules_naive(), "eps_m", "eps^a(), M^a(b | | H^p())");
        assert_eq!(d.remove.len(), 2);
        assert_eq!(symbols(&d), ["H", "eps", "eps", "eps"]);
        let h = d.agents.iter().find(|a| a.symbol.as_str() == "H").unwrap();
        assert!(h.principal.is_reserved());
        let erased: Vec<&Label> = d
            .agents
            .iter()
            .filter(|a| a.symbol.as_str() == "eps")
            .map(|a| &a.principal)
            .collect();
        assert!(erased.iter().any(|l| l.as_str() == "b"));
        assert!(erased.iter().any(|l| l.as_str() == "p"));
        assert!(erased.contains(&&h.principal));
        let after = apply_deltas(&net, &[d]).unwrap();
        assert!(iso(
            &after,
            &parse_binet("eps^b(), eps^p(), eps^q(), H^q()").unwrap()
        ));
    }

    #[test]
    fn optimized_erasure_drops_subnet() {
        let (net, d) = fire(&rho_rules(), "eps_m", "eps^a(), M^a(b | | H^p())");
        assert_eq!(d.remove.len(), 2);
        assert_eq!(symbols(&d), ["eps", "eps"]);
        let after = apply_deltas(&net, &[d]).unwrap();
        assert!(iso(&after, &parse_binet("eps^b(), eps^p()").unwrap()));
    }

    #[test]
    fn optimized_erasure_of_empty_subnet() {
        let (_, d) = fire(&rho_rules(), "eps_m", "eps^a(), M^a(b | | G^p(), I^p())");
        assert_eq!(symbols(&d), ["eps"]);
        let rs = rho_rules();
        let net = parse_binet("eps^a(), M^a(b)").unwrap();
        let i = rs.rules.iter().position(|r| r.id == "eps_m").unwrap();
        let m = &match_pattern(i, &rs.rules[i], &net.index())[0];
        let d = instantiate(&rs.rules[i], m, &LabelAllocator::new()).unwrap();
        assert_eq!(d.agents, vec![Agent::new("eps", "b")]);
    }

    #[test]
    fn generic_rule_relocates_subnet() {
        let (net, d) = fire(&rho_rules(), "match", "M^f(d | | F^e()), I^f(), G^e()");
        assert_eq!(symbols(&d), ["I_M"]);
        assert_eq!(d.agents[0].children, vec![Agent::new("F", "e")]);
        let after = apply_deltas(&net, &[d]).unwrap();
        assert!(after.validate().is_valid());
        assert!(iso(
            &after,
            &parse_binet("I_M^d( | | F^e()), G^e()\nsig I_M(0, 0)").unwrap()
        ));
    }

    #[test]
    fn overlapping_deltas_conflict() {
        let (net, d) = fire(&rho_rules(), "eps_eps", "eps^a(), eps^a()");
        let err = apply_deltas(&net, &[d.clone(), d]).unwrap_err();
        assert!(matches!(err, RewriteError::ConflictDetected(_)));
    }

    #[test]
    fn unique_labels_in_preorder() {
        let agents = vec![
            Agent::new("A", "x").with_external(["y", "z"]),
            Agent::new("B", "y").with_children([Agent::new("C", "w")]),
        ];
        let got: Vec<String> = unique_labels(&agents)
            .iter()
            .map(|l| l.to_string())
            .collect();
        assert_eq!(got, ["x", "z", "w"]);
    }
}
