use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Candidate, Candidates};
use crate::net::AgentId;
use crate::rules::{RuleKind, RuleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Inactive rewrites first, then rewrites that leave subnets in place,
    /// then leftmost-outermost by location path.
    Deterministic,
    /// Higher rule priority first; ties as in `Deterministic`.
    Weighted,
    /// Seeded random order.
    Stochastic { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub kind: StrategyKind,
    /// Greedy-maximal safe sets when true, one redex per pass otherwise.
    pub maximal: bool,
}

impl Strategy {
    pub fn deterministic() -> Self {
        Strategy {
            kind: StrategyKind::Deterministic,
            maximal: true,
        }
    }

    pub fn weighted() -> Self {
        Strategy {
            kind: StrategyKind::Weighted,
            maximal: true,
        }
    }

    pub fn stochastic(seed: u64) -> Self {
        Strategy {
            kind: StrategyKind::Stochastic { seed },
            maximal: true,
        }
    }

    pub fn single(mut self) -> Self {
        self.maximal = false;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            StrategyKind::Deterministic => "deterministic",
            StrategyKind::Weighted => "weighted",
            StrategyKind::Stochastic { .. } => "stochastic",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StrategyKind::Stochastic { seed } => write!(f, "stochastic(seed={seed})"),
            _ => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown strategy `{0}` (expected deterministic, weighted or stochastic)")]
pub struct UnknownStrategy(pub String);

impl FromStr for StrategyKind {
    type Err = UnknownStrategy;

    /// `stochastic` parses with seed 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "deterministic" => Ok(StrategyKind::Deterministic),
            "weighted" => Ok(StrategyKind::Weighted),
            "stochastic" => Ok(StrategyKind::Stochastic { seed: 0 }),
            _ => Err(UnknownStrategy(s.to_string())),
        }
    }
}

/// A conflict-free subset of the candidates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SafeSet {
    /// In selection order.
    pub chosen: Vec<Candidate>,
    /// Candidates left out because their region overlapped a chosen one,
    /// paired with the index in `chosen` they collided with.
    pub rejected: Vec<(Candidate, usize)>,
}

impl SafeSet {
    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    /// True when no two chosen regions share an agent.
    pub fn is_disjoint(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.chosen
            .iter()
            .flat_map(|c| c.region.iter())
            .all(|id| seen.insert(*id))
    }
}

fn det_key(c: &Candidate) -> (u8, u8, &[usize], usize) {
    (
        u8::from(c.kind == RuleKind::Active),
        u8::from(c.moves_subnet),
        c.m.anchor.as_slice(),
        c.m.rule,
    )
}

/// Selects safe sets pass after pass, holding the random state for the
/// stochastic strategy.
#[derive(Clone, Debug)]
pub struct Scheduler {
    strategy: Strategy,
    rng: ChaCha8Rng,
}

impl Scheduler {
    pub fn new(strategy: Strategy) -> Self {
        let seed = match strategy.kind {
            StrategyKind::Stochastic { seed } => seed,
            _ => 0,
        };
        Scheduler {
            strategy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn prioritise(&mut self, cands: &Candidates, rs: &RuleSet) -> SafeSet {
        let mut all: Vec<&Candidate> = cands.iter().collect();
        all.sort_by(|a, b| det_key(a).cmp(&det_key(b)));
        match self.strategy.kind {
            StrategyKind::Deterministic => {}
            StrategyKind::Weighted => {
                all.sort_by_key(|c| Reverse(rs.rules[c.m.rule].priority.unwrap_or(0)));
            }
            StrategyKind::Stochastic { .. } => all.shuffle(&mut self.rng),
        }
        let mut owner: std::collections::HashMap<AgentId, usize> = std::collections::HashMap::new();
        let mut safe = SafeSet::default();
        for c in all {
            if !self.strategy.maximal && !safe.chosen.is_empty() {
                break;
            }
            if let Some(&hit) = c.region.iter().find_map(|id| owner.get(id)) {
                safe.rejected.push((c.clone(), hit));
                continue;
            }
            let k = safe.chosen.len();
            owner.extend(c.region.iter().map(|&id| (id, k)));
            safe.chosen.push(c.clone());
        }
        safe
    }
}

/// One-shot prioritisation. Stochastic strategies draw from a fresh
/// generator seeded with their seed.
pub fn prioritise(cands: &Candidates, rs: &RuleSet, strategy: Strategy) -> SafeSet {
    Scheduler::new(strategy).prioritise(cands, rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::collect;
    use crate::rho::nat_rules;
    use crate::{corpus, parse_binet, parse_rules, rho_rules};

    fn strategies() -> Vec<Strategy> {
        let mut v = vec![Strategy::deterministic(), Strategy::weighted()];
        v.extend((0..20).map(Strategy::stochastic));
        v
    }

    fn fired(s: &SafeSet, rs: &RuleSet) -> Vec<String> {
        s.chosen
            .iter()
            .map(|c| rs.rules[c.m.rule].id.clone())
            .collect()
    }

    #[test]
    fn moving_match_excludes_clash() {
        let rs = rho_rules();
        let cands = collect(&parse_binet(corpus::SECOND).unwrap(), &rs);
        for s in strategies() {
            let safe = prioritise(&cands, &rs, s);
            assert!(safe.is_disjoint());
            let on = |l: &str| {
                safe.chosen
                    .iter()
                    .any(|c| c.label.as_ref().is_some_and(|x| x.as_str() == l))
            };
            assert!(!(on("e") && on("f")), "{s}");
            assert_eq!(safe.len() + safe.rejected.len(), cands.len());
        }
    }

    #[test]
    fn deterministic_prefers_inactive() {
        let rs = rho_rules();
        let cands = collect(&parse_binet(corpus::SECOND).unwrap(), &rs);
        let safe = prioritise(&cands, &rs, Strategy::deterministic());
        assert_eq!(fired(&safe, &rs), ["done", "clash"]);
    }

    #[test]
    fn disjoint_pairs_are_both_admitted() {
        let rs = nat_rules();
        let cands = collect(
            &parse_binet("eps^a(), Z^a(), eps^b(), S^b(c), Z^c()").unwrap(),
            &rs,
        );
        for s in strategies() {
            assert_eq!(prioritise(&cands, &rs, s).len(), 2);
        }
    }

    #[test]
    fn single_takes_one() {
        let rs = nat_rules();
        let cands = collect(&parse_binet("eps^a(), Z^a(), eps^b(), Z^b()").unwrap(), &rs);
        let safe = prioritise(&cands, &rs, Strategy::deterministic().single());
        assert_eq!(safe.len(), 1);
        assert!(safe.rejected.is_empty());
    }

    #[test]
    fn weighted_follows_priority() {
        let src = "hot: A^a(x), B^a() => D^x() @priority 3\ncold: A^a(x) =>inactive E^a(x)";
        let rs = parse_rules(src).unwrap();
        let net = parse_binet("B^a(), A^a(b), C^b()").unwrap();
        let cands = collect(&net, &rs);
        assert_eq!((cands.active.len(), cands.inactive.len()), (1, 1));
        let safe = prioritise(&cands, &rs, Strategy::weighted());
        assert_eq!(fired(&safe, &rs), ["hot"]);
        let safe = prioritise(&cands, &rs, Strategy::deterministic());
        assert_eq!(fired(&safe, &rs), ["cold"]);
    }

    #[test]
    fn stochastic_is_reproducible() {
        let rs = rho_rules();
        let cands = collect(&parse_binet(corpus::SECOND).unwrap(), &rs);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..20 {
            let a = prioritise(&cands, &rs, Strategy::stochastic(seed));
            let b = prioritise(&cands, &rs, Strategy::stochastic(seed));
            assert_eq!(a, b);
            seen.insert(fired(&a, &rs));
        }
        assert!(seen.len() > 1);
    }

    #[test]
    fn strategy_names_parse() {
        assert_eq!(
            "Weighted".parse::<StrategyKind>(),
            Ok(StrategyKind::Weighted)
        );
        assert_eq!(
            "stochastic".parse(),
            Ok(StrategyKind::Stochastic { seed: 0 })
        );
        assert!("greedy".parse::<StrategyKind>().is_err());
        assert_eq!(Strategy::stochastic(4).to_string(), "stochastic(seed=4)");
    }
}
