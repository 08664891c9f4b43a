//! Reduction: collect candidates, prioritise a safe set, rewrite it, tidy.

mod collect;
mod schedule;
mod tidy;

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::net::{AgentId, Binet, Label};
use crate::rules::{
    apply_deltas, instantiate, match_pair, match_pattern, Delta, LabelAllocator, RewriteError,
    RuleKind, RuleSet,
};

pub use collect::{collect, Candidate, Candidates};
pub use schedule::{prioritise, SafeSet, Scheduler, Strategy, StrategyKind, UnknownStrategy};
pub use tidy::tidy;

/// Instantiates every member of `safe` (in parallel) and applies the
/// deltas in one step. Labels are drawn from a fresh block of `fresh`, one
/// scope per member, so the result does not depend on thread timing.
pub fn rewrite_pass(
    binet: &Binet,
    safe: &SafeSet,
    rs: &RuleSet,
    fresh: &LabelAllocator,
) -> Result<Binet, RewriteError> {
    if safe.chosen.is_empty() {
        return Ok(binet.clone());
    }
    let block = fresh.scope(fresh.next_block()?);
    let deltas: Vec<Delta> = safe
        .chosen
        .par_iter()
        .enumerate()
        .map(|(i, c)| instantiate(&rs.rules[c.m.rule], &c.m, &block.scope(i)))
        .collect::<Result<_, _>>()?;
    apply_deltas(binet, &deltas)
}

/// Old preorder id -> new preorder id after applying `delta`, for agents
/// that survive.
fn survivors(binet: &Binet, delta: &Delta) -> Vec<Option<AgentId>> {
    let idx = binet.index();
    let mut removed = vec![false; idx.len()];
    for &r in &delta.remove {
        for id in idx.subtree(r) {
            removed[id.0] = true;
        }
    }
    let added: usize = delta.agents.iter().map(|a| a.size()).sum();
    let mut map = vec![None; idx.len()];
    let mut next = 0;
    fn go(
        ids: &[AgentId],
        idx: &crate::net::NetIndex<'_>,
        removed: &[bool],
        delta: &Delta,
        added: usize,
        next: &mut usize,
        map: &mut [Option<AgentId>],
    ) {
        for &id in ids {
            if removed[id.0] {
                continue;
            }
            map[id.0] = Some(AgentId(*next));
            *next += 1;
            go(&idx.children(id), idx, removed, delta, added, next, map);
            if delta.host == Some(id) {
                *next += added;
            }
        }
    }
    let roots: Vec<AgentId> = idx
        .iter()
        .filter(|n| n.parent.is_none())
        .map(|n| n.id)
        .collect();
    go(&roots, &idx, &removed, delta, added, &mut next, &mut map);
    map
}

/// Reference semantics for a safe set: fires the members one at a time in
/// `order`, re-matching each against the intermediate binet.
pub fn serial_rewrite(
    binet: &Binet,
    members: &[Candidate],
    order: &[usize],
    rs: &RuleSet,
    fresh: &LabelAllocator,
) -> Result<Binet, RewriteError> {
    let mut current = binet.clone();
    let mut ids: Vec<Vec<AgentId>> = members.iter().map(|c| c.m.agents.clone()).collect();
    let mut pending = vec![true; members.len()];
    for &k in order {
        pending[k] = false;
        let c = &members[k];
        let rule = &rs.rules[c.m.rule];
        let idx = current.index();
        let m = match c.kind {
            RuleKind::Active => match_pair(c.m.rule, rule, ids[k][0], ids[k][1], &idx),
            RuleKind::Inactive => match_pattern(c.m.rule, rule, &idx)
                .into_iter()
                .find(|m| m.agents == ids[k]),
        };
        let m = m.ok_or(RewriteError::ConflictDetected(ids[k][0]))?;
        let delta = instantiate(rule, &m, &fresh.scope(fresh.next_block()?))?;
        let map = survivors(&current, &delta);
        let next = apply_deltas(&current, std::slice::from_ref(&delta))?;
        drop(idx);
        for (j, v) in ids.iter_mut().enumerate() {
            if pending[j] {
                for id in v.iter_mut() {
                    *id = map[id.0].ok_or(RewriteError::ConflictDetected(*id))?;
                }
            }
        }
        current = next;
    }
    Ok(current)
}

/// Bounds on a reduction. `None` means unbounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_passes: Option<usize>,
    /// Total rule firings.
    pub max_steps: Option<usize>,
}

impl Limits {
    pub fn passes(n: usize) -> Self {
        Limits {
            max_passes: Some(n),
            max_steps: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Firing {
    pub rule: String,
    pub kind: RuleKind,
    /// Location path of the leftmost-outermost matched agent.
    pub path: Vec<usize>,
    pub label: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassRecord {
    pub pass: usize,
    pub fired: Vec<Firing>,
    pub active: usize,
    pub inactive: usize,
    /// Candidates available before the pass.
    pub candidates: usize,
    /// Active pairs without a rule at the start of the pass.
    pub stuck: usize,
    /// Firings so far, this pass included.
    pub interactions: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    NormalForm,
    StepLimit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    /// The input followed by the tidied result of each pass.
    pub snapshots: Vec<Binet>,
    pub passes: Vec<PassRecord>,
    pub termination: Termination,
    /// Active pairs without a rule in the last snapshot.
    pub stuck: Vec<Label>,
}

impl ReductionTrace {
    pub fn final_binet(&self) -> &Binet {
        self.snapshots
            .last()
            .expect("trace has the initial snapshot")
    }

    pub fn interactions(&self) -> usize {
        self.passes.last().map_or(0, |p| p.interactions)
    }

    pub fn active_count(&self) -> usize {
        self.passes.iter().map(|p| p.active).sum()
    }

    pub fn inactive_count(&self) -> usize {
        self.passes.iter().map(|p| p.inactive).sum()
    }

    /// Tab-separated log, one line per firing: pass, rule id, location
    /// path, interactions so far.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for p in &self.passes {
            let mut n = p.interactions - p.fired.len();
            for f in &p.fired {
                n += 1;
                let path: Vec<String> = f.path.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "{}\t{}\t/{}\t{}", p.pass, f.rule, path.join("/"), n);
            }
        }
        out
    }
}

/// Runs collect, prioritise, rewrite and tidy until no candidate remains or
/// a limit is reached.
pub fn reduce(
    binet: &Binet,
    rs: &RuleSet,
    strategy: Strategy,
    limits: Limits,
) -> Result<ReductionTrace, RewriteError> {
    let order = collect::active_order(rs);
    let mut sched = Scheduler::new(strategy);
    let fresh = LabelAllocator::new();
    let mut snapshots = vec![binet.clone()];
    let mut passes = Vec::new();
    let mut interactions = 0;
    loop {
        let current = snapshots.last().expect("non-empty");
        let cands = collect::collect_with(&current.index(), rs, &order);
        if cands.is_empty() {
            return Ok(ReductionTrace {
                snapshots,
                passes,
                termination: Termination::NormalForm,
                stuck: cands.stuck,
            });
        }
        let budget = limits.max_steps.map(|m| m.saturating_sub(interactions));
        if limits.max_passes.is_some_and(|m| passes.len() >= m) || budget == Some(0) {
            return Ok(ReductionTrace {
                snapshots,
                passes,
                termination: Termination::StepLimit,
                stuck: cands.stuck,
            });
        }
        let mut safe = sched.prioritise(&cands, rs);
        if let Some(b) = budget {
            safe.chosen.truncate(b);
        }
        let next = tidy(&rewrite_pass(current, &safe, rs, &fresh)?);
        interactions += safe.chosen.len();
        let active = safe
            .chosen
            .iter()
            .filter(|c| c.kind == RuleKind::Active)
            .count();
        passes.push(PassRecord {
            pass: passes.len() + 1,
            fired: safe
                .chosen
                .iter()
                .map(|c| Firing {
                    rule: rs.rules[c.m.rule].id.clone(),
                    kind: c.kind,
                    path: c.m.anchor.clone(),
                    label: c.label.clone(),
                })
                .collect(),
            active,
            inactive: safe.chosen.len() - active,
            candidates: cands.len(),
            stuck: cands.stuck.len(),
            interactions,
        });
        snapshots.push(next);
    }
}
