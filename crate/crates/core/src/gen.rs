//! Random generators for binets, M-configurations, rho-terms and
//! multi-redex instances. All generators are driven by a caller-supplied
//! RNG, so a seed reproduces the output.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::net::{Agent, Binet, Label, Wire};
use crate::rho::RhoTerm;

/// A symbol the generators may use: name, internal arity, external arity,
/// and whether it may host children.
#[derive(Clone, Copy, Debug)]
pub struct GenSymbol {
    pub name: &'static str,
    pub internal: usize,
    pub external: usize,
    pub nests: bool,
}

const fn sym(name: &'static str, internal: usize, external: usize, nests: bool) -> GenSymbol {
    GenSymbol {
        name,
        internal,
        external,
        nests,
    }
}

/// Symbols understood by the bundled rho and unary-arithmetic rules.
pub const LIBRARY_SYMBOLS: &[GenSymbol] = &[
    sym("App", 0, 2, false),
    sym("Abs", 1, 1, true),
    sym("M", 0, 1, true),
    sym("eps", 0, 0, false),
    sym("bot", 0, 0, false),
    sym("H", 0, 0, false),
    sym("F", 0, 0, false),
    sym("G", 0, 0, false),
    sym("I", 0, 0, false),
    sym("Z", 0, 0, false),
    sym("S", 0, 1, false),
    sym("Add", 0, 2, false),
];

#[derive(Clone, Debug)]
pub struct BinetConfig {
    pub max_agents: usize,
    pub symbols: Vec<GenSymbol>,
    /// Probability that an agent is nested inside an earlier nesting agent.
    pub nest: f64,
    /// Probability that a port is left free.
    pub free: f64,
    /// Probability that a connection goes through an explicit wire.
    pub wire: f64,
    /// Probability that two principal ports are paired up front.
    pub principal_pairs: f64,
}

impl Default for BinetConfig {
    fn default() -> Self {
        BinetConfig {
            max_agents: 10,
            symbols: LIBRARY_SYMBOLS.to_vec(),
            nest: 0.3,
            free: 0.15,
            wire: 0.1,
            principal_pairs: 0.6,
        }
    }
}

struct Names(usize);

impl Names {
    fn next(&mut self) -> Label {
        self.0 += 1;
        Label::new(format!("l{}", self.0))
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Principal(usize),
    External(usize, usize),
    Internal(usize, usize),
}

/// A random valid binet.
pub fn random_binet(rng: &mut impl Rng, cfg: &BinetConfig) -> Binet {
    let n = rng.gen_range(1..=cfg.max_agents.max(1));
    let mut flat: Vec<(GenSymbol, Option<usize>)> = Vec::with_capacity(n);
    for _ in 0..n {
        let s = *cfg.symbols.choose(rng).expect("non-empty symbol pool");
        let hosts: Vec<usize> = (0..flat.len()).filter(|&i| flat[i].0.nests).collect();
        let parent = if !hosts.is_empty() && rng.gen_bool(cfg.nest) {
            Some(*hosts.choose(rng).expect("non-empty"))
        } else {
            None
        };
        flat.push((s, parent));
    }
    let mut principal: Vec<Option<Label>> = vec![None; n];
    let mut external: Vec<Vec<Option<Label>>> =
        flat.iter().map(|(s, _)| vec![None; s.external]).collect();
    let mut internal: Vec<Vec<Option<Label>>> =
        flat.iter().map(|(s, _)| vec![None; s.internal]).collect();
    let mut names = Names(0);
    let mut wires = Vec::new();

    let mut principals: Vec<usize> = (0..n).collect();
    principals.shuffle(rng);
    let mut slots: Vec<Slot> = Vec::new();
    let mut it = principals.chunks(2);
    for chunk in &mut it {
        match chunk {
            [a, b] if rng.gen_bool(cfg.principal_pairs) => {
                let l = names.next();
                principal[*a] = Some(l.clone());
                principal[*b] = Some(l);
            }
            _ => slots.extend(chunk.iter().map(|&i| Slot::Principal(i))),
        }
    }
    for (i, (s, _)) in flat.iter().enumerate() {
        slots.extend((0..s.external).map(|k| Slot::External(i, k)));
        slots.extend((0..s.internal).map(|k| Slot::Internal(i, k)));
    }
    slots.shuffle(rng);
    let mut assign = |slot: Slot, l: Label| match slot {
        Slot::Principal(i) => principal[i] = Some(l),
        Slot::External(i, k) => external[i][k] = Some(l),
        Slot::Internal(i, k) => internal[i][k] = Some(l),
    };
    let mut k = 0;
    while k < slots.len() {
        if k + 1 == slots.len() || rng.gen_bool(cfg.free) {
            let l = names.next();
            if rng.gen_bool(cfg.wire) {
                let w = names.next();
                wires.push(Wire(l.clone(), w));
            }
            assign(slots[k], l);
            k += 1;
        } else {
            let l = names.next();
            if rng.gen_bool(cfg.wire) {
                let m = names.next();
                wires.push(Wire(l.clone(), m.clone()));
                assign(slots[k + 1], m);
            } else {
                assign(slots[k + 1], l.clone());
            }
            assign(slots[k], l);
            k += 2;
        }
    }
    if rng.gen_bool(cfg.wire) {
        wires.push(Wire(names.next(), names.next()));
    }

    let mut agents: Vec<Option<Agent>> = (0..n)
        .map(|i| {
            let unwrap =
                |v: &[Option<Label>]| v.iter().map(|l| l.clone().expect("assigned")).collect();
            Some(Agent {
                symbol: flat[i].0.name.into(),
                principal: principal[i].clone().expect("assigned"),
                external: unwrap(&external[i]),
                internal: unwrap(&internal[i]),
                children: Vec::new(),
            })
        })
        .collect();
    // attach children from the back so grandchildren are in place first
    for i in (0..n).rev() {
        if let Some(p) = flat[i].1 {
            let child = agents[i].take().expect("attached once");
            agents[p]
                .as_mut()
                .expect("parent precedes child")
                .children
                .insert(0, child);
        }
    }
    Binet::from_parts(agents.into_iter().flatten().collect(), wires).expect("fixed arities")
}

/// An erasure agent facing an M whose subnet is a random forest of S, Z and
/// H agents, possibly with a nested M. Ports leading out of the subnet end
/// free, on an `eps`, or on a `Z`.
pub fn m_configuration(rng: &mut impl Rng) -> Binet {
    let mut names = Names(0);
    let b = names.next();
    let a = names.next();
    let mut outside = Vec::new();
    let mut leaves = Vec::new();
    let mut x = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let root = names.next();
        x.extend(m_tree(rng, &mut names, root, 3, &mut leaves));
    }
    for l in leaves {
        match rng.gen_range(0..3) {
            0 => outside.push(Agent::new("eps", l)),
            1 => outside.push(Agent::new("Z", l)),
            _ => {}
        }
    }
    let mut agents = vec![
        Agent::new("eps", a.clone()),
        Agent::new("M", a).with_external([b]).with_children(x),
    ];
    agents.extend(outside);
    Binet::from_parts(agents, Vec::new()).expect("fixed arities")
}

/// Agents rooted at principal `root`. Aux ports either feed a subtree or
/// leave the configuration through `leaves`.
fn m_tree(
    rng: &mut impl Rng,
    names: &mut Names,
    root: Label,
    depth: usize,
    leaves: &mut Vec<Label>,
) -> Vec<Agent> {
    let pick = if depth == 0 {
        rng.gen_range(0..3)
    } else {
        rng.gen_range(0..5)
    };
    match pick {
        0 => vec![Agent::new("Z", root)],
        1 => vec![Agent::new("H", root)],
        2 => {
            let leaf = names.next();
            leaves.push(leaf.clone());
            vec![Agent::new("S", root).with_external([leaf])]
        }
        3 => {
            let inner = names.next();
            let kids = m_tree(rng, names, inner.clone(), depth - 1, leaves);
            vec![Agent::new("M", root)
                .with_external([inner])
                .with_children(kids)]
        }
        _ => {
            let l = names.next();
            let mut out = vec![Agent::new("S", root).with_external([l.clone()])];
            out.extend(m_tree(rng, names, l, depth - 1, leaves));
            out
        }
    }
}

const CONSTRUCTORS: &[&str] = &["H", "F", "G", "I"];

fn constructor(rng: &mut impl Rng) -> RhoTerm {
    RhoTerm::cons(CONSTRUCTORS.choose(rng).expect("non-empty"))
}

/// A closed, linear rho-term. Applications always have an abstraction in
/// function position, and a constructor pattern is only ever applied to a
/// constructor, possibly behind an identity.
pub fn rho_term(rng: &mut impl Rng, depth: usize) -> RhoTerm {
    let mut vars = Vec::new();
    let mut fresh = 0;
    term(rng, depth, &mut vars, &mut fresh)
}

fn term(rng: &mut impl Rng, depth: usize, vars: &mut Vec<String>, fresh: &mut usize) -> RhoTerm {
    let choice = if depth == 0 {
        rng.gen_range(0..2)
    } else {
        rng.gen_range(0..5)
    };
    match choice {
        1 if !vars.is_empty() => {
            let i = rng.gen_range(0..vars.len());
            RhoTerm::Variable(vars.swap_remove(i))
        }
        0 | 1 => constructor(rng),
        2 => abstraction(rng, depth, vars, fresh).0,
        _ => {
            let (f, pattern_is_var) = abstraction(rng, depth, vars, fresh);
            let arg = if pattern_is_var {
                term(rng, depth - 1, vars, fresh)
            } else if rng.gen_bool(0.3) {
                *fresh += 1;
                let x = format!("v{fresh}");
                RhoTerm::app(
                    RhoTerm::abs(RhoTerm::var(&x), RhoTerm::var(&x)),
                    constructor(rng),
                )
            } else {
                constructor(rng)
            };
            RhoTerm::app(f, arg)
        }
    }
}

fn abstraction(
    rng: &mut impl Rng,
    depth: usize,
    vars: &mut Vec<String>,
    fresh: &mut usize,
) -> (RhoTerm, bool) {
    if rng.gen_bool(0.5) {
        *fresh += 1;
        let x = format!("v{fresh}");
        vars.push(x.clone());
        let body = term(rng, depth.saturating_sub(1), vars, fresh);
        vars.retain(|v| *v != x);
        (RhoTerm::abs(RhoTerm::var(&x), body), true)
    } else {
        let body = term(rng, depth.saturating_sub(1), vars, fresh);
        (RhoTerm::abs(constructor(rng), body), false)
    }
}

/// Small binets with exactly one rewrite each under the bundled rho and
/// unary-arithmetic rules.
pub const GADGETS: &[&str] = &[
    "Add^a(y, r), S^a(x)",
    "Add^a(y, r), Z^a()",
    "App^x(r, s), Abs^x(t | p | F^p())",
    "App^x(r, s), Abs^x(t | p), eps^p()",
    "eps^a(), M^a(b | | S^c(d))",
    "eps^a(), M^a(b | | Z^c(), H^d())",
    "M^f(d | | F^e()), G^e()",
    "M^a(b | | Fail^z(z))",
    "eps^a(), S^a(x)",
    "eps^a(), Abs^a(t | p | H^p())",
    "bot^a(), App^a(r, s)",
    "H_M^a( | | Fail^z(z))",
];

/// Two or three gadgets with some of their free ports joined, directly or
/// through a wire.
pub fn multi_redex(rng: &mut impl Rng) -> Binet {
    let k = rng.gen_range(2..=3);
    let mut agents = Vec::new();
    let mut wires = Vec::new();
    let mut free: Vec<Vec<Label>> = Vec::new();
    for g in 0..k {
        let src = GADGETS.choose(rng).expect("non-empty");
        let mut b = crate::syntax::parse_binet(src).expect("gadgets parse");
        b.relabel(|l| *l = Label::new(format!("g{g}{l}")));
        let mut f: Vec<Label> = b.free_labels().into_iter().collect();
        f.shuffle(rng);
        free.push(f);
        agents.extend(b.agents);
        wires.extend(b.wires);
    }
    let mut rename: Vec<(Label, Label)> = Vec::new();
    for g in 1..k {
        for _ in 0..rng.gen_range(0..=2) {
            let h = rng.gen_range(0..g);
            let (Some(x), Some(y)) = (free[g].pop(), free[h].pop()) else {
                continue;
            };
            if rng.gen_bool(0.3) {
                wires.push(Wire(x, y));
            } else {
                rename.push((x, y));
            }
        }
    }
    let mut out = Binet::from_parts(agents, wires).expect("gadget arities agree");
    out.relabel(|l| {
        if let Some((_, to)) = rename.iter().find(|(from, _)| from == l) {
            *l = to.clone();
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_binets_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let b = random_binet(&mut rng, &BinetConfig::default());
            assert!(b.validate().is_valid(), "{b:?}");
            let m = m_configuration(&mut rng);
            assert!(m.validate().is_valid(), "{m:?}");
            let r = multi_redex(&mut rng);
            assert!(r.validate().is_valid(), "{r:?}");
        }
    }

    #[test]
    fn generated_terms_compile() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let t = rho_term(&mut rng, 4);
            let b = crate::rho::compile_rho(&t).unwrap_or_else(|e| panic!("{t}: {e}"));
            assert_eq!(b.interface().unwrap().len(), 1, "{t}");
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_binet(&mut ChaCha8Rng::seed_from_u64(3), &BinetConfig::default());
        let b = random_binet(&mut ChaCha8Rng::seed_from_u64(3), &BinetConfig::default());
        assert_eq!(a, b);
    }
}
