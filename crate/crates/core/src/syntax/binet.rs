use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::lexer::Tok;
use super::parser::Parser;
use super::SyntaxError;
use crate::net::{Agent, Arity, Binet, Label, Signature, Symbol, Wire};

struct Use {
    symbol: Symbol,
    arity: Arity,
    pos: (usize, usize),
}

fn label(p: &mut Parser) -> Result<Label, SyntaxError> {
    let (line, col) = p.here();
    let name = p.ident("label")?;
    check_label(&name, (line, col))?;
    Ok(Label::new(name))
}

fn check_label(name: &str, (line, col): (usize, usize)) -> Result<(), SyntaxError> {
    if name.starts_with(crate::net::RESERVED_PREFIX) {
        return Err(SyntaxError::parse(
            line,
            col,
            format!("label `{name}` uses the reserved prefix"),
            &["label"],
        ));
    }
    Ok(())
}

fn labels(p: &mut Parser) -> Result<Vec<Label>, SyntaxError> {
    p.names()?
        .into_iter()
        .map(|(n, pos)| check_label(&n, pos).map(|_| Label::new(n)))
        .collect()
}

fn agent(p: &mut Parser, uses: &mut Vec<Use>) -> Result<Agent, SyntaxError> {
    let pos = p.here();
    let symbol = Symbol::new(p.symbol()?);
    p.expect(Tok::Caret)?;
    let principal = label(p)?;
    p.expect(Tok::LParen)?;
    let external = labels(p)?;
    let mut internal = Vec::new();
    let mut children = Vec::new();
    if p.eat(&Tok::Pipe) {
        internal = labels(p)?;
        if p.eat(&Tok::Pipe) && *p.peek() != Tok::RParen {
            loop {
                children.push(agent(p, uses)?);
                if !p.eat(&Tok::Comma) {
                    break;
                }
            }
        }
    }
    p.expect(Tok::RParen)?;
    uses.push(Use {
        symbol: symbol.clone(),
        arity: Arity::new(internal.len(), external.len()),
        pos,
    });
    Ok(Agent {
        symbol,
        principal,
        external,
        internal,
        children,
    })
}

/// Parses a `.binet` document.
pub fn parse_binet(src: &str) -> Result<Binet, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut signature = Signature::new();
    let mut uses = Vec::new();
    let mut agents = Vec::new();
    let mut wires = Vec::new();
    loop {
        p.skip_seps();
        if *p.peek() == Tok::Eof {
            break;
        }
        if p.at_sig() {
            p.sig(&mut signature)?;
        } else if p.at_agent() {
            agents.push(agent(&mut p, &mut uses)?);
        } else if matches!(p.peek(), Tok::Ident(_)) && *p.peek_at(1) == Tok::Dash {
            let a = label(&mut p)?;
            p.bump();
            let b = label(&mut p)?;
            wires.push(Wire(a, b));
        } else {
            return Err(p.error(&["agent", "wire", "`sig`"]));
        }
        p.end_item()?;
    }
    for u in uses {
        if let Err(e) = signature.declare(u.symbol.clone(), u.arity) {
            return Err(SyntaxError::Arity {
                line: u.pos.0,
                col: u.pos.1,
                symbol: u.symbol.to_string(),
                declared: e.existing,
                found: u.arity,
            });
        }
    }
    let binet = Binet {
        agents,
        wires,
        signature,
    };
    let report = binet.validate();
    if report.is_valid() {
        Ok(binet)
    } else {
        Err(SyntaxError::Invalid(report))
    }
}

fn write_list(out: &mut String, labels: &[Label], names: &BTreeMap<Label, String>) {
    for (i, l) in labels.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&names[l]);
    }
}

fn format_agent(a: &Agent, names: &BTreeMap<Label, String>) -> String {
    let mut pieces = vec![String::new()];
    write_list(&mut pieces[0], &a.external, names);
    if !a.internal.is_empty() || !a.children.is_empty() {
        let mut internal = String::new();
        write_list(&mut internal, &a.internal, names);
        pieces.push(internal);
    }
    if !a.children.is_empty() {
        let mut kids: Vec<String> = a.children.iter().map(|c| format_agent(c, names)).collect();
        kids.sort();
        pieces.push(kids.join(", "));
    }
    let mut out = format!("{}^{}(", a.symbol, names[&a.principal]);
    out.push_str(&pieces[0]);
    for p in &pieces[1..] {
        out.push_str(if out.ends_with(['(', '|']) { "|" } else { " |" });
        if !p.is_empty() {
            out.push(' ');
            out.push_str(p);
        }
    }
    out.push(')');
    out
}

/// Canonical text for a binet. Reserved labels are renamed to `w1`, `w2`, ...
/// avoiding names already in use.
pub fn print_binet(binet: &Binet) -> String {
    let all = binet.labels();
    let mut taken: BTreeSet<String> = all
        .iter()
        .filter(|l| !l.is_reserved())
        .map(|l| l.as_str().to_string())
        .collect();
    let mut names = BTreeMap::new();
    let mut n = 0;
    for l in &all {
        let name = if l.is_reserved() {
            loop {
                n += 1;
                let cand = format!("w{n}");
                if taken.insert(cand.clone()) {
                    break cand;
                }
            }
        } else {
            l.as_str().to_string()
        };
        names.insert(l.clone(), name);
    }
    let mut out = String::new();
    for s in binet.signature.iter() {
        let _ = writeln!(
            out,
            "sig {}({}, {})",
            s.name, s.arity.internal, s.arity.external
        );
    }
    let mut agents: Vec<String> = binet
        .agents
        .iter()
        .map(|a| format_agent(a, &names))
        .collect();
    agents.sort();
    for a in agents {
        out.push_str(&a);
        out.push('\n');
    }
    let mut wires: Vec<(String, String)> = binet
        .wires
        .iter()
        .map(|Wire(a, b)| {
            let (a, b) = (names[a].clone(), names[b].clone());
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    wires.sort();
    for (a, b) in wires {
        let _ = writeln!(out, "{a} - {b}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::iso;

    const FIRST: &str = "
        # first binet
        Abs^x(a | b)
        eps^b()
        H^a()
        @^x(c, d)
        App^y(d, e)
        ->^y(f | g | F^g())
        I^f(), G^e()
    ";

    #[test]
    fn abbreviation_expands() {
        let b = parse_binet("M^a(c)").unwrap();
        let m = &b.agents[0];
        assert_eq!(m.symbol.as_str(), "M");
        assert_eq!(m.principal.as_str(), "a");
        assert_eq!(m.external, vec![Label::new("c")]);
        assert!(m.internal.is_empty() && m.children.is_empty());
    }

    #[test]
    fn nullary_with_declared_signature() {
        let b = parse_binet("sig eps(0, 0)\neps^b()").unwrap();
        assert_eq!(b.agents[0].arity(), Arity::new(0, 0));
        assert_eq!(b.signature.get(&Symbol::new("eps")), Some(Arity::new(0, 0)));
    }

    #[test]
    fn first_binet_parses() {
        let b = parse_binet(FIRST).unwrap();
        assert_eq!(b.agent_count(), 9);
        assert_eq!(b.agents.len(), 8);
        assert_eq!(b.interface().unwrap(), BTreeSet::from([Label::new("c")]));
        let mut found = Vec::new();
        b.walk(|_, a| found.push(a.symbol.to_string()));
        assert!(found.contains(&"Abs".to_string()) && found.contains(&"App".to_string()));
    }

    #[test]
    fn unicode_aliases() {
        let a = parse_binet("→^x(a | b)\nε^b()\n⊥^a()").unwrap();
        let b = parse_binet("Abs^x(a | b)\neps^b()\nbot^a()").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn round_trip_first() {
        let b = parse_binet(FIRST).unwrap();
        let text = print_binet(&b);
        assert!(iso(&b, &parse_binet(&text).unwrap()), "{text}");
    }

    #[test]
    fn empty_prints_empty() {
        assert_eq!(print_binet(&Binet::new()), "");
    }

    #[test]
    fn abbreviated_print() {
        let b = parse_binet("M^a(c | |)").unwrap();
        assert_eq!(print_binet(&b).lines().last(), Some("M^a(c)"));
    }

    #[test]
    fn reserved_labels_are_renamed() {
        let b = Binet::from_parts(
            vec![
                Agent::new("A", "%1").with_external(["w1"]),
                Agent::new("B", "%1"),
            ],
            vec![Wire::new("w1", "%2"), Wire::new("%2", "z")],
        )
        .unwrap();
        let text = print_binet(&b);
        assert!(!text.contains('%'));
        assert!(iso(&b, &parse_binet(&text).unwrap()));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_binet("A^a(b)\nB^b(c |").unwrap_err();
        assert_eq!(e.position().map(|p| p.0), Some(2));
        let e = parse_binet("A^%x()").unwrap_err();
        assert_eq!(e.position(), Some((1, 3)));
        let e = parse_binet("sig A(0, 1)\nA^a()").unwrap_err();
        assert!(
            matches!(
                e,
                SyntaxError::Arity {
                    line: 2,
                    col: 1,
                    ..
                }
            ),
            "{e:?}"
        );
        let e = parse_binet("A^a(), B^a(), C^a()").unwrap_err();
        assert!(matches!(e, SyntaxError::Invalid(_)));
    }
}
