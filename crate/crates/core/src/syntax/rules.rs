use super::lexer::Tok;
use super::parser::Parser;
use super::SyntaxError;
use crate::net::Symbol;
use crate::rules::{
    check_rule, AgentPattern, AgentTemplate, ChildrenPattern, Generator, GeneratorKind, Pattern,
    PortSlot, Rule, RuleKind, RuleSet, RuleViolation, SymbolPattern, Template, TemplateItem,
};

fn is_upper(name: &str) -> bool {
    name.chars().next().is_some_and(char::is_uppercase)
}

fn symbol_pattern(p: &mut Parser) -> Result<SymbolPattern, SyntaxError> {
    if let Tok::SymVar(v) = p.peek().clone() {
        p.bump();
        return Ok(match v.split_once('_') {
            Some((var, suffix)) if !var.is_empty() && !suffix.is_empty() => {
                SymbolPattern::Derived {
                    var: var.to_string(),
                    suffix: suffix.to_string(),
                }
            }
            _ => SymbolPattern::Var(v),
        });
    }
    Ok(SymbolPattern::Concrete(Symbol::new(p.symbol()?)))
}

fn slot(p: &mut Parser) -> Result<PortSlot, SyntaxError> {
    let names = p.names()?;
    match names.as_slice() {
        [(n, _)] if is_upper(n) => Ok(PortSlot::Vector(n.clone())),
        _ => {
            if let Some((n, (line, col))) = names.iter().find(|(n, _)| is_upper(n)) {
                return Err(SyntaxError::parse(
                    *line,
                    *col,
                    format!("vector variable `{n}` must fill its slot alone"),
                    &["label variable"],
                ));
            }
            Ok(PortSlot::Labels(
                names.into_iter().map(|(n, _)| n).collect(),
            ))
        }
    }
}

fn lower(p: &mut Parser, what: &str) -> Result<String, SyntaxError> {
    let (line, col) = p.here();
    let name = p.ident(what)?;
    if is_upper(&name) {
        return Err(SyntaxError::parse(
            line,
            col,
            format!("`{name}` is not a label variable"),
            &[what],
        ));
    }
    Ok(name)
}

fn agent_pattern(p: &mut Parser) -> Result<AgentPattern, SyntaxError> {
    let symbol = symbol_pattern(p)?;
    p.expect(Tok::Caret)?;
    let principal = lower(p, "principal label")?;
    p.expect(Tok::LParen)?;
    let external = slot(p)?;
    let mut internal = PortSlot::empty();
    let mut children = ChildrenPattern::Empty;
    if p.eat(&Tok::Pipe) {
        internal = slot(p)?;
        if p.eat(&Tok::Pipe) {
            match p.peek().clone() {
                Tok::RParen => {}
                Tok::Ident(x) if is_upper(&x) && *p.peek_at(1) != Tok::Caret => {
                    p.bump();
                    children = ChildrenPattern::Subnet(x);
                }
                _ => {
                    let mut kids = vec![agent_pattern(p)?];
                    while p.eat(&Tok::Comma) {
                        kids.push(agent_pattern(p)?);
                    }
                    children = ChildrenPattern::Agents(kids);
                }
            }
        }
    }
    p.expect(Tok::RParen)?;
    Ok(AgentPattern {
        symbol,
        principal,
        external,
        internal,
        children,
    })
}

fn at_priority(p: &Parser) -> bool {
    *p.peek() == Tok::At && *p.peek_at(1) == Tok::Ident("priority".into())
}

/// Items up to the end of the enclosing list.
fn items(p: &mut Parser, out: &mut Vec<TemplateItem>) -> Result<(), SyntaxError> {
    if matches!(p.peek(), Tok::Sep | Tok::Eof | Tok::RParen) || at_priority(p) {
        return Ok(());
    }
    loop {
        if *p.peek() == Tok::Ident("foreach".into()) && !p.at_agent() {
            out.push(TemplateItem::Foreach(generator(p)?));
            return Ok(());
        }
        out.push(item(p)?);
        if !p.eat(&Tok::Comma) {
            return Ok(());
        }
    }
}

fn generator(p: &mut Parser) -> Result<Generator, SyntaxError> {
    p.bump();
    let var = lower(p, "loop variable")?;
    let kind = match p.peek().clone() {
        Tok::Ident(s) if s == "in" => {
            p.bump();
            GeneratorKind::Interface
        }
        Tok::Ident(s) if s == "unique" => {
            p.bump();
            p.expect(Tok::Dash)?;
            if p.ident("`in`")? != "in" {
                return Err(p.error(&["`unique-in`"]));
            }
            GeneratorKind::Unique
        }
        _ => return Err(p.error(&["`in`", "`unique-in`"])),
    };
    let set = p.ident("`I` or `L`")?;
    let want = match kind {
        GeneratorKind::Interface => "I",
        GeneratorKind::Unique => "L",
    };
    if set != want {
        return Err(p.error(&[&format!("`{want}`")]));
    }
    p.expect(Tok::LParen)?;
    let subnet = p.ident("subnet variable")?;
    p.expect(Tok::RParen)?;
    p.expect(Tok::Colon)?;
    let mut body = Vec::new();
    items(p, &mut body)?;
    if body.is_empty() {
        return Err(p.error(&["generator body"]));
    }
    Ok(Generator {
        kind,
        var,
        subnet,
        body,
    })
}

fn item(p: &mut Parser) -> Result<TemplateItem, SyntaxError> {
    if p.at_agent() {
        let symbol = symbol_pattern(p)?;
        p.expect(Tok::Caret)?;
        let principal = lower(p, "principal label")?;
        p.expect(Tok::LParen)?;
        let external = slot(p)?;
        let mut internal = PortSlot::empty();
        let mut children = Vec::new();
        if p.eat(&Tok::Pipe) {
            internal = slot(p)?;
            if p.eat(&Tok::Pipe) {
                items(p, &mut children)?;
            }
        }
        p.expect(Tok::RParen)?;
        return Ok(TemplateItem::Agent(AgentTemplate {
            symbol,
            principal,
            external,
            internal,
            children,
        }));
    }
    match p.peek().clone() {
        Tok::Ident(x) if is_upper(&x) => {
            p.bump();
            Ok(TemplateItem::Splice(x))
        }
        Tok::Ident(_) => {
            let a = lower(p, "label")?;
            p.expect(Tok::Dash)?;
            let b = lower(p, "label")?;
            Ok(TemplateItem::Wire(a, b))
        }
        _ => Err(p.error(&["agent", "wire", "subnet variable", "`foreach`"])),
    }
}

fn rule(p: &mut Parser, default_id: String) -> Result<Rule, SyntaxError> {
    let id = match (p.peek().clone(), p.peek_at(1)) {
        (Tok::Ident(name), Tok::Colon) => {
            p.bump();
            p.bump();
            name
        }
        _ => default_id,
    };
    let mut agents = vec![agent_pattern(p)?];
    while p.eat(&Tok::Comma) {
        agents.push(agent_pattern(p)?);
    }
    let kind = match p.bump() {
        Tok::FatArrow => RuleKind::Active,
        Tok::FatArrowInactive => RuleKind::Inactive,
        _ => {
            p.pos_back();
            return Err(p.error(&["`,`", "`=>`", "`=>inactive`"]));
        }
    };
    if kind == RuleKind::Active && agents.len() != 2 {
        let (line, col) = p.here();
        return Err(SyntaxError::parse(
            line,
            col,
            "an active rule needs exactly two agents on its left-hand side",
            &["`=>inactive`"],
        ));
    }
    let mut template = Template::default();
    items(p, &mut template.items)?;
    let mut priority = None;
    if at_priority(p) {
        p.bump();
        p.bump();
        let neg = p.eat(&Tok::Dash);
        match p.bump() {
            Tok::Int(n) => priority = Some(if neg { -n } else { n }),
            _ => {
                p.pos_back();
                return Err(p.error(&["integer"]));
            }
        }
    }
    Ok(Rule {
        id,
        pattern: Pattern { kind, agents },
        template,
        priority,
    })
}

/// Parses a `.rules` document. Unbound right-hand metavariables and
/// metavariables reused with different kinds are rejected here; the
/// remaining checks are left to [`crate::rules::check_ruleset`].
pub fn parse_rules(src: &str) -> Result<RuleSet, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut set = RuleSet::default();
    loop {
        p.skip_seps();
        if *p.peek() == Tok::Eof {
            break;
        }
        if p.at_sig() {
            p.sig(&mut set.signature)?;
        } else {
            let (line, col) = p.here();
            let mut r = rule(&mut p, format!("r{}", set.rules.len() + 1))?;
            while set.get(&r.id).is_some() {
                r.id.push('\'');
            }
            if let Some(violation) = check_rule(&r).into_iter().find(|v| {
                matches!(
                    v,
                    RuleViolation::UnboundVariable { .. }
                        | RuleViolation::MetavariableConflict { .. }
                )
            }) {
                return Err(SyntaxError::Rule {
                    line,
                    col,
                    violation,
                });
            }
            set.rules.push(r);
        }
        match p.peek() {
            Tok::Sep => {
                p.bump();
            }
            Tok::Eof => {}
            _ => return Err(p.error(&["end of line", "`,`", "`@priority`"])),
        }
    }
    Ok(set)
}

fn fmt_slot(s: &PortSlot) -> String {
    match s {
        PortSlot::Labels(ls) => ls.join(", "),
        PortSlot::Vector(v) => v.clone(),
    }
}

fn fmt_head(
    symbol: &SymbolPattern,
    principal: &str,
    ext: &PortSlot,
    int: &PortSlot,
    kids: Option<String>,
) -> String {
    let mut out = format!("{symbol}^{principal}({}", fmt_slot(ext));
    if !int.is_empty() || kids.is_some() {
        out.push_str(" | ");
        out.push_str(&fmt_slot(int));
        if let Some(k) = kids {
            out.push_str(" | ");
            out.push_str(&k);
        }
    }
    out.push(')');
    out
}

fn fmt_pattern(a: &AgentPattern) -> String {
    let kids = match &a.children {
        ChildrenPattern::Empty => None,
        ChildrenPattern::Subnet(x) => Some(x.clone()),
        ChildrenPattern::Agents(ps) => {
            Some(ps.iter().map(fmt_pattern).collect::<Vec<_>>().join(", "))
        }
    };
    fmt_head(&a.symbol, &a.principal, &a.external, &a.internal, kids)
}

fn fmt_items(items: &[TemplateItem]) -> String {
    // generators swallow the rest of their list, so they go last
    let (gens, plain): (Vec<_>, Vec<_>) = items
        .iter()
        .partition(|i| matches!(i, TemplateItem::Foreach(_)));
    let mut parts: Vec<String> = plain
        .into_iter()
        .map(|i| match i {
            TemplateItem::Agent(t) => {
                let kids = (!t.children.is_empty()).then(|| fmt_items(&t.children));
                fmt_head(&t.symbol, &t.principal, &t.external, &t.internal, kids)
            }
            TemplateItem::Wire(a, b) => format!("{a} - {b}"),
            TemplateItem::Splice(x) => x.clone(),
            TemplateItem::Foreach(_) => unreachable!(),
        })
        .collect();
    // only one generator per list can be expressed in text
    for g in gens {
        if let TemplateItem::Foreach(g) = g {
            let head = match g.kind {
                GeneratorKind::Interface => format!("foreach {} in I({})", g.var, g.subnet),
                GeneratorKind::Unique => format!("foreach {} unique-in L({})", g.var, g.subnet),
            };
            parts.push(format!("{head}: {}", fmt_items(&g.body)));
        }
    }
    parts.join(", ")
}

/// Renders a rule in the `.rules` syntax.
pub fn print_rule(rule: &Rule) -> String {
    let lhs: Vec<String> = rule.pattern.agents.iter().map(fmt_pattern).collect();
    let arrow = match rule.kind() {
        RuleKind::Active => "=>",
        RuleKind::Inactive => "=>inactive",
    };
    let mut out = format!("{}: {} {arrow}", rule.id, lhs.join(", "));
    let rhs = fmt_items(&rule.template.items);
    if !rhs.is_empty() {
        out.push(' ');
        out.push_str(&rhs);
    }
    if let Some(n) = rule.priority {
        out.push_str(&format!(" @priority {n}"));
    }
    out
}
