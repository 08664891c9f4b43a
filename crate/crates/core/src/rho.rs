//! A small rho-calculus frontend: terms with pattern abstraction, their
//! compilation to binets, and the rule library that evaluates them.
//!
//! Patterns are a single variable or a nullary constructor. Variables are
//! linear: bound at most once and used at most once.

use std::collections::HashMap;
use std::fmt;

use crate::corpus;
use crate::net::{Agent, Binet, Label};
use crate::rules::RuleSet;
use crate::syntax::parse_rules;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RhoTerm {
    Variable(String),
    Constructor(String),
    Application(Box<RhoTerm>, Box<RhoTerm>),
    Abstraction(Box<RhoTerm>, Box<RhoTerm>),
}

impl RhoTerm {
    pub fn var(name: &str) -> Self {
        RhoTerm::Variable(name.into())
    }

    pub fn cons(name: &str) -> Self {
        RhoTerm::Constructor(name.into())
    }

    pub fn app(f: RhoTerm, a: RhoTerm) -> Self {
        RhoTerm::Application(Box::new(f), Box::new(a))
    }

    pub fn abs(p: RhoTerm, b: RhoTerm) -> Self {
        RhoTerm::Abstraction(Box::new(p), Box::new(b))
    }
}

impl fmt::Display for RhoTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoTerm::Variable(x) | RhoTerm::Constructor(x) => f.write_str(x),
            RhoTerm::Application(a, b) => {
                match **a {
                    RhoTerm::Abstraction(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                match **b {
                    RhoTerm::Application(..) | RhoTerm::Abstraction(..) => write!(f, " ({b})"),
                    _ => write!(f, " {b}"),
                }
            }
            RhoTerm::Abstraction(p, b) => match **p {
                RhoTerm::Abstraction(..) => write!(f, "({p}) -> {b}"),
                _ => write!(f, "{p} -> {b}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RhoError {
    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("variable `{0}` is not bound by any enclosing pattern")]
    Unbound(String),
    #[error("variable `{0}` is used more than once")]
    NonLinear(String),
    #[error("unsupported pattern `{0}`: patterns are a variable or a nullary constructor")]
    UnsupportedPattern(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Arrow,
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, RhoError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut it = src.chars().peekable();
    while let Some(c) = it.next() {
        let (l, k) = (line, col);
        col += 1;
        match c {
            '\n' => {
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while it.peek().is_some_and(|c| *c != '\n') {
                    it.next();
                }
            }
            '(' => out.push((Tok::LParen, l, k)),
            ')' => out.push((Tok::RParen, l, k)),
            '→' => out.push((Tok::Arrow, l, k)),
            '-' if it.peek() == Some(&'>') => {
                it.next();
                col += 1;
                out.push((Tok::Arrow, l, k));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut name = c.to_string();
                while let Some(&d) = it.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '\'' {
                        name.push(d);
                        it.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push((Tok::Name(name), l, k));
            }
            other => {
                return Err(RhoError::Parse {
                    line: l,
                    col: k,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn fail(&self, expected: &str) -> RhoError {
        let (tok, line, col) = &self.toks[self.pos];
        let found = match tok {
            Tok::Name(n) => format!("`{n}`"),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        };
        RhoError::Parse {
            line: *line,
            col: *col,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn term(&mut self) -> Result<RhoTerm, RhoError> {
        let lhs = self.app()?;
        if *self.peek() == Tok::Arrow {
            self.pos += 1;
            let body = self.term()?;
            return Ok(RhoTerm::abs(lhs, body));
        }
        Ok(lhs)
    }

    fn app(&mut self) -> Result<RhoTerm, RhoError> {
        let mut t = self.atom()?;
        while matches!(self.peek(), Tok::Name(_) | Tok::LParen) {
            let a = self.atom()?;
            t = RhoTerm::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<RhoTerm, RhoError> {
        match self.peek().clone() {
            Tok::Name(n) => {
                self.pos += 1;
                Ok(if n.chars().next().is_some_and(char::is_uppercase) {
                    RhoTerm::Constructor(n)
                } else {
                    RhoTerm::Variable(n)
                })
            }
            Tok::LParen => {
                self.pos += 1;
                let t = self.term()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.fail("`)`"));
                }
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.fail("a term")),
        }
    }
}

/// Parses `P -> T`, juxtaposition and parentheses. Application binds
/// tighter and associates left; `->` associates right. Names starting with
/// an uppercase letter are constructors.
pub fn parse_rho(src: &str) -> Result<RhoTerm, RhoError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let t = p.term()?;
    if *p.peek() != Tok::End {
        return Err(p.fail("end of input"));
    }
    Ok(t)
}

struct Compiler {
    next: usize,
    agents: Vec<Agent>,
    /// variable -> (pattern port label, used)
    scope: HashMap<String, (Label, bool)>,
}

impl Compiler {
    fn fresh(&mut self) -> Label {
        let n = self.next;
        self.next += 1;
        let letter = (b'a' + (n % 26) as u8) as char;
        Label::new(if n < 26 {
            letter.to_string()
        } else {
            format!("{letter}{}", n / 26)
        })
    }

    /// Emits the agents for `t` and returns the label of its root port.
    fn term(&mut self, t: &RhoTerm) -> Result<Label, RhoError> {
        match t {
            RhoTerm::Constructor(c) => {
                let l = self.fresh();
                self.agents.push(Agent::new(c.as_str(), l.clone()));
                Ok(l)
            }
            RhoTerm::Variable(x) => match self.scope.get_mut(x) {
                None => Err(RhoError::Unbound(x.clone())),
                Some((_, true)) => Err(RhoError::NonLinear(x.clone())),
                Some((l, used)) => {
                    *used = true;
                    Ok(l.clone())
                }
            },
            RhoTerm::Application(f, a) => {
                let fl = self.term(f)?;
                let al = self.term(a)?;
                let r = self.fresh();
                self.agents
                    .push(Agent::new("App", fl).with_external([r.clone(), al]));
                Ok(r)
            }
            RhoTerm::Abstraction(p, b) => {
                let l = self.fresh();
                let port = self.fresh();
                let mut children = Vec::new();
                let mut bound = None;
                match &**p {
                    RhoTerm::Variable(x) => {
                        let prev = self.scope.insert(x.clone(), (port.clone(), false));
                        bound = Some((x.clone(), prev));
                    }
                    RhoTerm::Constructor(c) => children.push(Agent::new(c.as_str(), port.clone())),
                    other => return Err(RhoError::UnsupportedPattern(other.to_string())),
                }
                let body = self.term(b)?;
                if let Some((x, prev)) = bound {
                    let (_, used) = self.scope.remove(&x).expect("bound above");
                    if !used {
                        self.agents.push(Agent::new("eps", port.clone()));
                    }
                    if let Some(prev) = prev {
                        self.scope.insert(x, prev);
                    }
                }
                self.agents.push(
                    Agent::new("Abs", l.clone())
                        .with_external([body])
                        .with_internal([port])
                        .with_children(children),
                );
                Ok(l)
            }
        }
    }
}

/// Compiles a closed term. The result has exactly one free port, the root.
pub fn compile_rho(t: &RhoTerm) -> Result<Binet, RhoError> {
    let mut c = Compiler {
        next: 0,
        agents: Vec::new(),
        scope: HashMap::new(),
    };
    c.term(t)?;
    let mut binet = Binet::from_parts(c.agents, Vec::new()).expect("compiled arities are fixed");
    binet
        .signature
        .merge(&rho_rules().signature)
        .expect("library signature agrees");
    Ok(binet)
}

/// The bundled library with the optimized erasure of M.
pub fn rho_rules() -> RuleSet {
    parse_rules(corpus::RHO_RULES).expect("bundled rho.rules parses")
}

/// The library with the naive erasure of M, which keeps the subnet and
/// cuts each of its interface ports.
pub fn rho_rules_naive() -> RuleSet {
    let mut rs = rho_rules();
    for r in parse_rules(corpus::EPS_NAIVE_RULES)
        .expect("bundled eps_naive.rules parses")
        .rules
    {
        rs.replace(r);
    }
    rs
}

/// The unary-arithmetic rules.
pub fn nat_rules() -> RuleSet {
    parse_rules(corpus::NAT_RULES).expect("bundled nat.rules parses")
}
