//! Text formats for binets (`.binet`) and rules (`.rules`).
//!
//! The grammar is documented in `docs/grammar.md`. ASCII aliases: `->` is
//! `Abs`, `@` is `App`, `ε` is `eps`, `⊥` is `bot`.

mod binet;
mod lexer;
mod parser;
mod rules;

pub use binet::{parse_binet, print_binet};
pub use rules::{parse_rules, print_rule};

use crate::net::{Arity, ValidationReport};
use crate::rules::RuleViolation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: {message}{}", expected_suffix(expected))]
    Parse {
        line: usize,
        col: usize,
        message: String,
        expected: Vec<String>,
    },
    #[error("{line}:{col}: `{symbol}` has arity {declared} but is used with {found}")]
    Arity {
        line: usize,
        col: usize,
        symbol: String,
        declared: Arity,
        found: Arity,
    },
    #[error("invalid binet: {0}")]
    Invalid(ValidationReport),
    #[error("{line}:{col}: {violation}")]
    Rule {
        line: usize,
        col: usize,
        violation: RuleViolation,
    },
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

impl SyntaxError {
    pub(crate) fn parse(
        line: usize,
        col: usize,
        message: impl Into<String>,
        expected: &[&str],
    ) -> Self {
        SyntaxError::Parse {
            line,
            col,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Line and column, when the error has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            SyntaxError::Parse { line, col, .. }
            | SyntaxError::Arity { line, col, .. }
            | SyntaxError::Rule { line, col, .. } => Some((*line, *col)),
            SyntaxError::Invalid(_) => None,
        }
    }
}

/// Canonical name for a symbol written with an alias.
pub fn canonical_symbol(name: &str) -> &str {
    match name {
        "->" | "→" => "Abs",
        "@" => "App",
        "ε" => "eps",
        "⊥" => "bot",
        other => other,
    }
}
