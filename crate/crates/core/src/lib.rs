//! Bigraphical nets: interaction nets with nesting, cross-boundary edges,
//! inactive rewriting and a four-phase reduction engine.
//!
//! ```
//! use binet::{compile_rho, iso, parse_binet, parse_rho, reduce, rho_rules, Limits, Strategy};
//!
//! let net = compile_rho(&parse_rho("(x -> x) H").unwrap()).unwrap();
//! let trace = reduce(&net, &rho_rules(), Strategy::deterministic(), Limits::default()).unwrap();
//! assert!(iso(trace.final_binet(), &parse_binet("H^r()").unwrap()));
//! ```

pub mod corpus;
pub mod engine;
pub mod gen;
pub mod net;
pub mod oracle;
pub mod rho;
pub mod rules;
pub mod syntax;

pub use engine::{
    collect, prioritise, reduce, rewrite_pass, tidy, Candidates, Limits, ReductionTrace, SafeSet,
    Strategy, StrategyKind, Termination,
};
pub use net::{iso, Agent, Arity, Binet, Label, Signature, Symbol, ValidationReport, Wire};
pub use rho::{compile_rho, parse_rho, rho_rules, rho_rules_naive, RhoTerm};
pub use rules::{check_ruleset, LabelAllocator, Rule, RuleReport, RuleSet};
pub use syntax::{parse_binet, parse_rules, print_binet, SyntaxError};
