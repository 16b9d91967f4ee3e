//! A typed lambda calculus with derivatives and integrals.
//!
//! Terms are checked against the calculus's typing rules, normalized by a
//! deterministic full-reduction strategy, and compared by interpreting normal
//! forms of base type as symbolic real expressions.

pub mod builtins;
pub mod discrete;
pub mod embed;
pub mod equality;
pub mod gen;
pub mod real;
pub mod reduce;
pub mod sexpr;
pub mod suites;
pub mod syntax;
pub mod text;
pub mod theorems;
pub mod typeck;

pub use syntax::{alpha_eq, free_vars, fresh_var, substitute, Constant, Term, Type, TypingContext};
