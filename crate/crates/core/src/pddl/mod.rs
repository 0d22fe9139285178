//! Typed STRIPS dialect with negative preconditions, conditional effects,
//! static equality and conjunctive derived predicates.
//!
//! Lifted text is parsed into [`DomainAst`] / [`ProblemAst`], grounded into
//! [`crate::model`] structures, and ground problems can be written back out as
//! parameterless PDDL for external planners.

mod ast;
mod emit;
mod ground;
mod parse;
mod sexpr;

use thiserror::Error;

pub use ast::*;
pub use emit::{emit, emit_domain, emit_generalized, emit_problem, isomorphic, parse_plan, EmittedPddl, UNIT_OBJECT};
pub use ground::{ground, ground_generalized};
pub use parse::{check_problem, parse_domain, parse_problem, SUPPORTED_REQUIREMENTS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PddlError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported requirement {0}")]
    UnsupportedRequirement(String),
    #[error("{0}")]
    Semantic(String),
    #[error("grounding failed: {0}")]
    Ground(String),
    #[error("cannot emit: {0}")]
    Emit(String),
    #[error("plan line {line}: unknown action {name}")]
    UnknownAction { line: usize, name: String },
}
