//! PDDL frontend for the `:strips` + `:typing` fragment: parsing, grounding,
//! plan files and complement-fluent compilation.

mod ast;
mod complement;
mod ground;
mod parser;
mod plan_file;
pub mod sexpr;
mod writer;

pub use ast::*;
pub use complement::{compile_complements, complement_id, COMPLEMENT_PREFIX};
pub use ground::{
    ground, ground_with, parse_atom_text, FluentTable, GroundingOptions, GroundingResult, GroundingStats,
    DEFAULT_GROUNDING_CAP,
};
pub use parser::{parse_domain, parse_problem};
pub use plan_file::{format_plan, parse_plan};
pub use writer::{write_grounded_domain, write_grounded_problem};

use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unknown requirement {flag} at {line}:{col}")]
    UnknownRequirement { flag: String, line: usize, col: usize },
    #[error("unsupported construct at {line}:{col}: {construct}")]
    Unsupported { construct: String, line: usize, col: usize },
    #[error("undeclared predicate {name} at {line}:{col}")]
    UndeclaredPredicate { name: String, line: usize, col: usize },
    #[error("undeclared type {name} at {line}:{col}")]
    UndeclaredType { name: String, line: usize, col: usize },
    #[error("unknown object {name} at {line}:{col}")]
    UnknownObject { name: String, line: usize, col: usize },
    #[error("arity mismatch for {predicate} at {line}:{col}: expected {expected}, found {found}")]
    ArityMismatch { predicate: String, expected: usize, found: usize, line: usize, col: usize },
    #[error("type mismatch for {term} at {line}:{col}: expected {expected}, found {found}")]
    TypeMismatch { term: String, expected: String, found: String, line: usize, col: usize },
    #[error("problem is for domain {found}, expected {expected}")]
    DomainMismatch { expected: String, found: String },
    #[error("grounding limit exceeded: {count} {what} (cap {cap})")]
    ResourceLimit { what: String, count: usize, cap: usize },
    #[error("cannot resolve plan step {step} on line {line}: {reason}")]
    PlanResolution { step: String, line: usize, reason: String },
    #[error("atom {atom} is not in the fluent universe")]
    UnknownAtom { atom: String },
    #[error("complement target {fluent} out of range ({fluent_count} fluents)")]
    ComplementTarget { fluent: usize, fluent_count: usize },
    #[error("complement atom {atom} already exists")]
    ComplementNameClash { atom: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl PddlError {
    /// Source position, when the error has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        use PddlError::*;
        match self {
            Syntax { line, col, .. }
            | UnknownRequirement { line, col, .. }
            | Unsupported { line, col, .. }
            | UndeclaredPredicate { line, col, .. }
            | UndeclaredType { line, col, .. }
            | UnknownObject { line, col, .. }
            | ArityMismatch { line, col, .. }
            | TypeMismatch { line, col, .. } => Some((*line, *col)),
            PlanResolution { line, .. } => Some((*line, 1)),
            _ => None,
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, PddlError> {
    std::fs::read_to_string(path).map_err(|e| PddlError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Reads and grounds a domain/problem pair from disk.
pub fn load_task(domain: &Path, problem: &Path) -> Result<GroundingResult, PddlError> {
    load_task_with(domain, problem, GroundingOptions::default())
}

pub fn load_task_with(domain: &Path, problem: &Path, options: GroundingOptions) -> Result<GroundingResult, PddlError> {
    let d = parse_domain(&read_text(domain)?)?;
    let p = parse_problem(&read_text(problem)?, &d)?;
    ground_with(&d, &p, options)
}
