use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub const ROOT_TYPE: &str = "object";

/// Type declarations as a child → parent map rooted at `object`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeHierarchy {
    parents: BTreeMap<String, String>,
}

impl TypeHierarchy {
    pub fn declare(&mut self, ty: &str, parent: &str) {
        if ty != ROOT_TYPE {
            self.parents.insert(ty.to_string(), parent.to_string());
        }
    }

    pub fn is_declared(&self, ty: &str) -> bool {
        ty == ROOT_TYPE || self.parents.contains_key(ty)
    }

    /// True when `ty` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        let mut cur = ty;
        // Cycles are cut off by the step bound.
        for _ in 0..=self.parents.len() + 1 {
            if cur == ancestor {
                return true;
            }
            match self.parents.get(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }

    /// Declared types other than the root, sorted.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parents.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.parents.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Index into the owning schema's parameter list.
    Param(usize),
    Constant(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSchema {
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedName>,
    pub pre: Vec<AtomSchema>,
    pub add: Vec<AtomSchema>,
    pub del: Vec<AtomSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: TypeHierarchy,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateSchema>,
    pub action_schemas: Vec<ActionSchema>,
}

impl DomainAst {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn schema(&self, name: &str) -> Option<&ActionSchema> {
        self.action_schemas.iter().find(|a| a.name == name)
    }
}

/// A ground atom such as `(on a b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemAst {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundAtom>,
}
