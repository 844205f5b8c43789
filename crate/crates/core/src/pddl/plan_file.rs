//! Plan files: one `(action obj1 ... objk)` per line, `;` comments.

use std::collections::HashMap;

use super::ground::GroundingResult;
use super::sexpr::parse_all;
use super::PddlError;
use crate::task::{DomainModel, Plan};

/// Resolves each line of a plan file to a ground action of `result`.
pub fn parse_plan(text: &str, result: &GroundingResult) -> Result<Plan, PddlError> {
    let lookup: HashMap<&str, usize> = result
        .task
        .domain
        .actions
        .iter()
        .map(|a| (a.name.as_str(), a.id))
        .collect();
    let mut plan = Vec::new();
    for e in parse_all(text)? {
        let pos = e.pos();
        let items = e.as_list().ok_or_else(|| PddlError::Syntax {
            line: pos.line,
            col: pos.col,
            message: "expected '(action args...)'".into(),
        })?;
        let mut words = Vec::with_capacity(items.len());
        for i in items {
            words.push(i.as_symbol().ok_or_else(|| PddlError::Syntax {
                line: i.pos().line,
                col: i.pos().col,
                message: "nested list in plan step".into(),
            })?);
        }
        let Some((&name, args)) = words.split_first() else {
            return Err(PddlError::Syntax {
                line: pos.line,
                col: pos.col,
                message: "empty plan step".into(),
            });
        };
        let text = format!("({})", words.join(" "));
        if let Some(&id) = lookup.get(text.as_str()) {
            plan.push(id);
            continue;
        }
        let reason = match result.schema_arity.get(name) {
            None => "no such action".to_string(),
            Some(&n) if n != args.len() => format!("expects {n} arguments, got {}", args.len()),
            Some(_) if result.pruned.contains(&text) => {
                "statically unreachable (removed during grounding)".to_string()
            }
            Some(_) => "arguments do not name a ground instance".to_string(),
        };
        return Err(PddlError::PlanResolution {
            step: text,
            line: pos.line,
            reason,
        });
    }
    Ok(Plan(plan))
}

/// Inverse of [`parse_plan`].
pub fn format_plan(plan: &Plan, domain: &DomainModel) -> String {
    plan.to_plan_text(domain)
}
