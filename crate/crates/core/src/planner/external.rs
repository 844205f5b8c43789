//! Adapter for an external planner process: the task is written as
//! propositional PDDL, the command is run, and the plan file it leaves
//! behind is read back.

use std::process::Command;
use std::time::Instant;

use super::{PlannerError, PlannerResult, Verdict};
use crate::pddl::{sexpr, write_grounded_domain, write_grounded_problem};
use crate::task::{validate_plan, Plan, PlanningTask};

/// Exit status meaning "proved unsolvable", matching this toolkit's own
/// `plan` command.
pub const UNSOLVABLE_EXIT: i32 = 10;

/// A shell command template. `{domain}`, `{problem}` and `{plan}` are
/// replaced by temp-file paths; when none appear, the three paths are
/// appended in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalPlanner {
    pub command: String,
}

impl ExternalPlanner {
    pub fn new(command: impl Into<String>) -> Self {
        ExternalPlanner { command: command.into() }
    }

    pub fn solve(&self, task: &PlanningTask) -> Result<PlannerResult, PlannerError> {
        let start = Instant::now();
        let err = |m: String| PlannerError::External(m);
        let dir = tempfile::tempdir().map_err(|e| err(e.to_string()))?;
        let domain = dir.path().join("domain.pddl");
        let problem = dir.path().join("problem.pddl");
        let plan_path = dir.path().join("plan.txt");
        std::fs::write(&domain, write_grounded_domain(task)).map_err(|e| err(e.to_string()))?;
        std::fs::write(&problem, write_grounded_problem(task)).map_err(|e| err(e.to_string()))?;

        let (d, p, o) = (
            domain.display().to_string(),
            problem.display().to_string(),
            plan_path.display().to_string(),
        );
        let cmd = if ["{domain}", "{problem}", "{plan}"].iter().any(|t| self.command.contains(t)) {
            self.command.replace("{domain}", &d).replace("{problem}", &p).replace("{plan}", &o)
        } else {
            format!("{} {d} {p} {o}", self.command)
        };
        let output = Command::new("sh")
            .arg("-c")
            .arg(&cmd)
            .output()
            .map_err(|e| err(format!("cannot run `{cmd}`: {e}")))?;
        if output.status.code() == Some(UNSOLVABLE_EXIT) {
            return Ok(PlannerResult {
                verdict: Verdict::Unsolvable,
                expanded: 0,
                generated: 0,
                wall_time: start.elapsed(),
            });
        }
        if !output.status.success() {
            return Err(err(format!(
                "`{cmd}` exited with {}: {}",
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = std::fs::read_to_string(&plan_path).map_err(|e| err(format!("no plan file: {e}")))?;
        let plan = read_grounded_plan(&text, task)?;
        let report = validate_plan(task, &plan);
        if !report.is_valid() {
            return Err(err(format!("external plan is invalid: {:?}", report.verdict)));
        }
        Ok(PlannerResult {
            verdict: Verdict::Solved(plan),
            expanded: 0,
            generated: 0,
            wall_time: start.elapsed(),
        })
    }
}

/// Reads `(aN)` steps, or full ground-action names, back into ids.
fn read_grounded_plan(text: &str, task: &PlanningTask) -> Result<Plan, PlannerError> {
    let exprs = sexpr::parse_all(text).map_err(|e| PlannerError::External(e.to_string()))?;
    let mut steps = Vec::new();
    for e in exprs {
        let words: Vec<&str> = e.as_list().unwrap_or(&[]).iter().filter_map(|w| w.as_symbol()).collect();
        let id = match words.as_slice() {
            [w] if w.starts_with('a') && w[1..].parse::<usize>().is_ok() => w[1..].parse().unwrap(),
            _ => {
                let name = format!("({})", words.join(" "));
                task.domain
                    .action_by_name(&name)
                    .map(|a| a.id)
                    .ok_or_else(|| PlannerError::External(format!("unknown step {name}")))?
            }
        };
        if id >= task.domain.actions.len() {
            return Err(PlannerError::External(format!("action index {id} out of range")));
        }
        steps.push(id);
    }
    Ok(Plan(steps))
}
