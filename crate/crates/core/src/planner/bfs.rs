//! Uninformed breadth-first search over the full state space. Slow and
//! simple on purpose: it is the reference the informed planners are
//! checked against.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use super::{PlannerError, PlannerResult, Verdict};
use crate::task::{ActionId, Plan, PlanningTask, State};

pub const DEFAULT_ORACLE_FLUENT_BOUND: usize = 20;

pub fn bfs_oracle(task: &PlanningTask) -> Result<PlannerResult, PlannerError> {
    bfs_oracle_bounded(task, DEFAULT_ORACLE_FLUENT_BOUND)
}

pub fn bfs_oracle_bounded(task: &PlanningTask, fluent_bound: usize) -> Result<PlannerResult, PlannerError> {
    if task.fluent_count() > fluent_bound {
        return Err(PlannerError::OracleBound {
            fluents: task.fluent_count(),
            bound: fluent_bound,
        });
    }
    let start = Instant::now();
    let mut parent: HashMap<State, Option<(State, ActionId)>> = HashMap::new();
    parent.insert(task.init.clone(), None);
    let mut queue = VecDeque::from([task.init.clone()]);
    let mut expanded = 0;
    while let Some(s) = queue.pop_front() {
        if task.goal.is_subset(&s) {
            let mut steps = Vec::new();
            let mut cur = s;
            while let Some(Some((prev, a))) = parent.get(&cur) {
                steps.push(*a);
                cur = prev.clone();
            }
            steps.reverse();
            return Ok(PlannerResult {
                verdict: Verdict::Solved(Plan(steps)),
                expanded,
                generated: parent.len(),
                wall_time: start.elapsed(),
            });
        }
        expanded += 1;
        for a in &task.domain.actions {
            if a.is_applicable(&s) {
                let next = a.successor(&s);
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((s.clone(), a.id)));
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(PlannerResult {
        verdict: Verdict::Unsolvable,
        expanded,
        generated: parent.len(),
        wall_time: start.elapsed(),
    })
}
