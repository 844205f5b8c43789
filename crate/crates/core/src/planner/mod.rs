//! Optimal planning and solvability checks over grounded tasks.
//!
//! `Unsolvable` is only ever reported after h-max proves the goal
//! unreachable or the reachable state space is exhausted. Running out of
//! budget is a [`PlannerError`], never a verdict.

mod bfs;
mod external;
mod hmax;
mod search;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

pub use bfs::{bfs_oracle, bfs_oracle_bounded, DEFAULT_ORACLE_FLUENT_BOUND};
pub use external::{ExternalPlanner, UNSOLVABLE_EXIT};
pub use hmax::{hmax, HeuristicValue, RelaxedIndex};
pub use search::{search, SearchMode};

use crate::task::{Plan, PlanningTask};

pub const DEFAULT_MAX_EXPANSIONS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Solved(Plan),
    Unsolvable,
}

#[derive(Debug, Clone)]
pub struct PlannerResult {
    pub verdict: Verdict,
    pub expanded: usize,
    pub generated: usize,
    pub wall_time: Duration,
}

impl PlannerResult {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.verdict {
            Verdict::Solved(p) => Some(p),
            Verdict::Unsolvable => None,
        }
    }

    pub fn into_plan(self) -> Option<Plan> {
        match self.verdict {
            Verdict::Solved(p) => Some(p),
            Verdict::Unsolvable => None,
        }
    }

    pub fn cost(&self) -> Option<usize> {
        self.plan().map(Plan::cost)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlannerError {
    #[error("search budget exceeded after {expanded} expansions, {generated} generated, {elapsed:?}")]
    Budget {
        expanded: usize,
        generated: usize,
        elapsed: Duration,
    },
    #[error("task has {fluents} fluents, above the brute-force bound of {bound}")]
    OracleBound { fluents: usize, bound: usize },
    #[error("external planner: {0}")]
    External(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_expansions: Option<usize>,
    pub time_limit: Option<Duration>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_expansions: Some(DEFAULT_MAX_EXPANSIONS),
            time_limit: None,
        }
    }
}

impl SearchLimits {
    pub fn unlimited() -> Self {
        SearchLimits {
            max_expansions: None,
            time_limit: None,
        }
    }
}

/// A* with h-max. Cost-optimal under unit action costs.
pub fn optimal_plan(task: &PlanningTask, limits: &SearchLimits) -> Result<PlannerResult, PlannerError> {
    search(task, SearchMode::Optimal, limits)
}

/// True iff some plan reaches the goal.
pub fn check_solvable(task: &PlanningTask, limits: &SearchLimits) -> Result<bool, PlannerError> {
    Ok(search(task, SearchMode::Satisficing, limits)?.plan().is_some())
}

/// The planner used by elicitation and the harness: search limits, an
/// optional external process, and a count of planner invocations.
#[derive(Debug, Default)]
pub struct Planner {
    pub limits: SearchLimits,
    pub external: Option<ExternalPlanner>,
    /// Use A* for solvability checks too, so returned robot plans are optimal.
    pub optimal_robot_plans: bool,
    calls: AtomicUsize,
}

impl Clone for Planner {
    fn clone(&self) -> Self {
        Planner {
            limits: self.limits,
            external: self.external.clone(),
            optimal_robot_plans: self.optimal_robot_plans,
            calls: AtomicUsize::new(0),
        }
    }
}

impl Planner {
    pub fn new(limits: SearchLimits) -> Self {
        Planner {
            limits,
            ..Default::default()
        }
    }

    pub fn with_external(mut self, external: Option<ExternalPlanner>) -> Self {
        self.external = external;
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    fn run(&self, task: &PlanningTask, mode: SearchMode) -> Result<PlannerResult, PlannerError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        match &self.external {
            Some(ext) => ext.solve(task),
            None => search(task, mode, &self.limits),
        }
    }

    /// Cost-optimal plan, or `Unsolvable`.
    pub fn optimal_plan(&self, task: &PlanningTask) -> Result<PlannerResult, PlannerError> {
        self.run(task, SearchMode::Optimal)
    }

    /// Some plan if the task is solvable. One planner call.
    pub fn find_plan(&self, task: &PlanningTask) -> Result<Option<Plan>, PlannerError> {
        let mode = if self.optimal_robot_plans {
            SearchMode::Optimal
        } else {
            SearchMode::Satisficing
        };
        Ok(self.run(task, mode)?.into_plan())
    }

    pub fn check_solvable(&self, task: &PlanningTask) -> Result<bool, PlannerError> {
        Ok(self.find_plan(task)?.is_some())
    }
}
