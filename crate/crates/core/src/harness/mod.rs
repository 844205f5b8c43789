//! Benchmark instances from ordinary planning tasks: degrade the domain to
//! get the human's belief model, drop goal atoms to get the specification,
//! plan in the human model, then run simulated elicitation sessions and
//! summarize query counts against the naive bound.

mod config;
mod manifest;
mod report;
mod synth;
mod trials;

pub use config::ScenarioConfig;
pub use manifest::{apply_edits, diff_edits, HumanDomainSource, HumanEdit, Manifest, Scenario, Suite};
pub use report::{
    aggregate, emit_csv, emit_json, mean_std, summarize, AggregateReport, InstanceConfig, InstanceSummary, SuiteSummary,
    CSV_COLUMNS, TIME_COLUMNS,
};
pub use synth::{degrade_domain, derive_goal_spec, synthesize_human_plan, trial_rng};
pub use trials::{build_trial, run_trials, BuildError, TrialInstance, TrialResult, TrialVerdict};

use crate::alignment::InstanceError;
use crate::pddl::PddlError;
use crate::planner::Planner;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: bad JSON: {message}")]
    Json { path: String, message: String },
    #[error("cannot drop {drop} atoms from a goal of {goal}")]
    GoalDrop { drop: usize, goal: usize },
    #[error("{instance}: the true goal stayed unreachable in the human model after {attempts} degradations")]
    NoHumanPlan { instance: String, attempts: usize },
    #[error("{instance}: no trial completed")]
    ZeroCompleted { instance: String },
}

/// Loads and runs every instance of `suite`, in order.
pub fn run_suite(suite: &Suite, planner: &Planner) -> Result<AggregateReport, HarnessError> {
    let mut runs = Vec::new();
    for m in &suite.instances {
        let scenario = Scenario::from_manifest(m, &suite.config)?;
        let results = run_trials(&scenario, planner)?;
        runs.push((
            InstanceConfig {
                instance: scenario.name.clone(),
                config: scenario.config.clone(),
            },
            results,
        ));
    }
    aggregate(runs)
}
