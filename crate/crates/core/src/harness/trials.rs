use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::manifest::{HumanDomainSource, Scenario};
use super::synth::{degrade_domain, derive_goal_spec, synthesize_human_plan, trial_rng};
use super::HarnessError;
use crate::alignment::{make_simulated_oracle, run_elicitation, HaglInstance, HiddenGoal, SessionVerdict};
use crate::planner::{Planner, PlannerError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialVerdict {
    PlanFound,
    NoPlan,
    ResourceError,
}

fn secs<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub instance: String,
    pub trial: usize,
    pub seed: u64,
    /// Degradations drawn before the true goal was reachable for the human.
    pub attempts: usize,
    /// `|S^H \ G^H|`; absent when the instance could not be built.
    pub baseline: Option<usize>,
    pub queries: usize,
    #[serde(serialize_with = "secs")]
    pub wall_time: Duration,
    pub verdict: TrialVerdict,
    pub planner_calls: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialResult {
    pub fn completed(&self) -> bool {
        self.verdict != TrialVerdict::ResourceError
    }
}

/// One trial's alignment instance with the hidden goal it simulates.
#[derive(Debug, Clone)]
pub struct TrialInstance {
    pub instance: HaglInstance,
    pub hidden: HiddenGoal,
    pub attempts: usize,
}

#[derive(Debug)]
pub enum BuildError {
    /// Planner ran out of budget; recorded, not fatal.
    Resource(PlannerError),
    Fatal(HarnessError),
}

impl From<HarnessError> for BuildError {
    fn from(e: HarnessError) -> Self {
        BuildError::Fatal(e)
    }
}

/// Builds the instance for trial `trial`: degrade, synthesize the human
/// plan (redrawing the degradation while the true goal is unreachable for
/// the human), then drop goal atoms. The human starts where the robot does
/// unless the scenario says otherwise.
pub fn build_trial(scenario: &Scenario, trial: usize, planner: &Planner) -> Result<TrialInstance, BuildError> {
    let cfg = &scenario.config;
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let robot = &scenario.robot.task;
    let goal = &scenario.true_goal;

    let mut found = None;
    for attempt in 1..=cfg.resample_attempts {
        let human = match &scenario.human_domain {
            HumanDomainSource::Fixed(d) => Arc::clone(d),
            HumanDomainSource::Degrade => Arc::new(degrade_domain(&robot.domain, cfg, &mut rng)),
        };
        let plan = match &scenario.human_plan {
            Some(p) => Some(p.clone()),
            None => synthesize_human_plan(&human, &scenario.human_init, goal, planner).map_err(BuildError::Resource)?,
        };
        if let Some(plan) = plan {
            found = Some((human, plan, attempt));
            break;
        }
        if matches!(scenario.human_domain, HumanDomainSource::Fixed(_)) {
            break;
        }
    }
    let Some((human, plan, attempts)) = found else {
        return Err(HarnessError::NoHumanPlan {
            instance: scenario.name.clone(),
            attempts: cfg.resample_attempts,
        }
        .into());
    };
    let goal_spec = match &scenario.goal_spec {
        Some(g) => g.clone(),
        None => derive_goal_spec(goal, cfg, &mut rng)?,
    };
    let instance = HaglInstance::new(
        Arc::clone(&robot.domain),
        robot.init.clone(),
        goal_spec,
        human,
        scenario.human_init.clone(),
        plan,
        cfg.beta,
    )
    .map_err(HarnessError::from)?;
    let hidden = HiddenGoal::new(&instance, goal.clone()).map_err(HarnessError::from)?;
    Ok(TrialInstance {
        instance,
        hidden,
        attempts,
    })
}

fn run_one(scenario: &Scenario, trial: usize, template: &Planner) -> Result<TrialResult, HarnessError> {
    let planner = template.clone();
    let mut result = TrialResult {
        instance: scenario.name.clone(),
        trial,
        seed: scenario.config.seed,
        attempts: 0,
        baseline: None,
        queries: 0,
        wall_time: Duration::ZERO,
        verdict: TrialVerdict::ResourceError,
        planner_calls: 0,
        error: None,
    };
    let built = match build_trial(scenario, trial, &planner) {
        Ok(b) => b,
        Err(BuildError::Resource(e)) => {
            result.error = Some(e.to_string());
            result.planner_calls = planner.calls();
            return Ok(result);
        }
        Err(BuildError::Fatal(e)) => return Err(e),
    };
    result.attempts = built.attempts;
    result.baseline = Some(built.instance.baseline());
    planner.reset_calls();
    let start = Instant::now();
    let outcome = run_elicitation(&built.instance, &mut make_simulated_oracle(built.hidden), &planner);
    result.wall_time = start.elapsed();
    result.planner_calls = planner.calls();
    match outcome {
        Ok(o) => {
            result.queries = o.query_count;
            result.verdict = match o.verdict {
                SessionVerdict::Plan(_) => TrialVerdict::PlanFound,
                SessionVerdict::NoPlanExists => TrialVerdict::NoPlan,
            };
        }
        Err(e) => {
            result.queries = e.transcript.len();
            result.error = Some(e.to_string());
        }
    }
    Ok(result)
}

/// Runs every trial of `scenario`, in parallel, returning results in
/// trial order. Planner budget overruns are recorded per trial; anything
/// else aborts.
pub fn run_trials(scenario: &Scenario, planner: &Planner) -> Result<Vec<TrialResult>, HarnessError> {
    (0..scenario.config.trials)
        .into_par_iter()
        .map(|t| run_one(scenario, t, planner))
        .collect()
}
