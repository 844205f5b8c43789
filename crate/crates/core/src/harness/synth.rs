//! Building the human side of a benchmark instance from an ordinary
//! planning task: a degraded domain, a weakened goal specification, and a
//! plan the human would propose.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HarnessError, ScenarioConfig};
use crate::planner::{Planner, PlannerError};
use crate::task::{DomainModel, Plan, PlanningTask, State};

/// The random stream for trial `trial` under master seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Drops each precondition and each delete of every ground action
/// independently, with the configured rates. Actions and add lists are kept.
pub fn degrade_domain<R: Rng + ?Sized>(domain: &DomainModel, config: &ScenarioConfig, rng: &mut R) -> DomainModel {
    let mut d = domain.clone();
    for a in &mut d.actions {
        a.pre = a.pre.iter().filter(|_| !rng.gen_bool(config.prec_drop_rate)).collect();
        a.del = a.del.iter().filter(|_| !rng.gen_bool(config.del_drop_rate)).collect();
    }
    d
}

/// `true_goal` minus `goal_drop_count` atoms chosen uniformly.
pub fn derive_goal_spec<R: Rng + ?Sized>(true_goal: &State, config: &ScenarioConfig, rng: &mut R) -> Result<State, HarnessError> {
    let atoms = true_goal.to_vec();
    if config.goal_drop_count > atoms.len() {
        return Err(HarnessError::GoalDrop {
            drop: config.goal_drop_count,
            goal: atoms.len(),
        });
    }
    let mut spec = true_goal.clone();
    for &f in atoms.choose_multiple(rng, config.goal_drop_count) {
        spec.remove(f);
    }
    Ok(spec)
}

/// An optimal plan for `true_goal` in the human model, or `None` when the
/// human model cannot reach it.
pub fn synthesize_human_plan(
    human_domain: &DomainModel,
    human_init: &State,
    true_goal: &State,
    planner: &Planner,
) -> Result<Option<Plan>, PlannerError> {
    let task = PlanningTask {
        domain: std::sync::Arc::new(human_domain.clone()),
        init: human_init.clone(),
        goal: true_goal.clone(),
    };
    Ok(planner.optimal_plan(&task)?.into_plan())
}
