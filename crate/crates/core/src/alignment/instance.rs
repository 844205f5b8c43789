use std::sync::Arc;

use crate::task::{simulate, DomainModel, FluentId, Plan, PlanningTask, SimulationError, State, TransitionError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InstanceError {
    #[error("human plan is inapplicable in the human model at step {step}: {cause}")]
    InapplicableHumanPlan { step: usize, cause: TransitionError },
    #[error("robot and human models disagree on the fluent universe ({robot} vs {human} fluents)")]
    FluentMismatch { robot: usize, human: usize },
    #[error("state or goal mentions fluent {fluent}, outside the {fluent_count} known fluents")]
    FluentOutOfRange { fluent: FluentId, fluent_count: usize },
    #[error("human plan does not reach the goal specification; missing {missing:?}")]
    GoalSpecNotReached { missing: State },
    #[error("rationality parameter must be positive and finite, got {0}")]
    BadBeta(f64),
    #[error("hidden goal must contain the goal specification; missing {missing:?}")]
    HiddenGoalMissesSpec { missing: State },
    #[error("hidden goal must lie inside the human's expected state; extra {extra:?}")]
    HiddenGoalOutsideExpected { extra: State },
}

/// `S^H = T(π^H, I^H, D^H)`, the state the human expects their plan to
/// produce.
pub fn expected_state(human_domain: &DomainModel, human_init: &State, human_plan: &Plan) -> Result<State, InstanceError> {
    simulate(human_plan, human_init, human_domain)
        .map_err(|SimulationError { step, cause }| InstanceError::InapplicableHumanPlan { step, cause })
}

/// A validated goal alignment problem: robot model, goal specification,
/// human belief model, and the human's plan. The hidden goal is not part of
/// it; only an oracle knows that.
#[derive(Debug, Clone)]
pub struct HaglInstance {
    robot_domain: Arc<DomainModel>,
    robot_init: State,
    goal_spec: State,
    human_domain: Arc<DomainModel>,
    human_init: State,
    human_plan: Plan,
    beta: f64,
    expected: State,
}

impl HaglInstance {
    pub fn new(
        robot_domain: Arc<DomainModel>,
        robot_init: State,
        goal_spec: State,
        human_domain: Arc<DomainModel>,
        human_init: State,
        human_plan: Plan,
        beta: f64,
    ) -> Result<Self, InstanceError> {
        let n = robot_domain.fluent_count;
        if human_domain.fluent_count != n {
            return Err(InstanceError::FluentMismatch {
                robot: n,
                human: human_domain.fluent_count,
            });
        }
        for s in [&robot_init, &goal_spec, &human_init] {
            if s.bound() > n {
                return Err(InstanceError::FluentOutOfRange {
                    fluent: s.bound() - 1,
                    fluent_count: n,
                });
            }
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(InstanceError::BadBeta(beta));
        }
        let expected = expected_state(&human_domain, &human_init, &human_plan)?;
        if !goal_spec.is_subset(&expected) {
            return Err(InstanceError::GoalSpecNotReached {
                missing: goal_spec.difference(&expected),
            });
        }
        Ok(HaglInstance {
            robot_domain,
            robot_init,
            goal_spec,
            human_domain,
            human_init,
            human_plan,
            beta,
            expected,
        })
    }

    pub fn robot_domain(&self) -> &Arc<DomainModel> {
        &self.robot_domain
    }

    pub fn robot_init(&self) -> &State {
        &self.robot_init
    }

    pub fn goal_spec(&self) -> &State {
        &self.goal_spec
    }

    pub fn human_domain(&self) -> &Arc<DomainModel> {
        &self.human_domain
    }

    pub fn human_init(&self) -> &State {
        &self.human_init
    }

    pub fn human_plan(&self) -> &Plan {
        &self.human_plan
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self, InstanceError> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(InstanceError::BadBeta(beta));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn fluent_count(&self) -> usize {
        self.robot_domain.fluent_count
    }

    /// `S^H`.
    pub fn expected_state(&self) -> &State {
        &self.expected
    }

    /// `S^H \ G^H` in ascending id order.
    pub fn candidates(&self) -> Vec<FluentId> {
        self.expected.difference(&self.goal_spec).to_vec()
    }

    /// The naive query bound `|S^H \ G^H|`.
    pub fn baseline(&self) -> usize {
        self.expected.difference(&self.goal_spec).len()
    }

    pub fn robot_task(&self, goal: State) -> PlanningTask {
        PlanningTask {
            domain: Arc::clone(&self.robot_domain),
            init: self.robot_init.clone(),
            goal,
        }
    }

    pub fn human_task(&self, goal: State) -> PlanningTask {
        PlanningTask {
            domain: Arc::clone(&self.human_domain),
            init: self.human_init.clone(),
            goal,
        }
    }
}

/// The human's true goal `G*`, with `G^H ⊆ G* ⊆ S^H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenGoal {
    g_star: State,
}

impl HiddenGoal {
    pub fn new(instance: &HaglInstance, g_star: State) -> Result<Self, InstanceError> {
        if !instance.goal_spec().is_subset(&g_star) {
            return Err(InstanceError::HiddenGoalMissesSpec {
                missing: instance.goal_spec().difference(&g_star),
            });
        }
        if !g_star.is_subset(instance.expected_state()) {
            return Err(InstanceError::HiddenGoalOutsideExpected {
                extra: g_star.difference(instance.expected_state()),
            });
        }
        Ok(HiddenGoal { g_star })
    }

    pub fn state(&self) -> &State {
        &self.g_star
    }

    pub fn contains(&self, f: FluentId) -> bool {
        self.g_star.contains(f)
    }
}

/// Every valid hidden goal of `instance`, by enumerating subsets of the
/// candidates. Panics above 20 candidates.
pub fn all_hidden_goals(instance: &HaglInstance) -> Vec<HiddenGoal> {
    let cands = instance.candidates();
    assert!(cands.len() <= 20, "too many candidates to enumerate");
    (0u32..1 << cands.len())
        .map(|mask| {
            let mut g = instance.goal_spec().clone();
            for (i, &f) in cands.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    g.insert(f);
                }
            }
            HiddenGoal { g_star: g }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::GroundAction;

    fn s(v: &[usize]) -> State {
        State::from_fluents(v.iter().copied())
    }

    fn chain() -> Arc<DomainModel> {
        let acts = (0..4)
            .map(|i| GroundAction {
                id: i,
                name: format!("(step{i})"),
                pre: s(&[i]),
                add: s(&[i + 1]),
                del: s(&[]),
            })
            .collect();
        Arc::new(DomainModel::new(5, acts).unwrap())
    }

    #[test]
    fn empty_plan_expects_init() {
        let d = chain();
        let i = HaglInstance::new(d.clone(), s(&[0]), s(&[]), d, s(&[0, 3]), Plan::empty(), 1.0).unwrap();
        assert_eq!(i.expected_state(), &s(&[0, 3]));
    }

    #[test]
    fn inapplicable_plan_names_step() {
        let d = chain();
        let err = HaglInstance::new(d.clone(), s(&[0]), s(&[]), d, s(&[0]), Plan(vec![0, 1, 3]), 1.0).unwrap_err();
        assert!(matches!(err, InstanceError::InapplicableHumanPlan { step: 3, .. }));
    }

    #[test]
    fn validation() {
        let d = chain();
        assert!(matches!(
            HaglInstance::new(d.clone(), s(&[0]), s(&[4]), d.clone(), s(&[0]), Plan(vec![0]), 1.0),
            Err(InstanceError::GoalSpecNotReached { .. })
        ));
        assert!(matches!(
            HaglInstance::new(d.clone(), s(&[0]), s(&[]), d.clone(), s(&[0]), Plan::empty(), 0.0),
            Err(InstanceError::BadBeta(_))
        ));
        let i = HaglInstance::new(d.clone(), s(&[0]), s(&[1]), d, s(&[0]), Plan(vec![0, 1]), 1.0).unwrap();
        assert_eq!(i.candidates(), vec![0, 2]);
        assert_eq!(i.baseline(), 2);
        assert!(HiddenGoal::new(&i, s(&[1, 2])).is_ok());
        assert!(HiddenGoal::new(&i, s(&[2])).is_err());
        assert!(HiddenGoal::new(&i, s(&[1, 4])).is_err());
        assert_eq!(all_hidden_goals(&i).len(), 4);
    }
}
