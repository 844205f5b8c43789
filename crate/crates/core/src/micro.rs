//! Seeded random micro tasks and alignment instances, small enough for
//! exhaustive cross-checks against brute-force search.

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alignment::{HaglInstance, HiddenGoal};
use crate::harness::{degrade_domain, ScenarioConfig};
use crate::task::{simulate, DomainModel, GroundAction, Plan, PlanningTask, State};

#[derive(Debug, Clone)]
pub struct MicroTaskConfig {
    pub fluents: RangeInclusive<usize>,
    pub actions: RangeInclusive<usize>,
    pub pre: RangeInclusive<usize>,
    pub add: RangeInclusive<usize>,
    pub del: RangeInclusive<usize>,
    pub init_density: f64,
    pub goal: RangeInclusive<usize>,
}

impl Default for MicroTaskConfig {
    fn default() -> Self {
        MicroTaskConfig {
            fluents: 4..=12,
            actions: 3..=25,
            pre: 0..=2,
            add: 1..=2,
            del: 0..=2,
            init_density: 0.3,
            goal: 1..=3,
        }
    }
}

fn pick<R: Rng + ?Sized>(rng: &mut R, n: usize, k: RangeInclusive<usize>) -> State {
    let k = rng.gen_range(k).min(n);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    ids.into_iter().take(k).collect()
}

pub fn random_domain<R: Rng + ?Sized>(rng: &mut R, cfg: &MicroTaskConfig) -> DomainModel {
    let n = rng.gen_range(cfg.fluents.clone());
    let m = rng.gen_range(cfg.actions.clone());
    let actions = (0..m)
        .map(|i| {
            let pre = pick(rng, n, cfg.pre.clone());
            let add = pick(rng, n, cfg.add.clone());
            let del = pick(rng, n, cfg.del.clone());
            GroundAction {
                id: i,
                name: format!("(act{i})"),
                pre,
                add,
                del,
            }
        })
        .collect();
    DomainModel::new(n, actions).expect("ids drawn below the fluent count")
}

pub fn random_task<R: Rng + ?Sized>(rng: &mut R, cfg: &MicroTaskConfig) -> PlanningTask {
    let domain = random_domain(rng, cfg);
    let n = domain.fluent_count;
    let init: State = (0..n).filter(|_| rng.gen_bool(cfg.init_density)).collect();
    let goal = pick(rng, n, cfg.goal.clone());
    PlanningTask::new(Arc::new(domain), init, goal).expect("in range")
}

/// A random alignment instance together with the hidden goal that generated
/// it: the human domain is a relaxed copy of a random domain with a few
/// extra actions, the robot keeps only part of the original, the human plan is a random walk in the human model,
/// and the goal specification is a subset of the hidden goal.
#[derive(Debug, Clone)]
pub struct MicroInstance {
    pub instance: HaglInstance,
    pub hidden: HiddenGoal,
}

#[derive(Debug, Clone)]
pub struct MicroInstanceConfig {
    pub task: MicroTaskConfig,
    pub pre_drop: f64,
    pub del_drop: f64,
    /// Chance that a robot action is missing from the robot's real model.
    pub robot_action_drop: f64,
    /// Random actions only the human believes in.
    pub extra_human_actions: RangeInclusive<usize>,
    pub walk_len: RangeInclusive<usize>,
    pub max_candidates: usize,
}

impl Default for MicroInstanceConfig {
    fn default() -> Self {
        MicroInstanceConfig {
            task: MicroTaskConfig {
                fluents: 5..=10,
                actions: 4..=14,
                ..MicroTaskConfig::default()
            },
            pre_drop: 0.3,
            del_drop: 0.3,
            robot_action_drop: 0.25,
            extra_human_actions: 0..=3,
            walk_len: 1..=6,
            max_candidates: 10,
        }
    }
}

/// Draws instances until one has between 1 and `max_candidates`
/// candidate fluents.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, cfg: &MicroInstanceConfig) -> MicroInstance {
    loop {
        if let Some(m) = try_random_instance(rng, cfg) {
            return m;
        }
    }
}

fn try_random_instance<R: Rng + ?Sized>(rng: &mut R, cfg: &MicroInstanceConfig) -> Option<MicroInstance> {
    let robot = random_domain(rng, &cfg.task);
    let n = robot.fluent_count;
    let degrade = ScenarioConfig {
        prec_drop_rate: cfg.pre_drop,
        del_drop_rate: cfg.del_drop,
        ..ScenarioConfig::default()
    };
    let mut human = degrade_domain(&robot, &degrade, rng);
    let extra = rng.gen_range(cfg.extra_human_actions.clone());
    for _ in 0..extra {
        let id = human.actions.len();
        human.actions.push(GroundAction {
            id,
            name: format!("(act{id})"),
            pre: pick(rng, n, cfg.task.pre.clone()),
            add: pick(rng, n, cfg.task.add.clone()),
            del: pick(rng, n, cfg.task.del.clone()),
        });
    }
    let kept = robot.actions.iter().filter(|_| !rng.gen_bool(cfg.robot_action_drop)).cloned().collect();
    let robot = DomainModel::new(n, kept).expect("same fluents");
    let init: State = (0..n).filter(|_| rng.gen_bool(cfg.task.init_density)).collect();

    let steps = rng.gen_range(cfg.walk_len.clone());
    let mut state = init.clone();
    let mut plan = Vec::new();
    for _ in 0..steps {
        let applicable: Vec<_> = human.actions.iter().filter(|a| a.is_applicable(&state)).collect();
        let Some(a) = applicable.choose(rng) else { break };
        state = a.successor(&state);
        plan.push(a.id);
    }
    let plan = Plan(plan);
    let expected = simulate(&plan, &init, &human).ok()?;
    let new_facts = expected.difference(&init);
    if expected.is_empty() {
        return None;
    }
    // Hidden goal: something the walk produced plus random extra members.
    let exp: Vec<usize> = expected.to_vec();
    let mut hidden = State::new();
    if let Some(f) = new_facts.iter().next() {
        hidden.insert(f);
    }
    for &f in &exp {
        if rng.gen_bool(0.4) {
            hidden.insert(f);
        }
    }
    if hidden.is_empty() {
        hidden.insert(*exp.choose(rng)?);
    }
    let goal_spec: State = hidden.iter().filter(|_| rng.gen_bool(0.5)).collect();
    let candidates = expected.difference(&goal_spec).len();
    if candidates == 0 || candidates > cfg.max_candidates {
        return None;
    }

    let instance = HaglInstance::new(Arc::new(robot), init.clone(), goal_spec, Arc::new(human), init, plan, 1.0).ok()?;
    let hidden = HiddenGoal::new(&instance, hidden).ok()?;
    Some(MicroInstance { instance, hidden })
}
