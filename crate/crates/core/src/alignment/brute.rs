//! Exact value of a query by enumerating every hidden goal consistent with
//! the answer. Exponential in the candidate count; meant for tests.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::belief::BeliefState;
use super::instance::HaglInstance;
use crate::planner::{Planner, PlannerError};
use crate::task::{FluentId, State};

pub const DEFAULT_BRUTE_FORCE_BOUND: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Condition on `f ∈ G*`.
    In,
    /// Condition on `f ∉ G*`.
    Out,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BruteForceError {
    #[error("{candidates} candidates exceed the enumeration bound of {bound}")]
    BoundExceeded { candidates: usize, bound: usize },
    #[error("fluent {0} is not a candidate")]
    NotACandidate(FluentId),
    #[error(transparent)]
    Planner(#[from] PlannerError),
}

/// Enumerator with a solvability cache shared across calls.
pub struct BruteForce<'a> {
    instance: &'a HaglInstance,
    planner: &'a Planner,
    bound: usize,
    cache: Mutex<HashMap<State, bool>>,
}

impl<'a> BruteForce<'a> {
    pub fn new(instance: &'a HaglInstance, planner: &'a Planner) -> Self {
        BruteForce {
            instance,
            planner,
            bound: DEFAULT_BRUTE_FORCE_BOUND,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_bound(mut self, bound: usize) -> Self {
        self.bound = bound;
        self
    }

    /// Whether the robot can achieve `goal`.
    pub fn solvable(&self, goal: &State) -> Result<bool, PlannerError> {
        if let Some(&s) = self.cache.lock().unwrap().get(goal) {
            return Ok(s);
        }
        let s = self.planner.check_solvable(&self.instance.robot_task(goal.clone()))?;
        self.cache.lock().unwrap().insert(goal.clone(), s);
        Ok(s)
    }

    /// `Σ P(Ḡ | direction) · 1(Ḡ unsolvable)` over every `Ḡ` with
    /// `G^H ⊆ Ḡ ⊆ S^H` agreeing with the direction on `f`. Members other than
    /// `f` are included independently with their probabilities.
    pub fn value(&self, belief: &BeliefState, f: FluentId, direction: Direction) -> Result<f64, BruteForceError> {
        let cands = &belief.candidates;
        if cands.len() > self.bound {
            return Err(BruteForceError::BoundExceeded {
                candidates: cands.len(),
                bound: self.bound,
            });
        }
        if !cands.contains(&f) {
            return Err(BruteForceError::NotACandidate(f));
        }
        let others: Vec<FluentId> = cands.iter().copied().filter(|&c| c != f).collect();
        let mut total = 0.0;
        for mask in 0u32..1 << others.len() {
            let mut goal = self.instance.goal_spec().clone();
            if direction == Direction::In {
                goal.insert(f);
            }
            let mut weight = 1.0;
            for (i, &c) in others.iter().enumerate() {
                let p = belief.p(c);
                if mask & (1 << i) != 0 {
                    goal.insert(c);
                    weight *= p;
                } else {
                    weight *= 1.0 - p;
                }
            }
            if weight > 0.0 && !self.solvable(&goal)? {
                total += weight;
            }
        }
        Ok(total)
    }
}

/// One-off form of [`BruteForce::value`] with the default bound.
pub fn brute_force_value(
    instance: &HaglInstance,
    belief: &BeliefState,
    f: FluentId,
    direction: Direction,
    planner: &Planner,
) -> Result<f64, BruteForceError> {
    BruteForce::new(instance, planner).value(belief, f, direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::analyze;
    use crate::task::{DomainModel, GroundAction, Plan};
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn s(v: &[usize]) -> State {
        State::from_fluents(v.iter().copied())
    }

    fn act(id: usize, pre: &[usize], add: &[usize], del: &[usize]) -> GroundAction {
        GroundAction {
            id,
            name: format!("(a{id})"),
            pre: s(pre),
            add: s(add),
            del: s(del),
        }
    }

    /// Human can make 1, 2 and 3 from 0. The robot can make 1 and 2 but
    /// making either destroys the other; 3 is out of reach.
    fn instance() -> HaglInstance {
        let human = DomainModel::new(4, vec![act(0, &[0], &[1], &[]), act(1, &[0], &[2], &[]), act(2, &[0], &[3], &[])]).unwrap();
        let robot = DomainModel::new(4, vec![act(0, &[0], &[1], &[2]), act(1, &[0], &[2], &[1])]).unwrap();
        HaglInstance::new(Arc::new(robot), s(&[0]), s(&[]), Arc::new(human), s(&[0]), Plan(vec![0, 1, 2]), 1.0).unwrap()
    }

    fn fixed_belief(inst: &HaglInstance, probs: &[(usize, f64)], unach: &[usize]) -> BeliefState {
        BeliefState::from_parts(
            inst.expected_state().clone(),
            inst.goal_spec(),
            probs.iter().copied().collect::<BTreeMap<_, _>>(),
            s(unach),
        )
    }

    #[test]
    fn hand_enumerated_sums() {
        let inst = instance();
        let planner = Planner::default();
        let b = fixed_belief(&inst, &[(0, 0.9), (1, 0.5), (2, 0.4), (3, 0.2)], &[3]);
        let bf = BruteForce::new(&inst, &planner);
        // Candidates 0..=3; 0 is in init so it never matters. Unsolvable iff
        // the goal holds 3, or holds both 1 and 2.
        // f = 1, in: unsolvable iff 2 or 3 present: 1 - 0.6 * 0.8.
        let v = bf.value(&b, 1, Direction::In).unwrap();
        assert!((v - (1.0 - 0.6 * 0.8)).abs() < 1e-12);
        // f = 1, out: unsolvable iff 3 present.
        let v = bf.value(&b, 1, Direction::Out).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
        // f = 3, in: always unsolvable.
        assert!((bf.value(&b, 3, Direction::In).unwrap() - 1.0).abs() < 1e-12);
        // f = 3, out: unsolvable iff 1 and 2 both present.
        assert!((bf.value(&b, 3, Direction::Out).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn all_unachievable_gives_one() {
        let d = Arc::new(DomainModel::new(3, vec![act(0, &[], &[0, 1, 2], &[])]).unwrap());
        let robot = Arc::new(DomainModel::new(3, vec![]).unwrap());
        let inst = HaglInstance::new(robot, s(&[]), s(&[]), d, s(&[]), Plan(vec![0]), 1.0).unwrap();
        let planner = Planner::default();
        let b = analyze(&inst, &planner).unwrap();
        assert_eq!(b.unachievable, s(&[0, 1, 2]));
        for f in 0..3 {
            for dir in [Direction::In, Direction::Out] {
                let v = brute_force_value(&inst, &b, f, dir, &planner).unwrap();
                assert!((v - 1.0).abs() < 1e-12, "f={f} {dir:?} gave {v}");
            }
        }
    }

    #[test]
    fn all_solvable_gives_zero() {
        let d = Arc::new(DomainModel::new(3, vec![act(0, &[], &[0, 1, 2], &[])]).unwrap());
        let inst = HaglInstance::new(d.clone(), s(&[]), s(&[]), d, s(&[]), Plan(vec![0]), 1.0).unwrap();
        let planner = Planner::default();
        let b = analyze(&inst, &planner).unwrap();
        for f in 0..3 {
            for dir in [Direction::In, Direction::Out] {
                assert_eq!(brute_force_value(&inst, &b, f, dir, &planner).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        let inst = instance();
        let planner = Planner::default();
        let b = fixed_belief(&inst, &[], &[]);
        let err = BruteForce::new(&inst, &planner).with_bound(2).value(&b, 1, Direction::In);
        assert!(matches!(err, Err(BruteForceError::BoundExceeded { candidates: 4, bound: 2 })));
        assert!(matches!(
            BruteForce::new(&inst, &planner).value(&b, 9, Direction::In),
            Err(BruteForceError::NotACandidate(9))
        ));
    }
}
