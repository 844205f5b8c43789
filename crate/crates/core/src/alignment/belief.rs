//! What the robot infers before asking anything: the human's expected
//! state, which of its fluents the robot cannot reach, how likely each
//! candidate is to belong to the hidden goal, and what asking about it is
//! worth.
//!
//! Membership probabilities follow a noisy-rational observer. A candidate
//! `f` is scored by how well adding it to the goal explains the length of the
//! human's plan: `p(f) = exp(-β·|C(π^H) - C*(G^H ∪ {f})|)`, where `C*` is the
//! optimal cost in the human model. Each fluent is an independent Bernoulli
//! hypothesis, so the scores are not normalized across fluents.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::instance::HaglInstance;
use crate::planner::{Planner, PlannerError};
use crate::task::{FluentId, State};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("planner failed while analysing fluent {fluent}: {source}")]
pub struct AnalysisError {
    pub fluent: FluentId,
    #[source]
    pub source: PlannerError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefState {
    /// `S^H`.
    pub expected_state: State,
    /// `S^H \ G^H`, ascending.
    pub candidates: Vec<FluentId>,
    /// `p(f ∈ G*)` for every candidate; goal-spec fluents are certain.
    pub prob: BTreeMap<FluentId, f64>,
    /// `F̂`: fluents of `S^H` the robot cannot achieve on their own.
    pub unachievable: State,
    /// Query value for every candidate.
    pub qvalue: BTreeMap<FluentId, f64>,
}

impl BeliefState {
    /// Builds a belief from given probabilities and unachievable set, then
    /// fills in the query values.
    pub fn from_parts(
        expected_state: State,
        goal_spec: &State,
        prob: BTreeMap<FluentId, f64>,
        unachievable: State,
    ) -> Self {
        let candidates = expected_state.difference(goal_spec).to_vec();
        let mut prob = prob;
        for f in goal_spec.iter() {
            prob.insert(f, 1.0);
        }
        let mut belief = BeliefState {
            expected_state,
            candidates,
            prob,
            unachievable,
            qvalue: BTreeMap::new(),
        };
        belief.qvalue = belief
            .candidates
            .iter()
            .map(|&f| (f, query_value(f, &belief)))
            .collect();
        belief
    }

    pub fn p(&self, f: FluentId) -> f64 {
        self.prob.get(&f).copied().unwrap_or(0.0)
    }
}

/// `e^{-β·Δ}`.
pub fn probability_from_delta(beta: f64, delta: usize) -> f64 {
    (-beta * delta as f64).exp()
}

/// `F̂`: members of `expected` whose singleton goal is unsolvable for the
/// robot. Planner calls run in parallel.
pub fn unachievable_fluents(
    instance: &HaglInstance,
    expected: &State,
    planner: &Planner,
) -> Result<State, AnalysisError> {
    let fluents = expected.to_vec();
    let results: Vec<Result<bool, AnalysisError>> = fluents
        .par_iter()
        .map(|&f| {
            if instance.robot_init().contains(f) {
                return Ok(true);
            }
            planner
                .check_solvable(&instance.robot_task(State::from_fluents([f])))
                .map_err(|source| AnalysisError { fluent: f, source })
        })
        .collect();
    let mut out = State::new();
    for (f, r) in fluents.into_iter().zip(results) {
        if !r? {
            out.insert(f);
        }
    }
    Ok(out)
}

/// `p(f ∈ G*)`; 0 when `G^H ∪ {f}` is unsolvable in the human model.
pub fn fluent_probability(instance: &HaglInstance, f: FluentId, planner: &Planner) -> Result<f64, AnalysisError> {
    let mut goal = instance.goal_spec().clone();
    goal.insert(f);
    let result = planner
        .optimal_plan(&instance.human_task(goal))
        .map_err(|source| AnalysisError { fluent: f, source })?;
    Ok(match result.cost() {
        None => 0.0,
        Some(best) => probability_from_delta(instance.beta(), instance.human_plan().cost().abs_diff(best)),
    })
}

/// `Ṽ(f ∈ G*)`: 1 if `f ∈ F̂`, else the product of `p` over `F̂`.
pub fn approx_value_in(f: FluentId, belief: &BeliefState) -> f64 {
    if belief.unachievable.contains(f) {
        1.0
    } else {
        belief.unachievable.iter().map(|g| belief.p(g)).product()
    }
}

/// `Ṽ(f ∉ G*)`: the product of `p` over `F̂ \ {f}`.
pub fn approx_value_out(f: FluentId, belief: &BeliefState) -> f64 {
    belief
        .unachievable
        .iter()
        .filter(|&g| g != f)
        .map(|g| belief.p(g))
        .product()
}

/// `V^Q(f) = p·Ṽ(f ∈ G*) + (1 - p)·Ṽ(f ∉ G*)`.
pub fn query_value(f: FluentId, belief: &BeliefState) -> f64 {
    let p = belief.p(f);
    let (vin, vout) = (approx_value_in(f, belief), approx_value_out(f, belief));
    // Equal branches must tie exactly so the queue falls back to `p`.
    if vin == vout {
        return vin;
    }
    p * vin + (1.0 - p) * vout
}

/// Candidates by descending query value, then descending probability,
/// then ascending id.
pub fn build_queue(belief: &BeliefState) -> Vec<FluentId> {
    let mut q = belief.candidates.clone();
    let v = |f: &FluentId| belief.qvalue.get(f).copied().unwrap_or(0.0);
    q.sort_by(|a, b| {
        v(b).total_cmp(&v(a))
            .then_with(|| belief.p(*b).total_cmp(&belief.p(*a)))
            .then_with(|| a.cmp(b))
    });
    q
}

/// Computes `F̂`, probabilities and query values for `instance`.
pub fn analyze(instance: &HaglInstance, planner: &Planner) -> Result<BeliefState, AnalysisError> {
    let expected = instance.expected_state().clone();
    let unachievable = unachievable_fluents(instance, &expected, planner)?;
    let candidates = instance.candidates();
    let probs: Vec<Result<f64, AnalysisError>> = candidates
        .par_iter()
        .map(|&f| fluent_probability(instance, f, planner))
        .collect();
    let mut prob = BTreeMap::new();
    for (f, p) in candidates.into_iter().zip(probs) {
        prob.insert(f, p?);
    }
    Ok(BeliefState::from_parts(expected, instance.goal_spec(), prob, unachievable))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::{DomainModel, GroundAction, Plan};
    use std::sync::Arc;

    fn belief(cands: &[usize], probs: &[(usize, f64)], unach: &[usize]) -> BeliefState {
        BeliefState::from_parts(
            State::from_fluents(cands.iter().copied()),
            &State::new(),
            probs.iter().copied().collect(),
            State::from_fluents(unach.iter().copied()),
        )
    }

    #[test]
    fn value_in_cases() {
        let b = belief(&[1, 2], &[(1, 0.5), (2, 0.9)], &[1]);
        assert_eq!(approx_value_in(1, &b), 1.0);
        assert_eq!(approx_value_in(2, &b), 0.5);
        let none = belief(&[1, 2], &[(1, 0.5), (2, 0.9)], &[]);
        assert_eq!(approx_value_in(2, &none), 1.0);
    }

    #[test]
    fn value_out_cases() {
        let single = belief(&[1], &[(1, 0.3)], &[1]);
        assert_eq!(approx_value_out(1, &single), 1.0);
        let pair = belief(&[1, 2], &[(1, 0.5), (2, 0.5)], &[1, 2]);
        assert_eq!(approx_value_out(1, &pair), 0.5);
        let other = belief(&[1, 3], &[(1, 0.5), (3, 0.2)], &[1]);
        assert_eq!(approx_value_out(3, &other), 0.5);
    }

    #[test]
    fn query_value_cases() {
        let b = belief(&[1], &[(1, 0.5)], &[1]);
        assert_eq!(query_value(1, &b), 1.0);
        for p in [0.0, 0.1, 0.7, 1.0] {
            let b = belief(&[1, 2], &[(1, 0.5), (2, p)], &[1]);
            assert!((query_value(2, &b) - 0.5).abs() < 1e-12);
        }
        let free = belief(&[1, 2], &[(1, 0.5), (2, 0.2)], &[]);
        assert_eq!(free.qvalue.values().copied().collect::<Vec<_>>(), vec![1.0, 1.0]);
    }

    #[test]
    fn queue_order() {
        let b = belief(&[1, 2], &[(1, 0.5), (2, 0.9)], &[1]);
        assert_eq!(build_queue(&b), vec![1, 2]);
        let ties = belief(&[2, 3], &[(2, 0.8), (3, 0.4)], &[]);
        assert_eq!(build_queue(&ties), vec![2, 3]);
        let ties = belief(&[2, 3], &[(2, 0.4), (3, 0.8)], &[]);
        assert_eq!(build_queue(&ties), vec![3, 2]);
        let same = belief(&[5, 4], &[(4, 0.4), (5, 0.4)], &[]);
        assert_eq!(build_queue(&same), vec![4, 5]);
        assert_eq!(build_queue(&belief(&[7], &[(7, 0.1)], &[])), vec![7]);
    }

    #[test]
    fn delta_formula() {
        assert_eq!(probability_from_delta(1.0, 0), 1.0);
        assert!((probability_from_delta(1.0, 1) - 0.367_879_441_171_442_3).abs() < 1e-9);
    }

    /// Chain y0 -> y1 -> ... -> y5 in the human model; the human walks the
    /// whole chain, so `y_i` costs `i` steps and has `Δ = 5 - i`.
    #[test]
    fn probability_from_planning() {
        let acts = (0..5)
            .map(|i| GroundAction {
                id: i,
                name: format!("(s{i})"),
                pre: State::from_fluents([i]),
                add: State::from_fluents([i + 1]),
                del: State::new(),
            })
            .collect();
        let d = Arc::new(DomainModel::new(6, acts).unwrap());
        let init = State::from_fluents([0]);
        let inst = HaglInstance::new(d.clone(), init.clone(), State::new(), d, init, Plan(vec![0, 1, 2, 3, 4]), 1.0).unwrap();
        let planner = Planner::default();
        for i in 1..=5 {
            let p = fluent_probability(&inst, i, &planner).unwrap();
            assert!((p - (-(5.0 - i as f64)).exp()).abs() < 1e-12);
        }
    }
}
