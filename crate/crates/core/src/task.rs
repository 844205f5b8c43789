//! Grounded STRIPS model: fluent sets, ground actions, tasks, plans, and
//! the exact transition function used everywhere else in the crate.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Dense fluent identifier, an index into a `FluentTable`.
pub type FluentId = usize;
/// Dense ground-action identifier, an index into `DomainModel::actions`.
pub type ActionId = usize;

const WORD: usize = 64;

/// A set of fluent ids backed by a bitset.
///
/// The word vector never carries trailing zero words, so the derived
/// equality and hash are extensional: two states are equal iff they hold the
/// same fluents, whatever capacity they were built with.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    words: Vec<u64>,
}

impl State {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_fluents<I: IntoIterator<Item = FluentId>>(fluents: I) -> Self {
        let mut s = State::new();
        for f in fluents {
            s.insert(f);
        }
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, f: FluentId) -> bool {
        let (w, b) = (f / WORD, f % WORD);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let was = self.words[w] & (1 << b) != 0;
        self.words[w] |= 1 << b;
        !was
    }

    pub fn remove(&mut self, f: FluentId) -> bool {
        let (w, b) = (f / WORD, f % WORD);
        if w >= self.words.len() {
            return false;
        }
        let was = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        self.trim();
        was
    }

    pub fn contains(&self, f: FluentId) -> bool {
        let (w, b) = (f / WORD, f % WORD);
        self.words.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &State) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &State) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &State) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        self.trim();
    }

    pub fn union(&self, other: &State) -> State {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &State) -> State {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn intersection(&self, other: &State) -> State {
        let mut s = State {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    /// Largest id + 1, or 0 for the empty set.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(w) => (self.words.len() - 1) * WORD + (WORD - w.leading_zeros() as usize),
        }
    }

    /// Fluent ids in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = FluentId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<FluentId> {
        self.iter().collect()
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<FluentId> for State {
    fn from_iter<I: IntoIterator<Item = FluentId>>(iter: I) -> Self {
        State::from_fluents(iter)
    }
}

impl Serialize for State {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Vec::<FluentId>::deserialize(deserializer).map(State::from_fluents)
    }
}

/// A ground STRIPS action with unit cost.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundAction {
    pub id: ActionId,
    /// Printable form, e.g. `(move a b)`.
    pub name: String,
    pub pre: State,
    pub add: State,
    pub del: State,
}

impl GroundAction {
    pub fn cost(&self) -> usize {
        1
    }

    pub fn is_applicable(&self, state: &State) -> bool {
        self.pre.is_subset(state)
    }

    /// Delete-then-add successor, without the applicability check.
    pub fn successor(&self, state: &State) -> State {
        let mut next = state.difference(&self.del);
        next.union_with(&self.add);
        next
    }
}

/// A grounded domain `<F, A>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainModel {
    pub fluent_count: usize,
    pub actions: Vec<GroundAction>,
}

impl DomainModel {
    /// Builds a domain, renumbering action ids to their positions.
    pub fn new(fluent_count: usize, mut actions: Vec<GroundAction>) -> Result<Self, TaskError> {
        for (i, a) in actions.iter_mut().enumerate() {
            a.id = i;
            for set in [&a.pre, &a.add, &a.del] {
                if set.bound() > fluent_count {
                    return Err(TaskError::FluentOutOfRange {
                        fluent: set.bound() - 1,
                        fluent_count,
                    });
                }
            }
        }
        Ok(DomainModel {
            fluent_count,
            actions,
        })
    }

    pub fn action(&self, id: ActionId) -> Option<&GroundAction> {
        self.actions.get(id)
    }

    pub fn action_by_name(&self, name: &str) -> Option<&GroundAction> {
        self.actions.iter().find(|a| a.name == name)
    }
}

/// A planning task `<D, I, G>`. The domain is shared so that the many
/// goal variants built during elicitation stay cheap to construct.
#[derive(Clone, Debug)]
pub struct PlanningTask {
    pub domain: Arc<DomainModel>,
    pub init: State,
    pub goal: State,
}

impl PlanningTask {
    pub fn new(domain: Arc<DomainModel>, init: State, goal: State) -> Result<Self, TaskError> {
        for s in [&init, &goal] {
            if s.bound() > domain.fluent_count {
                return Err(TaskError::FluentOutOfRange {
                    fluent: s.bound() - 1,
                    fluent_count: domain.fluent_count,
                });
            }
        }
        Ok(PlanningTask { domain, init, goal })
    }

    /// Same domain and initial state, different goal.
    pub fn with_goal(&self, goal: State) -> PlanningTask {
        PlanningTask {
            domain: Arc::clone(&self.domain),
            init: self.init.clone(),
            goal,
        }
    }

    pub fn fluent_count(&self) -> usize {
        self.domain.fluent_count
    }
}

/// A sequence of ground-action ids. Cost is its length.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plan(pub Vec<ActionId>);

impl Plan {
    pub fn empty() -> Self {
        Plan(Vec::new())
    }

    pub fn cost(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.0
    }

    /// One `(name args)` line per step, in the plan-file format.
    pub fn to_plan_text(&self, domain: &DomainModel) -> String {
        let mut out = String::new();
        for &a in &self.0 {
            match domain.action(a) {
                Some(action) => out.push_str(&action.name),
                None => out.push_str(&format!("(unknown-action-{a})")),
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaskError {
    #[error("fluent {fluent} out of range (domain has {fluent_count} fluents)")]
    FluentOutOfRange { fluent: FluentId, fluent_count: usize },
}

/// Why a transition is undefined.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransitionError {
    #[error("action {action} is inapplicable: unmet preconditions {unmet:?}")]
    Inapplicable { action: ActionId, unmet: State },
    #[error("action id {action} does not exist in the domain")]
    UnknownAction { action: ActionId },
}

/// A failed plan simulation. `step` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan undefined at step {step}: {cause}")]
pub struct SimulationError {
    pub step: usize,
    pub cause: TransitionError,
}

/// `T(a, s)`: `(s \ del) ∪ add` when `pre ⊆ s`, undefined otherwise.
pub fn apply(action: &GroundAction, state: &State) -> Result<State, TransitionError> {
    if !action.is_applicable(state) {
        return Err(TransitionError::Inapplicable {
            action: action.id,
            unmet: action.pre.difference(state),
        });
    }
    Ok(action.successor(state))
}

/// Like [`apply`], looking the action up in `domain`.
pub fn apply_id(domain: &DomainModel, action: ActionId, state: &State) -> Result<State, TransitionError> {
    let a = domain
        .action(action)
        .ok_or(TransitionError::UnknownAction { action })?;
    apply(a, state)
}

/// Left fold of [`apply_id`] over the plan.
pub fn simulate(plan: &Plan, state: &State, domain: &DomainModel) -> Result<State, SimulationError> {
    plan.0
        .iter()
        .enumerate()
        .try_fold(state.clone(), |s, (i, &a)| {
            apply_id(domain, a, &s).map_err(|cause| SimulationError { step: i + 1, cause })
        })
}

/// `goal ⊆ state`.
pub fn satisfies(state: &State, goal: &State) -> bool {
    goal.is_subset(state)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Inapplicable { step: usize, action: ActionId, unmet: State },
    GoalUnmet { missing: State },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub final_state: Option<State>,
    pub verdict: Verdict,
    pub cost: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

/// Checks `T(π, I, D) ⊇ G`. Failures come back as verdicts.
pub fn validate_plan(task: &PlanningTask, plan: &Plan) -> ValidationReport {
    let cost = plan.cost();
    match simulate(plan, &task.init, &task.domain) {
        Err(SimulationError { step, cause }) => {
            let (action, unmet) = match cause {
                TransitionError::Inapplicable { action, unmet } => (action, unmet),
                TransitionError::UnknownAction { action } => (action, State::new()),
            };
            ValidationReport {
                final_state: None,
                verdict: Verdict::Inapplicable {
                    step,
                    action,
                    unmet,
                },
                cost,
            }
        }
        Ok(end) => {
            let missing = task.goal.difference(&end);
            let verdict = if missing.is_empty() {
                Verdict::Valid
            } else {
                Verdict::GoalUnmet { missing }
            };
            ValidationReport {
                final_state: Some(end),
                verdict,
                cost,
            }
        }
    }
}
