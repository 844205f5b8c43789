//! The query loop. Candidates are asked about once each, in the order fixed
//! before the first question. The loop stops when
//!
//! 1. the human confirms a fluent the robot cannot achieve at all,
//! 2. the confirmed fluents cannot be achieved together with `G^H`, or
//! 3. after a "no", the robot can achieve `G^H`, everything confirmed, and
//!    every fluent not yet asked about.
//!
//! A plan from case 3 reaches a superset of any hidden goal consistent with
//! the answers so far, since all unconfirmed members of `G*` are among the
//! unasked fluents.

use serde::Serialize;

use super::belief::{analyze, build_queue, AnalysisError, BeliefState};
use super::instance::HaglInstance;
use super::oracle::{Oracle, OracleError};
use crate::planner::{Planner, PlannerError};
use crate::task::{FluentId, Plan, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Condition 1: "yes" to a fluent in `F̂`.
    YesToUnachievable,
    /// Condition 2: `G^H ∪ ℂ` is unsolvable.
    ConfirmedSetUnachievable,
    /// Condition 3: a plan exists for `G^H ∪ ℂ ∪ Q`.
    SupersetPlanFound,
}

impl Termination {
    pub fn tag(self) -> u8 {
        match self {
            Termination::YesToUnachievable => 1,
            Termination::ConfirmedSetUnachievable => 2,
            Termination::SupersetPlanFound => 3,
        }
    }
}

/// How a session ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitReason {
    GoalSpecUnsolvable,
    ExpectedStateSolvable,
    Terminated(Termination),
    QueueExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryRecord {
    pub fluent: FluentId,
    pub answer: bool,
    pub termination: Option<Termination>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SessionVerdict {
    Plan(Plan),
    NoPlanExists,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionOutcome {
    pub verdict: SessionVerdict,
    pub transcript: Vec<QueryRecord>,
    /// `ℂ`: fluents the human confirmed.
    pub confirmed: State,
    pub query_count: usize,
    pub exit: ExitReason,
    /// Present when the session got past the two initial checks.
    pub belief: Option<BeliefState>,
    /// The goal the returned plan was computed for.
    pub planned_goal: Option<State>,
    pub planner_calls: usize,
}

impl SessionOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.verdict {
            SessionVerdict::Plan(p) => Some(p),
            SessionVerdict::NoPlanExists => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionErrorKind {
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A session aborted part way; the answers gathered so far are kept.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("elicitation aborted after {} queries: {kind}", transcript.len())]
pub struct SessionError {
    pub transcript: Vec<QueryRecord>,
    pub kind: SessionErrorKind,
}

struct Run<'a> {
    instance: &'a HaglInstance,
    planner: &'a Planner,
    calls_before: usize,
    transcript: Vec<QueryRecord>,
}

impl Run<'_> {
    fn fail(&self, kind: impl Into<SessionErrorKind>) -> SessionError {
        SessionError {
            transcript: self.transcript.clone(),
            kind: kind.into(),
        }
    }

    fn plan_for(&self, goal: &State) -> Result<Option<Plan>, SessionError> {
        self.planner
            .find_plan(&self.instance.robot_task(goal.clone()))
            .map_err(|e| self.fail(e))
    }

    fn finish(
        self,
        verdict: SessionVerdict,
        confirmed: State,
        exit: ExitReason,
        belief: Option<BeliefState>,
        planned_goal: Option<State>,
    ) -> SessionOutcome {
        SessionOutcome {
            verdict,
            query_count: self.transcript.len(),
            transcript: self.transcript,
            confirmed,
            exit,
            belief,
            planned_goal,
            planner_calls: self.planner.calls() - self.calls_before,
        }
    }
}

/// Runs a full elicitation session against `oracle`.
pub fn run_elicitation(
    instance: &HaglInstance,
    oracle: &mut dyn Oracle,
    planner: &Planner,
) -> Result<SessionOutcome, SessionError> {
    let mut run = Run {
        instance,
        planner,
        calls_before: planner.calls(),
        transcript: Vec::new(),
    };
    let goal_spec = instance.goal_spec().clone();

    if run.plan_for(&goal_spec)?.is_none() {
        return Ok(run.finish(
            SessionVerdict::NoPlanExists,
            State::new(),
            ExitReason::GoalSpecUnsolvable,
            None,
            None,
        ));
    }
    let expected = instance.expected_state().clone();
    if let Some(plan) = run.plan_for(&expected)? {
        return Ok(run.finish(
            SessionVerdict::Plan(plan),
            State::new(),
            ExitReason::ExpectedStateSolvable,
            None,
            Some(expected),
        ));
    }

    let belief = analyze(instance, planner).map_err(|e| run.fail(e))?;
    let queue = build_queue(&belief);
    let mut confirmed = State::new();

    for (i, &f) in queue.iter().enumerate() {
        let answer = oracle.answer(f).map_err(|e| run.fail(e))?;
        run.transcript.push(QueryRecord {
            fluent: f,
            answer,
            termination: None,
        });
        if answer {
            confirmed.insert(f);
            let termination = if belief.unachievable.contains(f) {
                // Unsolvable on its own, hence with anything added.
                Some(Termination::YesToUnachievable)
            } else if run.plan_for(&goal_spec.union(&confirmed))?.is_none() {
                Some(Termination::ConfirmedSetUnachievable)
            } else {
                None
            };
            if let Some(t) = termination {
                run.transcript.last_mut().unwrap().termination = Some(t);
                return Ok(run.finish(
                    SessionVerdict::NoPlanExists,
                    confirmed,
                    ExitReason::Terminated(t),
                    Some(belief),
                    None,
                ));
            }
        } else {
            let mut superset = goal_spec.union(&confirmed);
            superset.union_with(&queue[i + 1..].iter().copied().collect());
            if let Some(plan) = run.plan_for(&superset)? {
                let t = Termination::SupersetPlanFound;
                run.transcript.last_mut().unwrap().termination = Some(t);
                return Ok(run.finish(
                    SessionVerdict::Plan(plan),
                    confirmed,
                    ExitReason::Terminated(t),
                    Some(belief),
                    Some(superset),
                ));
            }
        }
    }

    let final_goal = goal_spec.union(&confirmed);
    let plan = run.plan_for(&final_goal)?;
    let (verdict, planned) = match plan {
        Some(p) => (SessionVerdict::Plan(p), Some(final_goal)),
        None => (SessionVerdict::NoPlanExists, None),
    };
    Ok(run.finish(verdict, confirmed, ExitReason::QueueExhausted, Some(belief), planned))
}
