use serde::{Deserialize, Serialize};

use goalign::alignment::{ExitReason, ScriptedAnswer, SessionOutcome, SessionVerdict};
use goalign::pddl::{parse_atom_text, FluentTable, PddlError};
use goalign::task::DomainModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptQuery {
    pub fluent: String,
    pub answer: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueEntry {
    pub fluent: String,
    pub probability: f64,
    pub value: f64,
    pub unachievable: bool,
}

/// A finished session as written by `elicit --out`. Feeding it back with
/// `--answers` replays the same answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub instance: String,
    pub seed: u64,
    pub trial: usize,
    pub oracle: String,
    pub baseline: usize,
    pub goal_spec: Vec<String>,
    #[serde(default)]
    pub queue: Vec<QueueEntry>,
    pub queries: Vec<TranscriptQuery>,
    pub query_count: usize,
    pub exit: String,
    pub verdict: String,
    #[serde(default)]
    pub plan: Option<Vec<String>>,
    pub confirmed: Vec<String>,
}

pub fn exit_label(exit: ExitReason) -> String {
    match exit {
        ExitReason::GoalSpecUnsolvable => "goal-spec-unsolvable".into(),
        ExitReason::ExpectedStateSolvable => "expected-state-solvable".into(),
        ExitReason::Terminated(t) => format!("condition-{}", t.tag()),
        ExitReason::QueueExhausted => "queue-exhausted".into(),
    }
}

pub struct SessionContext<'a> {
    pub instance: String,
    pub seed: u64,
    pub trial: usize,
    pub oracle: &'a str,
    pub baseline: usize,
    pub goal_spec: Vec<String>,
}

pub fn build(ctx: SessionContext<'_>, outcome: &SessionOutcome, table: &FluentTable, robot: &DomainModel) -> Transcript {
    let queue = outcome
        .belief
        .as_ref()
        .map(|b| {
            goalign::alignment::build_queue(b)
                .into_iter()
                .map(|f| QueueEntry {
                    fluent: table.render(f),
                    probability: b.p(f),
                    value: b.qvalue[&f],
                    unachievable: b.unachievable.contains(f),
                })
                .collect()
        })
        .unwrap_or_default();
    Transcript {
        instance: ctx.instance,
        seed: ctx.seed,
        trial: ctx.trial,
        oracle: ctx.oracle.to_string(),
        baseline: ctx.baseline,
        goal_spec: ctx.goal_spec,
        queue,
        queries: outcome
            .transcript
            .iter()
            .map(|q| TranscriptQuery {
                fluent: table.render(q.fluent),
                answer: q.answer,
                termination: q.termination.map(|t| t.tag()),
            })
            .collect(),
        query_count: outcome.query_count,
        exit: exit_label(outcome.exit),
        verdict: match outcome.verdict {
            SessionVerdict::Plan(_) => "plan".into(),
            SessionVerdict::NoPlanExists => "no-plan".into(),
        },
        plan: outcome
            .plan()
            .map(|p| p.0.iter().map(|&a| robot.actions[a].name.clone()).collect()),
        confirmed: table.render_state(&outcome.confirmed),
    }
}

/// The answers of a transcript, pinned to the fluents they were about.
pub fn replay_script(t: &Transcript, table: &FluentTable) -> Result<Vec<ScriptedAnswer>, PddlError> {
    t.queries
        .iter()
        .map(|q| {
            let atom = parse_atom_text(&q.fluent)?;
            let id = table.id(&atom).ok_or(PddlError::UnknownAtom { atom: q.fluent.clone() })?;
            Ok(ScriptedAnswer {
                fluent: Some(id),
                answer: q.answer,
            })
        })
        .collect()
}
