//! Membership oracles for the hidden goal. Every oracle memoizes, so asking
//! about the same fluent twice returns the same answer and counts once.

use std::collections::{BTreeMap, VecDeque};

use super::instance::HiddenGoal;
use crate::pddl::{parse_atom_text, FluentTable};
use crate::task::FluentId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("answer script ran out before the query about {fluent}")]
    ScriptExhausted { fluent: String },
    #[error("answer script expected a query about {expected} but got {got}")]
    ScriptMismatch { expected: String, got: String },
    #[error("bad answer script line {line}: {message}")]
    BadScript { line: usize, message: String },
    #[error("oracle input failed: {0}")]
    Io(String),
}

pub trait Oracle {
    /// `true` iff the fluent belongs to the hidden goal.
    fn answer(&mut self, fluent: FluentId) -> Result<bool, OracleError>;
    /// Number of distinct fluents asked about so far.
    fn query_count(&self) -> usize;
}

/// Memo table shared by the oracle implementations.
#[derive(Debug, Clone, Default)]
pub struct AnswerCache {
    answers: BTreeMap<FluentId, bool>,
}

impl AnswerCache {
    pub fn get_or_ask(
        &mut self,
        fluent: FluentId,
        ask: impl FnOnce() -> Result<bool, OracleError>,
    ) -> Result<bool, OracleError> {
        if let Some(&a) = self.answers.get(&fluent) {
            return Ok(a);
        }
        let a = ask()?;
        self.answers.insert(fluent, a);
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }
}

/// Answers from a known hidden goal.
#[derive(Debug, Clone)]
pub struct SimulatedOracle {
    hidden: HiddenGoal,
    cache: AnswerCache,
}

pub fn make_simulated_oracle(hidden: HiddenGoal) -> SimulatedOracle {
    SimulatedOracle {
        hidden,
        cache: AnswerCache::default(),
    }
}

impl Oracle for SimulatedOracle {
    fn answer(&mut self, fluent: FluentId) -> Result<bool, OracleError> {
        let hidden = &self.hidden;
        self.cache.get_or_ask(fluent, || Ok(hidden.contains(fluent)))
    }

    fn query_count(&self) -> usize {
        self.cache.len()
    }
}

/// One line of an answer script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedAnswer {
    /// When present, the query must be about this fluent.
    pub fluent: Option<FluentId>,
    pub answer: bool,
}

/// Replays a fixed answer sequence.
#[derive(Debug, Clone)]
pub struct ScriptedOracle {
    script: VecDeque<ScriptedAnswer>,
    cache: AnswerCache,
    table: Option<std::sync::Arc<FluentTable>>,
}

impl ScriptedOracle {
    pub fn new(script: Vec<ScriptedAnswer>) -> Self {
        ScriptedOracle {
            script: script.into(),
            cache: AnswerCache::default(),
            table: None,
        }
    }

    /// Uses `table` to name fluents in error messages.
    pub fn with_table(mut self, table: std::sync::Arc<FluentTable>) -> Self {
        self.table = Some(table);
        self
    }

    fn name(&self, f: FluentId) -> String {
        match &self.table {
            Some(t) => t.render(f),
            None => format!("#{f}"),
        }
    }
}

impl Oracle for ScriptedOracle {
    fn answer(&mut self, fluent: FluentId) -> Result<bool, OracleError> {
        if let Some(a) = self.cache.answers.get(&fluent) {
            return Ok(*a);
        }
        let name = self.name(fluent);
        let next = self
            .script
            .pop_front()
            .ok_or(OracleError::ScriptExhausted { fluent: name.clone() })?;
        if let Some(expected) = next.fluent {
            if expected != fluent {
                return Err(OracleError::ScriptMismatch {
                    expected: self.name(expected),
                    got: name,
                });
            }
        }
        self.cache.get_or_ask(fluent, || Ok(next.answer))
    }

    fn query_count(&self) -> usize {
        self.cache.len()
    }
}

/// Parses `y`/`n` answers (also `yes`/`no`/`1`/`0`), one per line,
/// optionally preceded by the atom the answer is about:
///
/// ```text
/// ; comment
/// (ladder-used) n
/// y
/// ```
pub fn parse_answer_script(text: &str, table: &FluentTable) -> Result<Vec<ScriptedAnswer>, OracleError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| OracleError::BadScript { line: i + 1, message };
        let (atom_part, word) = match line.rfind(')') {
            Some(close) => (Some(&line[..=close]), line[close + 1..].trim()),
            None => (None, line),
        };
        let answer = parse_yes_no(word).ok_or_else(|| bad(format!("expected y or n, got '{word}'")))?;
        let fluent = match atom_part {
            None => None,
            Some(text) => {
                let atom = parse_atom_text(text).map_err(|e| bad(e.to_string()))?;
                Some(table.id(&atom).ok_or_else(|| bad(format!("unknown atom {atom}")))?)
            }
        };
        out.push(ScriptedAnswer { fluent, answer });
    }
    Ok(out)
}

pub fn parse_yes_no(word: &str) -> Option<bool> {
    match word.trim().to_ascii_lowercase().as_str() {
        "y" | "yes" | "1" | "true" => Some(true),
        "n" | "no" | "0" | "false" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::HaglInstance;
    use crate::pddl::GroundAtom;
    use crate::task::{DomainModel, Plan, State};
    use std::sync::Arc;

    fn hidden() -> HiddenGoal {
        let d = Arc::new(DomainModel::new(3, vec![]).unwrap());
        let all = State::from_fluents([0, 1, 2]);
        let inst = HaglInstance::new(d.clone(), State::new(), State::new(), d, all, Plan::empty(), 1.0).unwrap();
        HiddenGoal::new(&inst, State::from_fluents([1])).unwrap()
    }

    #[test]
    fn simulated_answers_membership_and_memoizes() {
        let mut o = make_simulated_oracle(hidden());
        assert!(o.answer(1).unwrap());
        assert!(!o.answer(0).unwrap());
        assert!(o.answer(1).unwrap());
        assert_eq!(o.query_count(), 2);
    }

    #[test]
    fn script_parsing_and_replay() {
        let table = FluentTable::from_atoms(vec![
            GroundAtom::new("a", vec![]),
            GroundAtom::new("b", vec!["x".into()]),
        ]);
        let script = parse_answer_script("; header\n(b x) yes\nn\n", &table).unwrap();
        assert_eq!(
            script,
            vec![
                ScriptedAnswer { fluent: Some(1), answer: true },
                ScriptedAnswer { fluent: None, answer: false },
            ]
        );
        let mut o = ScriptedOracle::new(script.clone());
        assert!(o.answer(1).unwrap());
        assert!(o.answer(1).unwrap());
        assert!(!o.answer(0).unwrap());
        assert!(matches!(o.answer(5), Err(OracleError::ScriptExhausted { .. })));

        let mut wrong = ScriptedOracle::new(script).with_table(Arc::new(table.clone()));
        assert!(matches!(wrong.answer(0), Err(OracleError::ScriptMismatch { .. })));
        assert!(parse_answer_script("(zzz) y", &table).is_err());
        assert!(parse_answer_script("maybe", &table).is_err());
    }
}
