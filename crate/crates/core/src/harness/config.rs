use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::planner::{SearchLimits, DEFAULT_MAX_EXPANSIONS};

/// Knobs for synthesizing and running benchmark trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub prec_drop_rate: f64,
    pub del_drop_rate: f64,
    pub goal_drop_count: usize,
    pub beta: f64,
    pub trials: usize,
    /// Expansion limit per planner call.
    pub node_budget: Option<usize>,
    /// Wall-clock limit per planner call, in milliseconds.
    pub time_budget_ms: Option<u64>,
    /// Fresh degradations to try when the true goal is unsolvable in the
    /// degraded model.
    pub resample_attempts: usize,
    /// Return optimal robot plans instead of the first one found.
    pub optimal_robot_plans: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 0,
            prec_drop_rate: 0.15,
            del_drop_rate: 0.15,
            goal_drop_count: 1,
            beta: 1.0,
            trials: 10,
            node_budget: Some(DEFAULT_MAX_EXPANSIONS),
            time_budget_ms: None,
            resample_attempts: 20,
            optimal_robot_plans: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        for (name, r) in [("prec_drop_rate", self.prec_drop_rate), ("del_drop_rate", self.del_drop_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("{name} must lie in [0, 1], got {r}"));
            }
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be positive and finite, got {}", self.beta));
        }
        if self.resample_attempts == 0 {
            return bad("resample_attempts must be at least 1".into());
        }
        Ok(())
    }

    pub fn limits(&self) -> SearchLimits {
        SearchLimits {
            max_expansions: self.node_budget,
            time_limit: self.time_budget_ms.map(Duration::from_millis),
        }
    }

    /// Overlays the fields present in `patch` (a JSON object) onto `self`.
    pub fn merged(&self, patch: &serde_json::Map<String, serde_json::Value>) -> Result<Self, HarnessError> {
        let mut base = match serde_json::to_value(self).expect("config serializes") {
            serde_json::Value::Object(m) => m,
            _ => unreachable!("config is a struct"),
        };
        for (k, v) in patch {
            base.insert(k.clone(), v.clone());
        }
        let merged: ScenarioConfig =
            serde_json::from_value(serde_json::Value::Object(base)).map_err(|e| HarnessError::Config(e.to_string()))?;
        merged.validate()?;
        Ok(merged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_overrides_only_given_fields() {
        let base = ScenarioConfig::default();
        let patch = serde_json::json!({"seed": 7, "trials": 3});
        let m = base.merged(patch.as_object().unwrap()).unwrap();
        assert_eq!(m.seed, 7);
        assert_eq!(m.trials, 3);
        assert_eq!(m.prec_drop_rate, 0.15);
        let bad = serde_json::json!({"prec_drop_rate": 1.5});
        assert!(base.merged(bad.as_object().unwrap()).is_err());
        let unknown = serde_json::json!({"sead": 1});
        assert!(base.merged(unknown.as_object().unwrap()).is_err());
    }

    #[test]
    fn null_budget_means_unlimited() {
        let patch = serde_json::json!({"node_budget": null});
        let m = ScenarioConfig::default().merged(patch.as_object().unwrap()).unwrap();
        assert_eq!(m.limits().max_expansions, None);
    }
}
