use std::fmt::Write as _;

use serde::Serialize;

use super::trials::TrialResult;
use super::{HarnessError, ScenarioConfig};

/// Sample mean and standard deviation (`n - 1` denominator). One sample
/// has deviation 0.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceSummary {
    pub instance: String,
    /// Mean naive bound over completed trials.
    pub baseline: f64,
    pub queries_mean: f64,
    pub queries_std: f64,
    pub time_mean: f64,
    pub time_std: f64,
    pub trials: usize,
    pub completed: usize,
    pub plans_found: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub instances: usize,
    /// Mean over instances of the per-instance baseline.
    pub baseline_mean: f64,
    /// Mean over instances of the per-instance mean query count.
    pub queries_mean: f64,
    pub zero_query_instances: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceConfig {
    pub instance: String,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateReport {
    pub configs: Vec<InstanceConfig>,
    pub instances: Vec<InstanceSummary>,
    pub suite: SuiteSummary,
    pub trials: Vec<TrialResult>,
}

pub fn summarize(instance: &str, results: &[TrialResult]) -> Result<InstanceSummary, HarnessError> {
    let done: Vec<&TrialResult> = results.iter().filter(|r| r.completed()).collect();
    if done.is_empty() {
        return Err(HarnessError::ZeroCompleted {
            instance: instance.to_string(),
        });
    }
    let col = |f: &dyn Fn(&TrialResult) -> f64| done.iter().map(|r| f(r)).collect::<Vec<f64>>();
    let (baseline, _) = mean_std(&col(&|r| r.baseline.unwrap_or(0) as f64));
    let (queries_mean, queries_std) = mean_std(&col(&|r| r.queries as f64));
    let (time_mean, time_std) = mean_std(&col(&|r| r.wall_time.as_secs_f64()));
    Ok(InstanceSummary {
        instance: instance.to_string(),
        baseline,
        queries_mean,
        queries_std,
        time_mean,
        time_std,
        trials: results.len(),
        completed: done.len(),
        plans_found: done.iter().filter(|r| r.verdict == super::TrialVerdict::PlanFound).count(),
    })
}

/// Summarizes each instance's trials, in the given order.
pub fn aggregate(runs: Vec<(InstanceConfig, Vec<TrialResult>)>) -> Result<AggregateReport, HarnessError> {
    let mut configs = Vec::new();
    let mut instances = Vec::new();
    let mut trials = Vec::new();
    for (cfg, results) in runs {
        instances.push(summarize(&cfg.instance, &results)?);
        configs.push(cfg);
        trials.extend(results);
    }
    let n = instances.len() as f64;
    let suite = SuiteSummary {
        instances: instances.len(),
        baseline_mean: instances.iter().map(|s| s.baseline).sum::<f64>() / n,
        queries_mean: instances.iter().map(|s| s.queries_mean).sum::<f64>() / n,
        zero_query_instances: instances.iter().filter(|s| s.queries_mean == 0.0).count(),
    };
    Ok(AggregateReport {
        configs,
        instances,
        suite,
        trials,
    })
}

pub const CSV_COLUMNS: [&str; 9] = [
    "instance",
    "baseline",
    "queries_mean",
    "queries_std",
    "time_mean",
    "time_std",
    "trials",
    "completed",
    "plans_found",
];

/// Columns that hold wall-clock measurements.
pub const TIME_COLUMNS: [usize; 2] = [4, 5];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with `#` comment lines recording each instance's configuration and
/// the suite totals.
pub fn emit_csv(report: &AggregateReport) -> String {
    let mut out = String::new();
    for c in &report.configs {
        let k = &c.config;
        let budget = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        writeln!(
            out,
            "# config {}: seed={} prec_drop_rate={} del_drop_rate={} goal_drop_count={} beta={} trials={} node_budget={} time_budget_ms={}",
            c.instance,
            k.seed,
            k.prec_drop_rate,
            k.del_drop_rate,
            k.goal_drop_count,
            k.beta,
            k.trials,
            budget(k.node_budget.map(|v| v.to_string())),
            budget(k.time_budget_ms.map(|v| v.to_string())),
        )
        .unwrap();
    }
    writeln!(out, "{}", CSV_COLUMNS.join(",")).unwrap();
    for s in &report.instances {
        writeln!(
            out,
            "{},{:.2},{:.2},{:.2},{:.4},{:.4},{},{},{}",
            csv_field(&s.instance),
            s.baseline,
            s.queries_mean,
            s.queries_std,
            s.time_mean,
            s.time_std,
            s.trials,
            s.completed,
            s.plans_found
        )
        .unwrap();
    }
    let t = &report.suite;
    writeln!(
        out,
        "# suite: instances={} baseline_mean={:.2} queries_mean={:.2} zero_query_instances={}",
        t.instances, t.baseline_mean, t.queries_mean, t.zero_query_instances
    )
    .unwrap();
    out
}

pub fn emit_json(report: &AggregateReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::TrialVerdict;
    use std::time::Duration;

    fn trial(q: usize, verdict: TrialVerdict) -> TrialResult {
        TrialResult {
            instance: "x".into(),
            trial: 0,
            seed: 0,
            attempts: 1,
            baseline: Some(5),
            queries: q,
            wall_time: Duration::from_millis(10),
            verdict,
            planner_calls: 0,
            error: None,
        }
    }

    #[test]
    fn statistics() {
        assert_eq!(mean_std(&[4.0]), (4.0, 0.0));
        assert_eq!(mean_std(&[0.0, 0.0, 0.0]), (0.0, 0.0));
        let (m, s) = mean_std(&[2.0, 4.0]);
        assert_eq!(m, 3.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn resource_errors_are_excluded() {
        let rs = vec![trial(2, TrialVerdict::PlanFound), trial(9, TrialVerdict::ResourceError), trial(4, TrialVerdict::NoPlan)];
        let s = summarize("x", &rs).unwrap();
        assert_eq!((s.trials, s.completed, s.plans_found), (3, 2, 1));
        assert_eq!(s.queries_mean, 3.0);
        assert!(matches!(
            summarize("x", &[trial(1, TrialVerdict::ResourceError)]),
            Err(HarnessError::ZeroCompleted { .. })
        ));
    }

    #[test]
    fn csv_shape() {
        let cfg = InstanceConfig {
            instance: "x".into(),
            config: ScenarioConfig::default(),
        };
        let r = aggregate(vec![(cfg, vec![trial(0, TrialVerdict::PlanFound)])]).unwrap();
        let csv = emit_csv(&r);
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], CSV_COLUMNS.join(","));
        assert_eq!(rows[1], "x,5.00,0.00,0.00,0.0100,0.0000,1,1,1");
        assert_eq!(r.suite.zero_query_instances, 1);
        assert!(emit_json(&r).contains("\"queries_mean\": 0.0"));
    }
}
