//! Acceptance checks. Each criterion prints one PASS or FAIL line; the
//! process exits non-zero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use goalign::alignment::{
    all_hidden_goals, analyze, approx_value_in, approx_value_out, fluent_probability, make_simulated_oracle,
    probability_from_delta, run_elicitation, BruteForce, Direction, HaglInstance,
};
use goalign::harness::{run_suite, Suite, TIME_COLUMNS};
use goalign::micro::{random_instance, random_task, MicroInstance, MicroInstanceConfig, MicroTaskConfig};
use goalign::planner::{bfs_oracle, check_solvable, optimal_plan, Planner, SearchLimits};
use goalign::task::{apply, simulate, validate_plan, DomainModel, GroundAction, Plan, State, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PLANNER_TASKS: u64 = 120;
const PLANNER_MAX_FLUENTS: usize = 12;
const PLANNER_MAX_ACTIONS: usize = 25;
const PLANNER_TIME_LIMIT: Duration = Duration::from_secs(60);

const APPLY_CASES: usize = 10_000;
const APPLY_UNIVERSE: usize = 70;

const BOUND_INSTANCES: usize = 50;
const BOUND_MAX_CANDIDATES: usize = 10;
/// Float slack when comparing the approximation to the enumerated value.
const BOUND_EPS: f64 = 1e-12;

const COMPLETENESS_INSTANCES: usize = 25;

const SUITE_MIN_INSTANCES: usize = 5;
const SUITE_MIN_DOMAINS: usize = 3;
const SUITE_TRIALS: usize = 10;
const SUITE_TIME_LIMIT: Duration = Duration::from_secs(300);

const PROB_TOL: f64 = 1e-9;

const FAST_PATH_INSTANCES: usize = 25;
const FAST_PATH_MAX_CALLS: usize = 2;

const SEED_BASE: u64 = 0xA11C;

fn micro(seed: u64, cfg: &MicroInstanceConfig) -> MicroInstance {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), cfg)
}

fn suite_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/suite.json")
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn planner_optimality() -> Outcome {
    let start = Instant::now();
    let cfg = MicroTaskConfig {
        fluents: 4..=PLANNER_MAX_FLUENTS,
        actions: 3..=PLANNER_MAX_ACTIONS,
        ..MicroTaskConfig::default()
    };
    let (mut solved, mut mismatches) = (0, Vec::new());
    for seed in 0..PLANNER_TASKS {
        let seed = SEED_BASE + seed;
        let task = random_task(&mut ChaCha8Rng::seed_from_u64(seed), &cfg);
        assert!(task.fluent_count() <= PLANNER_MAX_FLUENTS && task.domain.actions.len() <= PLANNER_MAX_ACTIONS);
        let astar = optimal_plan(&task, &SearchLimits::unlimited()).map_err(|e| e.to_string())?;
        let oracle = bfs_oracle(&task).map_err(|e| e.to_string())?;
        if astar.cost() != oracle.cost() {
            mismatches.push(format!("seed {seed}: A* {:?} vs BFS {:?}", astar.cost(), oracle.cost()));
        }
        if let Some(p) = astar.plan() {
            solved += 1;
            if validate_plan(&task, p).verdict != Verdict::Valid {
                mismatches.push(format!("seed {seed}: A* plan does not validate"));
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("{PLANNER_TASKS} tasks ({solved} solvable), {} mismatches, {:.2?}", mismatches.len(), elapsed);
    if mismatches.is_empty() && elapsed < PLANNER_TIME_LIMIT {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", mismatches.join("; ")))
    }
}

fn random_ids(rng: &mut ChaCha8Rng) -> BTreeSet<usize> {
    let k = rng.gen_range(0..8);
    (0..k).map(|_| rng.gen_range(0..APPLY_UNIVERSE)).collect()
}

fn transition_semantics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_BASE);
    let mut mismatches = 0;
    let mut applicable = 0;
    for i in 0..APPLY_CASES {
        let mut s = random_ids(&mut rng);
        let pre = random_ids(&mut rng);
        // Bias toward applicable cases.
        if rng.gen_bool(0.5) {
            s.extend(&pre);
        }
        let (add, del) = (random_ids(&mut rng), random_ids(&mut rng));
        let action = GroundAction {
            id: i,
            name: format!("(a{i})"),
            pre: pre.iter().copied().collect(),
            add: add.iter().copied().collect(),
            del: del.iter().copied().collect(),
        };
        let naive: Option<BTreeSet<usize>> = pre
            .is_subset(&s)
            .then(|| s.difference(&del).copied().chain(add.iter().copied()).collect());
        let got = apply(&action, &s.iter().copied().collect::<State>()).ok();
        applicable += usize::from(naive.is_some());
        if got.map(|st| st.iter().collect::<BTreeSet<usize>>()) != naive {
            mismatches += 1;
        }
    }
    let detail = format!("{APPLY_CASES} cases ({applicable} applicable), {mismatches} mismatches");
    if mismatches == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn approximation_bound() -> Outcome {
    let cfg = MicroInstanceConfig {
        max_candidates: BOUND_MAX_CANDIDATES,
        ..MicroInstanceConfig::default()
    };
    let planner = Planner::default();
    let (mut checks, mut violations, mut empty_product) = (0, 0, 0);
    let mut first = None;
    for seed in 0..BOUND_INSTANCES as u64 {
        let seed = SEED_BASE + seed;
        let m = micro(seed, &cfg);
        assert!(m.instance.baseline() <= BOUND_MAX_CANDIDATES);
        let b = analyze(&m.instance, &planner).map_err(|e| e.to_string())?;
        let bf = BruteForce::new(&m.instance, &planner);
        for &f in &b.candidates {
            for (dir, approx) in [(Direction::In, approx_value_in(f, &b)), (Direction::Out, approx_value_out(f, &b))] {
                let exact = bf.value(&b, f, dir).map_err(|e| e.to_string())?;
                checks += 1;
                if approx > exact + BOUND_EPS {
                    violations += 1;
                    let vacuous = match dir {
                        Direction::In => b.unachievable.is_empty(),
                        Direction::Out => b.unachievable.iter().all(|g| g == f),
                    };
                    empty_product += usize::from(vacuous);
                    first.get_or_insert(format!("seed {seed} fluent {f} {dir:?}: approx {approx} > exact {exact}"));
                }
            }
        }
    }
    let detail = format!(
        "{BOUND_INSTANCES} instances, {checks} checks, {violations} violations ({empty_product} with an empty product)"
    );
    match first {
        None => Ok(detail),
        Some(f) => Err(format!("{detail}; first: {f}")),
    }
}

fn completeness() -> Outcome {
    let planner = Planner::default();
    let cfg = MicroInstanceConfig::default();
    let (mut sessions, mut violations, mut queried) = (0, Vec::new(), 0);
    for seed in 0..COMPLETENESS_INSTANCES as u64 {
        let seed = SEED_BASE + seed;
        let m = micro(seed, &cfg);
        let inst = &m.instance;
        for hidden in all_hidden_goals(inst) {
            sessions += 1;
            let out = run_elicitation(inst, &mut make_simulated_oracle(hidden.clone()), &planner)
                .map_err(|e| e.to_string())?;
            let solvable = check_solvable(&inst.robot_task(hidden.state().clone()), &SearchLimits::unlimited())
                .map_err(|e| e.to_string())?;
            queried += usize::from(out.query_count > 0);
            if out.plan().is_some() != solvable {
                violations.push(format!("seed {seed}: plan {} but solvable {solvable}", out.plan().is_some()));
            }
            if out.query_count > inst.baseline() {
                violations.push(format!("seed {seed}: {} queries > baseline {}", out.query_count, inst.baseline()));
            }
            if let Some(plan) = out.plan() {
                match simulate(plan, inst.robot_init(), inst.robot_domain()) {
                    Ok(end) if hidden.state().is_subset(&end) => {}
                    _ => violations.push(format!("seed {seed}: plan misses the hidden goal")),
                }
            }
        }
    }
    let detail = format!(
        "{COMPLETENESS_INSTANCES} instances, {sessions} hidden goals ({queried} needing queries), {} violations",
        violations.len()
    );
    if violations.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", violations.join("; ")))
    }
}

fn headline_effect() -> Outcome {
    let start = Instant::now();
    let suite = Suite::load(&suite_path()).map_err(|e| e.to_string())?;
    let domains: HashSet<&Path> = suite.instances.iter().filter_map(|m| m.domain.parent()).collect();
    let report = run_suite(&suite, &Planner::new(suite.config.limits())).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let s = &report.suite;
    let detail = format!(
        "{} instances over {} domains, seed {}, mean queries {:.2} vs baseline {:.2}, {} zero-query instances, {:.2?}",
        s.instances,
        domains.len(),
        suite.config.seed,
        s.queries_mean,
        s.baseline_mean,
        s.zero_query_instances,
        elapsed
    );
    let ok = s.instances >= SUITE_MIN_INSTANCES
        && domains.len() >= SUITE_MIN_DOMAINS
        && report.instances.iter().all(|i| i.trials == SUITE_TRIALS)
        && s.queries_mean < s.baseline_mean
        && s.zero_query_instances >= 1
        && elapsed < SUITE_TIME_LIMIT;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Human model: `a0` adds 0, `a1` needs 0 and adds 1, `a2` adds 1
/// directly. The human plan `a0 a1` costs 2; fluent 2 is never added.
fn probability_instance(beta: f64) -> HaglInstance {
    let act = |id: usize, pre: &[usize], add: &[usize]| GroundAction {
        id,
        name: format!("(a{id})"),
        pre: State::from_fluents(pre.iter().copied()),
        add: State::from_fluents(add.iter().copied()),
        del: State::new(),
    };
    let human = Arc::new(DomainModel::new(3, vec![act(0, &[], &[0]), act(1, &[0], &[1]), act(2, &[], &[1])]).unwrap());
    HaglInstance::new(
        Arc::clone(&human),
        State::new(),
        State::new(),
        human,
        State::new(),
        Plan(vec![0, 1]),
        beta,
    )
    .unwrap()
}

fn probability_formula() -> Outcome {
    let mut failures = Vec::new();
    if probability_from_delta(1.0, 0) != 1.0 {
        failures.push("p(Δ=0) != 1".to_string());
    }
    let p1 = probability_from_delta(1.0, 1);
    if (p1 - (-1f64).exp()).abs() > PROB_TOL {
        failures.push(format!("p(β=1, Δ=1) = {p1}"));
    }
    let ps: Vec<f64> = (0..=5).map(|d| probability_from_delta(1.0, d)).collect();
    if !ps.windows(2).all(|w| w[0] > w[1]) {
        failures.push(format!("not decreasing: {ps:?}"));
    }
    // Through the planner: goal {0} costs 1 (Δ=1), {1} costs 1 (Δ=1),
    // unreachable {2} gives 0.
    let inst = probability_instance(1.0);
    let planner = Planner::default();
    let p = |f| fluent_probability(&inst, f, &planner).map_err(|e| e.to_string());
    let (p0, p1_, p2) = (p(0)?, p(1)?, p(2)?);
    if (p0 - (-1f64).exp()).abs() > PROB_TOL || (p1_ - (-1f64).exp()).abs() > PROB_TOL {
        failures.push(format!("planner-derived p = {p0}, {p1_}"));
    }
    if p2 != 0.0 {
        failures.push(format!("unsolvable hypothesis has p = {p2}"));
    }
    let detail = format!("p(Δ=0..5) = {:?}, unsolvable p = {p2}", ps.iter().map(|p| format!("{p:.6}")).collect::<Vec<_>>());
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join("; ")))
    }
}

fn zero_query_fast_path() -> Outcome {
    let planner = Planner::default();
    let cfg = MicroInstanceConfig::default();
    let (mut found, mut scanned, mut max_calls, mut violations) = (0, 0u64, 0, Vec::new());
    while found < FAST_PATH_INSTANCES && scanned < 10_000 {
        let seed = SEED_BASE + scanned;
        let m = micro(seed, &cfg);
        scanned += 1;
        let inst = &m.instance;
        let expected = inst.robot_task(inst.expected_state().clone());
        if !check_solvable(&expected, &SearchLimits::unlimited()).map_err(|e| e.to_string())? {
            continue;
        }
        found += 1;
        planner.reset_calls();
        let out = run_elicitation(inst, &mut make_simulated_oracle(m.hidden.clone()), &planner)
            .map_err(|e| e.to_string())?;
        let calls = planner.calls();
        max_calls = max_calls.max(calls);
        if out.query_count != 0 || calls > FAST_PATH_MAX_CALLS || out.plan().is_none() {
            violations.push(format!("seed {seed}: {} queries, {calls} planner calls", out.query_count));
        }
    }
    let detail = format!(
        "{found} instances with a solvable expected state, max {max_calls} planner calls, {} violations",
        violations.len()
    );
    if found >= FAST_PATH_INSTANCES && violations.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", violations.join("; ")))
    }
}

fn strip_time(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            if l.starts_with('#') {
                return l.to_string();
            }
            l.split(',')
                .enumerate()
                .filter(|(i, _)| !TIME_COLUMNS.contains(i))
                .map(|(_, f)| f)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn strip_time_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            for k in ["wall_time", "time_mean", "time_std"] {
                m.remove(k);
            }
            m.values_mut().for_each(strip_time_json);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip_time_json),
        _ => {}
    }
}

fn bench(format: &str) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_goalign"))
        .args(["bench", "--format", format])
        .arg(suite_path())
        .env_remove("GA_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let (a, b) = (bench("csv")?, bench("csv")?);
    let csv_same = strip_time(&a) == strip_time(&b);
    let parse = |s: &str| -> Result<serde_json::Value, String> {
        let mut v = serde_json::from_str(s).map_err(|e| e.to_string())?;
        strip_time_json(&mut v);
        Ok(v)
    };
    let json_same = parse(&bench("json")?)? == parse(&bench("json")?)?;
    let detail = format!("csv identical: {csv_same}, json identical: {json_same} (time fields excluded)");
    if csv_same && json_same {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("planner optimality", planner_optimality),
        ("transition semantics", transition_semantics),
        ("approximation bound", approximation_bound),
        ("completeness and superset plans", completeness),
        ("fewer queries than baseline on the suite", headline_effect),
        ("probability formula", probability_formula),
        ("zero-query fast path", zero_query_fast_path),
        ("bench determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
