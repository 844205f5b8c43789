mod oracle;
mod transcript;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use goalign::alignment::{
    make_simulated_oracle, parse_answer_script, run_elicitation, Oracle, ScriptedOracle, SessionErrorKind, SessionVerdict,
};
use goalign::harness::{
    build_trial, diff_edits, emit_csv, emit_json, run_suite, BuildError, HarnessError, HumanDomainSource, Manifest,
    Scenario, ScenarioConfig, Suite,
};
use goalign::pddl::{format_plan, load_task_with, parse_plan, read_text, GroundingOptions, PddlError};
use goalign::planner::{ExternalPlanner, Planner, PlannerError, SearchLimits, Verdict};
use goalign::task::{validate_plan, Verdict as PlanVerdict};

use oracle::InteractiveOracle;
use transcript::{replay_script, SessionContext, Transcript};

const EXIT_OK: u8 = 0;
const EXIT_UNSOLVABLE: u8 = 10;
const EXIT_NO_PLAN: u8 = 10;
const EXIT_INVALID_PLAN: u8 = 11;
const EXIT_RESOURCE: u8 = 20;
const EXIT_USAGE: u8 = 2;

/// Goal alignment for STRIPS planning tasks.
///
/// Exit codes: 0 success, 2 usage or input error, 10 unsolvable / no plan,
/// 11 invalid plan, 20 planner budget exhausted.
#[derive(Parser, Debug)]
#[command(name = "goalign", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find an optimal plan for a PDDL domain and problem.
    Plan {
        domain: PathBuf,
        problem: PathBuf,
        /// Write the plan here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check a plan file against a domain and problem.
    Validate {
        domain: PathBuf,
        problem: PathBuf,
        plan: PathBuf,
    },
    /// Run one goal alignment session for a scenario manifest.
    Elicit {
        manifest: PathBuf,
        /// Which trial's synthesized instance to use.
        #[arg(long, default_value_t = 0)]
        trial: usize,
        /// Answer the queries yourself.
        #[arg(long, conflicts_with = "answers")]
        interactive: bool,
        /// Replay answers from a script (`(atom) y` lines) or a transcript JSON.
        #[arg(long)]
        answers: Option<PathBuf>,
        /// Write the session transcript (JSON) here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the robot plan here.
        #[arg(long)]
        plan_out: Option<PathBuf>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Run every trial of a suite or manifest and report query counts.
    Bench {
        config: PathBuf,
        #[arg(long, value_enum, env = "GA_FORMAT", default_value_t = Format::Csv)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "GA_TRIALS")]
        trials: Option<usize>,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Materialize one trial of a manifest as an explicit manifest.
    Generate {
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        trial: usize,
        /// Output manifest path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct BudgetArgs {
    /// Expansion limit per planner call (0 for none).
    #[arg(long, env = "GA_NODE_BUDGET")]
    node_budget: Option<usize>,
    /// Time limit per planner call, in milliseconds.
    #[arg(long, env = "GA_TIME_BUDGET")]
    time_budget: Option<u64>,
    /// Shell command for an external planner; see the README.
    #[arg(long, env = "GA_EXTERNAL_PLANNER")]
    external_planner: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct ScenarioArgs {
    #[arg(long, env = "GA_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "GA_BETA")]
    beta: Option<f64>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// An error with the exit code it should produce.
#[derive(Debug)]
struct Exit(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        let e = e.into();
        let code = if e.downcast_ref::<PlannerError>().is_some() {
            EXIT_RESOURCE
        } else {
            EXIT_USAGE
        };
        Exit(code, e)
    }
}

type CmdResult = std::result::Result<u8, Exit>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Plan {
            domain,
            problem,
            out,
            budget,
        } => cmd_plan(&domain, &problem, out.as_deref(), &budget),
        Command::Validate { domain, problem, plan } => cmd_validate(&domain, &problem, &plan),
        Command::Elicit {
            manifest,
            trial,
            interactive,
            answers,
            out,
            plan_out,
            scenario,
        } => cmd_elicit(&manifest, trial, interactive, answers.as_deref(), out.as_deref(), plan_out.as_deref(), &scenario),
        Command::Bench {
            config,
            format,
            out,
            trials,
            scenario,
        } => cmd_bench(&config, format, out.as_deref(), trials, &scenario),
        Command::Generate {
            manifest,
            trial,
            out,
            scenario,
        } => cmd_generate(&manifest, trial, &out, &scenario),
    }
}

fn planner_from(budget: &BudgetArgs, base: SearchLimits) -> Planner {
    let mut limits = base;
    if let Some(n) = budget.node_budget {
        limits.max_expansions = (n > 0).then_some(n);
    }
    if let Some(ms) = budget.time_budget {
        limits.time_limit = Some(Duration::from_millis(ms));
    }
    Planner::new(limits).with_external(budget.external_planner.clone().map(ExternalPlanner::new))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_plan(domain: &Path, problem: &Path, out: Option<&Path>, budget: &BudgetArgs) -> CmdResult {
    let g = load_task_with(domain, problem, GroundingOptions::default())?;
    let planner = planner_from(budget, SearchLimits::default());
    let result = planner.optimal_plan(&g.task)?;
    match result.verdict {
        Verdict::Solved(plan) => {
            let mut text = format_plan(&plan, &g.task.domain);
            text.push_str(&format!("; cost = {} (unit cost)\n", plan.cost()));
            write_or_print(out, &text)?;
            eprintln!(
                "solved: cost {}, {} expanded, {} generated, {:.3}s",
                plan.cost(),
                result.expanded,
                result.generated,
                result.wall_time.as_secs_f64()
            );
            Ok(EXIT_OK)
        }
        Verdict::Unsolvable => {
            eprintln!("unsolvable: no plan reaches the goal");
            Ok(EXIT_UNSOLVABLE)
        }
    }
}

fn cmd_validate(domain: &Path, problem: &Path, plan_path: &Path) -> CmdResult {
    // Keep statically dead actions so plans using them fail as inapplicable.
    let options = GroundingOptions {
        prune_static: false,
        ..GroundingOptions::default()
    };
    let g = load_task_with(domain, problem, options)?;
    let plan = parse_plan(&read_text(plan_path)?, &g)?;
    let report = validate_plan(&g.task, &plan);
    match &report.verdict {
        PlanVerdict::Valid => {
            println!("valid: {} steps, cost {}", plan.len(), report.cost);
            Ok(EXIT_OK)
        }
        PlanVerdict::Inapplicable { step, action, unmet } => {
            println!(
                "invalid: step {step} {} is inapplicable; unmet preconditions: {}",
                g.task.domain.actions[*action].name,
                g.table.render_state(unmet).join(" ")
            );
            Ok(EXIT_INVALID_PLAN)
        }
        PlanVerdict::GoalUnmet { missing } => {
            println!("invalid: plan ends without reaching the goal; missing: {}", g.table.render_state(missing).join(" "));
            Ok(EXIT_INVALID_PLAN)
        }
    }
}

/// The JSON fields a command line overrides, applied on top of every
/// instance's own config.
fn overrides(args: &ScenarioArgs, trials: Option<usize>) -> serde_json::Map<String, serde_json::Value> {
    let mut m = serde_json::Map::new();
    if let Some(s) = args.seed {
        m.insert("seed".into(), s.into());
    }
    if let Some(b) = args.beta {
        m.insert("beta".into(), b.into());
    }
    if let Some(t) = trials {
        m.insert("trials".into(), t.into());
    }
    if let Some(n) = args.budget.node_budget {
        m.insert("node_budget".into(), if n == 0 { serde_json::Value::Null } else { n.into() });
    }
    if let Some(ms) = args.budget.time_budget {
        m.insert("time_budget_ms".into(), ms.into());
    }
    m
}

fn apply_overrides(manifest: &mut Manifest, patch: &serde_json::Map<String, serde_json::Value>) {
    for (k, v) in patch {
        manifest.config.insert(k.clone(), v.clone());
    }
}

fn scenario_planner(config: &ScenarioConfig, budget: &BudgetArgs) -> Planner {
    let mut p = Planner::new(config.limits()).with_external(budget.external_planner.clone().map(ExternalPlanner::new));
    p.optimal_robot_plans = config.optimal_robot_plans;
    p
}

fn load_scenario(path: &Path, args: &ScenarioArgs) -> Result<Scenario, HarnessError> {
    let mut manifest = Manifest::load(path)?;
    apply_overrides(&mut manifest, &overrides(args, None));
    Scenario::from_manifest(&manifest, &ScenarioConfig::default())
}

fn build_or_exit(scenario: &Scenario, trial: usize, planner: &Planner) -> std::result::Result<goalign::harness::TrialInstance, Exit> {
    build_trial(scenario, trial, planner).map_err(|e| match e {
        BuildError::Resource(e) => Exit(EXIT_RESOURCE, anyhow!(e).context("while synthesizing the human plan")),
        BuildError::Fatal(e) => Exit(EXIT_USAGE, anyhow!(e)),
    })
}

fn cmd_elicit(
    manifest_path: &Path,
    trial: usize,
    interactive: bool,
    answers: Option<&Path>,
    out: Option<&Path>,
    plan_out: Option<&Path>,
    args: &ScenarioArgs,
) -> CmdResult {
    let scenario = load_scenario(manifest_path, args)?;
    let planner = scenario_planner(&scenario.config, &args.budget);
    let built = build_or_exit(&scenario, trial, &planner)?;
    let table = scenario.table().clone();
    eprintln!("instance {} (trial {trial}, seed {})", scenario.name, scenario.config.seed);

    let (mut oracle, label): (Box<dyn Oracle>, &str) = if interactive {
        (Box::new(InteractiveOracle::new(io::stdin().lock(), table.clone())), "interactive")
    } else if let Some(path) = answers {
        let text = read_text(path)?;
        let script = if text.trim_start().starts_with('{') {
            let t: Transcript =
                serde_json::from_str(&text).with_context(|| format!("{}: not a session transcript", path.display()))?;
            replay_script(&t, &table)?
        } else {
            parse_answer_script(&text, &table)?
        };
        (Box::new(ScriptedOracle::new(script).with_table(table.clone())), "scripted")
    } else {
        (Box::new(make_simulated_oracle(built.hidden.clone())), "simulated")
    };

    let outcome = match run_elicitation(&built.instance, oracle.as_mut(), &planner) {
        Ok(o) => o,
        Err(e) => {
            for (i, q) in e.transcript.iter().enumerate() {
                eprintln!("query {}: {} -> {}", i + 1, table.render(q.fluent), if q.answer { "yes" } else { "no" });
            }
            let code = match e.kind {
                SessionErrorKind::Planner(_) | SessionErrorKind::Analysis(_) => EXIT_RESOURCE,
                SessionErrorKind::Oracle(_) => EXIT_USAGE,
            };
            return Err(Exit(code, anyhow!(e)));
        }
    };

    let robot = &scenario.robot.task.domain;
    let record = transcript::build(
        SessionContext {
            instance: scenario.name.clone(),
            seed: scenario.config.seed,
            trial,
            oracle: label,
            baseline: built.instance.baseline(),
            goal_spec: table.render_state(built.instance.goal_spec()),
        },
        &outcome,
        &table,
        robot,
    );

    let mut summary = String::new();
    summary.push_str(&format!("goal specification: {}\n", record.goal_spec.join(" ")));
    summary.push_str(&format!("candidate fluents: {}\n", record.baseline));
    for (i, q) in record.queries.iter().enumerate() {
        let tag = q.termination.map(|t| format!("  [condition {t}]")).unwrap_or_default();
        summary.push_str(&format!("query {}: {} -> {}{tag}\n", i + 1, q.fluent, if q.answer { "yes" } else { "no" }));
    }
    summary.push_str(&format!("exit: {}\n", record.exit));
    match &outcome.verdict {
        SessionVerdict::Plan(p) => {
            summary.push_str(&format!("plan found after {} queries ({} steps):\n", outcome.query_count, p.len()));
            summary.push_str(&format_plan(p, robot));
        }
        SessionVerdict::NoPlanExists => {
            summary.push_str(&format!("no plan exists (after {} queries)\n", outcome.query_count));
        }
    }
    print!("{summary}");

    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&record).context("serializing transcript")?;
        std::fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let (Some(path), Some(p)) = (plan_out, outcome.plan()) {
        std::fs::write(path, format_plan(p, robot)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(match outcome.verdict {
        SessionVerdict::Plan(_) => EXIT_OK,
        SessionVerdict::NoPlanExists => EXIT_NO_PLAN,
    })
}

fn cmd_bench(config: &Path, format: Format, out: Option<&Path>, trials: Option<usize>, args: &ScenarioArgs) -> CmdResult {
    let mut suite = Suite::load_any(config)?;
    let patch = overrides(args, trials);
    for m in &mut suite.instances {
        apply_overrides(m, &patch);
    }
    let mut planner = Planner::new(suite.config.limits());
    planner.external = args.budget.external_planner.clone().map(ExternalPlanner::new);
    planner.optimal_robot_plans = suite.config.optimal_robot_plans;
    let report = match run_suite(&suite, &planner) {
        Ok(r) => r,
        Err(e @ HarnessError::ZeroCompleted { .. }) => return Err(Exit(EXIT_RESOURCE, anyhow!(e))),
        Err(e) => return Err(e.into()),
    };
    let text = match format {
        Format::Csv => emit_csv(&report),
        Format::Json => emit_json(&report),
    };
    write_or_print(out, &text)?;
    let s = &report.suite;
    eprintln!(
        "{} instances: mean queries {:.2} vs mean baseline {:.2}; {} with zero queries",
        s.instances, s.queries_mean, s.baseline_mean, s.zero_query_instances
    );
    for r in report.trials.iter().filter(|r| r.error.is_some()) {
        eprintln!("{} trial {}: {}", r.instance, r.trial, r.error.as_deref().unwrap_or(""));
    }
    Ok(EXIT_OK)
}

fn cmd_generate(manifest_path: &Path, trial: usize, out: &Path, args: &ScenarioArgs) -> CmdResult {
    let mut manifest = Manifest::load(manifest_path)?;
    apply_overrides(&mut manifest, &overrides(args, None));
    let scenario = Scenario::from_manifest(&manifest, &ScenarioConfig::default())?;
    let planner = scenario_planner(&scenario.config, &args.budget);
    let built = build_or_exit(&scenario, trial, &planner)?;
    let table = scenario.table();
    let robot = &scenario.robot.task.domain;
    let inst = &built.instance;

    let absolute = |p: &Path| -> std::result::Result<PathBuf, Exit> {
        std::fs::canonicalize(p).map_err(|e| Exit(EXIT_USAGE, anyhow!(PddlError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })))
    };
    let mut generated = Manifest {
        name: Some(format!("{}-trial{trial}", scenario.name)),
        domain: absolute(&manifest.domain)?,
        problem: absolute(&manifest.problem)?,
        human_plan_actions: Some(inst.human_plan().0.iter().map(|&a| inst.human_domain().actions[a].name.clone()).collect()),
        goal_spec: Some(table.render_state(inst.goal_spec())),
        hidden_goal: Some(table.render_state(built.hidden.state())),
        ..Manifest::default()
    };
    match (&scenario.human_domain, &manifest.human_domain) {
        (_, Some(hd)) => {
            generated.human_domain = Some(absolute(hd)?);
            generated.human_problem = manifest.human_problem.as_deref().map(absolute).transpose()?;
        }
        (HumanDomainSource::Degrade, None) | (HumanDomainSource::Fixed(_), None) => {
            generated.human_edits = Some(diff_edits(robot, inst.human_domain(), table));
            generated.human_problem = manifest.human_problem.as_deref().map(absolute).transpose()?;
        }
    }
    let cfg = &scenario.config;
    let keep = serde_json::json!({ "seed": cfg.seed, "beta": cfg.beta, "trials": 1 });
    generated.config = keep.as_object().cloned().unwrap_or_default();

    let json = serde_json::to_string_pretty(&generated).context("serializing manifest")?;
    std::fs::write(out, json + "\n").with_context(|| format!("cannot write {}", out.display()))?;
    eprintln!(
        "wrote {} (seed {}, trial {trial}, {} candidate fluents, human plan of {} steps)",
        out.display(),
        cfg.seed,
        inst.baseline(),
        inst.human_plan().len()
    );
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn interactive_and_answers_conflict() {
        let r = Cli::try_parse_from(["goalign", "elicit", "m.json", "--interactive", "--answers", "a.txt"]);
        assert!(r.is_err());
    }
}
