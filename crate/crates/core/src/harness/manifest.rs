//! Scenario manifests and benchmark suites (JSON).
//!
//! A manifest names a robot domain and problem. Everything on the human
//! side is synthesized per trial unless given explicitly:
//!
//! ```json
//! {
//!   "name": "tea",
//!   "domain": "robot-domain.pddl",
//!   "problem": "problem.pddl",
//!   "human_domain": "human-domain.pddl",
//!   "human_plan": "human.plan",
//!   "goal_spec": ["(tea-made)"],
//!   "hidden_goal": ["(tea-made)", "(brewed-high)"],
//!   "config": { "seed": 1, "trials": 10 }
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory. A suite is
//! `{"config": {...}, "instances": [...]}` where each instance is a manifest
//! object or a path to a manifest file; instance configs override the suite
//! config field by field.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{HarnessError, ScenarioConfig};
use crate::pddl::{ground, parse_atom_text, parse_domain, parse_plan, parse_problem, read_text, FluentTable, GroundingResult};
use crate::task::{DomainModel, Plan, State};

type JsonMap = serde_json::Map<String, serde_json::Value>;

/// Ground-level changes turning the robot domain into the human one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanEdit {
    pub action: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop_pre: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop_del: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub domain: PathBuf,
    pub problem: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_domain: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_problem: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_edits: Option<Vec<HumanEdit>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_plan: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_plan_actions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_spec: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_goal: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "JsonMap::is_empty")]
    pub config: JsonMap,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SuiteEntry {
    Path(PathBuf),
    Inline(Box<Manifest>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    #[serde(default)]
    config: JsonMap,
    instances: Vec<SuiteEntry>,
}

fn io_err(path: &Path, e: impl ToString) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Json {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

impl Manifest {
    /// Reads a manifest and makes its paths absolute or relative to the
    /// current directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let m: Manifest = read_json(path)?;
        Ok(m.rebased(&parent_dir(path)))
    }

    /// Resolves relative paths against `dir`.
    pub fn rebased(mut self, dir: &Path) -> Self {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        fix(&mut self.domain);
        fix(&mut self.problem);
        for p in [&mut self.human_domain, &mut self.human_problem, &mut self.human_plan].into_iter().flatten() {
            fix(p);
        }
        self
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.problem
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into())
        })
    }
}

/// A suite: instances with their configs already merged.
#[derive(Debug, Clone)]
pub struct Suite {
    pub config: ScenarioConfig,
    pub instances: Vec<Manifest>,
}

impl Suite {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let file: SuiteFile = read_json(path)?;
        let dir = parent_dir(path);
        let config = ScenarioConfig::default().merged(&file.config)?;
        let mut instances = Vec::new();
        for entry in file.instances {
            instances.push(match entry {
                SuiteEntry::Path(p) => Manifest::load(&dir.join(p))?,
                SuiteEntry::Inline(m) => m.rebased(&dir),
            });
        }
        if instances.is_empty() {
            return Err(HarnessError::Config("suite has no instances".into()));
        }
        Ok(Suite { config, instances })
    }

    /// Reads either a suite file or a single manifest.
    pub fn load_any(path: &Path) -> Result<Self, HarnessError> {
        let value: serde_json::Value = read_json(path)?;
        if value.get("instances").is_some() {
            Suite::load(path)
        } else {
            Ok(Suite {
                config: ScenarioConfig::default(),
                instances: vec![Manifest::load(path)?],
            })
        }
    }
}

/// Where the human model comes from in each trial.
#[derive(Debug, Clone)]
pub enum HumanDomainSource {
    /// Degrade the robot domain afresh per trial.
    Degrade,
    Fixed(Arc<DomainModel>),
}

/// A manifest with all files parsed and grounded.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub robot: GroundingResult,
    pub human_domain: HumanDomainSource,
    pub human_init: State,
    pub human_plan: Option<Plan>,
    pub goal_spec: Option<State>,
    /// `G*`: the explicit hidden goal or the problem's goal.
    pub true_goal: State,
    pub config: ScenarioConfig,
}

impl Scenario {
    pub fn table(&self) -> &Arc<FluentTable> {
        &self.robot.table
    }

    /// Parses and grounds everything `manifest` names. The manifest's own
    /// config is overlaid on `base`.
    pub fn from_manifest(manifest: &Manifest, base: &ScenarioConfig) -> Result<Self, HarnessError> {
        let config = base.merged(&manifest.config)?;
        let robot_ast = parse_domain(&read_text(&manifest.domain)?)?;
        let problem_text = read_text(&manifest.problem)?;
        let robot = ground(&robot_ast, &parse_problem(&problem_text, &robot_ast)?)?;
        let table = Arc::clone(&robot.table);
        let state = |atoms: &[String]| -> Result<State, HarnessError> { Ok(table.parse_state(atoms)?) };

        if manifest.human_domain.is_some() && manifest.human_edits.is_some() {
            return Err(HarnessError::Config("give human_domain or human_edits, not both".into()));
        }
        if manifest.human_plan.is_some() && manifest.human_plan_actions.is_some() {
            return Err(HarnessError::Config("give human_plan or human_plan_actions, not both".into()));
        }

        let (human_domain, human_grounding, human_init) = if let Some(path) = &manifest.human_domain {
            let ast = parse_domain(&read_text(path)?)?;
            let ptext = match &manifest.human_problem {
                Some(p) => read_text(p)?,
                None => problem_text.clone(),
            };
            let g = ground(&ast, &parse_problem(&ptext, &ast)?)?;
            if *g.table != *robot.table {
                return Err(HarnessError::Config(format!(
                    "human model has a different fluent universe ({} vs {} fluents); declare the same predicates and objects",
                    g.table.len(),
                    robot.table.len()
                )));
            }
            let init = g.task.init.clone();
            (HumanDomainSource::Fixed(Arc::clone(&g.task.domain)), g, init)
        } else {
            let init = match &manifest.human_problem {
                Some(p) => {
                    let g = ground(&robot_ast, &parse_problem(&read_text(p)?, &robot_ast)?)?;
                    g.task.init.clone()
                }
                None => robot.task.init.clone(),
            };
            match &manifest.human_edits {
                Some(edits) => {
                    let d = apply_edits(&robot.task.domain, edits, &robot.table)?;
                    (HumanDomainSource::Fixed(Arc::new(d)), robot.clone(), init)
                }
                None => (HumanDomainSource::Degrade, robot.clone(), init),
            }
        };

        let human_plan = match (&manifest.human_plan, &manifest.human_plan_actions) {
            (Some(path), _) => Some(parse_plan(&read_text(path)?, &human_grounding)?),
            (None, Some(steps)) => Some(parse_plan(&steps.join("\n"), &human_grounding)?),
            (None, None) => None,
        };
        if human_plan.is_some() && manifest.goal_spec.is_none() {
            return Err(HarnessError::Config("an explicit human plan needs an explicit goal_spec".into()));
        }

        Ok(Scenario {
            name: manifest.display_name(),
            human_domain,
            human_init,
            human_plan,
            goal_spec: manifest.goal_spec.as_deref().map(state).transpose()?,
            true_goal: match &manifest.hidden_goal {
                Some(atoms) => state(atoms)?,
                None => robot.task.goal.clone(),
            },
            robot,
            config,
        })
    }
}

/// Applies `edits` to a copy of `domain`.
pub fn apply_edits(domain: &DomainModel, edits: &[HumanEdit], table: &FluentTable) -> Result<DomainModel, HarnessError> {
    let mut d = domain.clone();
    for e in edits {
        let name = parse_atom_text(&e.action)?.to_string();
        let id = d
            .action_by_name(&name)
            .ok_or_else(|| HarnessError::Config(format!("human edit names unknown action {name}")))?
            .id;
        let pre = table.parse_state(&e.drop_pre)?;
        let del = table.parse_state(&e.drop_del)?;
        let a = &mut d.actions[id];
        a.pre.difference_with(&pre);
        a.del.difference_with(&del);
    }
    Ok(d)
}

/// The edits that turn `robot` into `human`, for writing out a generated
/// scenario.
pub fn diff_edits(robot: &DomainModel, human: &DomainModel, table: &FluentTable) -> Vec<HumanEdit> {
    robot
        .actions
        .iter()
        .zip(&human.actions)
        .filter_map(|(r, h)| {
            let drop_pre = table.render_state(&r.pre.difference(&h.pre));
            let drop_del = table.render_state(&r.del.difference(&h.del));
            (!drop_pre.is_empty() || !drop_del.is_empty()).then(|| HumanEdit {
                action: r.name.clone(),
                drop_pre,
                drop_del,
            })
        })
        .collect()
}
