//! Grounding of typed schemas into a propositional [`PlanningTask`].

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use super::ast::*;
use super::PddlError;
use crate::task::{DomainModel, FluentId, GroundAction, PlanningTask, State};

pub const DEFAULT_GROUNDING_CAP: usize = 5_000_000;

/// Bijection between ground atoms and dense fluent ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FluentTable {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, FluentId>,
}

impl FluentTable {
    /// Builds a table from atoms in the given order.
    pub fn from_atoms(atoms: Vec<GroundAtom>) -> Self {
        let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        FluentTable { atoms, index }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn id(&self, atom: &GroundAtom) -> Option<FluentId> {
        self.index.get(atom).copied()
    }

    pub fn atom(&self, id: FluentId) -> Option<&GroundAtom> {
        self.atoms.get(id)
    }

    pub fn atoms(&self) -> &[GroundAtom] {
        &self.atoms
    }

    /// Printable atom for `id`, falling back to `#id`.
    pub fn render(&self, id: FluentId) -> String {
        self.atom(id).map_or_else(|| format!("#{id}"), ToString::to_string)
    }

    pub fn render_state(&self, state: &State) -> Vec<String> {
        state.iter().map(|f| self.render(f)).collect()
    }

    /// Resolves atoms written as `(pred a b)` into a state.
    pub fn parse_state<S: AsRef<str>>(&self, atoms: &[S]) -> Result<State, PddlError> {
        let mut s = State::new();
        for text in atoms {
            let atom = parse_atom_text(text.as_ref())?;
            let id = self
                .id(&atom)
                .ok_or_else(|| PddlError::UnknownAtom { atom: atom.to_string() })?;
            s.insert(id);
        }
        Ok(s)
    }

    pub fn state_of(&self, atoms: &[GroundAtom]) -> Result<State, PddlError> {
        atoms
            .iter()
            .map(|a| self.id(a).ok_or_else(|| PddlError::UnknownAtom { atom: a.to_string() }))
            .collect()
    }
}

/// Parses a single ground atom such as `(on a b)`.
pub fn parse_atom_text(text: &str) -> Result<GroundAtom, PddlError> {
    let e = super::sexpr::parse_one(text)?;
    let items = e.as_list().unwrap_or(&[]);
    let mut symbols = items.iter().map(|i| {
        i.as_symbol().map(str::to_string).ok_or_else(|| PddlError::Syntax {
            line: i.pos().line,
            col: i.pos().col,
            message: "nested list in atom".into(),
        })
    });
    let predicate = symbols.next().ok_or_else(|| PddlError::Syntax {
        line: e.pos().line,
        col: e.pos().col,
        message: "empty atom".into(),
    })??;
    let args = symbols.collect::<Result<Vec<_>, _>>()?;
    Ok(GroundAtom::new(predicate, args))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroundingStats {
    pub fluents: usize,
    pub actions: usize,
    pub pruned_actions: usize,
}

#[derive(Debug, Clone)]
pub struct GroundingResult {
    pub task: PlanningTask,
    pub table: Arc<FluentTable>,
    pub stats: GroundingStats,
    /// Schema name → parameter count, for plan-file diagnostics.
    pub schema_arity: BTreeMap<String, usize>,
    /// Names of ground actions removed by static pruning.
    pub pruned: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundingOptions {
    pub cap: usize,
    pub prune_static: bool,
}

impl Default for GroundingOptions {
    fn default() -> Self {
        GroundingOptions {
            cap: DEFAULT_GROUNDING_CAP,
            prune_static: true,
        }
    }
}

struct Universe<'a> {
    types: &'a TypeHierarchy,
    objects: Vec<(String, String)>,
}

impl Universe<'_> {
    fn of_type(&self, ty: &str) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, t)| self.types.is_subtype(t, ty))
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

fn resource(what: &str, count: u128, cap: usize) -> PddlError {
    PddlError::ResourceLimit {
        what: what.to_string(),
        count: count.min(usize::MAX as u128) as usize,
        cap,
    }
}

fn product_size(domains: &[Vec<&str>]) -> u128 {
    domains.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
}

/// Calls `f` on every tuple of the cartesian product, last slot fastest.
fn for_each_binding<'a>(domains: &[Vec<&'a str>], mut f: impl FnMut(&[&'a str])) {
    if domains.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; domains.len()];
    let mut binding: Vec<&str> = domains.iter().map(|d| d[0]).collect();
    loop {
        f(&binding);
        let mut k = domains.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domains[k].len() {
                binding[k] = domains[k][idx[k]];
                break;
            }
            idx[k] = 0;
            binding[k] = domains[k][0];
        }
    }
}

/// Grounds with default options.
pub fn ground(domain: &DomainAst, problem: &ProblemAst) -> Result<GroundingResult, PddlError> {
    ground_with(domain, problem, GroundingOptions::default())
}

pub fn ground_with(
    domain: &DomainAst,
    problem: &ProblemAst,
    options: GroundingOptions,
) -> Result<GroundingResult, PddlError> {
    let mut objects: Vec<(String, String)> = domain
        .constants
        .iter()
        .chain(&problem.objects)
        .map(|o| (o.name.clone(), o.ty.clone()))
        .collect();
    objects.sort();
    let universe = Universe {
        types: &domain.types,
        objects,
    };

    // Fluent universe: every type-consistent atom, sorted by its text.
    let mut fluent_total: u128 = 0;
    let pred_domains: Vec<Vec<Vec<&str>>> = domain
        .predicates
        .iter()
        .map(|p| p.params.iter().map(|t| universe.of_type(&t.ty)).collect::<Vec<_>>())
        .collect();
    for d in &pred_domains {
        fluent_total = fluent_total.saturating_add(product_size(d));
    }
    if fluent_total > options.cap as u128 {
        return Err(resource("fluents", fluent_total, options.cap));
    }
    let mut atoms = Vec::with_capacity(fluent_total as usize);
    for (p, doms) in domain.predicates.iter().zip(&pred_domains) {
        for_each_binding(doms, |b| {
            atoms.push(GroundAtom::new(p.name.clone(), b.iter().map(|s| s.to_string()).collect()));
        });
    }
    let mut keyed: Vec<(String, GroundAtom)> = atoms.into_iter().map(|a| (a.to_string(), a)).collect();
    keyed.sort();
    let table = FluentTable::from_atoms(keyed.into_iter().map(|(_, a)| a).collect());

    let schema_domains: Vec<Vec<Vec<&str>>> = domain
        .action_schemas
        .iter()
        .map(|s| s.params.iter().map(|t| universe.of_type(&t.ty)).collect())
        .collect();
    let action_total = schema_domains
        .iter()
        .fold(0u128, |acc, d| acc.saturating_add(product_size(d)));
    if action_total > options.cap as u128 {
        return Err(resource("ground actions", action_total, options.cap));
    }

    let mut actions = Vec::with_capacity(action_total as usize);
    for (schema, doms) in domain.action_schemas.iter().zip(&schema_domains) {
        let resolve = |atoms: &[AtomSchema], binding: &[&str]| -> State {
            atoms
                .iter()
                .map(|a| {
                    let args = a
                        .args
                        .iter()
                        .map(|t| match t {
                            Term::Param(i) => binding[*i].to_string(),
                            Term::Constant(c) => c.clone(),
                        })
                        .collect();
                    let atom = GroundAtom::new(a.predicate.clone(), args);
                    // Schema atoms are type-checked, so the atom is in the universe.
                    table.id(&atom).expect("type-checked atom missing from the fluent universe")
                })
                .collect()
        };
        for_each_binding(doms, |binding| {
            let mut name = format!("({}", schema.name);
            for b in binding {
                name.push(' ');
                name.push_str(b);
            }
            name.push(')');
            actions.push(GroundAction {
                id: 0,
                name,
                pre: resolve(&schema.pre, binding),
                add: resolve(&schema.add, binding),
                del: resolve(&schema.del, binding),
            });
        });
    }

    let init = table.state_of(&problem.init)?;
    let goal = table.state_of(&problem.goal)?;

    let mut pruned = Vec::new();
    if options.prune_static {
        let mut possible = init.clone();
        for a in &actions {
            possible.union_with(&a.add);
        }
        actions.retain(|a| {
            let keep = a.pre.is_subset(&possible);
            if !keep {
                pruned.push(a.name.clone());
            }
            keep
        });
    }

    let fluent_count = table.len();
    let dm = DomainModel::new(fluent_count, actions).expect("ground atoms resolve through the table");
    let stats = GroundingStats {
        fluents: fluent_count,
        actions: dm.actions.len(),
        pruned_actions: pruned.len(),
    };
    let task = PlanningTask::new(Arc::new(dm), init, goal).expect("init and goal resolve through the table");
    Ok(GroundingResult {
        task,
        table: Arc::new(table),
        stats,
        schema_arity: domain
            .action_schemas
            .iter()
            .map(|s| (s.name.clone(), s.params.len()))
            .collect(),
        pruned,
    })
}
