//! Complement fluents: `not-p` kept equal to the negation of `p` in every
//! reachable state, so avoidance can be written as a positive goal.

use std::sync::Arc;

use super::ast::GroundAtom;
use super::ground::{FluentTable, GroundingResult, GroundingStats};
use super::PddlError;
use crate::task::{DomainModel, FluentId, PlanningTask, State};

pub const COMPLEMENT_PREFIX: &str = "not-";

/// Adds a complement fluent for every id in `targets`.
///
/// Complements take ids `n, n+1, ...` in ascending target order, after the
/// original fluents. An action adding `f` deletes `not-f`; an action
/// deleting `f` (without also adding it) adds `not-f`.
pub fn compile_complements(result: &GroundingResult, targets: &State) -> Result<GroundingResult, PddlError> {
    let n = result.task.fluent_count();
    if let Some(bad) = targets.iter().find(|&f| f >= n) {
        return Err(PddlError::ComplementTarget { fluent: bad, fluent_count: n });
    }
    if targets.is_empty() {
        return Ok(result.clone());
    }
    let target_list: Vec<FluentId> = targets.to_vec();
    let complement_of = |f: FluentId| n + target_list.binary_search(&f).expect("target");

    let mut atoms = result.table.atoms().to_vec();
    for &f in &target_list {
        let orig = result.table.atom(f).cloned().unwrap_or_else(|| GroundAtom::new(format!("f{f}"), vec![]));
        let atom = GroundAtom::new(format!("{COMPLEMENT_PREFIX}{}", orig.predicate), orig.args);
        if result.table.id(&atom).is_some() {
            return Err(PddlError::ComplementNameClash { atom: atom.to_string() });
        }
        atoms.push(atom);
    }
    let table = FluentTable::from_atoms(atoms);

    let mut actions = result.task.domain.actions.clone();
    for a in &mut actions {
        let mut add = State::new();
        let mut del = State::new();
        for f in a.add.intersection(targets).iter() {
            del.insert(complement_of(f));
        }
        for f in a.del.difference(&a.add).intersection(targets).iter() {
            add.insert(complement_of(f));
        }
        a.add.union_with(&add);
        a.del.union_with(&del);
    }
    let fluent_count = n + target_list.len();
    let domain = DomainModel::new(fluent_count, actions).expect("complement ids are in range");

    let mut init = result.task.init.clone();
    for &f in &target_list {
        if !init.contains(f) {
            init.insert(complement_of(f));
        }
    }
    let task = PlanningTask::new(Arc::new(domain), init, result.task.goal.clone()).expect("in range");
    Ok(GroundingResult {
        stats: GroundingStats {
            fluents: fluent_count,
            ..result.stats
        },
        task,
        table: Arc::new(table),
        schema_arity: result.schema_arity.clone(),
        pruned: result.pruned.clone(),
    })
}

/// Id of the complement of `f`, if `f` was compiled.
pub fn complement_id(table: &FluentTable, f: FluentId) -> Option<FluentId> {
    let atom = table.atom(f)?;
    table.id(&GroundAtom::new(format!("{COMPLEMENT_PREFIX}{}", atom.predicate), atom.args.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{ground, parse_domain, parse_problem};
    use std::collections::{HashSet, VecDeque};

    fn micro() -> GroundingResult {
        // p toggled on by `on`, off by `off`; q set by `both`, which also clears p.
        let d = parse_domain(
            "(define (domain d) (:predicates (p) (q) (r))
               (:action on :parameters () :precondition () :effect (p))
               (:action off :parameters () :precondition (p) :effect (and (not (p)) (r)))
               (:action both :parameters () :precondition (r) :effect (and (q) (not (p)) (not (r)))))",
        )
        .unwrap();
        let p = parse_problem("(define (problem x) (:domain d) (:init) (:goal (q)))", &d).unwrap();
        ground(&d, &p).unwrap()
    }

    #[test]
    fn empty_targets_is_identity() {
        let g = micro();
        let c = compile_complements(&g, &State::new()).unwrap();
        assert_eq!(*c.task.domain, *g.task.domain);
        assert_eq!(c.task.init, g.task.init);
        assert_eq!(c.table, g.table);
    }

    #[test]
    fn single_toggle() {
        let g = micro();
        let p = g.table.parse_state(&["(p)"]).unwrap();
        let c = compile_complements(&g, &p).unwrap();
        let pid = p.iter().next().unwrap();
        let not_p = complement_id(&c.table, pid).unwrap();
        assert_eq!(c.table.render(not_p), "(not-p)");
        assert!(c.task.init.contains(not_p));
        let on = c.task.domain.action_by_name("(on)").unwrap();
        assert!(on.del.contains(not_p));
        let off = c.task.domain.action_by_name("(off)").unwrap();
        assert!(off.add.contains(not_p));
    }

    #[test]
    fn out_of_range_target() {
        let g = micro();
        assert!(matches!(
            compile_complements(&g, &State::from_fluents([99])),
            Err(PddlError::ComplementTarget { .. })
        ));
    }

    #[test]
    fn no_reachable_state_holds_both() {
        let g = micro();
        let all = State::from_fluents(0..g.task.fluent_count());
        let c = compile_complements(&g, &all).unwrap();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([c.task.init.clone()]);
        seen.insert(c.task.init.clone());
        while let Some(s) = queue.pop_front() {
            for f in 0..g.task.fluent_count() {
                let nf = complement_id(&c.table, f).unwrap();
                assert!(s.contains(f) ^ s.contains(nf), "state {s:?} breaks fluent {f}");
            }
            for a in &c.task.domain.actions {
                if let Ok(n) = crate::task::apply(a, &s) {
                    if seen.insert(n.clone()) {
                        queue.push_back(n);
                    }
                }
            }
        }
        assert!(seen.len() > 2);
    }
}
