//! Propositional PDDL output for a grounded task. Fluent `i` becomes the
//! nullary predicate `fi` and ground action `j` becomes `aj`, so plans coming
//! back from another planner map straight to action ids.

use std::fmt::Write;

use crate::task::{PlanningTask, State};

fn atoms(out: &mut String, s: &State) {
    for f in s.iter() {
        let _ = write!(out, " (f{f})");
    }
}

pub fn write_grounded_domain(task: &PlanningTask) -> String {
    let mut out = String::from("(define (domain grounded)\n  (:requirements :strips)\n  (:predicates");
    for f in 0..task.fluent_count() {
        let _ = write!(out, " (f{f})");
    }
    out.push_str(")\n");
    for a in &task.domain.actions {
        let _ = write!(out, "  ; {}\n  (:action a{}\n    :parameters ()\n    :precondition (and", a.name, a.id);
        atoms(&mut out, &a.pre);
        out.push_str(")\n    :effect (and");
        atoms(&mut out, &a.add);
        for f in a.del.difference(&a.add).iter() {
            let _ = write!(out, " (not (f{f}))");
        }
        out.push_str("))\n");
    }
    out.push_str(")\n");
    out
}

pub fn write_grounded_problem(task: &PlanningTask) -> String {
    let mut out = String::from("(define (problem grounded-task)\n  (:domain grounded)\n  (:init");
    atoms(&mut out, &task.init);
    out.push_str(")\n  (:goal (and");
    atoms(&mut out, &task.goal);
    out.push_str(")))\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{ground, parse_domain, parse_problem};
    use crate::task::DomainModel;

    #[test]
    fn output_parses_back_with_same_shape() {
        let d = parse_domain(
            "(define (domain d) (:predicates (p) (q))
               (:action go :parameters () :precondition (p) :effect (and (q) (not (p)))))",
        )
        .unwrap();
        let p = parse_problem("(define (problem x) (:domain d) (:init (p)) (:goal (q)))", &d).unwrap();
        let g = ground(&d, &p).unwrap();
        let dt = write_grounded_domain(&g.task);
        let pt = write_grounded_problem(&g.task);
        let d2 = parse_domain(&dt).unwrap();
        let p2 = parse_problem(&pt, &d2).unwrap();
        let g2 = ground(&d2, &p2).unwrap();
        let strip = |m: &DomainModel| m.actions.iter().map(|a| (a.pre.len(), a.add.len(), a.del.len())).collect::<Vec<_>>();
        assert_eq!(strip(&g.task.domain), strip(&g2.task.domain));
        assert_eq!(g2.task.init.len(), 1);
        assert_eq!(g2.task.goal.len(), 1);
    }
}
