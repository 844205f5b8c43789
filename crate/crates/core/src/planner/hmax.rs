use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use crate::task::{ActionId, DomainModel, PlanningTask, State};

/// A non-negative heuristic estimate; `Infinite` proves the goal is
/// unreachable even ignoring deletes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeuristicValue {
    Finite(u32),
    Infinite,
}

impl HeuristicValue {
    pub fn is_infinite(self) -> bool {
        self == HeuristicValue::Infinite
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            HeuristicValue::Finite(v) => Some(v),
            HeuristicValue::Infinite => None,
        }
    }
}

impl Ord for HeuristicValue {
    fn cmp(&self, other: &Self) -> Ordering {
        use HeuristicValue::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for HeuristicValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for HeuristicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicValue::Finite(v) => write!(f, "{v}"),
            HeuristicValue::Infinite => write!(f, "inf"),
        }
    }
}

/// Precondition index for repeated h-max evaluation over one domain.
#[derive(Debug, Clone)]
pub struct RelaxedIndex {
    by_pre: Vec<Vec<ActionId>>,
    pre_count: Vec<u32>,
    no_pre: Vec<ActionId>,
}

impl RelaxedIndex {
    pub fn new(domain: &DomainModel) -> Self {
        let mut by_pre = vec![Vec::new(); domain.fluent_count];
        let mut pre_count = Vec::with_capacity(domain.actions.len());
        let mut no_pre = Vec::new();
        for a in &domain.actions {
            let n = a.pre.len() as u32;
            pre_count.push(n);
            if n == 0 {
                no_pre.push(a.id);
            }
            for f in a.pre.iter() {
                by_pre[f].push(a.id);
            }
        }
        RelaxedIndex {
            by_pre,
            pre_count,
            no_pre,
        }
    }

    /// h-max of `goal` from `state` under unit costs.
    ///
    /// Fluents are settled in nondecreasing cost order by a FIFO queue; an
    /// action fires when its last precondition settles, at that fluent's cost.
    pub fn hmax(&self, domain: &DomainModel, state: &State, goal: &State) -> HeuristicValue {
        let mut open_goals = goal.len();
        if open_goals == 0 {
            return HeuristicValue::Finite(0);
        }
        const UNSET: u32 = u32::MAX;
        let mut cost = vec![UNSET; domain.fluent_count];
        let mut queue = VecDeque::new();
        for f in state.iter() {
            cost[f] = 0;
            queue.push_back(f);
        }
        for &a in &self.no_pre {
            for g in domain.actions[a].add.iter() {
                if cost[g] == UNSET {
                    cost[g] = 1;
                    queue.push_back(g);
                }
            }
        }
        let mut remaining = self.pre_count.clone();
        while let Some(f) = queue.pop_front() {
            let c = cost[f];
            if goal.contains(f) {
                open_goals -= 1;
                if open_goals == 0 {
                    return HeuristicValue::Finite(c);
                }
            }
            for &a in &self.by_pre[f] {
                remaining[a] -= 1;
                if remaining[a] == 0 {
                    for g in domain.actions[a].add.iter() {
                        if cost[g] == UNSET {
                            cost[g] = c + 1;
                            queue.push_back(g);
                        }
                    }
                }
            }
        }
        HeuristicValue::Infinite
    }
}

/// Delete-relaxation h-max of the task's goal from `state`.
pub fn hmax(task: &PlanningTask, state: &State) -> HeuristicValue {
    RelaxedIndex::new(&task.domain).hmax(&task.domain, state, &task.goal)
}
