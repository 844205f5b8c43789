//! Best-first search over bitset states: A* for optimal plans, greedy
//! best-first with goal test on generation for plain solvability.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use super::hmax::{HeuristicValue, RelaxedIndex};
use super::{PlannerError, PlannerResult, SearchLimits, Verdict};
use crate::task::{ActionId, Plan, PlanningTask, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// A* with h-max: the returned plan has minimal cost.
    Optimal,
    /// Greedy on h-max, goal test at generation: any plan, found fast.
    Satisficing,
}

const NO_PARENT: u32 = u32::MAX;

struct Node {
    state: State,
    parent: u32,
    action: ActionId,
    g: u32,
    closed: bool,
}

fn extract(nodes: &[Node], mut idx: u32) -> Plan {
    let mut steps = Vec::new();
    while nodes[idx as usize].parent != NO_PARENT {
        steps.push(nodes[idx as usize].action);
        idx = nodes[idx as usize].parent;
    }
    steps.reverse();
    Plan(steps)
}

/// Open-list key. Ties: lower f (A* only), then lower h, then lower id of
/// the generating action, then insertion order.
type Key = Reverse<(u32, u32, usize, u64, u32)>;

pub fn search(task: &PlanningTask, mode: SearchMode, limits: &SearchLimits) -> Result<PlannerResult, PlannerError> {
    let start = Instant::now();
    let domain = &*task.domain;
    let index = RelaxedIndex::new(domain);
    let goal = &task.goal;
    let mut expanded = 0usize;
    let mut generated = 1usize;

    let done = |verdict, expanded, generated| PlannerResult {
        verdict,
        expanded,
        generated,
        wall_time: start.elapsed(),
    };

    let h0 = match index.hmax(domain, &task.init, goal) {
        HeuristicValue::Infinite => return Ok(done(Verdict::Unsolvable, 0, 1)),
        HeuristicValue::Finite(h) => h,
    };
    if goal.is_subset(&task.init) {
        return Ok(done(Verdict::Solved(Plan::empty()), 0, 1));
    }

    let mut nodes = vec![Node {
        state: task.init.clone(),
        parent: NO_PARENT,
        action: 0,
        g: 0,
        closed: false,
    }];
    let mut lookup: HashMap<State, u32> = HashMap::new();
    lookup.insert(task.init.clone(), 0);
    let mut open: BinaryHeap<Key> = BinaryHeap::new();
    let mut seq = 0u64;
    let first = match mode {
        SearchMode::Optimal => h0,
        SearchMode::Satisficing => 0,
    };
    open.push(Reverse((first, h0, 0, seq, 0)));

    while let Some(Reverse((_, _, _, _, idx))) = open.pop() {
        let node = &nodes[idx as usize];
        if node.closed {
            continue;
        }
        if mode == SearchMode::Optimal && goal.is_subset(&node.state) {
            return Ok(done(Verdict::Solved(extract(&nodes, idx)), expanded, generated));
        }
        nodes[idx as usize].closed = true;
        expanded += 1;
        if let Some(max) = limits.max_expansions {
            if expanded > max {
                return Err(PlannerError::Budget {
                    expanded,
                    generated,
                    elapsed: start.elapsed(),
                });
            }
        }
        if expanded.is_multiple_of(256) {
            if let Some(t) = limits.time_limit {
                if start.elapsed() > t {
                    return Err(PlannerError::Budget {
                        expanded,
                        generated,
                        elapsed: start.elapsed(),
                    });
                }
            }
        }

        let state = nodes[idx as usize].state.clone();
        let g = nodes[idx as usize].g + 1;
        for a in &domain.actions {
            if !a.is_applicable(&state) {
                continue;
            }
            let next = a.successor(&state);
            generated += 1;
            let child = match lookup.entry(next) {
                Entry::Occupied(e) => {
                    let c = *e.get();
                    let n = &mut nodes[c as usize];
                    // h-max is consistent under unit costs, so closed nodes
                    // never improve in A*; greedy search never reopens.
                    if n.closed || mode == SearchMode::Satisficing || g >= n.g {
                        continue;
                    }
                    n.g = g;
                    n.parent = idx;
                    n.action = a.id;
                    c
                }
                Entry::Vacant(e) => {
                    let c = nodes.len() as u32;
                    nodes.push(Node {
                        state: e.key().clone(),
                        parent: idx,
                        action: a.id,
                        g,
                        closed: false,
                    });
                    e.insert(c);
                    c
                }
            };
            let child_state = &nodes[child as usize].state;
            if mode == SearchMode::Satisficing && goal.is_subset(child_state) {
                return Ok(done(Verdict::Solved(extract(&nodes, child)), expanded, generated));
            }
            let h = match index.hmax(domain, child_state, goal) {
                HeuristicValue::Infinite => {
                    nodes[child as usize].closed = true;
                    continue;
                }
                HeuristicValue::Finite(h) => h,
            };
            seq += 1;
            let primary = match mode {
                SearchMode::Optimal => g + h,
                SearchMode::Satisficing => 0,
            };
            open.push(Reverse((primary, h, a.id, seq, child)));
        }
    }
    Ok(done(Verdict::Unsolvable, expanded, generated))
}
