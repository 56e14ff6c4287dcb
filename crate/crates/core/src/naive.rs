//! Time-discretized baseline: A* over joint configurations sampled every
//! `tau` time units, where `tau` divides every edge duration. Agents
//! caught mid-edge at a tick boundary are forced to keep moving, so the
//! model is exact, just much denser than the loosely synchronized one.

use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::TimeScalar;
use crate::search::{heuristic_table, Outcome, SearchParams, SearchReport, SearchStats};
use crate::solution::{Solution, TimedPath, Waypoint};

/// Baseline-specific knobs on top of the shared [`SearchParams`].
#[derive(Debug, Clone)]
#[derive(Default)]
pub struct NaiveParams {
    /// Tick length. Must divide every duration; defaults to their gcd.
    pub tau: Option<i64>,
    /// Tick horizon after which states are pruned. Defaults to
    /// `4 * sum(individual shortest times) / tau + 16`.
    pub horizon_ticks: Option<u64>,
    pub search: SearchParams,
}


/// Largest tick length dividing every edge duration of every agent.
pub fn common_unit<T: TimeScalar>(inst: &Instance<T>) -> Result<T> {
    let durations = inst.all_durations();
    let mut g = T::zero();
    for d in durations {
        g = g.gcd(&d);
    }
    if g.is_zero() {
        return Err(Error::NoDurations);
    }
    Ok(g)
}

/// Where one agent is at a tick boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum AgentPos<T> {
    At(u32),
    /// Mid-edge: `done` of `total` time units elapsed, both multiples of tau.
    Moving { from: u32, to: u32, done: T, total: T },
}

impl<T: TimeScalar> AgentPos<T> {
    /// Vertices occupied at the tick instant itself.
    fn instant_occ(&self) -> (u32, Option<u32>) {
        match *self {
            AgentPos::At(v) => (v, None),
            // a boundary strictly inside a traversal occupies both ends
            AgentPos::Moving { from, to, .. } => (from, Some(to)),
        }
    }
}

/// Vertices occupied during the open tick interval between two boundary
/// positions. A full-edge hop within one tick occupies both endpoints.
fn interval_occ<T: TimeScalar>(prev: &AgentPos<T>, next: &AgentPos<T>) -> (u32, Option<u32>) {
    match (*prev, *next) {
        (AgentPos::At(a), AgentPos::At(b)) if a == b => (a, None),
        (AgentPos::At(a), AgentPos::At(b)) => (a, Some(b)),
        (AgentPos::At(a), AgentPos::Moving { to, .. }) => (a, Some(to)),
        (AgentPos::Moving { from, to, .. }, _) => (from, Some(to)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key<T> {
    positions: Vec<AgentPos<T>>,
    banked: Vec<T>,
}

struct Node<T> {
    key: Key<T>,
    tick: u64,
    g: T,
    parent: Option<usize>,
}

#[derive(PartialEq, Eq)]
struct OpenEntry<T> {
    f: T,
    g: T,
    seq: u64,
    id: usize,
}

impl<T: Ord> Ord for OpenEntry<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .f
            .cmp(&self.f)
            .then_with(|| self.g.cmp(&other.g))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl<T: Ord> PartialOrd for OpenEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn any_shared(occs: &[(u32, Option<u32>)]) -> bool {
    for i in 0..occs.len() {
        for j in i + 1..occs.len() {
            let (a1, a2) = occs[i];
            let (b1, b2) = occs[j];
            if a1 == b1 || Some(a1) == b2 || a2 == Some(b1) || (a2.is_some() && a2 == b2) {
                return true;
            }
        }
    }
    false
}

/// One agent's choices for the next tick. Mid-edge agents must continue;
/// parked agents may stay or start any incident edge.
fn agent_moves<T: TimeScalar>(
    inst: &Instance<T>,
    i: usize,
    pos: &AgentPos<T>,
    tau: T,
) -> Vec<AgentPos<T>> {
    match *pos {
        AgentPos::Moving { from, to, done, total } => {
            let done = done + tau;
            if done == total {
                vec![AgentPos::At(to)]
            } else {
                vec![AgentPos::Moving { from, to, done, total }]
            }
        }
        AgentPos::At(v) => {
            let mut out = vec![AgentPos::At(v)];
            for &u in inst.graph().neighbors(v) {
                let total = inst.duration(i, v, u).expect("edge duration defined");
                if tau == total {
                    out.push(AgentPos::At(u));
                } else {
                    out.push(AgentPos::Moving { from: v, to: u, done: tau, total });
                }
            }
            out
        }
    }
}

/// Time-discretized optimal search. Cost semantics match the loosely
/// synchronized solvers: waiting at one's own goal is free unless the
/// agent later leaves it.
pub fn naive_search<T: TimeScalar>(inst: &Instance<T>, params: &NaiveParams) -> SearchReport<T> {
    let t0 = Instant::now();
    let n = inst.agent_count();
    let mut stats = SearchStats::new();
    let finish = |mut stats: SearchStats, outcome: Outcome, solution: Option<Solution<T>>| {
        stats.outcome = outcome;
        stats.runtime_s = t0.elapsed().as_secs_f64();
        let solution = solution.map(|mut s| {
            s.stats = stats.clone();
            s
        });
        SearchReport { solution, stats }
    };

    let tau = match params.tau {
        Some(t) => T::from_i64(t).expect("tau fits the scalar"),
        None => match common_unit(inst) {
            Ok(t) => t,
            Err(_) => return finish(stats, Outcome::Failure, None),
        },
    };
    for d in inst.all_durations() {
        if !(d % tau).is_zero() {
            // caller-supplied tau must divide every duration
            return finish(stats, Outcome::Failure, None);
        }
    }

    let heur = heuristic_table(inst);
    let mut lower_bound_sum = T::zero();
    for (i, task) in inst.agents().iter().enumerate() {
        match heur.cost_to_go(i, task.start) {
            Some(c) => lower_bound_sum = lower_bound_sum + c,
            None => return finish(stats, Outcome::Failure, None),
        }
    }
    let horizon = params.horizon_ticks.unwrap_or_else(|| {
        let ticks = (lower_bound_sum / tau).to_u64().unwrap_or(0);
        4 * ticks + 16
    });

    let h_of = |positions: &[AgentPos<T>]| -> Option<T> {
        let mut sum = T::zero();
        for (i, p) in positions.iter().enumerate() {
            sum = sum + match *p {
                AgentPos::At(v) => heur.cost_to_go(i, v)?,
                AgentPos::Moving { to, done, total, .. } => {
                    heur.cost_to_go(i, to)? + (total - done)
                }
            };
        }
        Some(sum)
    };

    let goals: Vec<u32> = inst.agents().iter().map(|a| a.goal).collect();
    let start_key = Key {
        positions: inst.agents().iter().map(|a| AgentPos::At(a.start)).collect(),
        banked: vec![T::zero(); n],
    };
    let mut nodes = vec![Node { key: start_key.clone(), tick: 0, g: T::zero(), parent: None }];
    let mut best: HashMap<Key<T>, T> = HashMap::new();
    best.insert(start_key, T::zero());
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(OpenEntry { f: lower_bound_sum, g: T::zero(), seq, id: 0 });

    while let Some(entry) = open.pop() {
        let id = entry.id;
        let node = &nodes[id];
        if best.get(&node.key).is_some_and(|&b| b < node.g) {
            continue; // stale entry
        }
        let at_goal = node
            .key
            .positions
            .iter()
            .zip(&goals)
            .all(|(p, &goal)| *p == AgentPos::At(goal));
        if at_goal {
            let solution = reconstruct(inst, &nodes, id, tau, &mut stats);
            return finish(stats, Outcome::Solved, Some(solution));
        }
        if stats.expanded.is_multiple_of(256) {
            if let Some(limit) = params.search.time_limit {
                if t0.elapsed() > limit {
                    return finish(stats, Outcome::Timeout, None);
                }
            }
            if let Some(limit) = params.search.expansion_limit {
                if stats.expanded >= limit {
                    return finish(stats, Outcome::Timeout, None);
                }
            }
        }
        if node.tick >= horizon {
            stats.pruned += 1;
            continue;
        }
        stats.expanded += 1;

        let tick = node.tick;
        let parent_key = node.key.clone();
        let parent_g = node.g;
        let options: Vec<Vec<AgentPos<T>>> = parent_key
            .positions
            .iter()
            .enumerate()
            .map(|(i, p)| agent_moves(inst, i, p, tau))
            .collect();

        let mut idx = vec![0usize; n];
        'children: loop {
            let positions: Vec<AgentPos<T>> = (0..n).map(|i| options[i][idx[i]]).collect();
            // advance the odometer up front so `continue` skips cleanly
            let mut carry = n;
            let exhausted = loop {
                if carry == 0 {
                    break true;
                }
                carry -= 1;
                idx[carry] += 1;
                if idx[carry] < options[carry].len() {
                    break false;
                }
                idx[carry] = 0;
            };

            stats.generated += 1;
            let child_ok = (|| {
                // conflict screen: the elapsed open interval plus the new instant
                let interval: Vec<_> = positions
                    .iter()
                    .zip(&parent_key.positions)
                    .map(|(next, prev)| interval_occ(prev, next))
                    .collect();
                let instant: Vec<_> = positions.iter().map(|p| p.instant_occ()).collect();
                if any_shared(&interval) || any_shared(&instant) {
                    return None;
                }
                let mut g = parent_g;
                let mut banked = parent_key.banked.clone();
                for i in 0..n {
                    let stayed = positions[i] == parent_key.positions[i]
                        && matches!(positions[i], AgentPos::At(_));
                    if stayed && positions[i] == AgentPos::At(goals[i]) {
                        banked[i] = banked[i] + tau;
                    } else {
                        if parent_key.positions[i] == AgentPos::At(goals[i])
                            && !stayed
                            && banked[i] > T::zero()
                        {
                            g = g + banked[i];
                            banked[i] = T::zero();
                        }
                        g = g + tau;
                    }
                }
                Some((Key { positions, banked }, g))
            })();

            if let Some((key, g)) = child_ok {
                let better = best.get(&key).is_none_or(|&b| g < b);
                if better && h_of(&key.positions).is_some() {
                    let h = h_of(&key.positions).unwrap();
                    best.insert(key.clone(), g);
                    let nid = nodes.len();
                    nodes.push(Node { key, tick: tick + 1, g, parent: Some(id) });
                    seq += 1;
                    open.push(OpenEntry {
                        f: g + params.search.weight.inflate(h),
                        g,
                        seq,
                        id: nid,
                    });
                } else if !better {
                    stats.pruned += 1;
                }
            }

            if exhausted {
                break 'children;
            }
        }
    }
    finish(stats, Outcome::Failure, None)
}

fn reconstruct<T: TimeScalar>(
    inst: &Instance<T>,
    nodes: &[Node<T>],
    goal_id: usize,
    tau: T,
    _stats: &mut SearchStats,
) -> Solution<T> {
    let mut chain = Vec::new();
    let mut cur = Some(goal_id);
    while let Some(id) = cur {
        chain.push(id);
        cur = nodes[id].parent;
    }
    chain.reverse();

    let n = inst.agent_count();
    let mut paths = Vec::with_capacity(n);
    for i in 0..n {
        let AgentPos::At(start) = nodes[chain[0]].key.positions[i] else {
            unreachable!("agents start parked")
        };
        let mut wps = vec![Waypoint { v: start, arrive: T::zero(), depart: T::zero() }];
        for (step, &id) in chain.iter().enumerate().skip(1) {
            let t = tau * T::from_usize(step).expect("tick fits scalar");
            let prev = nodes[chain[step - 1]].key.positions[i];
            let pos = nodes[id].key.positions[i];
            match (prev, pos) {
                (AgentPos::At(a), AgentPos::At(b)) if a == b => {
                    wps.last_mut().unwrap().depart = t;
                }
                (AgentPos::At(_), AgentPos::At(b)) => {
                    wps.push(Waypoint { v: b, arrive: t, depart: t });
                }
                (AgentPos::At(_), AgentPos::Moving { .. }) => {} // departure already recorded
                (AgentPos::Moving { .. }, AgentPos::At(b)) => {
                    wps.push(Waypoint { v: b, arrive: t, depart: t });
                }
                (AgentPos::Moving { .. }, AgentPos::Moving { .. }) => {}
            }
        }
        let last = wps.last_mut().unwrap();
        last.depart = last.arrive; // trailing goal waits are free
        paths.push(TimedPath { agent: i, waypoints: wps });
    }
    let cost = nodes[goal_id].g;
    Solution { cost, paths, algorithm: "naive".into(), stats: SearchStats::new() }
}
