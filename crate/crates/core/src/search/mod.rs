//! Loosely-synchronized best-first search over joint spatio-temporal
//! states, plus its M*-style restrictions.

mod engine;
pub mod mstar;
pub mod rmstar;

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::TimeScalar;
use crate::state::{
    is_synchronized, timestamps_strictly_dominate, timestamps_weakly_dominate, Envelope,
    JointState,
};

pub use engine::{search, SearchReport};
pub use mstar::{build_policy, get_ngh_restricted, search_lsm, Policy};
pub use rmstar::search_lsrm;

/// Heuristic inflation factor `w >= 1`, kept as a rational so `f = g + w*h`
/// stays in exact integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Weight {
    num: u32,
    den: u32,
}

impl Weight {
    pub const ONE: Weight = Weight { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num < den {
            return Err(Error::Config(format!("weight {num}/{den} must be >= 1")));
        }
        Ok(Weight { num, den })
    }

    /// Closest rational with denominator 1000.
    pub fn from_f64(w: f64) -> Result<Self> {
        if !w.is_finite() || w < 1.0 {
            return Err(Error::Config(format!("weight {w} must be >= 1")));
        }
        Weight::new((w * 1000.0).round() as u32, 1000)
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `floor(h * w)`; exact for `w = 1`.
    pub fn inflate<T: TimeScalar>(&self, h: T) -> T {
        if self.is_one() {
            return h;
        }
        let num = T::from_u32(self.num).expect("weight numerator fits scalar");
        let den = T::from_u32(self.den).expect("weight denominator fits scalar");
        h.checked_mul(&num).expect("inflated heuristic overflow") / den
    }

    /// True when `cost <= w * reference`, in exact arithmetic.
    pub fn bounds<T: TimeScalar>(&self, cost: T, reference: T) -> bool {
        let num = T::from_u32(self.num).unwrap();
        let den = T::from_u32(self.den).unwrap();
        cost.checked_mul(&den).expect("overflow") <= reference.checked_mul(&num).expect("overflow")
    }
}

/// Tie-break among equal-`f` OPEN entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Smaller f, then larger g, then generation order (the default).
    #[default]
    PreferLargerG,
    /// Smaller f, then smaller g, then generation order.
    PreferSmallerG,
}

/// Knobs for one search run.
#[derive(Debug, Clone)]
pub struct SearchParams {
    pub weight: Weight,
    /// Dominance pruning on (normal) or off (soundness testing only;
    /// without it the search may not terminate on unsolvable instances).
    pub dominance: bool,
    pub time_limit: Option<Duration>,
    pub expansion_limit: Option<u64>,
    pub tie_break: TieBreak,
    /// Forces the collision set to all agents in the M*-style searches,
    /// reducing them to plain LS-A*. Reduction testing only.
    pub pin_full_collision_set: bool,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            weight: Weight::ONE,
            dominance: true,
            time_limit: None,
            expansion_limit: None,
            tie_break: TieBreak::default(),
            pin_full_collision_set: false,
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    /// Search space exhausted without reaching the goal.
    Failure,
    /// Time or expansion limit hit; nothing is claimed about solvability.
    Timeout,
}

/// Counters reported by every solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    /// States discarded by dominance or duplicate detection.
    pub pruned: u64,
    pub runtime_s: f64,
    pub outcome: Outcome,
}

impl SearchStats {
    pub fn new() -> Self {
        SearchStats {
            expanded: 0,
            generated: 0,
            pruned: 0,
            runtime_s: 0.0,
            outcome: Outcome::Failure,
        }
    }
}

impl Default for SearchStats {
    fn default() -> Self {
        Self::new()
    }
}

// ---------------------------------------------------------------------------
// Timing summary (neighbor-generation Steps 1 and 2)
// ---------------------------------------------------------------------------

/// Minimum arrival timestamp in a state, the second smallest distinct
/// timestamp, and the agents achieving the minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingSummary<T> {
    pub t_min: T,
    /// Smallest timestamp strictly greater than `t_min`; absent when all
    /// agents share the same timestamp.
    pub t_min2: Option<T>,
    pub frontier_agents: Vec<usize>,
}

pub fn timing_summary<T: TimeScalar>(envelopes: &[Envelope<T>]) -> TimingSummary<T> {
    let t_min = envelopes.iter().map(|e| e.t).min().expect("nonempty state");
    let t_min2 = envelopes.iter().map(|e| e.t).filter(|&t| t != t_min).min();
    let frontier_agents = envelopes
        .iter()
        .enumerate()
        .filter(|(_, e)| e.t == t_min)
        .map(|(i, _)| i)
        .collect();
    TimingSummary { t_min, t_min2, frontier_agents }
}

// ---------------------------------------------------------------------------
// Neighbor generation (Steps 3 and 4)
// ---------------------------------------------------------------------------

/// Individual neighbors of agent `i` in the state with the given timing:
/// a single unchanged envelope when the agent is off the time frontier,
/// otherwise one move per adjacent vertex plus one quantized wait.
pub fn individual_neighbors<T: TimeScalar>(
    inst: &Instance<T>,
    envelopes: &[Envelope<T>],
    timing: &TimingSummary<T>,
    i: usize,
) -> Vec<Envelope<T>> {
    let cur = envelopes[i];
    if cur.t != timing.t_min {
        return vec![cur];
    }
    let mut out = Vec::new();
    for &u in inst.graph().neighbors(cur.v) {
        let d = inst
            .duration(i, cur.v, u)
            .expect("adjacency implies a defined duration");
        out.push(Envelope { v: u, p: cur.v, tp: cur.t, t: cur.t + d });
    }
    let wait = match timing.t_min2 {
        Some(t2) => t2 - timing.t_min,
        None => inst.min_edge_duration(),
    };
    out.push(Envelope { v: cur.v, p: cur.v, tp: cur.t, t: cur.t + wait });
    out
}

/// Per-agent cost effect of choosing one individual neighbor.
pub(crate) fn apply_action<T: TimeScalar>(
    goal: u32,
    old: &Envelope<T>,
    new: &Envelope<T>,
    banked: &mut T,
    g: &mut T,
) {
    if new == old {
        return;
    }
    let dt = new.t - new.tp;
    if new.is_wait() {
        if new.v == goal {
            *banked = *banked + dt;
        } else {
            *g = *g + dt;
        }
    } else {
        // Departing the goal charges any banked wait.
        if old.v == goal && *banked > T::zero() {
            *g = *g + *banked;
            *banked = T::zero();
        }
        *g = *g + dt;
    }
}

/// Cartesian combination of individual neighbors over all agents.
/// Conflict screening is left to the caller, matching the main loop.
pub fn get_ngh<T: TimeScalar>(inst: &Instance<T>, parent: &JointState<T>) -> Vec<JointState<T>> {
    let timing = timing_summary(&parent.envelopes);
    let options: Vec<Vec<Envelope<T>>> = (0..parent.agent_count())
        .map(|i| individual_neighbors(inst, &parent.envelopes, &timing, i))
        .collect();
    combine_options(inst, parent, &options)
}

pub(crate) fn combine_options<T: TimeScalar>(
    inst: &Instance<T>,
    parent: &JointState<T>,
    options: &[Vec<Envelope<T>>],
) -> Vec<JointState<T>> {
    let n = parent.agent_count();
    let total: usize = options.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    loop {
        let mut g = parent.g;
        let mut banked = parent.banked_goal_wait.clone();
        let envelopes: Vec<Envelope<T>> = (0..n).map(|i| options[i][idx[i]]).collect();
        for i in 0..n {
            apply_action(
                inst.agents()[i].goal,
                &parent.envelopes[i],
                &envelopes[i],
                &mut banked[i],
                &mut g,
            );
        }
        out.push(JointState { envelopes, g, banked_goal_wait: banked });
        // odometer over the option lists
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// Frontier sets and the Compare procedure
// ---------------------------------------------------------------------------

/// Verdict of [`FrontierSet::compare_insert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOutcome {
    Kept,
    /// Discarded; carries the id of the retained state that dominates or
    /// equals the candidate.
    DiscardedBy(u64),
}

struct Retained<T> {
    id: u64,
    envelopes: Vec<Envelope<T>>,
}

struct Cell<T> {
    retained: Vec<Retained<T>>,
    /// Set once a synchronized state has been kept here; switches the
    /// pruning rule from strict to weak dominance. Never cleared.
    sync_seen: bool,
}

/// Per-joint-vertex store of non-dominated states. Cells are created
/// lazily; the joint graph is never materialized.
#[derive(Default)]
pub struct FrontierSet<T> {
    cells: HashMap<Vec<u32>, Cell<T>>,
}

impl<T: TimeScalar> FrontierSet<T> {
    pub fn new() -> Self {
        FrontierSet { cells: HashMap::new() }
    }

    /// The Compare procedure with dominance-rule switching. Keeps the
    /// candidate unless a retained state at its joint vertex dominates or
    /// equals it; on keep, sweeps newly dominated retained states.
    pub fn compare_insert(
        &mut self,
        id: u64,
        envelopes: &[Envelope<T>],
        dominance: bool,
    ) -> CompareOutcome {
        let key: Vec<u32> = envelopes.iter().map(|e| e.v).collect();
        let cell = self.cells.entry(key).or_insert_with(|| Cell {
            retained: Vec::new(),
            sync_seen: false,
        });
        let weak = cell.sync_seen;
        let dominates = |a: &[Envelope<T>], b: &[Envelope<T>]| {
            if weak {
                timestamps_weakly_dominate(a, b)
            } else {
                timestamps_strictly_dominate(a, b)
            }
        };
        for r in &cell.retained {
            if r.envelopes == envelopes {
                return CompareOutcome::DiscardedBy(r.id);
            }
            if dominance && dominates(&r.envelopes, envelopes) {
                return CompareOutcome::DiscardedBy(r.id);
            }
        }
        if dominance {
            cell.retained.retain(|r| !dominates(envelopes, &r.envelopes));
        }
        cell.retained.push(Retained { id, envelopes: envelopes.to_vec() });
        if is_synchronized(envelopes) {
            cell.sync_seen = true;
        }
        CompareOutcome::Kept
    }

    /// Whether `id` is still retained at its joint vertex. Popped states
    /// that are no longer retained are skipped instead of expanded.
    pub fn is_retained(&self, joint_vertex: &[u32], id: u64) -> bool {
        self.cells
            .get(joint_vertex)
            .is_some_and(|c| c.retained.iter().any(|r| r.id == id))
    }

    pub fn sync_seen(&self, joint_vertex: &[u32]) -> bool {
        self.cells.get(joint_vertex).is_some_and(|c| c.sync_seen)
    }
}

// ---------------------------------------------------------------------------
// Heuristic tables
// ---------------------------------------------------------------------------

/// Per-agent exact time-to-go to the goal ignoring other agents, from a
/// reverse uniform-cost search. `None` marks unreachable vertices.
pub struct HeuristicTable<T> {
    ctg: Vec<Vec<Option<T>>>,
}

impl<T: TimeScalar> HeuristicTable<T> {
    pub fn cost_to_go(&self, agent: usize, v: u32) -> Option<T> {
        self.ctg[agent][v as usize]
    }

    /// Admissible heuristic: sum of per-agent time-to-go at the current
    /// vertices. `None` if any agent sits on an unreachable vertex.
    pub fn h_value(&self, envelopes: &[Envelope<T>]) -> Option<T> {
        let mut sum = T::zero();
        for (i, e) in envelopes.iter().enumerate() {
            sum = sum + self.cost_to_go(i, e.v)?;
        }
        Some(sum)
    }
}

/// Builds the per-agent cost-to-go maps by Dijkstra from each goal.
pub fn heuristic_table<T: TimeScalar>(inst: &Instance<T>) -> HeuristicTable<T> {
    let graph = inst.graph();
    let bound = graph.id_bound() as usize;
    let mut ctg = Vec::with_capacity(inst.agent_count());
    for (i, task) in inst.agents().iter().enumerate() {
        let mut dist: Vec<Option<T>> = vec![None; bound];
        let mut heap: BinaryHeap<Reverse<(T, u32)>> = BinaryHeap::new();
        dist[task.goal as usize] = Some(T::zero());
        heap.push(Reverse((T::zero(), task.goal)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v as usize] != Some(d) {
                continue;
            }
            for &u in graph.neighbors(v) {
                // relax edge traversed u -> v
                let w = inst.duration(i, u, v).expect("adjacency implies duration");
                let nd = d + w;
                if dist[u as usize].is_none_or(|old| nd < old) {
                    dist[u as usize] = Some(nd);
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        ctg.push(dist);
    }
    HeuristicTable { ctg }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_cycle, line_single};
    use crate::scalar::whole_units;

    fn env(v: u32, t: i64) -> Envelope<i64> {
        Envelope { v, p: v, t, tp: 0 }
    }

    #[test]
    fn timing_summary_cases() {
        let t = timing_summary(&[env(0, 2), env(1, 3)]);
        assert_eq!(t.t_min, 2);
        assert_eq!(t.t_min2, Some(3));
        assert_eq!(t.frontier_agents, vec![0]);

        let t = timing_summary(&[env(0, 5), env(1, 5), env(2, 5)]);
        assert_eq!(t.t_min, 5);
        assert_eq!(t.t_min2, None);
        assert_eq!(t.frontier_agents, vec![0, 1, 2]);

        let t = timing_summary(&[env(0, 2), env(1, 2), env(2, 7)]);
        assert_eq!(t.t_min2, Some(7));
        assert_eq!(t.frontier_agents, vec![0, 1]);
    }

    #[test]
    fn initial_neighbors_on_four_cycle() {
        let inst = four_cycle::<i64>(1, 2);
        let s = JointState::initial(&[0, 3]);
        let timing = timing_summary(&s.envelopes);
        let n0 = individual_neighbors(&inst, &s.envelopes, &timing, 0);
        // moves to b=1 and c=2 arriving t=1, plus wait until t=1 (min duration).
        assert_eq!(n0.len(), 3);
        assert_eq!(n0[0], Envelope { v: 1, p: 0, tp: 0, t: whole_units::<i64>(1) });
        assert_eq!(n0[1], Envelope { v: 2, p: 0, tp: 0, t: whole_units::<i64>(1) });
        assert_eq!(n0[2], Envelope { v: 0, p: 0, tp: 0, t: whole_units::<i64>(1) });

        let children = get_ngh(&inst, &s);
        assert_eq!(children.len(), 9);
    }

    #[test]
    fn off_frontier_agent_is_frozen() {
        let inst = four_cycle::<i64>(1, 2);
        let envs = vec![
            Envelope { v: 1, p: 0, tp: 0, t: whole_units::<i64>(1) },
            Envelope { v: 3, p: 3, tp: 0, t: whole_units::<i64>(2) },
        ];
        let timing = timing_summary(&envs);
        let n1 = individual_neighbors(&inst, &envs, &timing, 1);
        assert_eq!(n1, vec![envs[1]]);
        // agent 0 at b (adj a, d): 2 moves arriving t=2, wait of t_min2 - t_min = 1
        let n0 = individual_neighbors(&inst, &envs, &timing, 0);
        assert_eq!(n0.len(), 3);
        assert!(n0[..2].iter().all(|e| e.t == whole_units::<i64>(2)));
        assert_eq!(n0[2].t, whole_units::<i64>(2));

        let s = JointState {
            envelopes: envs,
            g: whole_units::<i64>(3),
            banked_goal_wait: vec![0, 0],
        };
        assert_eq!(get_ngh(&inst, &s).len(), 3);
    }

    #[test]
    fn child_t_min_strictly_increases() {
        let inst = four_cycle::<i64>(1, 2);
        let s = JointState::initial(&[0, 3]);
        let parent_tmin = timing_summary(&s.envelopes).t_min;
        for child in get_ngh(&inst, &s) {
            assert!(timing_summary(&child.envelopes).t_min > parent_tmin);
        }
    }

    #[test]
    fn compare_strict_and_weak_regimes() {
        let mk = |ts: &[i64]| -> Vec<Envelope<i64>> {
            ts.iter().map(|&t| Envelope { v: 0, p: 0, t, tp: 0 }).collect()
        };
        // strict regime: candidate kept unless strictly dominated
        let mut f = FrontierSet::<i64>::new();
        // asynchronous retained state so sync_seen stays false
        let retained: Vec<Envelope<i64>> = vec![
            Envelope { v: 0, p: 0, t: 1, tp: 0 },
            Envelope { v: 0, p: 0, t: 2, tp: 0 },
        ];
        assert_eq!(f.compare_insert(0, &retained, true), CompareOutcome::Kept);
        assert_eq!(
            f.compare_insert(1, &mk(&[2, 3]), true),
            CompareOutcome::DiscardedBy(0)
        );
        assert_eq!(f.compare_insert(2, &mk(&[1, 3]), true), CompareOutcome::Kept);

        // weak regime after a synchronized state was kept
        let mut f = FrontierSet::<i64>::new();
        assert_eq!(f.compare_insert(0, &mk(&[1, 1]), true), CompareOutcome::Kept);
        assert!(f.sync_seen(&[0, 0]));
        assert_eq!(
            f.compare_insert(1, &mk(&[1, 3]), true),
            CompareOutcome::DiscardedBy(0)
        );
    }

    #[test]
    fn compare_empty_frontier_keeps() {
        let mut f = FrontierSet::<i64>::new();
        let envs = vec![Envelope { v: 4, p: 2, t: 3, tp: 1 }];
        assert_eq!(f.compare_insert(9, &envs, true), CompareOutcome::Kept);
        assert!(f.is_retained(&[4], 9));
    }

    #[test]
    fn duplicate_discarded_even_without_dominance() {
        let mut f = FrontierSet::<i64>::new();
        let envs = vec![Envelope { v: 4, p: 2, t: 3, tp: 1 }];
        assert_eq!(f.compare_insert(0, &envs, false), CompareOutcome::Kept);
        assert_eq!(f.compare_insert(1, &envs, false), CompareOutcome::DiscardedBy(0));
    }

    #[test]
    fn heuristic_on_fixtures() {
        let inst = four_cycle::<i64>(1, 2);
        let h = heuristic_table(&inst);
        assert_eq!(h.cost_to_go(0, 0), Some(whole_units::<i64>(2)));
        assert_eq!(h.cost_to_go(0, 3), Some(0));
        assert_eq!(h.cost_to_go(1, 3), Some(whole_units::<i64>(4)));
        let s = JointState::<i64>::initial(&[0, 3]);
        assert_eq!(h.h_value(&s.envelopes), Some(whole_units::<i64>(6)));

        let single = line_single::<i64>(2);
        let h = heuristic_table(&single);
        assert_eq!(h.cost_to_go(0, 0), Some(whole_units::<i64>(4)));
    }

    #[test]
    fn weight_inflation() {
        let w = Weight::from_f64(1.5).unwrap();
        assert_eq!(w.inflate(1000i64), 1500);
        assert!(w.bounds(6i64, 4i64));
        assert!(!w.bounds(7i64, 4i64));
        assert!(Weight::from_f64(0.9).is_err());
        assert_eq!(Weight::ONE.inflate(77i64), 77);
    }
}
