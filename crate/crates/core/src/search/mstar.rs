//! LS-M*: subdimensional expansion for loosely synchronized search.
//!
//! Agents outside a state's collision set follow their individual optimal
//! policy; agents inside it branch over the full neighbor set. Conflicts
//! enlarge collision sets backwards through the search graph.

use crate::instance::Instance;
use crate::scalar::TimeScalar;
use crate::search::engine::{wait_duration, Engine, SearchReport, VariantKind};
use crate::search::{
    combine_options, heuristic_table, individual_neighbors, timing_summary, HeuristicTable,
    SearchParams, TimingSummary,
};
use crate::state::{Envelope, JointState};

/// An agent's individual optimal policy: for every vertex from which the
/// goal is reachable, the next vertex on a shortest route (ties broken
/// toward the smallest vertex id).
pub struct Policy<T> {
    pub goal: u32,
    next: Vec<Option<u32>>,
    ctg: Vec<Option<T>>,
}

impl<T: TimeScalar> Policy<T> {
    /// Next vertex on the way to the goal, `None` at the goal itself or
    /// on vertices the goal is unreachable from.
    pub fn next_vertex(&self, v: u32) -> Option<u32> {
        self.next[v as usize]
    }

    pub fn cost_to_go(&self, v: u32) -> Option<T> {
        self.ctg[v as usize]
    }
}

pub(crate) fn build_policy_from<T: TimeScalar>(
    inst: &Instance<T>,
    agent: usize,
    heur: &HeuristicTable<T>,
) -> Policy<T> {
    let graph = inst.graph();
    let bound = graph.id_bound() as usize;
    let goal = inst.agents()[agent].goal;
    let mut next: Vec<Option<u32>> = vec![None; bound];
    let mut ctg: Vec<Option<T>> = vec![None; bound];
    for v in graph.vertices() {
        let Some(cv) = heur.cost_to_go(agent, v) else { continue };
        ctg[v as usize] = Some(cv);
        if v == goal {
            continue;
        }
        // neighbors are sorted, so the first optimal one has the smallest id
        for &u in graph.neighbors(v) {
            let Some(cu) = heur.cost_to_go(agent, u) else { continue };
            let d = inst.duration(agent, v, u).expect("edge duration defined");
            if cu + d == cv {
                next[v as usize] = Some(u);
                break;
            }
        }
        debug_assert!(next[v as usize].is_some(), "reachable vertex has an optimal move");
    }
    Policy { goal, next, ctg }
}

/// Builds one agent's individual policy by itself.
pub fn build_policy<T: TimeScalar>(inst: &Instance<T>, agent: usize) -> Policy<T> {
    build_policy_from(inst, agent, &heuristic_table(inst))
}

/// The single policy-prescribed envelope for agent `i`: frozen when off
/// the time frontier, waiting at the goal, otherwise the optimal move.
pub(crate) fn policy_step<T: TimeScalar>(
    inst: &Instance<T>,
    policy: &Policy<T>,
    envelopes: &[Envelope<T>],
    timing: &TimingSummary<T>,
    i: usize,
) -> Envelope<T> {
    let cur = envelopes[i];
    if cur.t != timing.t_min {
        return cur;
    }
    match policy.next_vertex(cur.v) {
        Some(u) => {
            let d = inst.duration(i, cur.v, u).expect("policy moves along edges");
            Envelope { v: u, p: cur.v, tp: cur.t, t: cur.t + d }
        }
        // at the goal (reachability is checked before the search starts)
        None => {
            let wait = wait_duration(inst, timing);
            Envelope { v: cur.v, p: cur.v, tp: cur.t, t: cur.t + wait }
        }
    }
}

/// Neighbor generation restricted by a collision set: agents in `ic`
/// (a bitmask) branch fully, the rest follow their policies.
pub fn get_ngh_restricted<T: TimeScalar>(
    inst: &Instance<T>,
    policies: &[Policy<T>],
    parent: &JointState<T>,
    ic: u64,
) -> Vec<JointState<T>> {
    let timing = timing_summary(&parent.envelopes);
    let options: Vec<Vec<Envelope<T>>> = (0..parent.agent_count())
        .map(|i| {
            if ic & (1 << i) != 0 {
                individual_neighbors(inst, &parent.envelopes, &timing, i)
            } else {
                vec![policy_step(inst, &policies[i], &parent.envelopes, &timing, i)]
            }
        })
        .collect();
    combine_options(inst, parent, &options)
}

/// LS-M* search over the given instance.
pub fn search_lsm<T: TimeScalar>(inst: &Instance<T>, params: &SearchParams) -> SearchReport<T> {
    Engine::new(inst, params, VariantKind::Mstar, "lsm").run()
}
