//! The shared best-first loop behind LS-A*, LS-M* and LS-rM*.

use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use crate::instance::Instance;
use crate::scalar::TimeScalar;
use crate::search::mstar::{build_policy_from, policy_step, Policy};
use crate::search::{
    combine_options, heuristic_table, individual_neighbors, timing_summary, CompareOutcome,
    FrontierSet, HeuristicTable, Outcome, SearchParams, SearchStats, TieBreak, TimingSummary,
};
use crate::solution::{Solution, TimedPath, Waypoint};
use crate::state::{conflict_set, Envelope, JointState};

/// Result of one solver run: a solution when one was found, and the run
/// statistics either way.
#[derive(Debug, Clone)]
pub struct SearchReport<T> {
    pub solution: Option<Solution<T>>,
    pub stats: SearchStats,
}

pub(crate) enum VariantKind {
    Astar,
    Mstar,
    Rmstar,
}

pub(crate) struct Node<T> {
    pub envelopes: Vec<Envelope<T>>,
    pub banked: Vec<T>,
    pub g: T,
    pub h: T,
    pub parent: Option<usize>,
    /// Back-propagation predecessors: the search parent plus any states
    /// registered through dominance pruning (M* only).
    pub preds: Vec<usize>,
    /// Collision set as an agent bitmask (M* only).
    pub ic: u64,
    pub expanded: bool,
}

#[derive(PartialEq, Eq)]
struct OpenEntry<T> {
    f: T,
    g_pref: T,
    seq: u64,
    id: usize,
}

impl<T: Ord> Ord for OpenEntry<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap: "greater" entries pop first
        other
            .f
            .cmp(&self.f)
            .then_with(|| self.g_pref.cmp(&other.g_pref))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl<T: Ord> PartialOrd for OpenEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimal union-find over agent indices (LS-rM* grouping).
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    /// Returns true when the sets were actually merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    fn group_mask(&mut self, x: usize) -> u64 {
        let root = self.find(x);
        let mut mask = 0u64;
        for i in 0..self.parent.len() {
            if self.find(i) == root {
                mask |= 1 << i;
            }
        }
        mask
    }
}

pub(crate) struct Engine<'a, T: TimeScalar> {
    inst: &'a Instance<T>,
    params: SearchParams,
    heur: HeuristicTable<T>,
    policies: Vec<Policy<T>>,
    kind: VariantKind,
    algo: &'static str,
    nodes: Vec<Node<T>>,
    open: BinaryHeap<OpenEntry<T>>,
    frontier: FrontierSet<T>,
    stats: SearchStats,
    seq: u64,
    full_mask: u64,
    goal_jv: Vec<u32>,
    // LS-rM* grouping and memoized group plans (keyed by the group mask).
    groups: UnionFind,
    plans: HashMap<u64, HashMap<usize, Vec<Waypoint<T>>>>,
    fatal: Option<Outcome>,
}

impl<'a, T: TimeScalar> Engine<'a, T> {
    pub(crate) fn new(
        inst: &'a Instance<T>,
        params: &SearchParams,
        kind: VariantKind,
        algo: &'static str,
    ) -> Self {
        let n = inst.agent_count();
        let heur = heuristic_table(inst);
        let policies = match kind {
            VariantKind::Astar => Vec::new(),
            _ => (0..n).map(|i| build_policy_from(inst, i, &heur)).collect(),
        };
        Engine {
            inst,
            params: params.clone(),
            heur,
            policies,
            kind,
            algo,
            nodes: Vec::new(),
            open: BinaryHeap::new(),
            frontier: FrontierSet::new(),
            stats: SearchStats::new(),
            seq: 0,
            full_mask: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            goal_jv: inst.agents().iter().map(|a| a.goal).collect(),
            groups: UnionFind::new(n),
            plans: HashMap::new(),
            fatal: None,
        }
    }

    fn push_open(&mut self, id: usize) {
        let node = &self.nodes[id];
        let f = node.g + self.params.weight.inflate(node.h);
        let g_pref = match self.params.tie_break {
            TieBreak::PreferLargerG => node.g,
            TieBreak::PreferSmallerG => T::zero() - node.g,
        };
        self.seq += 1;
        self.open.push(OpenEntry { f, g_pref, seq: self.seq, id });
    }

    fn initial_ic(&self) -> u64 {
        if self.params.pin_full_collision_set {
            self.full_mask
        } else {
            0
        }
    }

    fn report(mut self, outcome: Outcome, solution: Option<Solution<T>>, t0: Instant) -> SearchReport<T> {
        self.stats.outcome = outcome;
        self.stats.runtime_s = t0.elapsed().as_secs_f64();
        let solution = solution.map(|mut s| {
            s.stats = self.stats.clone();
            s
        });
        SearchReport { solution, stats: self.stats }
    }

    pub(crate) fn run(mut self) -> SearchReport<T> {
        let t0 = Instant::now();
        // Unreachable goal: immediate failure before any expansion.
        for (i, task) in self.inst.agents().iter().enumerate() {
            if self.heur.cost_to_go(i, task.start).is_none() {
                return self.report(Outcome::Failure, None, t0);
            }
        }
        let starts: Vec<u32> = self.inst.agents().iter().map(|a| a.start).collect();
        let root = JointState::initial(&starts);
        let h = self.heur.h_value(&root.envelopes).expect("starts reachable");
        let ic = self.initial_ic();
        self.nodes.push(Node {
            envelopes: root.envelopes.clone(),
            banked: root.banked_goal_wait,
            g: root.g,
            h,
            parent: None,
            preds: Vec::new(),
            ic,
            expanded: false,
        });
        self.frontier
            .compare_insert(0, &root.envelopes, self.params.dominance);
        self.push_open(0);

        while let Some(entry) = self.open.pop() {
            let id = entry.id;
            let jv: Vec<u32> = self.nodes[id].envelopes.iter().map(|e| e.v).collect();
            if !self.frontier.is_retained(&jv, id as u64) {
                continue; // swept by a dominating state after insertion
            }
            if jv == self.goal_jv {
                let solution = self.reconstruct(id);
                return self.report(Outcome::Solved, Some(solution), t0);
            }
            if self.stats.expanded.is_multiple_of(256) {
                if let Some(limit) = self.params.time_limit {
                    if t0.elapsed() > limit {
                        return self.report(Outcome::Timeout, None, t0);
                    }
                }
                if let Some(limit) = self.params.expansion_limit {
                    if self.stats.expanded >= limit {
                        return self.report(Outcome::Timeout, None, t0);
                    }
                }
            }
            self.stats.expanded += 1;
            self.nodes[id].expanded = true;

            let children = self.gen_children(id);
            if let Some(outcome) = self.fatal {
                return self.report(outcome, None, t0);
            }
            for child in children {
                self.stats.generated += 1;
                let conflicts = conflict_set(&child.envelopes);
                if !conflicts.is_empty() {
                    let mask = conflicts.agents.iter().fold(0u64, |m, &a| m | (1 << a));
                    self.on_conflict(id, mask);
                    continue;
                }
                let nid = self.nodes.len();
                match self
                    .frontier
                    .compare_insert(nid as u64, &child.envelopes, self.params.dominance)
                {
                    CompareOutcome::Kept => {
                        let h = self
                            .heur
                            .h_value(&child.envelopes)
                            .expect("agents stay in their start component");
                        let ic = self.initial_ic();
                        self.nodes.push(Node {
                            envelopes: child.envelopes,
                            banked: child.banked_goal_wait,
                            g: child.g,
                            h,
                            parent: Some(id),
                            preds: vec![id],
                            ic,
                            expanded: false,
                        });
                        self.push_open(nid);
                    }
                    CompareOutcome::DiscardedBy(rid) => {
                        self.stats.pruned += 1;
                        if matches!(self.kind, VariantKind::Mstar) {
                            // The pruned candidate's parent becomes a
                            // predecessor of the dominating state, and that
                            // state's collision set flows back to the parent.
                            let rid = rid as usize;
                            self.nodes[rid].preds.push(id);
                            let mask = self.nodes[rid].ic;
                            if mask != 0 {
                                self.backpropagate(id, mask);
                            }
                        }
                    }
                }
            }
        }
        self.report(Outcome::Failure, None, t0)
    }

    fn on_conflict(&mut self, parent_id: usize, mask: u64) {
        match self.kind {
            VariantKind::Astar => {}
            VariantKind::Mstar => self.backpropagate(parent_id, mask),
            VariantKind::Rmstar => self.merge_groups(mask),
        }
    }

    /// Enlarges collision sets along the back-propagation graph and
    /// re-inserts every state whose set grew (LS-M*).
    pub(crate) fn backpropagate(&mut self, id: usize, mask: u64) {
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            if self.nodes[cur].ic & mask == mask {
                continue; // fixed point: nothing new to add
            }
            self.nodes[cur].ic |= mask;
            self.push_open(cur);
            stack.extend(self.nodes[cur].preds.iter().copied());
        }
    }

    /// Merges the groups of all agents in `mask`; on an actual merge,
    /// invalidates affected plan memos and re-inserts every expanded
    /// retained state so it re-expands under the new grouping (LS-rM*).
    fn merge_groups(&mut self, mask: u64) {
        let agents: Vec<usize> = (0..self.inst.agent_count())
            .filter(|&i| mask & (1 << i) != 0)
            .collect();
        let mut merged = false;
        for w in agents.windows(2) {
            merged |= self.groups.union(w[0], w[1]);
        }
        if !merged {
            return;
        }
        self.plans.retain(|&k, _| k & mask == 0);
        for id in 0..self.nodes.len() {
            if !self.nodes[id].expanded {
                continue;
            }
            let jv: Vec<u32> = self.nodes[id].envelopes.iter().map(|e| e.v).collect();
            if self.frontier.is_retained(&jv, id as u64) {
                self.push_open(id);
            }
        }
    }

    fn gen_children(&mut self, id: usize) -> Vec<JointState<T>> {
        let n = self.inst.agent_count();
        let envelopes = self.nodes[id].envelopes.clone();
        let ic = self.nodes[id].ic;
        let timing = timing_summary(&envelopes);

        // rM*: make sure plans for every active multi-agent group exist
        // before assembling options (may run recursive sub-searches).
        if matches!(self.kind, VariantKind::Rmstar) {
            let masks: Vec<u64> = (0..n).map(|i| self.groups.group_mask(i)).collect();
            for mask in masks {
                if mask.count_ones() > 1 && mask != self.full_mask {
                    self.ensure_plan(mask);
                    if self.fatal.is_some() {
                        return Vec::new();
                    }
                }
            }
        }

        let options: Vec<Vec<Envelope<T>>> = (0..n)
            .map(|i| match self.kind {
                VariantKind::Astar => individual_neighbors(self.inst, &envelopes, &timing, i),
                VariantKind::Mstar => {
                    if ic & (1 << i) != 0 {
                        individual_neighbors(self.inst, &envelopes, &timing, i)
                    } else {
                        vec![policy_step(
                            self.inst,
                            &self.policies[i],
                            &envelopes,
                            &timing,
                            i,
                        )]
                    }
                }
                VariantKind::Rmstar => {
                    let mask = self.groups.group_mask(i);
                    if mask.count_ones() == 1 {
                        vec![policy_step(
                            self.inst,
                            &self.policies[i],
                            &envelopes,
                            &timing,
                            i,
                        )]
                    } else if mask == self.full_mask {
                        individual_neighbors(self.inst, &envelopes, &timing, i)
                    } else {
                        match self.plan_step(mask, i, &envelopes, &timing) {
                            Some(e) => vec![e],
                            // off the memoized plan: fall back to full generation
                            None => individual_neighbors(self.inst, &envelopes, &timing, i),
                        }
                    }
                }
            })
            .collect();

        let parent = JointState {
            envelopes,
            g: self.nodes[id].g,
            banked_goal_wait: self.nodes[id].banked.clone(),
        };
        combine_options(self.inst, &parent, &options)
    }

    /// Memoized recursive sub-planning for one rM* group.
    fn ensure_plan(&mut self, mask: u64) {
        if self.plans.contains_key(&mask) {
            return;
        }
        let ids: Vec<usize> = (0..self.inst.agent_count())
            .filter(|&i| mask & (1 << i) != 0)
            .collect();
        let sub = match self.inst.restrict(&ids) {
            Ok(sub) => sub,
            Err(_) => {
                self.fatal = Some(Outcome::Failure);
                return;
            }
        };
        let mut sub_params = self.params.clone();
        sub_params.pin_full_collision_set = false;
        let report = super::rmstar::search_lsrm(&sub, &sub_params);
        match report.solution {
            Some(sol) => {
                let plan = ids
                    .iter()
                    .enumerate()
                    .map(|(sub_i, &global)| (global, sol.paths[sub_i].waypoints.clone()))
                    .collect();
                self.plans.insert(mask, plan);
            }
            None => {
                // A group that cannot be solved alone makes the whole
                // instance unsolvable; timeouts propagate as timeouts.
                self.fatal = Some(report.stats.outcome);
            }
        }
    }

    /// Next action for an agent following its group's memoized plan, or
    /// `None` when the agent's current position/time is off the plan.
    fn plan_step(
        &mut self,
        mask: u64,
        i: usize,
        envelopes: &[Envelope<T>],
        timing: &TimingSummary<T>,
    ) -> Option<Envelope<T>> {
        let cur = envelopes[i];
        if cur.t != timing.t_min {
            return Some(cur);
        }
        let plan = self.plans.get(&mask)?;
        let wps = plan.get(&i)?;
        for (k, wp) in wps.iter().enumerate() {
            if wp.v != cur.v || cur.t < wp.arrive {
                continue;
            }
            let last = k + 1 == wps.len();
            if last {
                // parked at the goal: quantized wait, banked as a goal wait
                if cur.v == self.inst.agents()[i].goal {
                    let wait = wait_duration(self.inst, timing);
                    return Some(Envelope { v: cur.v, p: cur.v, tp: cur.t, t: cur.t + wait });
                }
                return None;
            }
            if cur.t < wp.depart {
                return Some(Envelope { v: cur.v, p: cur.v, tp: cur.t, t: wp.depart });
            }
            if cur.t == wp.depart {
                let next = wps[k + 1];
                let d = self.inst.duration(i, cur.v, next.v).ok()?;
                if cur.t + d == next.arrive {
                    return Some(Envelope { v: next.v, p: cur.v, tp: cur.t, t: next.arrive });
                }
                return None;
            }
        }
        None
    }

    fn reconstruct(&self, goal_id: usize) -> Solution<T> {
        let mut chain = Vec::new();
        let mut cur = Some(goal_id);
        while let Some(id) = cur {
            chain.push(id);
            cur = self.nodes[id].parent;
        }
        chain.reverse();

        let n = self.inst.agent_count();
        let mut paths = Vec::with_capacity(n);
        for i in 0..n {
            let start = self.nodes[chain[0]].envelopes[i];
            let mut wps = vec![Waypoint { v: start.v, arrive: T::zero(), depart: T::zero() }];
            let mut prev = start;
            for &id in &chain[1..] {
                let e = self.nodes[id].envelopes[i];
                if e == prev {
                    continue; // agent frozen across this step
                }
                let last = wps.last_mut().expect("nonempty");
                if e.is_wait() {
                    debug_assert_eq!(last.v, e.v);
                    last.depart = e.t;
                } else {
                    debug_assert_eq!(last.v, e.p);
                    last.depart = e.tp;
                    wps.push(Waypoint { v: e.v, arrive: e.t, depart: e.t });
                }
                prev = e;
            }
            // trailing waits at the goal are free and dropped
            let last = wps.last_mut().expect("nonempty");
            last.depart = last.arrive;
            paths.push(TimedPath { agent: i, waypoints: wps });
        }
        let cost = self.nodes[goal_id].g;
        debug_assert_eq!(
            cost,
            paths
                .iter()
                .fold(T::zero(), |acc, p| acc + p.completion_time())
        );
        Solution {
            cost,
            paths,
            algorithm: self.algo.to_string(),
            stats: self.stats.clone(),
        }
    }
}

/// The quantized wait amount at a state: the gap to the second smallest
/// timestamp, or the global minimum edge duration when all timestamps
/// coincide.
pub(crate) fn wait_duration<T: TimeScalar>(inst: &Instance<T>, timing: &TimingSummary<T>) -> T {
    match timing.t_min2 {
        Some(t2) => t2 - timing.t_min,
        None => inst.min_edge_duration(),
    }
}

/// LS-A*: optimal (w = 1) or bounded-suboptimal (w > 1) loosely
/// synchronized best-first search.
pub fn search<T: TimeScalar>(inst: &Instance<T>, params: &SearchParams) -> SearchReport<T> {
    Engine::new(inst, params, VariantKind::Astar, "lsa").run()
}
