//! Brute-force reference solver. A uniform-cost (Dijkstra) sweep over the
//! full tick lattice with no heuristic and no pruning beyond duplicate
//! detection, kept deliberately separate from the production solvers so
//! their answers can be cross-checked.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::TimeScalar;
use crate::solution::{TimedPath, Waypoint};

/// Outcome of an oracle run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult<T> {
    /// `None` when the instance was proven unsolvable within the horizon.
    pub cost: Option<T>,
    pub paths: Option<Vec<TimedPath<T>>>,
}

/// Each agent is either parked at a vertex (`edge_to == u32::MAX`) or
/// somewhere along an edge with `left` time still to travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Spot<T> {
    at: u32,
    edge_to: u32,
    left: T,
}

const PARKED: u32 = u32::MAX;

impl<T: TimeScalar> Spot<T> {
    fn parked(v: u32) -> Self {
        Spot { at: v, edge_to: PARKED, left: T::zero() }
    }

    fn is_parked(&self) -> bool {
        self.edge_to == PARKED
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct OKey<T> {
    spots: Vec<Spot<T>>,
    credit: Vec<T>,
}

/// Exhaustive minimum-cost search with step `tau` (defaults to the gcd of
/// all durations). Explores at most `state_cap` distinct states and at
/// most `horizon` time units; errors out when the cap is hit.
pub fn brute_force_oracle<T: TimeScalar>(
    inst: &Instance<T>,
    tau: Option<T>,
    state_cap: usize,
    horizon: Option<T>,
) -> Result<OracleResult<T>> {
    let n = inst.agent_count();
    let durations = inst.all_durations();
    if durations.is_empty() {
        return Err(Error::NoDurations);
    }
    let tau = match tau {
        Some(t) => t,
        None => {
            let mut g = T::zero();
            for d in &durations {
                g = g.gcd(d);
            }
            g
        }
    };
    if tau.is_zero() || durations.iter().any(|d| !(*d % tau).is_zero()) {
        return Err(Error::Config("oracle step must divide all durations".into()));
    }
    let horizon = match horizon {
        Some(h) => h,
        None => {
            // generous default: travel every edge of every agent twice
            let sum = durations.iter().fold(T::zero(), |a, &d| a + d);
            sum + sum + tau
        }
    };

    let goals: Vec<u32> = inst.agents().iter().map(|a| a.goal).collect();
    let start = OKey {
        spots: inst.agents().iter().map(|a| Spot::parked(a.start)).collect(),
        credit: vec![T::zero(); n],
    };
    // per state: (cost, tick time, parent index, own key)
    let mut arena: Vec<(T, T, Option<usize>, OKey<T>)> =
        vec![(T::zero(), T::zero(), None, start.clone())];
    let mut best: HashMap<OKey<T>, usize> = HashMap::new();
    best.insert(start, 0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((T::zero(), 0usize)));

    while let Some(Reverse((cost, id))) = heap.pop() {
        let (stored_cost, now, _, key) = {
            let s = &arena[id];
            (s.0, s.1, s.2, s.3.clone())
        };
        if cost > stored_cost || best.get(&key) != Some(&id) {
            continue; // superseded by a cheaper route to the same state
        }
        if key
            .spots
            .iter()
            .zip(&goals)
            .all(|(s, &g)| s.is_parked() && s.at == g)
        {
            return Ok(OracleResult {
                cost: Some(cost),
                paths: Some(rebuild_paths(inst, &arena, id, tau)),
            });
        }
        if now >= horizon {
            continue;
        }

        // enumerate per-agent choices for the next tick
        let choices: Vec<Vec<Spot<T>>> = key
            .spots
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if !s.is_parked() {
                    let left = s.left - tau;
                    if left.is_zero() {
                        return vec![Spot::parked(s.edge_to)];
                    }
                    return vec![Spot { at: s.at, edge_to: s.edge_to, left }];
                }
                let mut out = vec![*s];
                for &u in inst.graph().neighbors(s.at) {
                    let d = inst.duration(i, s.at, u).expect("edge duration");
                    let left = d - tau;
                    if left.is_zero() {
                        out.push(Spot::parked(u));
                    } else {
                        out.push(Spot { at: s.at, edge_to: u, left });
                    }
                }
                out
            })
            .collect();

        let mut pick = vec![0usize; n];
        loop {
            let spots: Vec<Spot<T>> = (0..n).map(|i| choices[i][pick[i]]).collect();
            if tick_is_safe(&key.spots, &spots) {
                let mut cost2 = cost;
                let mut credit = key.credit.clone();
                for i in 0..n {
                    let waited = spots[i] == key.spots[i];
                    if waited && spots[i].at == goals[i] {
                        credit[i] = credit[i] + tau;
                    } else {
                        if key.spots[i].is_parked()
                            && key.spots[i].at == goals[i]
                            && !waited
                            && credit[i] > T::zero()
                        {
                            cost2 = cost2 + credit[i];
                            credit[i] = T::zero();
                        }
                        cost2 = cost2 + tau;
                    }
                }
                let child = OKey { spots, credit };
                let replace = match best.get(&child) {
                    None => true,
                    Some(&old) => cost2 < arena[old].0,
                };
                if replace {
                    if arena.len() >= state_cap {
                        return Err(Error::OracleCap(state_cap));
                    }
                    let nid = arena.len();
                    arena.push((cost2, now + tau, Some(id), child.clone()));
                    best.insert(child, nid);
                    heap.push(Reverse((cost2, nid)));
                }
            }
            // odometer
            let mut k = n;
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break false;
                }
                pick[k] = 0;
            };
            if done {
                break;
            }
        }
    }
    Ok(OracleResult { cost: None, paths: None })
}

/// Vertex sets touched during the elapsed tick and at its end instant.
fn tick_is_safe<T: TimeScalar>(prev: &[Spot<T>], next: &[Spot<T>]) -> bool {
    let span = |p: &Spot<T>, q: &Spot<T>| -> (u32, Option<u32>) {
        if !p.is_parked() {
            (p.at, Some(p.edge_to))
        } else if q.is_parked() && q.at == p.at {
            (p.at, None)
        } else if q.is_parked() {
            (p.at, Some(q.at)) // full edge in one tick
        } else {
            (p.at, Some(q.edge_to))
        }
    };
    let end = |q: &Spot<T>| -> (u32, Option<u32>) {
        if q.is_parked() {
            (q.at, None)
        } else {
            (q.at, Some(q.edge_to))
        }
    };
    let touch = |x: (u32, Option<u32>), y: (u32, Option<u32>)| {
        x.0 == y.0 || Some(x.0) == y.1 || x.1 == Some(y.0) || (x.1.is_some() && x.1 == y.1)
    };
    for i in 0..prev.len() {
        for j in i + 1..prev.len() {
            let (pi, qi) = (&prev[i], &next[i]);
            let (pj, qj) = (&prev[j], &next[j]);
            if touch(span(pi, qi), span(pj, qj)) || touch(end(qi), end(qj)) {
                return false;
            }
        }
    }
    true
}

fn rebuild_paths<T: TimeScalar>(
    inst: &Instance<T>,
    arena: &[(T, T, Option<usize>, OKey<T>)],
    goal_id: usize,
    tau: T,
) -> Vec<TimedPath<T>> {
    let mut chain = Vec::new();
    let mut cur = Some(goal_id);
    while let Some(id) = cur {
        chain.push(id);
        cur = arena[id].2;
    }
    chain.reverse();

    let n = inst.agent_count();
    let mut paths = Vec::with_capacity(n);
    for i in 0..n {
        let first = arena[chain[0]].3.spots[i];
        let mut wps = vec![Waypoint { v: first.at, arrive: T::zero(), depart: T::zero() }];
        for (step, &id) in chain.iter().enumerate().skip(1) {
            let t = tau * T::from_usize(step).expect("tick fits scalar");
            let prev = arena[chain[step - 1]].3.spots[i];
            let cur = arena[id].3.spots[i];
            if prev.is_parked() && cur.is_parked() && prev.at == cur.at {
                wps.last_mut().unwrap().depart = t;
            } else if cur.is_parked() && (!prev.is_parked() || prev.at != cur.at) {
                wps.push(Waypoint { v: cur.at, arrive: t, depart: t });
            }
        }
        let last = wps.last_mut().unwrap();
        last.depart = last.arrive;
        paths.push(TimedPath { agent: i, waypoints: wps });
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_cycle, line_opposing, line_single};
    use crate::scalar::whole_units;

    #[test]
    fn four_cycle_costs() {
        let inst = four_cycle::<i64>(1, 1);
        let r = brute_force_oracle(&inst, None, 1_000_000, None).unwrap();
        assert_eq!(r.cost, Some(whole_units(4)));

        let inst = four_cycle::<i64>(1, 2);
        let r = brute_force_oracle(&inst, None, 1_000_000, None).unwrap();
        assert_eq!(r.cost, Some(whole_units(7)));
    }

    #[test]
    fn single_agent() {
        let inst = line_single::<i64>(2);
        let r = brute_force_oracle(&inst, None, 1_000_000, None).unwrap();
        assert_eq!(r.cost, Some(whole_units(4)));
        let p = &r.paths.unwrap()[0];
        let vs: Vec<u32> = p.waypoints.iter().map(|w| w.v).collect();
        assert_eq!(vs, vec![0, 1, 2]);
    }

    #[test]
    fn opposing_unsolvable() {
        let inst = line_opposing::<i64>(1);
        let r = brute_force_oracle(&inst, None, 1_000_000, None).unwrap();
        assert_eq!(r.cost, None);
    }

    #[test]
    fn refinement_invariance() {
        let inst = four_cycle::<i64>(1, 2);
        let base = brute_force_oracle(&inst, None, 1_000_000, None).unwrap();
        let fine = brute_force_oracle(
            &inst,
            Some(whole_units::<i64>(1) / 2),
            4_000_000,
            None,
        )
        .unwrap();
        assert_eq!(base.cost, fine.cost);
    }

    #[test]
    fn cap_reported() {
        let inst = four_cycle::<i64>(1, 2);
        let err = brute_force_oracle(&inst, None, 3, None).unwrap_err();
        assert!(matches!(err, Error::OracleCap(3)));
    }
}
