//! Solution validation, written against the problem definition rather
//! than the solver internals: edge-by-edge timing checks plus a pairwise
//! occupancy-interval conflict scan.

use crate::instance::Instance;
use crate::scalar::TimeScalar;
use crate::solution::Solution;

/// One problem found in a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    MissingPath { agent: usize },
    EmptyPath { agent: usize },
    WrongStart { agent: usize, found: u32 },
    WrongGoal { agent: usize, found: u32 },
    NonzeroStartTime { agent: usize },
    NegativeWait { agent: usize, vertex: u32 },
    NotAnEdge { agent: usize, from: u32, to: u32 },
    WrongTraversalTime { agent: usize, from: u32, to: u32 },
    WrongCost,
    Conflict { agents: (usize, usize), vertex: u32 },
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Half-open-ended stay: the agent is at `v` for all `t` in
/// `[from, to]`, with `to = None` meaning forever (parked at the goal).
struct Stay<T> {
    v: u32,
    from: T,
    to: Option<T>,
}

/// The agent touches both `a` and `b` on the open interval `(from, to)`.
struct Transit<T> {
    a: u32,
    b: u32,
    from: T,
    to: T,
}

struct AgentTimeline<T> {
    stays: Vec<Stay<T>>,
    transits: Vec<Transit<T>>,
}

fn build_timeline<T: TimeScalar>(
    inst: &Instance<T>,
    agent: usize,
    sol: &Solution<T>,
    issues: &mut Vec<Issue>,
) -> Option<AgentTimeline<T>> {
    let path = sol.paths.iter().find(|p| p.agent == agent);
    let Some(path) = path else {
        issues.push(Issue::MissingPath { agent });
        return None;
    };
    let wps = &path.waypoints;
    if wps.is_empty() {
        issues.push(Issue::EmptyPath { agent });
        return None;
    }
    let task = inst.agents()[agent];
    if wps[0].v != task.start {
        issues.push(Issue::WrongStart { agent, found: wps[0].v });
    }
    if wps.last().unwrap().v != task.goal {
        issues.push(Issue::WrongGoal { agent, found: wps.last().unwrap().v });
    }
    if !wps[0].arrive.is_zero() {
        issues.push(Issue::NonzeroStartTime { agent });
    }

    let mut stays = Vec::new();
    let mut transits = Vec::new();
    for (k, wp) in wps.iter().enumerate() {
        if wp.depart < wp.arrive {
            issues.push(Issue::NegativeWait { agent, vertex: wp.v });
        }
        let last = k + 1 == wps.len();
        stays.push(Stay {
            v: wp.v,
            from: wp.arrive,
            to: if last { None } else { Some(wp.depart) },
        });
        if !last {
            let next = &wps[k + 1];
            match inst.duration(agent, wp.v, next.v) {
                Err(_) => issues.push(Issue::NotAnEdge { agent, from: wp.v, to: next.v }),
                Ok(d) => {
                    if wp.depart + d != next.arrive {
                        issues.push(Issue::WrongTraversalTime {
                            agent,
                            from: wp.v,
                            to: next.v,
                        });
                    }
                }
            }
            transits.push(Transit { a: wp.v, b: next.v, from: wp.depart, to: next.arrive });
        }
    }
    Some(AgentTimeline { stays, transits })
}

fn closed_overlap<T: TimeScalar>(a: &Stay<T>, b: &Stay<T>) -> bool {
    let a_before_b_ends = b.to.is_none_or(|end| a.from <= end);
    let b_before_a_ends = a.to.is_none_or(|end| b.from <= end);
    a_before_b_ends && b_before_a_ends
}

fn open_hits_closed<T: TimeScalar>(t: &Transit<T>, s: &Stay<T>) -> bool {
    // nonempty intersection of (t.from, t.to) with [s.from, s.to]
    s.from < t.to && s.to.is_none_or(|end| t.from < end)
}

fn open_overlap<T: TimeScalar>(x: &Transit<T>, y: &Transit<T>) -> bool {
    x.from < y.to && y.from < x.to
}

fn pair_conflict<T: TimeScalar>(x: &AgentTimeline<T>, y: &AgentTimeline<T>) -> Option<u32> {
    for sx in &x.stays {
        for sy in &y.stays {
            if sx.v == sy.v && closed_overlap(sx, sy) {
                return Some(sx.v);
            }
        }
        for ty in &y.transits {
            if (ty.a == sx.v || ty.b == sx.v) && open_hits_closed(ty, sx) {
                return Some(sx.v);
            }
        }
    }
    for tx in &x.transits {
        for sy in &y.stays {
            if (tx.a == sy.v || tx.b == sy.v) && open_hits_closed(tx, sy) {
                return Some(sy.v);
            }
        }
        for ty in &y.transits {
            if open_overlap(tx, ty) {
                for v in [tx.a, tx.b] {
                    if v == ty.a || v == ty.b {
                        return Some(v);
                    }
                }
            }
        }
    }
    None
}

/// Per-agent completion times summed: the cost a valid solution must claim.
pub fn solution_cost<T: TimeScalar>(sol: &Solution<T>) -> T {
    sol.paths
        .iter()
        .fold(T::zero(), |acc, p| acc + p.completion_time())
}

/// Full validation of a solution against its instance.
pub fn validate_solution<T: TimeScalar>(
    inst: &Instance<T>,
    sol: &Solution<T>,
) -> ValidationReport {
    let mut issues = Vec::new();
    let n = inst.agent_count();
    let timelines: Vec<Option<AgentTimeline<T>>> = (0..n)
        .map(|i| build_timeline(inst, i, sol, &mut issues))
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            if let (Some(x), Some(y)) = (&timelines[i], &timelines[j]) {
                if let Some(vertex) = pair_conflict(x, y) {
                    issues.push(Issue::Conflict { agents: (i, j), vertex });
                }
            }
        }
    }
    if sol.cost != solution_cost(sol) {
        issues.push(Issue::WrongCost);
    }
    ValidationReport { issues }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{four_cycle, line_single};
    use crate::scalar::whole_units;
    use crate::search::{search, SearchParams, SearchStats};
    use crate::solution::{Solution, TimedPath, Waypoint};

    fn wp(v: u32, arrive: i64, depart: i64) -> Waypoint<i64> {
        Waypoint {
            v,
            arrive: whole_units(arrive),
            depart: whole_units(depart),
        }
    }

    #[test]
    fn solver_output_validates() {
        for (d1, d2) in [(1, 1), (1, 2)] {
            let inst = four_cycle::<i64>(d1, d2);
            let sol = search(&inst, &SearchParams::default()).solution.unwrap();
            let report = validate_solution(&inst, &sol);
            assert!(report.is_valid(), "{:?}", report.issues);
        }
    }

    #[test]
    fn swap_is_flagged() {
        let inst = four_cycle::<i64>(1, 1);
        let sol = Solution {
            cost: whole_units(4),
            algorithm: "x".into(),
            stats: SearchStats::new(),
            paths: vec![
                TimedPath { agent: 0, waypoints: vec![wp(0, 0, 0), wp(1, 1, 1), wp(3, 2, 2)] },
                TimedPath { agent: 1, waypoints: vec![wp(3, 0, 0), wp(1, 1, 1), wp(0, 2, 2)] },
            ],
        };
        let report = validate_solution(&inst, &sol);
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, Issue::Conflict { .. })));
    }

    #[test]
    fn parked_goal_blocks_later_visitors() {
        // agent 1 parks at vertex 0 at t=2; agent 0 passing through 0 at
        // t=3 must conflict even though agent 1's path has "ended"
        let inst = four_cycle::<i64>(1, 1);
        let sol = Solution {
            cost: whole_units(6),
            algorithm: "x".into(),
            stats: SearchStats::new(),
            paths: vec![
                TimedPath {
                    agent: 0,
                    waypoints: vec![wp(0, 0, 1), wp(2, 2, 2), wp(0, 3, 3), wp(1, 4, 4), wp(3, 5, 5)],
                },
                TimedPath { agent: 1, waypoints: vec![wp(3, 0, 0), wp(2, 1, 1), wp(0, 2, 2)] },
            ],
        };
        let report = validate_solution(&inst, &sol);
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, Issue::Conflict { .. })));
    }

    #[test]
    fn timing_errors_flagged() {
        let inst = line_single::<i64>(2);
        let sol = Solution {
            cost: whole_units(3),
            algorithm: "x".into(),
            stats: SearchStats::new(),
            paths: vec![TimedPath {
                agent: 0,
                waypoints: vec![wp(0, 0, 0), wp(1, 1, 1), wp(2, 3, 3)],
            }],
        };
        let report = validate_solution(&inst, &sol);
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, Issue::WrongTraversalTime { .. })));
    }

    #[test]
    fn cost_mismatch_flagged() {
        let inst = line_single::<i64>(2);
        let mut sol = search(&inst, &SearchParams::default()).solution.unwrap();
        sol.cost += 1;
        let report = validate_solution(&inst, &sol);
        assert_eq!(report.issues, vec![Issue::WrongCost]);
    }
}
