//! Timed paths, solutions and their JSON wire format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{TimeScalar, FIXED_POINT_SCALE};
use crate::search::SearchStats;

/// One stop on an agent's route: the agent occupies `v` from `arrive`
/// until `depart`; the next waypoint, if any, is reached by a single
/// edge traversal starting at `depart`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Waypoint<T> {
    pub v: u32,
    pub arrive: T,
    pub depart: T,
}

/// An agent's full timed route from its start to its goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedPath<T> {
    pub agent: usize,
    pub waypoints: Vec<Waypoint<T>>,
}

impl<T: TimeScalar> TimedPath<T> {
    /// Arrival time of the final waypoint: the agent's completion time
    /// under the trailing-goal-wait discount.
    pub fn completion_time(&self) -> T {
        self.waypoints.last().map(|w| w.arrive).unwrap_or_else(T::zero)
    }
}

/// A joint plan plus the statistics of the run that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub cost: T,
    pub paths: Vec<TimedPath<T>>,
    pub algorithm: String,
    pub stats: SearchStats,
}

// --- JSON ------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SolutionJson {
    /// Fixed-point sub-units per logical time unit for every time field.
    time_scale: i64,
    algorithm: String,
    cost: i64,
    stats: SearchStats,
    paths: Vec<PathJson>,
}

#[derive(Serialize, Deserialize)]
struct PathJson {
    agent: usize,
    waypoints: Vec<WaypointJson>,
}

#[derive(Serialize, Deserialize)]
struct WaypointJson {
    v: u32,
    arrive: i64,
    depart: i64,
}

pub fn solution_to_json<T: TimeScalar>(sol: &Solution<T>) -> String {
    let as_i64 = |t: T| t.to_i64().expect("time fits i64 in the wire format");
    let raw = SolutionJson {
        time_scale: FIXED_POINT_SCALE,
        algorithm: sol.algorithm.clone(),
        cost: as_i64(sol.cost),
        stats: sol.stats.clone(),
        paths: sol
            .paths
            .iter()
            .map(|p| PathJson {
                agent: p.agent,
                waypoints: p
                    .waypoints
                    .iter()
                    .map(|w| WaypointJson {
                        v: w.v,
                        arrive: as_i64(w.arrive),
                        depart: as_i64(w.depart),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("solution JSON serialization")
}

pub fn solution_from_json<T: TimeScalar>(text: &str) -> Result<Solution<T>> {
    let raw: SolutionJson =
        serde_json::from_str(text).map_err(|e| Error::SolutionJson(e.to_string()))?;
    if raw.time_scale != FIXED_POINT_SCALE {
        return Err(Error::SolutionJson(format!(
            "unsupported time_scale {} (expected {})",
            raw.time_scale, FIXED_POINT_SCALE
        )));
    }
    let from = |x: i64| T::from_i64(x).ok_or(Error::TimeRange(x as f64));
    Ok(Solution {
        cost: from(raw.cost)?,
        algorithm: raw.algorithm,
        stats: raw.stats,
        paths: raw
            .paths
            .into_iter()
            .map(|p| {
                Ok(TimedPath {
                    agent: p.agent,
                    waypoints: p
                        .waypoints
                        .into_iter()
                        .map(|w| {
                            Ok(Waypoint { v: w.v, arrive: from(w.arrive)?, depart: from(w.depart)? })
                        })
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{Outcome, SearchStats};

    #[test]
    fn json_round_trip() {
        let sol = Solution::<i64> {
            cost: 4_000_000,
            algorithm: "lsa".into(),
            stats: SearchStats {
                expanded: 10,
                generated: 20,
                pruned: 3,
                runtime_s: 0.001,
                outcome: Outcome::Solved,
            },
            paths: vec![TimedPath {
                agent: 0,
                waypoints: vec![
                    Waypoint { v: 0, arrive: 0, depart: 0 },
                    Waypoint { v: 1, arrive: 1_000_000, depart: 1_000_000 },
                ],
            }],
        };
        let text = solution_to_json(&sol);
        let back: Solution<i64> = solution_from_json(&text).unwrap();
        assert_eq!(back, sol);
        assert_eq!(back.paths[0].completion_time(), 1_000_000);
    }

    #[test]
    fn wrong_scale_rejected() {
        let text = r#"{"time_scale": 1, "algorithm": "x", "cost": 0,
            "stats": {"expanded":0,"generated":0,"pruned":0,"runtime_s":0.0,"outcome":"solved"},
            "paths": []}"#;
        assert!(solution_from_json::<i64>(text).is_err());
    }
}
