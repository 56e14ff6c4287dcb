//! Multi-agent path finding with asynchronous actions.
//!
//! Agents move on a shared graph with per-agent, per-edge traversal
//! durations, so their decision points drift out of sync. The solvers in
//! [`search`] explore joint spatio-temporal states directly instead of
//! discretizing time; [`naive`] provides a time-discretized baseline and
//! [`oracle`] an independent brute-force reference for validation.
//!
//! All times are exact fixed-point integers (see [`scalar`]); the public
//! entry points are generic over the scalar, with [`Time`] as the default
//! concrete choice.

pub mod bench;
pub mod durations;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod instance;
pub mod naive;
pub mod oracle;
pub mod scalar;
pub mod search;
pub mod solution;
pub mod state;
pub mod validate;

pub use error::{Error, Result};
pub use scalar::{TimeScalar, FIXED_POINT_SCALE};

/// Default concrete time scalar: i64 micro-units.
pub type Time = i64;
/// Wide time scalar for overflow-sensitive workloads.
pub type WideTime = i128;

pub use durations::{gen_uniform_durations, AgentDurations, DurationTable};
pub use graph::{load_map, load_scenario, Graph};
pub use instance::{instance_from_json, instance_to_json, AgentTask, Instance};
pub use search::{
    search, search_lsm, search_lsrm, Outcome, SearchParams, SearchReport, SearchStats, TieBreak,
    Weight,
};
pub use solution::{solution_from_json, solution_to_json, Solution, TimedPath, Waypoint};
pub use state::{conflict_set, Envelope, JointState};
