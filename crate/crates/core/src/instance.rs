//! Immutable problem instances.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::durations::{AgentDurations, DurationTable};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{fixed_to_units, units_to_fixed, TimeScalar};

/// Start and goal vertex of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentTask {
    pub start: u32,
    pub goal: u32,
}

/// The immutable problem statement: graph, durations and agent tasks.
///
/// Instances are cheap to share (`Arc` graph) and never mutated after
/// construction, so concurrent solver runs can borrow the same instance.
#[derive(Debug, Clone)]
pub struct Instance<T> {
    graph: Arc<Graph>,
    durations: DurationTable<T>,
    agents: Vec<AgentTask>,
    min_edge_duration: T,
}

impl<T: TimeScalar> Instance<T> {
    pub fn new(
        graph: Arc<Graph>,
        durations: DurationTable<T>,
        agents: Vec<AgentTask>,
    ) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::NoAgents);
        }
        if agents.len() > 64 {
            return Err(Error::TooManyAgents(agents.len()));
        }
        let mut starts = HashSet::new();
        let mut goals = HashSet::new();
        for a in &agents {
            for v in [a.start, a.goal] {
                if !graph.contains_vertex(v) {
                    return Err(Error::BadVertex(v));
                }
            }
            if !starts.insert(a.start) {
                return Err(Error::DuplicateStarts);
            }
            if !goals.insert(a.goal) {
                return Err(Error::DuplicateGoals);
            }
        }
        // Every (agent, directed edge) pair must resolve to a positive duration.
        let mut min_dur: Option<T> = None;
        for i in 0..agents.len() {
            for (u, v) in graph.edges() {
                for (a, b) in [(u, v), (v, u)] {
                    let d = durations.duration(i, a, b)?;
                    if d <= T::zero() {
                        return Err(Error::NonPositiveDuration { agent: i, u: a, v: b });
                    }
                    min_dur = Some(min_dur.map_or(d, |m| m.min(d)));
                }
            }
        }
        let min_edge_duration = min_dur.ok_or(Error::NoDurations)?;
        Ok(Instance {
            graph,
            durations,
            agents,
            min_edge_duration,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<Graph> {
        Arc::clone(&self.graph)
    }

    pub fn durations(&self) -> &DurationTable<T> {
        &self.durations
    }

    pub fn agents(&self) -> &[AgentTask] {
        &self.agents
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    /// Duration for `agent` over the directed edge `u -> v`; errors when
    /// the edge is not in the graph.
    pub fn duration(&self, agent: usize, u: u32, v: u32) -> Result<T> {
        if !self.graph.has_edge(u, v) {
            return Err(Error::NotAnEdge(u, v));
        }
        self.durations.duration(agent, u, v)
    }

    /// Minimum of `D^i(e)` over all agents and directed edges.
    pub fn min_edge_duration(&self) -> T {
        self.min_edge_duration
    }

    /// Every defined duration, one per (agent, directed edge).
    pub fn all_durations(&self) -> Vec<T> {
        let mut out = Vec::new();
        for i in 0..self.agents.len() {
            for (u, v) in self.graph.edges() {
                out.push(self.durations.duration(i, u, v).expect("validated"));
                out.push(self.durations.duration(i, v, u).expect("validated"));
            }
        }
        out
    }

    /// Restriction of the instance to a subset of its agents (by index).
    /// Used by the recursive sub-planners.
    pub fn restrict(&self, agent_ids: &[usize]) -> Result<Instance<T>> {
        let agents = agent_ids.iter().map(|&i| self.agents[i]).collect();
        let per_agent = agent_ids
            .iter()
            .map(|&i| self.durations.agent(i).clone())
            .collect();
        Instance::new(
            Arc::clone(&self.graph),
            DurationTable::new(per_agent)?,
            agents,
        )
    }
}

// ---------------------------------------------------------------------------
// JSON instance format for non-grid graphs:
// {
//   "vertices": 4,
//   "edges": [[0, 1], [1, 3]],
//   "durations": { "0": { "default": 1 },
//                  "1": { "default": 2,
//                         "per_edge": [{ "from": 0, "to": 1, "duration": 2.5 }] } },
//   "agents": [{ "start": 0, "goal": 3 }]
// }
// Durations are in logical time units (fractions allowed) and converted to
// fixed point on load. A per_edge entry sets the from->to direction and is
// mirrored to the reverse direction unless that direction has its own entry.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    vertices: u32,
    edges: Vec<(u32, u32)>,
    durations: HashMap<String, AgentDurationsJson>,
    agents: Vec<AgentTaskJson>,
}

#[derive(Serialize, Deserialize)]
struct AgentDurationsJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    default: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    per_edge: Vec<PerEdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct PerEdgeJson {
    from: u32,
    to: u32,
    duration: f64,
}

#[derive(Serialize, Deserialize)]
struct AgentTaskJson {
    start: u32,
    goal: u32,
}

fn to_fixed<T: TimeScalar>(units: f64) -> Result<T> {
    units_to_fixed(units).ok_or(Error::TimeRange(units))
}

/// Parses the JSON instance format.
pub fn instance_from_json<T: TimeScalar>(text: &str) -> Result<Instance<T>> {
    let raw: InstanceJson =
        serde_json::from_str(text).map_err(|e| Error::InstanceJson(e.to_string()))?;
    let mut graph = Graph::with_vertices(raw.vertices);
    for &(u, v) in &raw.edges {
        graph.add_edge(u, v)?;
    }
    let n = raw.agents.len();
    let mut per_agent = Vec::with_capacity(n);
    for i in 0..n {
        let spec = raw
            .durations
            .get(&i.to_string())
            .ok_or_else(|| Error::InstanceJson(format!("no durations for agent {i}")))?;
        if spec.per_edge.is_empty() {
            let d = spec.default.ok_or_else(|| {
                Error::InstanceJson(format!("agent {i}: neither default nor per_edge given"))
            })?;
            per_agent.push(AgentDurations::Uniform(to_fixed(d)?));
        } else {
            let mut entries: HashMap<(u32, u32), T> = HashMap::new();
            let explicit: HashSet<(u32, u32)> = spec
                .per_edge
                .iter()
                .map(|e| (e.from, e.to))
                .collect();
            for e in &spec.per_edge {
                let d = to_fixed(e.duration)?;
                entries.insert((e.from, e.to), d);
                if !explicit.contains(&(e.to, e.from)) {
                    entries.insert((e.to, e.from), d);
                }
            }
            let default = spec.default.map(to_fixed).transpose()?;
            per_agent.push(AgentDurations::Table { default, entries });
        }
    }
    let agents = raw
        .agents
        .iter()
        .map(|a| AgentTask { start: a.start, goal: a.goal })
        .collect();
    Instance::new(
        Arc::new(graph),
        DurationTable::new(per_agent)?,
        agents,
    )
}

/// Serializes an instance back into the JSON instance format.
pub fn instance_to_json<T: TimeScalar>(inst: &Instance<T>) -> String {
    let graph = inst.graph();
    let mut durations = HashMap::new();
    for i in 0..inst.agent_count() {
        let spec = match inst.durations().agent(i) {
            AgentDurations::Uniform(d) => AgentDurationsJson {
                default: Some(fixed_to_units(*d)),
                per_edge: Vec::new(),
            },
            AgentDurations::Table { default, entries } => {
                let mut per_edge: Vec<PerEdgeJson> = entries
                    .iter()
                    .map(|(&(from, to), &d)| PerEdgeJson {
                        from,
                        to,
                        duration: fixed_to_units(d),
                    })
                    .collect();
                per_edge.sort_by_key(|e| (e.from, e.to));
                AgentDurationsJson {
                    default: default.map(fixed_to_units),
                    per_edge,
                }
            }
        };
        durations.insert(i.to_string(), spec);
    }
    let raw = InstanceJson {
        vertices: graph.id_bound(),
        edges: graph.edges().collect(),
        durations,
        agents: inst
            .agents()
            .iter()
            .map(|a| AgentTaskJson { start: a.start, goal: a.goal })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("instance JSON serialization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FIXED_POINT_SCALE;

    const FCYC: &str = r#"{
        "vertices": 4,
        "edges": [[0,1],[1,3],[2,3],[0,2]],
        "durations": {"0": {"default": 1}, "1": {"default": 2}},
        "agents": [{"start": 0, "goal": 3}, {"start": 3, "goal": 0}]
    }"#;

    #[test]
    fn json_round_trip() {
        let inst: Instance<i64> = instance_from_json(FCYC).unwrap();
        assert_eq!(inst.agent_count(), 2);
        assert_eq!(inst.duration(0, 0, 1).unwrap(), FIXED_POINT_SCALE);
        assert_eq!(inst.duration(1, 0, 1).unwrap(), 2 * FIXED_POINT_SCALE);
        assert_eq!(inst.min_edge_duration(), FIXED_POINT_SCALE);

        let again: Instance<i64> = instance_from_json(&instance_to_json(&inst)).unwrap();
        assert_eq!(again.duration(1, 2, 3).unwrap(), 2 * FIXED_POINT_SCALE);
    }

    #[test]
    fn fractional_per_edge() {
        let text = r#"{
            "vertices": 2,
            "edges": [[0,1]],
            "durations": {"0": {"per_edge": [{"from":0,"to":1,"duration":2.5}]}},
            "agents": [{"start": 0, "goal": 1}]
        }"#;
        let inst: Instance<i64> = instance_from_json(text).unwrap();
        assert_eq!(inst.duration(0, 0, 1).unwrap(), 2_500_000);
        // mirrored to the reverse direction
        assert_eq!(inst.duration(0, 1, 0).unwrap(), 2_500_000);
    }

    #[test]
    fn asymmetric_per_edge() {
        let text = r#"{
            "vertices": 2,
            "edges": [[0,1]],
            "durations": {"0": {"per_edge": [
                {"from":0,"to":1,"duration":1},
                {"from":1,"to":0,"duration":3}
            ]}},
            "agents": [{"start": 0, "goal": 1}]
        }"#;
        let inst: Instance<i64> = instance_from_json(text).unwrap();
        assert_eq!(inst.duration(0, 0, 1).unwrap(), FIXED_POINT_SCALE);
        assert_eq!(inst.duration(0, 1, 0).unwrap(), 3 * FIXED_POINT_SCALE);
    }

    #[test]
    fn non_edge_duration_query_fails() {
        let inst: Instance<i64> = instance_from_json(FCYC).unwrap();
        assert!(matches!(inst.duration(0, 0, 3), Err(Error::NotAnEdge(0, 3))));
    }

    #[test]
    fn duplicate_starts_rejected() {
        let bad = FCYC.replace(r#"{"start": 3, "goal": 0}"#, r#"{"start": 0, "goal": 2}"#);
        assert!(matches!(
            instance_from_json::<i64>(&bad),
            Err(Error::DuplicateStarts)
        ));
    }
}
