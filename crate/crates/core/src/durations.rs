//! Per-agent edge durations.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{whole_units, TimeScalar};

/// Durations for one agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentDurations<T> {
    /// Same duration on every edge (the paper-experiment shape `d^i`).
    Uniform(T),
    /// Directed per-edge entries with an optional fallback.
    Table {
        default: Option<T>,
        entries: HashMap<(u32, u32), T>,
    },
}

/// Lookup from `(agent, directed edge)` to a strictly positive duration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DurationTable<T> {
    agents: Vec<AgentDurations<T>>,
}

impl<T: TimeScalar> DurationTable<T> {
    pub fn new(agents: Vec<AgentDurations<T>>) -> Result<Self> {
        for (i, a) in agents.iter().enumerate() {
            match a {
                AgentDurations::Uniform(d) => {
                    if *d <= T::zero() {
                        return Err(Error::NonPositiveDuration { agent: i, u: 0, v: 0 });
                    }
                }
                AgentDurations::Table { default, entries } => {
                    if let Some(d) = default {
                        if *d <= T::zero() {
                            return Err(Error::NonPositiveDuration { agent: i, u: 0, v: 0 });
                        }
                    }
                    for (&(u, v), &d) in entries {
                        if d <= T::zero() {
                            return Err(Error::NonPositiveDuration { agent: i, u, v });
                        }
                    }
                }
            }
        }
        Ok(DurationTable { agents })
    }

    /// Uniform table with one duration per agent, in fixed-point units.
    pub fn uniform(per_agent: Vec<T>) -> Result<Self> {
        Self::new(per_agent.into_iter().map(AgentDurations::Uniform).collect())
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agent(&self, i: usize) -> &AgentDurations<T> {
        &self.agents[i]
    }

    /// Duration for `agent` to traverse the directed edge `u -> v`.
    ///
    /// Edge membership is not checked here; [`crate::instance::Instance`]
    /// validates the edge against its graph first.
    pub fn duration(&self, agent: usize, u: u32, v: u32) -> Result<T> {
        match &self.agents[agent] {
            AgentDurations::Uniform(d) => Ok(*d),
            AgentDurations::Table { default, entries } => entries
                .get(&(u, v))
                .copied()
                .or(*default)
                .ok_or(Error::MissingDuration { agent, u, v }),
        }
    }
}

/// Draws one uniform duration `d^i` per agent from `[1, k]` logical units,
/// deterministically from `seed` (ChaCha8, agents in index order).
pub fn gen_uniform_durations<T: TimeScalar>(
    n: usize,
    k: u32,
    seed: u64,
) -> Result<DurationTable<T>> {
    if k < 1 {
        return Err(Error::BadMaxDuration);
    }
    if n < 1 {
        return Err(Error::NoAgents);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_agent = (0..n)
        .map(|_| whole_units(rng.gen_range(1..=k) as i64))
        .collect();
    DurationTable::uniform(per_agent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FIXED_POINT_SCALE;

    #[test]
    fn k_one_degenerates() {
        let t: DurationTable<i64> = gen_uniform_durations(5, 1, 42).unwrap();
        for i in 0..5 {
            assert_eq!(t.duration(i, 0, 1).unwrap(), FIXED_POINT_SCALE);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let a: DurationTable<i64> = gen_uniform_durations(8, 7, 99).unwrap();
        let b: DurationTable<i64> = gen_uniform_durations(8, 7, 99).unwrap();
        assert_eq!(a, b);
        let c: DurationTable<i64> = gen_uniform_durations(8, 7, 100).unwrap();
        assert_ne!(a, c); // overwhelmingly likely for 8 draws from [1,7]
    }

    #[test]
    fn range_bound() {
        let t: DurationTable<i64> = gen_uniform_durations(100, 10, 3).unwrap();
        for i in 0..100 {
            let d = t.duration(i, 0, 1).unwrap();
            assert!((FIXED_POINT_SCALE..=10 * FIXED_POINT_SCALE).contains(&d));
            assert_eq!(d % FIXED_POINT_SCALE, 0);
        }
    }

    #[test]
    fn bad_k_rejected() {
        assert!(matches!(
            gen_uniform_durations::<i64>(2, 0, 0),
            Err(Error::BadMaxDuration)
        ));
    }

    #[test]
    fn per_edge_lookup_and_default() {
        let mut entries = HashMap::new();
        entries.insert((0u32, 1u32), 2_500_000i64);
        let t = DurationTable::new(vec![AgentDurations::Table {
            default: Some(1_000_000),
            entries,
        }])
        .unwrap();
        assert_eq!(t.duration(0, 0, 1).unwrap(), 2_500_000);
        assert_eq!(t.duration(0, 1, 0).unwrap(), 1_000_000);
    }

    #[test]
    fn missing_duration_is_an_error() {
        let t: DurationTable<i64> = DurationTable::new(vec![AgentDurations::Table {
            default: None,
            entries: HashMap::new(),
        }])
        .unwrap();
        assert!(matches!(
            t.duration(0, 0, 1),
            Err(Error::MissingDuration { .. })
        ));
    }

    #[test]
    fn non_positive_rejected() {
        assert!(DurationTable::uniform(vec![0i64]).is_err());
        assert!(DurationTable::uniform(vec![-5i64]).is_err());
    }
}
