//! The spatio-temporal state model: envelopes, occupancy, conflicts and
//! dominance relations.

use thiserror::Error;

use crate::scalar::TimeScalar;

/// An agent's latest action: it departed `p` at `tp` and arrives at `v`
/// at `t`. The initial envelope has `p == v` and `tp == t == 0`; a wait
/// has `p == v` with `tp < t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Envelope<T> {
    pub v: u32,
    pub p: u32,
    pub t: T,
    pub tp: T,
}

impl<T: TimeScalar> Envelope<T> {
    pub fn initial(v: u32) -> Self {
        Envelope { v, p: v, t: T::zero(), tp: T::zero() }
    }

    pub fn is_wait(&self) -> bool {
        self.p == self.v
    }
}

/// A joint search state: one envelope per agent plus the bookkeeping the
/// searches need. `parent` references live in the search arena.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointState<T> {
    pub envelopes: Vec<Envelope<T>>,
    /// Accumulated cost: per-agent elapsed time minus banked goal waits.
    pub g: T,
    /// Uncharged wait time accumulated at each agent's own goal.
    pub banked_goal_wait: Vec<T>,
}

impl<T: TimeScalar> JointState<T> {
    pub fn initial(starts: &[u32]) -> Self {
        JointState {
            envelopes: starts.iter().map(|&v| Envelope::initial(v)).collect(),
            g: T::zero(),
            banked_goal_wait: vec![T::zero(); starts.len()],
        }
    }

    pub fn agent_count(&self) -> usize {
        self.envelopes.len()
    }

    /// The joint vertex: the tuple of current vertices.
    pub fn joint_vertex(&self) -> Vec<u32> {
        self.envelopes.iter().map(|e| e.v).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("time {0} is outside the envelope window [{1}, {2}]")]
    TimeOutsideEnvelope(String, String, String),
    #[error("joint vertices differ")]
    JointVertexMismatch,
}

/// The one or two vertices an agent occupies at some instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupancy {
    pub a: u32,
    pub b: Option<u32>,
}

impl Occupancy {
    fn one(a: u32) -> Self {
        Occupancy { a, b: None }
    }

    fn pair(a: u32, b: u32) -> Self {
        if a == b {
            Occupancy::one(a)
        } else {
            Occupancy { a, b: Some(b) }
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.a == v || self.b == Some(v)
    }

    /// A vertex occupied by both, if any.
    pub fn shared_with(&self, other: &Occupancy) -> Option<u32> {
        [Some(self.a), self.b].into_iter().flatten().find(|&v| other.contains(v))
    }
}

/// Vertices occupied by an envelope at instant `t`:
/// `{p}` at departure, `{v}` at arrival, `{p, v}` strictly in between.
pub fn occupancy<T: TimeScalar>(env: &Envelope<T>, t: T) -> Result<Occupancy, StateError> {
    if t < env.tp || t > env.t {
        return Err(StateError::TimeOutsideEnvelope(
            t.to_string(),
            env.tp.to_string(),
            env.t.to_string(),
        ));
    }
    if env.p == env.v {
        return Ok(Occupancy::one(env.v));
    }
    Ok(if t == env.tp {
        Occupancy::one(env.p)
    } else if t == env.t {
        Occupancy::one(env.v)
    } else {
        Occupancy::pair(env.p, env.v)
    })
}

/// Occupancy on an open interval strictly inside the envelope window.
fn interior_occupancy<T: TimeScalar>(env: &Envelope<T>) -> Occupancy {
    Occupancy::pair(env.p, env.v)
}

/// When a pair of agents shares a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConflictTime<T> {
    At(T),
    Open(T, T),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictWitness<T> {
    pub agents: (usize, usize),
    pub vertex: u32,
    pub when: ConflictTime<T>,
}

/// The agents in conflict within a state, with per-pair witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport<T> {
    pub agents: Vec<usize>,
    pub witnesses: Vec<ConflictWitness<T>>,
}

impl<T> Default for ConflictReport<T> {
    fn default() -> Self {
        ConflictReport { agents: Vec::new(), witnesses: Vec::new() }
    }
}

impl<T> ConflictReport<T> {
    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }
}

/// Checks one agent pair over the intersection of their envelope windows.
fn pair_conflict<T: TimeScalar>(
    (i, ei): (usize, &Envelope<T>),
    (j, ej): (usize, &Envelope<T>),
) -> Option<ConflictWitness<T>> {
    let lo = ei.tp.max(ej.tp);
    let hi = ei.t.min(ej.t);
    if lo > hi {
        return None;
    }
    // Window endpoints.
    for t in [lo, hi] {
        let oi = occupancy(ei, t).expect("t inside both windows");
        let oj = occupancy(ej, t).expect("t inside both windows");
        if let Some(v) = oi.shared_with(&oj) {
            return Some(ConflictWitness { agents: (i, j), vertex: v, when: ConflictTime::At(t) });
        }
    }
    // Window interior: occupancy is constant on (lo, hi).
    if lo < hi {
        let oi = interior_occupancy(ei);
        let oj = interior_occupancy(ej);
        if let Some(v) = oi.shared_with(&oj) {
            return Some(ConflictWitness {
                agents: (i, j),
                vertex: v,
                when: ConflictTime::Open(lo, hi),
            });
        }
    }
    None
}

/// Conflict check over all agent pairs of a state's envelopes.
pub fn conflict_set<T: TimeScalar>(envelopes: &[Envelope<T>]) -> ConflictReport<T> {
    let mut report = ConflictReport::default();
    let mut in_conflict = vec![false; envelopes.len()];
    for i in 0..envelopes.len() {
        for j in i + 1..envelopes.len() {
            if let Some(w) = pair_conflict((i, &envelopes[i]), (j, &envelopes[j])) {
                in_conflict[i] = true;
                in_conflict[j] = true;
                report.witnesses.push(w);
            }
        }
    }
    report.agents = in_conflict
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(i, _)| i)
        .collect();
    report
}

fn check_same_joint_vertex<T: TimeScalar>(
    a: &JointState<T>,
    b: &JointState<T>,
) -> Result<(), StateError> {
    let same = a.envelopes.len() == b.envelopes.len()
        && a.envelopes.iter().zip(&b.envelopes).all(|(x, y)| x.v == y.v);
    if same {
        Ok(())
    } else {
        Err(StateError::JointVertexMismatch)
    }
}

/// Component-wise `<` on the timestamp vectors at the same joint vertex.
pub fn strictly_dominates<T: TimeScalar>(
    a: &JointState<T>,
    b: &JointState<T>,
) -> Result<bool, StateError> {
    check_same_joint_vertex(a, b)?;
    Ok(timestamps_strictly_dominate(&a.envelopes, &b.envelopes))
}

/// Component-wise `<=` on the timestamp vectors at the same joint vertex.
pub fn weakly_dominates<T: TimeScalar>(
    a: &JointState<T>,
    b: &JointState<T>,
) -> Result<bool, StateError> {
    check_same_joint_vertex(a, b)?;
    Ok(timestamps_weakly_dominate(&a.envelopes, &b.envelopes))
}

pub(crate) fn timestamps_strictly_dominate<T: TimeScalar>(
    a: &[Envelope<T>],
    b: &[Envelope<T>],
) -> bool {
    a.iter().zip(b).all(|(x, y)| x.t < y.t)
}

pub(crate) fn timestamps_weakly_dominate<T: TimeScalar>(
    a: &[Envelope<T>],
    b: &[Envelope<T>],
) -> bool {
    a.iter().zip(b).all(|(x, y)| x.t <= y.t)
}

/// True when every agent shares the same arrival timestamp.
pub fn is_synchronized<T: TimeScalar>(envelopes: &[Envelope<T>]) -> bool {
    envelopes
        .windows(2)
        .all(|w| w[0].t == w[1].t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(p: u32, v: u32, tp: i64, t: i64) -> Envelope<i64> {
        Envelope { v, p, t, tp }
    }

    fn state(envs: Vec<Envelope<i64>>) -> JointState<i64> {
        let n = envs.len();
        JointState { envelopes: envs, g: 0, banked_goal_wait: vec![0; n] }
    }

    fn state_at(vs_ts: &[(u32, i64)]) -> JointState<i64> {
        state(
            vs_ts
                .iter()
                .map(|&(v, t)| Envelope { v, p: v, t, tp: 0 })
                .collect(),
        )
    }

    #[test]
    fn occupancy_rules() {
        let e = mv(0, 1, 0, 2); // A=0 -> B=1 over [0, 2]
        assert_eq!(occupancy(&e, 1).unwrap(), Occupancy::pair(0, 1));
        assert_eq!(occupancy(&e, 2).unwrap(), Occupancy::one(1));
        assert_eq!(occupancy(&e, 0).unwrap(), Occupancy::one(0));
        assert!(occupancy(&e, 3).is_err());
        let init = Envelope::<i64>::initial(5);
        assert_eq!(occupancy(&init, 0).unwrap(), Occupancy::one(5));
    }

    #[test]
    fn swap_conflict_detected() {
        // i: A->B over [0,2]; j: B->A over [0,3]
        let report = conflict_set(&[mv(0, 1, 0, 2), mv(1, 0, 0, 3)]);
        assert_eq!(report.agents, vec![0, 1]);
    }

    #[test]
    fn arrival_meets_departure() {
        // i: A->B over [0,2]; j: B->C over [2,5]: both occupy B at t=2
        let report = conflict_set(&[mv(0, 1, 0, 2), mv(1, 2, 2, 5)]);
        assert_eq!(report.agents, vec![0, 1]);
        assert_eq!(report.witnesses[0].vertex, 1);
        assert_eq!(report.witnesses[0].when, ConflictTime::At(2));
    }

    #[test]
    fn disjoint_moves_on_cycle() {
        // F-CYC: a=0, b=1, c=2, d=3. i: a->b over [0,1]; j: d->c over [0,1].
        let report = conflict_set(&[mv(0, 1, 0, 1), mv(3, 2, 0, 1)]);
        assert!(report.is_empty());
    }

    #[test]
    fn disjoint_windows_no_conflict() {
        let report = conflict_set(&[mv(0, 1, 4, 5), mv(1, 0, 1, 2)]);
        assert!(report.is_empty());
    }

    #[test]
    fn strict_dominance_cases() {
        let v = |ts: &[i64]| state_at(&ts.iter().map(|&t| (0u32, t)).collect::<Vec<_>>());
        assert!(strictly_dominates(&v(&[2, 3]), &v(&[3, 4])).unwrap());
        assert!(!strictly_dominates(&v(&[2, 3]), &v(&[2, 4])).unwrap());
        assert!(!strictly_dominates(&v(&[2, 3]), &v(&[3, 2])).unwrap());
    }

    #[test]
    fn weak_dominance_cases() {
        let v = |ts: &[i64]| state_at(&ts.iter().map(|&t| (0u32, t)).collect::<Vec<_>>());
        assert!(weakly_dominates(&v(&[2, 3]), &v(&[2, 4])).unwrap());
        assert!(weakly_dominates(&v(&[2, 3]), &v(&[2, 3])).unwrap());
        assert!(!weakly_dominates(&v(&[2, 3]), &v(&[1, 4])).unwrap());
    }

    #[test]
    fn dominance_needs_same_joint_vertex() {
        let a = state_at(&[(0, 1)]);
        let b = state_at(&[(1, 2)]);
        assert_eq!(
            strictly_dominates(&a, &b),
            Err(StateError::JointVertexMismatch)
        );
    }

    #[test]
    fn synchronized_states() {
        assert!(is_synchronized(&state_at(&[(0, 0), (1, 0)]).envelopes));
        assert!(is_synchronized(&state_at(&[(0, 2), (1, 2), (2, 2)]).envelopes));
        assert!(!is_synchronized(&state_at(&[(0, 2), (1, 3)]).envelopes));
        assert!(is_synchronized(&state_at(&[(0, 7)]).envelopes));
    }
}
