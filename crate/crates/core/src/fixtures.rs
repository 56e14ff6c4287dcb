//! Small shared instances used by tests, the acceptance suite and docs.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::durations::{gen_uniform_durations, DurationTable};
use crate::graph::{load_map, Graph};
use crate::instance::{AgentTask, Instance};
use crate::scalar::{whole_units, TimeScalar};

/// The 4-cycle fixture: vertices a=0, b=1, c=2, d=3 with edges
/// a-b, b-d, d-c, c-a. Agent 0 goes a->d, agent 1 goes d->a.
pub fn four_cycle<T: TimeScalar>(d1_units: i64, d2_units: i64) -> Instance<T> {
    let mut g = Graph::with_vertices(4);
    for (u, v) in [(0, 1), (1, 3), (2, 3), (0, 2)] {
        g.add_edge(u, v).unwrap();
    }
    Instance::new(
        Arc::new(g),
        DurationTable::uniform(vec![whole_units(d1_units), whole_units(d2_units)]).unwrap(),
        vec![AgentTask { start: 0, goal: 3 }, AgentTask { start: 3, goal: 0 }],
    )
    .unwrap()
}

fn line_graph() -> Arc<Graph> {
    let mut g = Graph::with_vertices(3);
    g.add_edge(0, 1).unwrap();
    g.add_edge(1, 2).unwrap();
    Arc::new(g)
}

/// Path A-B-C with two opposing agents (A->C and C->A). Unsolvable:
/// the agents cannot pass each other.
pub fn line_opposing<T: TimeScalar>(d_units: i64) -> Instance<T> {
    Instance::new(
        line_graph(),
        DurationTable::uniform(vec![whole_units(d_units); 2]).unwrap(),
        vec![AgentTask { start: 0, goal: 2 }, AgentTask { start: 2, goal: 0 }],
    )
    .unwrap()
}

/// Path A-B-C with a single agent A->C.
pub fn line_single<T: TimeScalar>(d_units: i64) -> Instance<T> {
    Instance::new(
        line_graph(),
        DurationTable::uniform(vec![whole_units(d_units)]).unwrap(),
        vec![AgentTask { start: 0, goal: 2 }],
    )
    .unwrap()
}

/// An obstacle-free four-connected `width` x `height` grid.
pub fn empty_grid(width: usize, height: usize) -> Arc<Graph> {
    let row = ".".repeat(width);
    let rows = vec![row.as_str(); height].join("\n");
    let text = format!("type octile\nheight {height}\nwidth {width}\nmap\n{rows}\n");
    Arc::new(load_map(&text).unwrap())
}

/// A seeded random instance on an empty grid: distinct starts, distinct
/// goals, and uniform per-agent durations drawn from `[1, k]`.
pub fn random_grid_instance<T: TimeScalar>(
    width: usize,
    height: usize,
    n: usize,
    k: u32,
    seed: u64,
) -> Instance<T> {
    let graph = empty_grid(width, height);
    let vertices: Vec<u32> = graph.vertices().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<u32> = vertices
        .choose_multiple(&mut rng, n)
        .copied()
        .collect();
    let goals: Vec<u32> = vertices
        .choose_multiple(&mut rng, n)
        .copied()
        .collect();
    let agents = starts
        .iter()
        .zip(&goals)
        .map(|(&start, &goal)| AgentTask { start, goal })
        .collect();
    Instance::new(graph, gen_uniform_durations(n, k, seed).unwrap(), agents).unwrap()
}
