//! Experiment driver: cartesian sweeps over instances, algorithms and
//! weights, with CSV output for offline analysis.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::random_grid_instance;
use crate::instance::Instance;
use crate::naive::{naive_search, NaiveParams};
use crate::scalar::{fixed_to_units, TimeScalar};
use crate::search::{search, search_lsm, search_lsrm, Outcome, SearchParams, SearchReport, Weight};

/// Which solver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Lsa,
    Lsm,
    Lsrm,
    Naive,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Lsa => "lsa",
            Algorithm::Lsm => "lsm",
            Algorithm::Lsrm => "lsrm",
            Algorithm::Naive => "naive",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lsa" => Ok(Algorithm::Lsa),
            "lsm" => Ok(Algorithm::Lsm),
            "lsrm" => Ok(Algorithm::Lsrm),
            "naive" => Ok(Algorithm::Naive),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Runs one solver on one instance with the given weight.
pub fn run_algorithm<T: TimeScalar>(
    inst: &Instance<T>,
    algo: Algorithm,
    params: &SearchParams,
) -> SearchReport<T> {
    match algo {
        Algorithm::Lsa => search(inst, params),
        Algorithm::Lsm => search_lsm(inst, params),
        Algorithm::Lsrm => search_lsrm(inst, params),
        Algorithm::Naive => naive_search(
            inst,
            &NaiveParams { tau: None, horizon_ticks: None, search: params.clone() },
        ),
    }
}

/// A full experiment: every instance (grid x agents x k x seed) crossed
/// with every algorithm and weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid_width: usize,
    pub grid_height: usize,
    pub agent_counts: Vec<usize>,
    /// Maximum per-agent edge duration, in whole time units.
    pub duration_ranges: Vec<u32>,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_weights")]
    pub weights: Vec<f64>,
    /// Per-run time limit in seconds; unlimited when absent.
    #[serde(default)]
    pub time_limit_s: Option<f64>,
    #[serde(default)]
    pub expansion_limit: Option<u64>,
}

fn default_weights() -> Vec<f64> {
    vec![1.0]
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

/// One row of the results table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub map: String,
    pub n_agents: usize,
    pub k: u32,
    pub seed: u64,
    pub algo: String,
    pub w: f64,
    pub outcome: Outcome,
    /// Solution cost in whole time units; empty for unsolved runs.
    pub cost: Option<f64>,
    pub expanded: u64,
    pub generated: u64,
    pub pruned: u64,
    pub runtime_s: f64,
}

/// Executes the whole experiment grid, in deterministic order.
pub fn run_suite(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let map = format!("empty-{}x{}", config.grid_width, config.grid_height);
    let mut records = Vec::new();
    for &n in &config.agent_counts {
        for &k in &config.duration_ranges {
            for &seed in &config.seeds {
                let inst: Instance<i64> =
                    random_grid_instance(config.grid_width, config.grid_height, n, k, seed);
                for &algo in &config.algorithms {
                    for &w in &config.weights {
                        let params = SearchParams {
                            weight: Weight::from_f64(w)?,
                            time_limit: config
                                .time_limit_s
                                .map(Duration::from_secs_f64),
                            expansion_limit: config.expansion_limit,
                            ..Default::default()
                        };
                        let report = run_algorithm(&inst, algo, &params);
                        records.push(RunRecord {
                            map: map.clone(),
                            n_agents: n,
                            k,
                            seed,
                            algo: algo.name().to_string(),
                            w,
                            outcome: report.stats.outcome,
                            cost: report
                                .solution
                                .as_ref()
                                .map(|s| fixed_to_units(s.cost)),
                            expanded: report.stats.expanded,
                            generated: report.stats.generated,
                            pruned: report.stats.pruned,
                            runtime_s: report.stats.runtime_s,
                        });
                    }
                }
            }
        }
    }
    Ok(records)
}

/// Renders records as CSV with a pinned column order.
pub fn records_to_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "map", "n_agents", "k", "seed", "algo", "w", "outcome", "cost", "expanded",
        "generated", "pruned", "runtime_s",
    ])
    .map_err(|e| Error::Config(e.to_string()))?;
    for r in records {
        let outcome = match r.outcome {
            Outcome::Solved => "solved",
            Outcome::Failure => "failure",
            Outcome::Timeout => "timeout",
        };
        w.write_record([
            r.map.clone(),
            r.n_agents.to_string(),
            r.k.to_string(),
            r.seed.to_string(),
            r.algo.clone(),
            format!("{}", r.w),
            outcome.to_string(),
            r.cost.map(|c| format!("{c}")).unwrap_or_default(),
            r.expanded.to_string(),
            r.generated.to_string(),
            r.pruned.to_string(),
            format!("{:.3}", r.runtime_s),
        ])
        .map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

/// Aggregate view over one (algo, k) slice of a result set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub algo: String,
    pub k: u32,
    pub runs: usize,
    pub solved: usize,
    pub mean_expanded: f64,
    pub mean_runtime_s: f64,
}

/// Groups records by (algo, k) in first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<Summary> {
    let mut out: Vec<Summary> = Vec::new();
    for r in records {
        let entry = out.iter_mut().find(|s| s.algo == r.algo && s.k == r.k);
        let s = match entry {
            Some(s) => s,
            None => {
                out.push(Summary {
                    algo: r.algo.clone(),
                    k: r.k,
                    runs: 0,
                    solved: 0,
                    mean_expanded: 0.0,
                    mean_runtime_s: 0.0,
                });
                out.last_mut().unwrap()
            }
        };
        // accumulate sums first; divide once at the end
        s.runs += 1;
        if r.outcome == Outcome::Solved {
            s.solved += 1;
        }
        s.mean_expanded += r.expanded as f64;
        s.mean_runtime_s += r.runtime_s;
    }
    for s in &mut out {
        if s.runs > 0 {
            s.mean_expanded /= s.runs as f64;
            s.mean_runtime_s /= s.runs as f64;
        }
    }
    out
}
