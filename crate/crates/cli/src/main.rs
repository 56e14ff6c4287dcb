//! `lss` — solve, benchmark and validate multi-agent path finding
//! instances with asynchronous (per-agent, per-edge) action durations.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use lss_core::bench::{records_to_csv, run_suite, summarize, Algorithm, ExperimentConfig};
use lss_core::naive::{naive_search, NaiveParams};
use lss_core::oracle::brute_force_oracle;
use lss_core::scalar::{fixed_to_units, units_to_fixed};
use lss_core::validate::validate_solution;
use lss_core::{
    gen_uniform_durations, instance_from_json, load_map, load_scenario, search, search_lsm,
    search_lsrm, solution_from_json, solution_to_json, AgentTask, Instance, Outcome, SearchParams,
    Time, Weight,
};

#[derive(Parser)]
#[command(name = "lss", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print or save the solution.
    Solve(SolveArgs),
    /// Run an experiment grid from a JSON config and emit CSV.
    Bench(BenchArgs),
    /// Check a solution file against its instance.
    Validate(ValidateArgs),
    /// Exhaustive reference search (small instances only).
    Oracle(OracleArgs),
}

/// How to obtain the instance, shared by several subcommands.
#[derive(Args)]
struct InstanceArgs {
    /// Instance as a self-contained JSON file.
    #[arg(long, conflicts_with_all = ["map", "scen"])]
    instance: Option<PathBuf>,
    /// Grid map in the movingai `.map` format.
    #[arg(long, requires = "scen")]
    map: Option<PathBuf>,
    /// Scenario in the movingai `.scen` format.
    #[arg(long, requires = "map")]
    scen: Option<PathBuf>,
    /// Number of agents to take from the scenario.
    #[arg(long, default_value_t = 2)]
    agents: usize,
    /// Maximum per-agent edge duration (whole units) for generated tables.
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Seed for generated duration tables.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance<Time>> {
        if let Some(path) = &self.instance {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return Ok(instance_from_json(&text)?);
        }
        let (Some(map), Some(scen)) = (&self.map, &self.scen) else {
            bail!("provide either --instance or --map with --scen");
        };
        let map_text =
            fs::read_to_string(map).with_context(|| format!("reading {}", map.display()))?;
        let graph = load_map(&map_text)?;
        let scen_text =
            fs::read_to_string(scen).with_context(|| format!("reading {}", scen.display()))?;
        let pairs = load_scenario(&scen_text, self.agents, &graph)?;
        let agents = pairs
            .into_iter()
            .map(|(start, goal)| AgentTask { start, goal })
            .collect();
        let durations = gen_uniform_durations(self.agents, self.k, self.seed)?;
        Ok(Instance::new(Arc::new(graph), durations, agents)?)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Solver: lsa, lsm, lsrm or naive.
    #[arg(long, default_value = "lsa")]
    algo: String,
    /// Heuristic inflation factor (>= 1).
    #[arg(long, default_value_t = 1.0)]
    weight: f64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Tick length in whole units (naive solver only).
    #[arg(long)]
    tau: Option<f64>,
    /// Tick horizon (naive solver only).
    #[arg(long)]
    horizon: Option<u64>,
    /// Write the solution JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: json or summary.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Experiment description (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also print per-(algo, k) aggregates to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Solution JSON produced by `lss solve`.
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Tick length in whole units; defaults to the duration gcd.
    #[arg(long)]
    tau: Option<f64>,
    /// Abort after this many explored states.
    #[arg(long, default_value_t = 10_000_000)]
    cap: usize,
}

fn parse_tau(tau: Option<f64>) -> Result<Option<Time>> {
    tau.map(|t| {
        units_to_fixed::<Time>(t)
            .filter(|v| *v > 0)
            .ok_or_else(|| anyhow!("invalid tau {t}"))
    })
    .transpose()
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode> {
    let inst = args.instance.load()?;
    let params = SearchParams {
        weight: Weight::from_f64(args.weight)?,
        time_limit: args.time_limit.map(Duration::from_secs_f64),
        ..Default::default()
    };
    let report = match args.algo.as_str() {
        "lsa" => search(&inst, &params),
        "lsm" => search_lsm(&inst, &params),
        "lsrm" => search_lsrm(&inst, &params),
        "naive" => naive_search(
            &inst,
            &NaiveParams {
                tau: parse_tau(args.tau)?,
                horizon_ticks: args.horizon,
                search: params,
            },
        ),
        other => bail!("unknown algorithm '{other}'"),
    };
    match &report.solution {
        Some(sol) => {
            let json = solution_to_json(sol);
            if let Some(path) = &args.out {
                fs::write(path, &json)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            match args.format.as_str() {
                "json" => println!("{json}"),
                "summary" => println!(
                    "solved cost={} expanded={} generated={} runtime_s={:.3}",
                    fixed_to_units(sol.cost),
                    sol.stats.expanded,
                    sol.stats.generated,
                    sol.stats.runtime_s
                ),
                other => bail!("unknown format '{other}'"),
            }
            Ok(ExitCode::SUCCESS)
        }
        None => {
            let (what, code) = match report.stats.outcome {
                Outcome::Timeout => ("timeout", 2),
                _ => ("unsolvable", 1),
            };
            println!(
                "{what} expanded={} generated={} runtime_s={:.3}",
                report.stats.expanded, report.stats.generated, report.stats.runtime_s
            );
            Ok(ExitCode::from(code))
        }
    }
}

fn run_bench(args: &BenchArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let config = ExperimentConfig::from_json(&text)?;
    for algo in &config.algorithms {
        // parse check so a typo fails before hours of runs
        Algorithm::parse(algo.name())?;
    }
    let records = run_suite(&config)?;
    let csv = records_to_csv(&records)?;
    match &args.out {
        Some(path) => fs::write(path, &csv)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    if args.summary {
        for s in summarize(&records) {
            eprintln!(
                "{} k={}: {}/{} solved, mean expanded {:.1}, mean runtime {:.3}s",
                s.algo, s.k, s.solved, s.runs, s.mean_expanded, s.mean_runtime_s
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_validate(args: &ValidateArgs) -> Result<ExitCode> {
    let inst = args.instance.load()?;
    let text = fs::read_to_string(&args.solution)
        .with_context(|| format!("reading {}", args.solution.display()))?;
    let sol = solution_from_json::<Time>(&text)?;
    let report = validate_solution(&inst, &sol);
    if report.is_valid() {
        println!("valid cost={}", fixed_to_units(sol.cost));
        Ok(ExitCode::SUCCESS)
    } else {
        for issue in &report.issues {
            println!("invalid: {issue:?}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn run_oracle(args: &OracleArgs) -> Result<ExitCode> {
    let inst = args.instance.load()?;
    let result = brute_force_oracle(&inst, parse_tau(args.tau)?, args.cap, None)?;
    match result.cost {
        Some(cost) => {
            println!("solved cost={}", fixed_to_units(cost));
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("unsolvable");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(64)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => run_bench(args),
        Command::Validate(args) => run_validate(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            // bad paths, malformed files and unknown names are all usage errors
            eprintln!("error: {e:#}");
            ExitCode::from(64)
        }
    }
}
