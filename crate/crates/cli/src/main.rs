//! Experiment command line: validate scenarios, train agents, and emit the
//! benchmark CSVs.
//!
//! Exit codes: 0 on success, 1 when validation, convergence, or planning
//! fails, 2 on IO or parse errors. Every command is deterministic given
//! `--seed`; CSV outputs are header-first, LF-terminated, and byte-stable
//! across reruns.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use navsim::experiment::{
    learn_run, plan_after_training, render_heatmap_csv, render_learn_csv, render_plan_text,
    render_sweep_csv, sweep, train_to_convergence, visitation_counts, Agent, LearnRow,
};
use navsim::nav::feature_at;
use navsim::planner::{RoomGraph, SymState};
use navsim::scenario::{parse_scenario, Scenario};
use navsim::Scalar;

#[derive(Parser)]
#[command(name = "cognav", version, about = "Five-room navigation-hierarchy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Agent assembly selector for the learn command.
#[derive(Clone, Copy, ValueEnum)]
enum AgentArg {
    Hierarchical,
    Flat,
}

impl From<AgentArg> for Agent {
    fn from(a: AgentArg) -> Agent {
        match a {
            AgentArg::Hierarchical => Agent::Hierarchical,
            AgentArg::Flat => Agent::Flat,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a scenario file and assemble both agent hierarchies.
    Validate {
        /// Scenario file to check.
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Train an agent over seeded runs and write the learning-curve CSV.
    Learn {
        /// Scenario file to train on.
        #[arg(long)]
        scenario: PathBuf,
        /// Learning episodes per run.
        #[arg(long)]
        episodes: u32,
        /// Independent seeded runs.
        #[arg(long, default_value_t = 10)]
        runs: u32,
        /// Agent assembly to train.
        #[arg(long, value_enum, default_value_t = AgentArg::Hierarchical)]
        agent: AgentArg,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Base seed; defaults to the scenario's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train the hierarchy, then print the symbolic plan it commits to.
    Plan {
        /// Scenario file to train on.
        #[arg(long)]
        scenario: PathBuf,
        /// Learning episodes before the plan is read.
        #[arg(long, default_value_t = 30)]
        episodes: u32,
        /// Base seed; defaults to the scenario's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train the hierarchy to convergence and write the visitation CSV.
    Heatmap {
        /// Scenario file to train on.
        #[arg(long)]
        scenario: PathBuf,
        /// Evaluation trials to count over.
        #[arg(long, default_value_t = 1000)]
        trials: u32,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Base seed; defaults to the scenario's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve the true dynamics across slippage settings and write the CSV.
    Sweep {
        /// Scenario file providing the map.
        #[arg(long)]
        scenario: PathBuf,
        /// Slippage settings, comma separated or repeated.
        #[arg(long = "p", value_delimiter = ',', required = true)]
        p_list: Vec<Scalar>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// A command failure with its exit code: soft failures (validation,
/// planning, convergence) exit 1, IO and parse failures exit 2.
enum Failure {
    Soft(String),
    Io(String),
}

fn soft(err: impl std::fmt::Display) -> Failure {
    Failure::Soft(err.to_string())
}

fn load(path: &Path, seed: Option<u64>) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut sc = parse_scenario(&text)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        sc.params.seed = s;
    }
    Ok(sc)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { scenario } => {
            let sc = load(&scenario, None)?;
            for agent in [Agent::Hierarchical, Agent::Flat] {
                agent
                    .build(&sc)
                    .map_err(|e| Failure::Soft(format!("{} assembly: {e}", agent.name())))?;
            }
            println!(
                "ok: {} rooms, {} doorways, hierarchical and flat assemblies validate",
                sc.map.room_count(),
                sc.map.doorways.len()
            );
        }
        Command::Learn { scenario, episodes, runs, agent, out, seed } => {
            let sc = load(&scenario, seed)?;
            let agent = Agent::from(agent);
            let rows: Vec<LearnRow> = (0..runs)
                .into_par_iter()
                .map(|run| learn_run(&sc, agent, run, episodes).map(|(rows, _)| rows))
                .collect::<Result<Vec<_>, _>>()
                .map_err(soft)?
                .into_iter()
                .flatten()
                .collect();
            write_out(&out, &render_learn_csv(&rows))?;
        }
        Command::Plan { scenario, episodes, seed } => {
            let sc = load(&scenario, seed)?;
            let (plan, tables) = plan_after_training(&sc, episodes).map_err(soft)?;
            let Some(plan) = plan else {
                return Err(Failure::Soft(format!(
                    "no plan reaches the goal within horizon {}",
                    sc.params.horizon
                )));
            };
            let graph = RoomGraph::from_map(&sc.map);
            let (room, cell) = sc.map.start;
            let from = SymState::new(room, feature_at(&sc.map, room, cell));
            print!("{}", render_plan_text(&graph, &tables, from, &plan));
        }
        Command::Heatmap { scenario, trials, out, seed } => {
            let sc = load(&scenario, seed)?;
            let (trained, converged) =
                train_to_convergence(&sc, Agent::Hierarchical, 50, 2000).map_err(soft)?;
            let Some(episodes) = converged else {
                return Err(Failure::Soft(
                    "the agent did not converge within the episode budget".into(),
                ));
            };
            eprintln!("converged after {episodes} episodes");
            let counts =
                visitation_counts(&trained, &sc.map, trials, sc.params.max_steps, sc.params.seed);
            write_out(&out, &render_heatmap_csv(&sc.map, &counts))?;
        }
        Command::Sweep { scenario, p_list, out } => {
            if let Some(&bad) = p_list.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
                return Err(Failure::Soft(format!(
                    "p_intended must lie in (0, 1], got {bad}"
                )));
            }
            let sc = load(&scenario, None)?;
            let rows = sweep(&sc.map, &p_list);
            write_out(&out, &render_sweep_csv(&sc.map, &rows))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Soft(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
