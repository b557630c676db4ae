//! Command-line front end: map and graph ingestion, entropy estimation,
//! diagram construction, Markov-shift kernels, perturbation experiments.

mod commands;
mod config;
mod formats;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "entromap", version, about = "Entropy of piecewise-monotone interval maps")]
struct Cli {
    /// JSON config file supplying defaults for the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed recorded for reproducibility of randomized runs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy estimators and the bound report for one map.
    Entropy(EntropyCli),
    /// Build and serialize a truncated diagram.
    Diagram(DiagramCli),
    /// Path-counting kernels on graph files.
    Markov(MarkovCli),
    /// Windowed sinusoidal perturbation experiment.
    Perturb(PerturbCli),
}

#[derive(Args)]
struct EntropyCli {
    /// `builtin:<family>:<param>` or a map file path.
    #[arg(long)]
    map: Option<String>,
    /// lap | hofbauer | gurevic | all.
    #[arg(long)]
    method: Option<String>,
    /// Diagram truncation depth N.
    #[arg(long)]
    depth: Option<usize>,
    /// Lap horizon n_max.
    #[arg(long)]
    nmax: Option<usize>,
    /// Closed-path horizon p_max.
    #[arg(long)]
    pmax: Option<usize>,
    /// Periodic-orbit search horizon.
    #[arg(long)]
    qmax: Option<usize>,
    /// Smoothness parameter r >= 1 for the bound arithmetic.
    #[arg(long)]
    r: Option<f64>,
    /// exact | float.
    #[arg(long)]
    mode: Option<String>,
    /// Output directory (default: ENTROMAP_OUT_DIR or the cwd).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramCli {
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print vertex/edge counts and the steep-vertex histogram.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct MarkovCli {
    /// entropy | parry | bowen | counts | convergence.
    action: String,
    /// Graph or diagram file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Vertex id or label.
    #[arg(long)]
    vertex: Option<String>,
    #[arg(long)]
    pmax: Option<usize>,
    /// Closed-path length for `bowen`.
    #[arg(long)]
    p: Option<usize>,
    /// First-return bound for `convergence`.
    #[arg(long)]
    m: Option<usize>,
    /// Limit graph for `convergence`.
    #[arg(long)]
    limit: Option<PathBuf>,
    /// Comma-separated sequence graphs for `convergence`.
    #[arg(long, value_delimiter = ',')]
    seq: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PerturbCli {
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    r: Option<f64>,
    /// Window half-width, in (0, 0.1].
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated iteration horizons.
    #[arg(long, value_delimiter = ',')]
    l_list: Vec<u32>,
    /// Amplitude constant C.
    #[arg(long)]
    amp_const: Option<f64>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<i32> {
    let file_cfg = match &cli.config {
        Some(path) => config::load(path)?,
        None => config::FileConfig::default(),
    };
    match cli.command {
        Command::Entropy(a) => {
            let args = commands::EntropyArgs {
                map: a
                    .map
                    .or(file_cfg.map)
                    .ok_or_else(|| anyhow::anyhow!("usage: entropy needs --map"))?,
                method: a.method.or(file_cfg.method).unwrap_or_else(|| "all".into()),
                depth: a.depth.or(file_cfg.depth).unwrap_or(8),
                nmax: a.nmax.or(file_cfg.nmax).unwrap_or(14),
                pmax: a.pmax.or(file_cfg.pmax).unwrap_or(40),
                qmax: a.qmax.or(file_cfg.qmax).unwrap_or(6),
                r: a.r.or(file_cfg.r).unwrap_or(2.0),
                mode: a.mode.or(file_cfg.mode),
                out: a.out.or(file_cfg.out),
            };
            commands::cmd_entropy(&args)
        }
        Command::Diagram(a) => {
            let args = commands::DiagramArgs {
                map: a
                    .map
                    .or(file_cfg.map)
                    .ok_or_else(|| anyhow::anyhow!("usage: diagram needs --map"))?,
                depth: a.depth.or(file_cfg.depth).unwrap_or(0),
                mode: a.mode.or(file_cfg.mode),
                out: a.out.or(file_cfg.out),
                stats: a.stats,
            };
            commands::cmd_diagram(&args)
        }
        Command::Markov(a) => {
            let args = commands::MarkovArgs {
                action: a.action,
                graph: a
                    .graph
                    .or(file_cfg.graph.map(PathBuf::from))
                    .ok_or_else(|| anyhow::anyhow!("usage: markov needs --graph"))?,
                vertex: a.vertex.or(file_cfg.vertex),
                pmax: a.pmax.or(file_cfg.pmax).unwrap_or(40),
                p: a.p.or(file_cfg.p),
                m: a.m.or(file_cfg.m).unwrap_or(4),
                limit: a.limit,
                seq: a.seq,
                out: a.out.or(file_cfg.out),
            };
            commands::cmd_markov(&args)
        }
        Command::Perturb(a) => {
            let args = commands::PerturbArgs {
                map: a
                    .map
                    .or(file_cfg.map)
                    .ok_or_else(|| anyhow::anyhow!("usage: perturb needs --map"))?,
                r: a.r.or(file_cfg.r).unwrap_or(3.0),
                delta: a.delta.or(file_cfg.delta).unwrap_or(0.01),
                l_list: if a.l_list.is_empty() {
                    file_cfg.l_list.unwrap_or_default()
                } else {
                    a.l_list
                },
                amp_const: a.amp_const.or(file_cfg.amp_const).unwrap_or(1.0),
                mode: a.mode.or(file_cfg.mode),
                out: a.out.or(file_cfg.out),
            };
            commands::cmd_perturb(&args)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            let msg = format!("{err:#}");
            if msg.contains("usage:") || msg.contains("file not found") {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
