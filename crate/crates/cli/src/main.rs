//! Command-line front end: theory predictions, single runs, replicated
//! experiments and exact small-instance laws.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rumorlab::experiments::Model;
use rumorlab::{Error, LawSpec};

use config::{parse_pmf, FileConfig};

#[derive(Parser)]
#[command(
    name = "rumorlab",
    version,
    about = "Rumor spreading with random resources on complete and random graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the limit quantities for a resource law.
    Theory(Common),
    /// Run one construction and print its stop time and informed count.
    Simulate(Common),
    /// Run replicas and write per-replica records and a summary.
    Experiment(Common),
    /// Exact law of the final informed count on a tiny instance.
    Oracle(Common),
}

/// Flags shared by all subcommands; each mirrors a configuration key.
#[derive(Args, Clone, Default)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Constant resource.
    #[arg(long, conflicts_with = "k_pmf")]
    k_const: Option<u32>,
    /// Resource pmf as `value:prob,...`.
    #[arg(long)]
    k_pmf: Option<String>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Master seed of a single run.
    #[arg(long)]
    seed: Option<u64>,
    /// Survival threshold as a fraction of n.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Worker threads for replicas.
    #[arg(long)]
    jobs: Option<usize>,
    /// Emission mode (1 or 2) for `theory`.
    #[arg(long)]
    mode: Option<u8>,
    /// Maximum number of random choices per enumerated path.
    #[arg(long)]
    depth_cap: Option<usize>,
    /// Report exact rational probabilities.
    #[arg(long)]
    exact: bool,
    /// Per-step trace CSV for `simulate`.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Replica records CSV for `experiment`.
    #[arg(long)]
    records_out: Option<PathBuf>,
    /// Summary JSON for `experiment` (stdout when absent).
    #[arg(long)]
    summary_out: Option<PathBuf>,
    /// JSON output of `theory`, `simulate` or `oracle` (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn resolve(&self) -> rumorlab::Result<FileConfig> {
        let law = match (&self.k_const, &self.k_pmf) {
            (Some(k), _) => Some(LawSpec::Constant { constant: *k }),
            (None, Some(text)) => Some(parse_pmf(text)?),
            (None, None) => None,
        };
        let flags = FileConfig {
            model: self.model,
            n: self.n,
            p: self.p,
            law,
            replicas: self.replicas,
            base_seed: self.base_seed,
            seed: self.seed,
            survival_epsilon: self.epsilon,
            jobs: self.jobs,
            mode: self.mode,
            depth_cap: self.depth_cap,
        };
        Ok(FileConfig::load(self.config.as_deref())?.merge(flags))
    }
}

/// Failure of a command, carrying its exit code.
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::OutOfRange(_) | Error::Domain(_) => {
                Failure::Usage(e.to_string())
            }
            Error::Infeasible(_) | Error::ScanCap { .. } | Error::InsufficientData(_) => {
                Failure::Runtime(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("i/o error: {e}"))
    }
}

type Handler = fn(&Common, FileConfig) -> Result<(), Failure>;

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, cmd): (&Common, Handler) = match &cli.command {
        Command::Theory(c) => (c, commands::theory),
        Command::Simulate(c) => (c, commands::simulate),
        Command::Experiment(c) => (c, commands::experiment),
        Command::Oracle(c) => (c, commands::oracle),
    };
    let resolved = common.resolve()?;
    cmd(common, resolved)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
