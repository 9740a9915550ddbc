//! `singpath` command line: argument and config parsing, validation,
//! execution and report output.
//!
//! Every run writes `report.json`, which embeds the resolved
//! [`ExperimentConfig`]; passing that file back through `--config`
//! reproduces the run. Exit codes: 0 success, 2 invalid input, 3 a
//! numerical flag (divergence, branch failure, unreliable Monte Carlo), 1
//! anything else.

mod commands;
pub mod generators;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, FromArgMatches, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use commands::{NormsArgs, RoughArgs, RoughvolArgs, SleArgs, WongZakaiArgs, YoungArgs};

/// Parses `T` from an empty argument list, so config files and flags share
/// one set of defaults.
pub(crate) fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let cmd = T::augment_args(clap::Command::new("defaults"));
    T::from_arg_matches(&cmd.get_matches_from(["defaults"])).expect("defaults parse")
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Singular Hölder and Besov norms and exponent estimates of a path.
    Norms(NormsArgs),
    /// Improper Young integral along dyadic truncations.
    Young(YoungArgs),
    /// Improper rough integral of a controlled path.
    Rough(RoughArgs),
    /// Loewner traces and their regularity.
    Sle(SleArgs),
    /// fBM constructions, renormalisation constants and remainder checks.
    Roughvol(RoughvolArgs),
    /// Renormalised Wong-Zakai convergence experiment.
    Wongzakai(WongZakaiArgs),
}

#[derive(Debug, Parser)]
#[command(
    name = "singpath",
    version,
    about = "Singular path spaces and rough integration experiments"
)]
pub struct Cli {
    /// Base seed of all random streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// JSON config, or a previous `report.json`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Fully resolved run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub command: Command,
}

impl ExperimentConfig {
    /// Reads a config file; a `report.json` is accepted through its
    /// embedded `config`.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let inner = match value.get("config") {
            Some(c) if value.get("command").is_none() => c.clone(),
            _ => value,
        };
        Ok(serde_json::from_value(inner)?)
    }
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Other(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => CliError::Other(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

/// Result of a completed run: numerical flags raised, if any.
#[derive(Debug, Default)]
pub struct Outcome {
    pub flags: Vec<String>,
}

/// Combines flags and an optional config file into one config.
pub fn resolve(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&cli.config, cli.command) {
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid(
                "give either --config or a subcommand, not both".into(),
            ))
        }
        (Some(path), None) => ExperimentConfig::load(path)?,
        (None, Some(command)) => ExperimentConfig {
            seed: 0,
            out: PathBuf::from("out"),
            workers: None,
            command,
        },
        (None, None) => return Err(CliError::Invalid("no subcommand given".into())),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if cfg.workers == Some(0) {
        return Err(CliError::Invalid("--workers must be positive".into()));
    }
    Ok(cfg)
}

/// Validates, runs and writes all outputs of one experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    commands::validate(cfg)?;
    let job = || commands::execute(cfg);
    let output = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Other(e.to_string()))?
            .install(job),
        None => job(),
    }?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Other(format!("cannot create {}: {e}", cfg.out.display())))?;
    for (name, contents) in &output.files {
        std::fs::write(cfg.out.join(name), contents)
            .map_err(|e| CliError::Other(format!("cannot write {name}: {e}")))?;
    }
    Ok(Outcome {
        flags: output.flags,
    })
}

/// Entry point of the `singpath` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(cli).and_then(|cfg| run(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, outcome)) => {
            println!("wrote {}", cfg.out.join("report.json").display());
            if outcome.flags.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &outcome.flags {
                    eprintln!("flag: {f}");
                }
                ExitCode::from(3)
            }
        }
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
