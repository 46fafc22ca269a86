//! Command-line front end: `predict`, `simulate`, `analyze`, `reproduce`.
//!
//! Exit codes: 0 ok, 1 acceptance failure, 2 config or parse error,
//! 3 model evaluation error, 4 I/O error, 5 analysis precondition failure.

mod commands;
mod config;

pub use commands::{cmd_analyze, cmd_predict, cmd_reproduce, cmd_simulate, AnalyzeOutcome, PredictRow, ReproducePresets};
pub use config::{Material, RunConfig, TideSource};

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::AnalysisError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("acceptance check failed: {0}")]
    Acceptance(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("analysis error: {0}")]
    Analysis(#[from] AnalysisError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Acceptance(_) => 1,
            CliError::Config(_) | CliError::Parse(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Analysis(_) => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaterialArg {
    Steel,
    Hdpe,
}

#[derive(Debug, Parser)]
#[command(name = "cable-tide", version, about = "Tide-induced length changes of subsea cables")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Route JSON file (defaults to the bundled Japan-US route).
    #[arg(long, global = true, value_name = "PATH")]
    pub route: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub material: Option<MaterialArg>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Averaging window in seconds.
    #[arg(long = "window-s", global = true, value_name = "N")]
    pub window_s: Option<f64>,
    /// Treat route points on land or off-grid as 0 m instead of failing.
    #[arg(long, global = true)]
    pub zero_fill_land: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model AT, length change and phase over the configured window.
    Predict,
    /// Write a synthetic recording.
    Simulate,
    /// Reduce a recording and correlate it with the predicted tide.
    Analyze {
        /// Recording CSV; defaults to `<out>/recording.csv`.
        recording: Option<PathBuf>,
    },
    /// Check the reference numbers of the model chain.
    Reproduce,
}

impl Cli {
    /// Config file (or defaults) with command-line flags applied on top.
    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(r) = &self.route {
            cfg.route_path = Some(r.clone());
        }
        match self.material {
            Some(MaterialArg::Steel) => cfg.material = Material::Steel,
            Some(MaterialArg::Hdpe) => cfg.material = Material::Hdpe,
            None => {}
        }
        if let Some(s) = self.seed {
            cfg.recording.rng_seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if let Some(w) = self.window_s {
            cfg.analysis.window_s = w;
        }
        cfg.zero_fill_land |= self.zero_fill_land;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one parsed invocation, printing to `console`.
pub fn run(cli: &Cli, console: &mut dyn Write) -> Result<(), CliError> {
    let cfg = cli.resolve_config()?;
    match &cli.command {
        Command::Predict => cmd_predict(&cfg, console).map(|_| ()),
        Command::Simulate => cmd_simulate(&cfg, console),
        Command::Analyze { recording } => {
            let path = recording.clone().unwrap_or_else(|| cfg.output_dir.join("recording.csv"));
            cmd_analyze(&path, &cfg, console).map(|_| ())
        }
        Command::Reproduce => cmd_reproduce(&cfg, &ReproducePresets::default(), console),
    }
}
