//! Command implementations behind the `revtorus` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::ValueEnum;

use config::{Format, RunConfig};
use output::Sink;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Critical points, total area and the metric table.
    Analyze,
    /// Trajectories from given starts; closed curves with their spectra.
    Curves,
    /// Unduloid branch from the bifurcation parallel, with validation.
    Branch,
    /// Verdicts for the configured regions.
    Stability,
    /// Candidate families, the minimal-perimeter profile and transitions.
    Profile,
}

pub struct RunOutput {
    pub report: String,
    pub files: Vec<PathBuf>,
}

/// Run one command. Configuration problems surface as
/// [`config::ConfigError`] in the error chain.
pub fn run(cmd: Command, config_path: &Path, out: Option<&Path>) -> anyhow::Result<RunOutput> {
    let cfg = RunConfig::load(config_path)?;
    run_config(cmd, &cfg, out)
}

pub fn run_config(cmd: Command, cfg: &RunConfig, out: Option<&Path>) -> anyhow::Result<RunOutput> {
    let s = cfg.surface.build()?;
    let mut sink = Sink::new(&cfg.out_dir(out), cfg.wants(Format::Csv))?;
    let report = match cmd {
        Command::Analyze => commands::analyze(cfg, &s, &mut sink)?,
        Command::Curves => commands::curves(cfg, &s, &mut sink)?,
        Command::Branch => commands::branch(cfg, &s, &mut sink)?,
        Command::Stability => commands::stability(cfg, &s, &mut sink)?,
        Command::Profile => commands::profile(cfg, &s, &mut sink)?,
    };
    Ok(RunOutput {
        report,
        files: sink.written,
    })
}
