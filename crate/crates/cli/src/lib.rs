//! Command-line driver for the ecmkit pipeline.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod svg;

use config::{Auto, Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error(transparent)]
    Core(#[from] ecmkit::Error),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 configuration, 3 data or I/O, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e.kind() {
                ecmkit::ErrorKind::Data => 3,
                ecmkit::ErrorKind::Numerical => 4,
            },
            CliError::Output { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ecmkit", version, about = "Cointegration, VECM and impulse-response analysis of quarterly panels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Differenced lags in the VECM, or `auto` for MSBIC selection.
    #[arg(long, global = true, value_name = "N|auto")]
    pub lags: Option<Auto>,
    /// Cointegrating rank, or `auto` for the trace-test choice.
    #[arg(long, global = true, value_name = "N|auto")]
    pub rank: Option<Auto>,
    /// Quarters held out at the end of the sample for forecast evaluation.
    #[arg(long, global = true, value_name = "N")]
    pub holdout: Option<usize>,
    /// Variable order for the triangular factorization.
    #[arg(long, global = true, value_delimiter = ',', value_name = "a,b,c")]
    pub ordering: Option<Vec<String>>,
    /// Trace-test critical values: `standard` or `paper`.
    #[arg(long = "cv-table", global = true, value_name = "TABLE")]
    pub cv_table: Option<String>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Output formats: any of text, csv, json, svg.
    #[arg(long, global = true, value_delimiter = ',', value_name = "LIST")]
    pub format: Option<Vec<String>>,
    /// Recorded with the run; the pipeline itself draws no random numbers.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Level and differenced summary statistics.
    Summary,
    /// ADF tests and integration order per variable.
    Unitroot,
    /// Engle-Granger two-step cointegration test.
    Eg,
    /// Johansen trace test, with MSBIC lag selection when lags are `auto`.
    Johansen,
    /// Estimate the VECM equations.
    Fit,
    /// Level forecasts, scored against the holdout when one is set.
    Forecast,
    /// Orthogonalized impulse responses for every shock.
    Irf,
    /// Forecast-error variance decomposition.
    Fevd,
    /// Everything above in one run.
    Report,
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            lags: self.lags,
            rank: self.rank,
            holdout: self.holdout,
            ordering: self.ordering.clone(),
            cv_table: self.cv_table.clone(),
            out: self.out.clone(),
            formats: self.format.clone(),
            seed: self.seed,
        }
    }

    pub fn resolve_config(&self) -> Result<RunConfig, CliError> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| CliError::Config(vec!["--config PATH is required".into()]))?;
        let (file, base) = RunConfig::read_file(path).map_err(CliError::Config)?;
        RunConfig::resolve(file, &base, self.overrides()).map_err(CliError::Config)
    }
}

/// Runs one subcommand and returns its text report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let config = cli.resolve_config()?;
    let mut ctx = commands::Context::load(config)?;
    let (name, text) = match cli.command {
        Command::Summary => ("summary", commands::summary(&mut ctx)?),
        Command::Unitroot => ("unitroot", commands::unitroot(&mut ctx)?),
        Command::Eg => ("eg", commands::eg(&mut ctx)?),
        Command::Johansen => ("johansen", commands::johansen(&mut ctx)?),
        Command::Fit => ("fit", commands::fit(&mut ctx)?),
        Command::Forecast => ("forecast", commands::forecast_cmd(&mut ctx)?),
        Command::Irf => ("irf", commands::irf_cmd(&mut ctx)?),
        Command::Fevd => ("fevd", commands::fevd_cmd(&mut ctx)?),
        Command::Report => ("report", commands::report(&mut ctx)?),
    };
    ctx.text(name, &text)?;
    Ok(text)
}
