//! Command-line front end: configuration, subcommands and reports.

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod oracle;
pub mod report;

use std::time::Instant;

pub use config::{resolve, Cli, CommandName, ConfigArgs, Format, MethodSel, RunConfig, Tolerances, THREADS_ENV};
pub use error::CliError;
pub use report::{Check, Record, Report, Tolerance, SCHEMA};

/// Resolves and validates everything first, then runs the command on a
/// pool of the configured size. Nothing is computed for an invalid config.
pub fn execute(
    cmd: CommandName,
    flags: &ConfigArgs,
    env_threads: Option<&str>,
) -> Result<(RunConfig, Report), CliError> {
    let cfg = resolve(flags, env_threads)?;
    commands::validate_for(cmd, &cfg)?;
    let report = run_with_threads(cmd, &cfg)?;
    Ok((cfg, report))
}

/// Runs a validated configuration. Reports do not depend on the thread count.
pub fn run_with_threads(cmd: CommandName, cfg: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?
            .install(|| commands::run(cmd, cfg))?,
        None => commands::run(cmd, cfg)?,
    };
    report.finish(start.elapsed().as_millis() as u64);
    Ok(report)
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => report.to_csv(),
    })
}
