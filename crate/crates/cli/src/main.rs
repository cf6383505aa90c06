//! `zetalab`: batch runner for the prime-counting and zeta check suites.

mod cmd;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use config::RunConfig;
use zetalab_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(
                CoreError::Domain(_)
                | CoreError::RangeInverted { .. }
                | CoreError::Capacity { .. }
                | CoreError::Io(_),
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    PiTable,
    ZeroScan,
    CurveReport,
    Dissymmetry,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::PiTable => "pi-table",
            Command::ZeroScan => "zero-scan",
            Command::CurveReport => "curve-report",
            Command::Dissymmetry => "dissymmetry",
        }
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected SIGMA0,T0, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

#[derive(Debug, Parser)]
#[command(
    name = "zetalab",
    version,
    about = "Prime counting asymptotics and zeta function checks"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON file with a flat run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    sieve_ceiling: Option<u64>,
    #[arg(long)]
    classify_ceiling: Option<u64>,
    #[arg(long)]
    segment_size: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    x_list: Option<Vec<u64>>,
    #[arg(long)]
    phi_slack: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_hi: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    box_points: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Path as `SIGMA0,T0`; repeatable.
    #[arg(long = "path", value_parser = parse_pair, allow_negative_numbers = true)]
    paths: Option<Vec<(f64, f64)>>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sigma_list: Option<Vec<f64>>,
    #[arg(long)]
    n_terms: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
}

impl Cli {
    fn flags(&self) -> RunConfig {
        RunConfig {
            command: None,
            out: self.out.clone(),
            seed: self.seed,
            tol: self.tol,
            sieve_ceiling: self.sieve_ceiling,
            classify_ceiling: self.classify_ceiling,
            segment_size: self.segment_size,
            x_list: self.x_list.clone(),
            phi_slack: self.phi_slack,
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            step: self.step,
            box_points: self.box_points,
            samples: self.samples,
            paths: self.paths.clone(),
            n_list: self.n_list.clone(),
            m: self.m,
            sigma_list: self.sigma_list.clone(),
            n_terms: self.n_terms,
            threshold: self.threshold,
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let command = cli.command.name();
    if let Some(c) = &file.command {
        if c != command {
            return Err(CliError::Config(format!(
                "config file is for `{c}`, not `{command}`"
            )));
        }
    }
    let cfg = file.overlay(cli.flags());
    let outcome = match cli.command {
        Command::PiTable => cmd::pi_table::run(&cfg)?,
        Command::ZeroScan => cmd::zero_scan::run(&cfg)?,
        Command::CurveReport => cmd::curve_report::run(&cfg)?,
        Command::Dissymmetry => cmd::dissymmetry::run(&cfg)?,
    };
    let code = if outcome.failures.is_empty() { 0 } else { 1 };
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    output::write_all(&dir, command, &outcome, code as i32)?;
    for f in &outcome.failures {
        eprintln!("check failed: {f}");
    }
    println!(
        "{command}: {} rows, {} -> {}",
        outcome.rows.len(),
        if code == 0 { "pass" } else { "FAIL" },
        dir.display()
    );
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("zetalab: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => {
            eprintln!("zetalab: internal error");
            ExitCode::from(1)
        }
    }
}
