//! Configuration-driven experiment runner.
//!
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 failed check
//! or runtime error, 5 I/O error.

mod config;
mod csv;
mod run;

use std::fs;
use std::path::PathBuf;
use std::thread;

use clap::{Parser, Subcommand};

pub use config::{
    parse_config, render_config, BuiltExperiment, CheckSpec, ExperimentConfig, OperatorSpec, SetSpec,
    CHECK_NAMES, DEFAULT_MAX_ITER,
};
pub use csv::{emit_trace_csv, read_trace_csv, render_trace_csv, CsvRow};
pub use run::{execute, run_experiment, RunOutput, RunPaths, RunSummary};

use crate::error::Error;
use crate::iterate::validate_schedule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Built-in demo experiments, by name.
pub const DEMOS: &[(&str, &str)] = &[
    ("km-rotation", include_str!("../../demos/km-rotation.toml")),
    ("km-feasibility", include_str!("../../demos/km-feasibility.toml")),
    ("halpern-projection", include_str!("../../demos/halpern-projection.toml")),
    ("picard-failure", include_str!("../../demos/picard-failure.toml")),
];

pub fn demo_config(name: &str) -> Option<&'static str> {
    DEMOS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => EXIT_PARSE,
            Error::Validation { .. }
            | Error::BadSet(_)
            | Error::BadOperator(_)
            | Error::BadSchedule(_)
            | Error::EmptySchedule
            | Error::InitOutsideDomain
            | Error::AnchorOutsideDomain
            | Error::DimMismatch { .. }
            | Error::NonFinite { .. } => EXIT_VALIDATION,
            Error::Write(_) => EXIT_IO,
            _ => EXIT_CHECK_FAILED,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fixiter", version, about = "Fixed-point iteration experiments with convergence diagnostics")]
pub struct Cli {
    /// Output directory (overrides the config's output_dir).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed override.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of config files run concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Iteration cap override.
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one or more experiment files.
    Run { configs: Vec<PathBuf> },
    /// Parse a config and print the schedule verdict.
    Validate { config: PathBuf },
    /// Run a built-in demo.
    Demo { name: String },
}

/// Command-line entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match &cli.command {
        Command::Run { configs } => {
            if configs.is_empty() {
                eprintln!("error: no config files given");
                return EXIT_PARSE;
            }
            run_files(&cli, configs)
        }
        Command::Validate { config } => validate_file(config),
        Command::Demo { name } => match demo_config(name) {
            Some(text) => report(run_text(&cli, text)),
            None => {
                let names: Vec<&str> = DEMOS.iter().map(|(n, _)| *n).collect();
                eprintln!("error: unknown demo `{name}`; available: {}", names.join(", "));
                EXIT_PARSE
            }
        },
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) {
    if let Some(out) = &cli.out {
        cfg.output_dir = out.to_string_lossy().into_owned();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(max_iter) = cli.max_iter {
        cfg.max_iter = max_iter;
    }
}

fn run_text(cli: &Cli, text: &str) -> Result<(RunSummary, bool), Error> {
    let mut cfg = parse_config(text)?;
    apply_overrides(cli, &mut cfg);
    let summary = run_experiment(&cfg)?;
    Ok((summary, cli.quiet))
}

fn report(result: Result<(RunSummary, bool), Error>) -> i32 {
    match result {
        Ok((summary, quiet)) => {
            if !quiet {
                print!("{}", summary.render());
            }
            if summary.all_passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_file(cli: &Cli, path: &PathBuf) -> i32 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    report(run_text(cli, &text))
}

/// Runs the files on up to `--jobs` threads; the exit code is the largest
/// one any run produced.
fn run_files(cli: &Cli, configs: &[PathBuf]) -> i32 {
    let jobs = cli.jobs.max(1);
    let chunk = configs.len().div_ceil(jobs);
    thread::scope(|scope| {
        let handles: Vec<_> = configs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|p| run_file(cli, p)).max().unwrap_or(EXIT_OK)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or(EXIT_CHECK_FAILED))
            .max()
            .unwrap_or(EXIT_OK)
    })
}

fn validate_file(path: &PathBuf) -> i32 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    let result = parse_config(&text).and_then(|cfg| {
        let built = cfg.build()?;
        let verdict = match &built.schedule {
            Some(s) => Some(validate_schedule(s, cfg.max_iter.max(1))?),
            None => None,
        };
        Ok((cfg, verdict))
    });
    match result {
        Ok((cfg, verdict)) => {
            println!("{}: ok ({}, dim {})", cfg.name, cfg.method.name(), cfg.dim);
            if let Some(v) = verdict {
                println!("  km:      cond1 {:?}, cond2 {:?}", v.km_cond1, v.km_cond2);
                println!(
                    "  halpern: cond1 {:?}, cond2 {:?}, cond3 {:?}, cond4 {:?}",
                    v.h_cond1, v.h_cond2, v.h_cond3, v.h_cond4
                );
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
