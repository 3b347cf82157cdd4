//! Command-line front end: argument parsing, dispatch and output encoding.

mod args;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use nocollapse::branch::{self, MaverickCriterion};
use nocollapse::measurement::{self, premeasure_n_capped};
use nocollapse::{output, sampling, Error};
use serde::Serialize;
use serde_json::{json, Value};

pub use args::{parse_args, UsageError};
pub use config::{AmplitudeSpec, Command, Mode, OutputFormat, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Directory for output files when `--output` is absent.
pub const OUTPUT_DIR_ENV: &str = "NOCOLLAPSE_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}; raise the cap with --max-qubits")]
    Capacity(Error),
    #[error("{0}")]
    Model(Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => RunError::Capacity(e),
            other => RunError::Model(other),
        }
    }
}

#[derive(Serialize)]
struct BranchRow {
    index: u64,
    bits: String,
    plus_count: usize,
    amplitude: [f64; 2],
    born_weight: f64,
    class: branch::Classification,
}

fn envelope(config: &RunConfig, results: Value) -> Result<Vec<u8>, RunError> {
    let mut params = serde_json::to_value(&config.command).map_err(std::io::Error::from)?;
    if let Value::Object(map) = &mut params {
        map.remove("subcommand");
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": config.command.name(),
        "params": params,
        "results": results,
    });
    let mut out = serde_json::to_vec_pretty(&doc).map_err(std::io::Error::from)?;
    out.push(b'\n');
    Ok(out)
}

fn to_json<T: Serialize>(v: &T) -> Result<Value, RunError> {
    Ok(serde_json::to_value(v).map_err(std::io::Error::from)?)
}

/// Runs the analysis and encodes the result in the configured format.
pub fn render(config: &RunConfig) -> Result<Vec<u8>, RunError> {
    let csv = config.format == OutputFormat::Csv;
    let mut buf = Vec::new();
    let json = match &config.command {
        Command::Premeasure { n, amplitudes } => {
            let prep = amplitudes.preparation()?;
            let state = premeasure_n_capped(&vec![prep; *n], config.max_qubits)?;
            if csv {
                output::write_state(&state, &mut buf)?;
                None
            } else {
                Some(json!({ "num_qubits": state.num_qubits(), "state": to_json(&state)? }))
            }
        }
        Command::Decohere { theta, env_max } => {
            let curve = measurement::overlap_curve(*theta, *env_max)?;
            if csv {
                output::write_overlaps(&curve, &mut buf)?;
                None
            } else {
                Some(to_json(&curve)?)
            }
        }
        Command::Branches {
            n,
            amplitudes,
            epsilon,
        } => {
            let prep = amplitudes.preparation()?;
            let crit = MaverickCriterion::new(prep.p(), *epsilon)?;
            let branches = branch::enumerate_branches_capped(&prep, *n, config.max_qubits)?;
            if csv {
                output::write_branches(branches, &crit, &mut buf)?;
                None
            } else {
                let rows: Vec<BranchRow> = branches
                    .map(|b| BranchRow {
                        index: b.outcome_bits,
                        bits: b.to_string(),
                        plus_count: b.plus_count,
                        amplitude: [b.amplitude.re, b.amplitude.im],
                        born_weight: b.born_weight,
                        class: branch::classify(&b, &crit),
                    })
                    .collect();
                Some(to_json(&rows)?)
            }
        }
        Command::Measures {
            n,
            amplitudes,
            epsilon,
            exact,
        } => {
            let prep = amplitudes.preparation()?;
            let report = if *exact {
                let n = usize::try_from(*n).unwrap_or(usize::MAX);
                branch::measure_report_exact_with(&prep, n, *epsilon, config.max_qubits, Default::default())?
            } else {
                branch::measure_report_analytic(prep.p(), *n, *epsilon)?
            };
            if csv {
                output::write_reports(&[report], &mut buf)?;
                None
            } else {
                Some(to_json(&report)?)
            }
        }
        Command::Everett { p, epsilon, n } => {
            let scan = branch::everett_limit_scan(*p, *epsilon, n)?;
            if csv {
                output::write_reports(&scan, &mut buf)?;
                None
            } else {
                Some(to_json(&scan)?)
            }
        }
        Command::Sample {
            mode,
            n,
            trials,
            seed,
            amplitudes,
        } => {
            let prep = amplitudes.preparation()?;
            let run = match mode {
                Mode::Born => sampling::sample_born(&prep, *n, *trials, *seed)?,
                Mode::Counting => sampling::sample_counting(*n, *trials, *seed)?,
            };
            if csv {
                output::write_histogram(&run, prep.p(), &mut buf)?;
                None
            } else {
                Some(to_json(&run)?)
            }
        }
        Command::Compare {
            n,
            trials,
            seed,
            amplitudes,
            epsilon,
        } => {
            let prep = amplitudes.preparation()?;
            let crit = MaverickCriterion::new(prep.p(), *epsilon)?;
            let born = sampling::sample_born(&prep, *n, *trials, *seed)?;
            let counting = sampling::sample_counting(*n, *trials, seed.wrapping_add(1))?;
            let cmp = sampling::compare_runs(&born, &counting, &crit)?;
            if csv {
                output::write_comparison(&cmp, &mut buf)?;
                None
            } else {
                Some(to_json(&cmp)?)
            }
        }
    };
    match json {
        Some(results) => envelope(config, results),
        None => Ok(buf),
    }
}

/// Where output goes: `--output`, else `<env dir>/<subcommand>.<ext>`, else
/// standard output (`None`).
pub fn destination(config: &RunConfig, env_dir: Option<&Path>) -> Option<PathBuf> {
    config.output.clone().or_else(|| {
        env_dir.map(|d| d.join(format!("{}.{}", config.command.name(), config.format.extension())))
    })
}

/// Executes a parsed configuration and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    let result = render(config).and_then(|bytes| {
        match destination(config, env_dir.as_deref()) {
            Some(path) => std::fs::write(&path, bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

/// Parses `argv` and runs it; usage errors print to standard error and exit 2.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => run(&config),
        Err(e) if e.is_help => {
            print!("{}", e.rendered);
            EXIT_OK
        }
        Err(e) => {
            eprint!("{}", e.rendered);
            EXIT_USAGE
        }
    }
}
