use std::path::PathBuf;

use nocollapse::SpinPreparation;
use serde::{Deserialize, Serialize};

/// How the single-spin amplitudes were given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum AmplitudeSpec {
    Probability {
        p: f64,
    },
    Polar {
        c_plus: f64,
        phase_plus: f64,
        c_minus: f64,
        phase_minus: f64,
    },
    Cartesian {
        c_plus_re: f64,
        c_plus_im: f64,
        c_minus_re: f64,
        c_minus_im: f64,
    },
}

impl AmplitudeSpec {
    pub fn preparation(&self) -> nocollapse::Result<SpinPreparation> {
        match *self {
            AmplitudeSpec::Probability { p } => SpinPreparation::from_probability(p),
            AmplitudeSpec::Polar {
                c_plus,
                phase_plus,
                c_minus,
                phase_minus,
            } => SpinPreparation::from_polar(c_plus, phase_plus, c_minus, phase_minus),
            AmplitudeSpec::Cartesian {
                c_plus_re,
                c_plus_im,
                c_minus_re,
                c_minus_im,
            } => SpinPreparation::new(
                nocollapse::state::Amplitude::new(c_plus_re, c_plus_im),
                nocollapse::state::Amplitude::new(c_minus_re, c_minus_im),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Born,
    Counting,
}

/// Parameters of one subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    Premeasure {
        n: usize,
        amplitudes: AmplitudeSpec,
    },
    Decohere {
        theta: f64,
        env_max: usize,
    },
    Branches {
        n: usize,
        amplitudes: AmplitudeSpec,
        epsilon: f64,
    },
    Measures {
        n: u64,
        amplitudes: AmplitudeSpec,
        epsilon: f64,
        exact: bool,
    },
    Everett {
        p: f64,
        epsilon: f64,
        n: Vec<u64>,
    },
    Sample {
        mode: Mode,
        n: u64,
        trials: u64,
        seed: u64,
        amplitudes: AmplitudeSpec,
    },
    Compare {
        n: u64,
        trials: u64,
        seed: u64,
        amplitudes: AmplitudeSpec,
        epsilon: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Premeasure { .. } => "premeasure",
            Command::Decohere { .. } => "decohere",
            Command::Branches { .. } => "branches",
            Command::Measures { .. } => "measures",
            Command::Everett { .. } => "everett",
            Command::Sample { .. } => "sample",
            Command::Compare { .. } => "compare",
        }
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub max_qubits: usize,
}
