use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nocollapse::branch::DEFAULT_EPSILON;
use nocollapse::state::DEFAULT_MAX_QUBITS;

use crate::config::{AmplitudeSpec, Command, Mode, OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "nocollapse", version, about = "Unitary measurement and branch-measure analysis")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json, global = true)]
    format: FormatArg,
    /// Output file (default: standard output, or $NOCOLLAPSE_OUTPUT_DIR/<subcommand>.<ext>).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Cap on dense registers and brute-force enumeration, in qubits.
    #[arg(long, default_value_t = DEFAULT_MAX_QUBITS, global = true)]
    max_qubits: usize,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Born,
    Counting,
}

/// Spin amplitudes: `--p`, or magnitudes with optional phases, or re/im pairs.
#[derive(Debug, Args)]
struct AmplitudeArgs {
    /// Born frequency |c+|^2; amplitudes become (sqrt p, sqrt(1-p)).
    #[arg(long)]
    p: Option<f64>,
    /// Magnitude of c+.
    #[arg(long)]
    c_plus: Option<f64>,
    /// Magnitude of c-.
    #[arg(long)]
    c_minus: Option<f64>,
    /// Phase of c+ in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase_plus: f64,
    /// Phase of c- in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phase_minus: f64,
    #[arg(long, allow_hyphen_values = true)]
    c_plus_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c_plus_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c_minus_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c_minus_im: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Spin(s) entangled with apparatus/observer records.
    Premeasure {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        amps: AmplitudeArgs,
    },
    /// Environment overlap |<E+|E->| against environment size.
    Decohere {
        #[arg(long, default_value_t = FRAC_PI_2)]
        theta: f64,
        #[arg(long, default_value_t = 20)]
        env_max: usize,
    },
    /// Every outcome branch with amplitude, weight and class.
    Branches {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        amps: AmplitudeArgs,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Counting and Born weight of the maverick set.
    Measures {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        amps: AmplitudeArgs,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Enumerate all branches instead of summing binomial terms.
        #[arg(long)]
        exact: bool,
    },
    /// Maverick weights over a list of spin counts.
    Everett {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Comma-separated ascending spin counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
    },
    /// Seeded sampling of outcomes.
    Sample {
        #[arg(long, value_enum, default_value_t = ModeArg::Born)]
        mode: ModeArg,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        amps: AmplitudeArgs,
    },
    /// Born run vs counting run against the analytic weights.
    Compare {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        amps: AmplitudeArgs,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
}

/// A rejected command line. `rendered` is the full message for the error
/// stream; `is_help` marks `--help`/`--version`, which exit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError {
    pub rendered: String,
    pub is_help: bool,
}

impl UsageError {
    fn invalid(flag: &str, msg: impl std::fmt::Display) -> Self {
        Self {
            rendered: format!("error: invalid value for '--{flag}': {msg}\n"),
            is_help: false,
        }
    }
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.rendered)
    }
}

impl std::error::Error for UsageError {}

impl AmplitudeArgs {
    fn spec(&self) -> Result<AmplitudeSpec, UsageError> {
        let cartesian = [self.c_plus_re, self.c_plus_im, self.c_minus_re, self.c_minus_im];
        let any_cartesian = cartesian.iter().any(Option::is_some);
        let any_polar = self.c_plus.is_some() || self.c_minus.is_some();
        let forms = [self.p.is_some(), any_polar, any_cartesian]
            .iter()
            .filter(|&&x| x)
            .count();
        if forms > 1 {
            return Err(UsageError::invalid(
                "p",
                "give amplitudes as --p, as --c-plus/--c-minus, or as re/im pairs, not a mix",
            ));
        }
        let spec = if let Some(p) = self.p {
            if !(0.0..=1.0).contains(&p) {
                return Err(UsageError::invalid("p", format!("{p} is outside [0, 1]")));
            }
            AmplitudeSpec::Probability { p }
        } else if any_cartesian {
            let [a, b, c, d] = cartesian.map(|x| x.unwrap_or(0.0));
            AmplitudeSpec::Cartesian {
                c_plus_re: a,
                c_plus_im: b,
                c_minus_re: c,
                c_minus_im: d,
            }
        } else if any_polar {
            let fill = |x: f64| (1.0 - x * x).max(0.0).sqrt();
            let (c_plus, c_minus) = match (self.c_plus, self.c_minus) {
                (Some(a), Some(b)) => (a, b),
                (Some(a), None) => (a, fill(a)),
                (None, Some(b)) => (fill(b), b),
                (None, None) => unreachable!(),
            };
            AmplitudeSpec::Polar {
                c_plus,
                phase_plus: self.phase_plus,
                c_minus,
                phase_minus: self.phase_minus,
            }
        } else {
            AmplitudeSpec::Polar {
                c_plus: std::f64::consts::FRAC_1_SQRT_2,
                phase_plus: self.phase_plus,
                c_minus: std::f64::consts::FRAC_1_SQRT_2,
                phase_minus: self.phase_minus,
            }
        };
        spec.preparation()
            .map_err(|e| UsageError::invalid(if any_cartesian { "c-plus-re" } else { "c-plus" }, e))?;
        Ok(spec)
    }
}

fn check_epsilon(epsilon: f64) -> Result<f64, UsageError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(epsilon)
    } else {
        Err(UsageError::invalid("epsilon", format!("{epsilon} must lie strictly between 0 and 1")))
    }
}

fn check_positive(flag: &str, v: u64) -> Result<u64, UsageError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(UsageError::invalid(flag, "must be at least 1"))
    }
}

/// Parses a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| UsageError {
        rendered: e.render().to_string(),
        is_help: matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
        ),
    })?;
    let command = match cli.command {
        Sub::Premeasure { n, amps } => Command::Premeasure {
            n: check_positive("n", n as u64)? as usize,
            amplitudes: amps.spec()?,
        },
        Sub::Decohere { theta, env_max } => {
            if !(0.0..=std::f64::consts::PI).contains(&theta) {
                return Err(UsageError::invalid("theta", format!("{theta} is outside [0, pi]")));
            }
            Command::Decohere { theta, env_max }
        }
        Sub::Branches { n, amps, epsilon } => Command::Branches {
            n: check_positive("n", n as u64)? as usize,
            amplitudes: amps.spec()?,
            epsilon: check_epsilon(epsilon)?,
        },
        Sub::Measures {
            n,
            amps,
            epsilon,
            exact,
        } => Command::Measures {
            n: check_positive("n", n)?,
            amplitudes: amps.spec()?,
            epsilon: check_epsilon(epsilon)?,
            exact,
        },
        Sub::Everett { p, epsilon, n } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(UsageError::invalid("p", format!("{p} is outside [0, 1]")));
            }
            if n.contains(&0) || n.windows(2).any(|w| w[0] >= w[1]) {
                return Err(UsageError::invalid("n", "expected strictly ascending counts >= 1"));
            }
            Command::Everett {
                p,
                epsilon: check_epsilon(epsilon)?,
                n,
            }
        }
        Sub::Sample {
            mode,
            n,
            trials,
            seed,
            amps,
        } => Command::Sample {
            mode: match mode {
                ModeArg::Born => Mode::Born,
                ModeArg::Counting => Mode::Counting,
            },
            n: check_positive("n", n)?,
            trials: check_positive("trials", trials)?,
            seed,
            amplitudes: amps.spec()?,
        },
        Sub::Compare {
            n,
            trials,
            seed,
            amps,
            epsilon,
        } => Command::Compare {
            n: check_positive("n", n)?,
            trials: check_positive("trials", trials)?,
            seed,
            amplitudes: amps.spec()?,
            epsilon: check_epsilon(epsilon)?,
        },
    };
    Ok(RunConfig {
        command,
        format: match cli.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        },
        output: cli.output,
        max_qubits: cli.max_qubits,
    })
}
