//! Collapse-style sampling baselines.
//!
//! `born` mode draws each spin outcome with probability `p`, as a projective
//! measurement would. `counting` mode draws an observer uniformly from the
//! `2^n` branches, which ignores amplitudes entirely.
//!
//! Random streams: trial `t` under seed `s` uses ChaCha8 keyed by
//! `ChaCha8Rng::seed_from_u64(s)` with stream id `t` and word position 0.
//! Born draws take one `f64` per spin (53 high bits of a `u64`) and record
//! `+` when it is below `p`. Counting draws take `ceil(n / 64)` `u64` words
//! and use the low `n` bits. Runs are therefore identical on every platform
//! and for any thread count.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::branch::{self, Classification, MaverickCriterion, MeasureReport};
use crate::error::{Error, Result};
use crate::measurement::SpinPreparation;
use crate::par::{self, Execution};

/// Trials per work unit.
const TRIAL_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Born,
    Counting,
}

impl std::fmt::Display for SampleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SampleMode::Born => "born",
            SampleMode::Counting => "counting",
        })
    }
}

fn histogram_pairs<S: Serializer>(h: &BTreeMap<u64, u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(h.len()))?;
    for (k, c) in h {
        seq.serialize_element(&[k, c])?;
    }
    seq.end()
}

/// Outcome of `trials` repetitions of an `n`-spin experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRun {
    pub mode: SampleMode,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub plus_frequency: f64,
    /// `+` count to number of trials; zero bins are omitted.
    #[serde(serialize_with = "histogram_pairs")]
    pub histogram: BTreeMap<u64, u64>,
}

impl SampleRun {
    /// Counts per `+` count for `k = 0..=n`, including empty bins.
    pub fn dense_histogram(&self) -> Vec<u64> {
        let mut out = vec![0; self.n as usize + 1];
        for (&k, &c) in &self.histogram {
            out[k as usize] = c;
        }
        out
    }

    /// Fraction of trials whose outcome the criterion marks maverick.
    pub fn maverick_fraction(&self, crit: &MaverickCriterion) -> f64 {
        let maverick: u64 = self
            .histogram
            .iter()
            .filter(|&(&k, _)| crit.classify_count(k, self.n) == Classification::Maverick)
            .map(|(_, &c)| c)
            .sum();
        maverick as f64 / self.trials as f64
    }
}

fn trial_rng(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng.set_word_pos(0);
    rng
}

fn run<F>(mode: SampleMode, n: u64, trials: u64, seed: u64, exec: Execution, draw: F) -> Result<SampleRun>
where
    F: Fn(&mut ChaCha8Rng) -> u64 + Sync + Send,
{
    if trials == 0 {
        return Err(Error::Validation("trials must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let len = usize::try_from(trials).map_err(|_| Error::Validation("too many trials".into()))?;
    let parts = par::map_chunks(len, TRIAL_CHUNK, exec, |range| {
        let mut local: BTreeMap<u64, u64> = BTreeMap::new();
        for t in range {
            let mut rng = trial_rng(&base, t as u64);
            *local.entry(draw(&mut rng)).or_default() += 1;
        }
        local
    });
    let mut histogram = BTreeMap::new();
    for part in parts {
        for (k, c) in part {
            *histogram.entry(k).or_default() += c;
        }
    }
    let plus_total: u128 = histogram
        .iter()
        .map(|(&k, &c)| k as u128 * c as u128)
        .sum();
    let plus_frequency = (plus_total as f64 / (n as f64 * trials as f64)).clamp(0.0, 1.0);
    Ok(SampleRun {
        mode,
        n,
        trials,
        seed,
        plus_frequency,
        histogram,
    })
}

pub fn sample_born(prep: &SpinPreparation, n: u64, trials: u64, seed: u64) -> Result<SampleRun> {
    sample_born_with(prep, n, trials, seed, Execution::default())
}

/// Independent `+` outcomes with probability `|c+|^2` per spin.
pub fn sample_born_with(
    prep: &SpinPreparation,
    n: u64,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<SampleRun> {
    let p = prep.p();
    run(SampleMode::Born, n, trials, seed, exec, |rng| {
        (0..n).filter(|_| rng.random::<f64>() < p).count() as u64
    })
}

pub fn sample_counting(n: u64, trials: u64, seed: u64) -> Result<SampleRun> {
    sample_counting_with(n, trials, seed, Execution::default())
}

/// Uniform choice among the `2^n` branches; a zero bit is a `+` outcome.
pub fn sample_counting_with(n: u64, trials: u64, seed: u64, exec: Execution) -> Result<SampleRun> {
    run(SampleMode::Counting, n, trials, seed, exec, |rng| {
        let mut ones = 0u64;
        let mut left = n;
        while left > 0 {
            let take = left.min(64);
            let word = rng.next_u64();
            let word = if take == 64 { word } else { word & ((1u64 << take) - 1) };
            ones += word.count_ones() as u64;
            left -= take;
        }
        n - ones
    })
}

/// Empirical maverick fraction of one run against its analytic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunDivergence {
    pub mode: SampleMode,
    pub trials: u64,
    pub empirical_maverick_fraction: f64,
    pub analytic_maverick_fraction: f64,
    /// `sqrt(q (1 - q) / trials)` at the analytic fraction `q`.
    pub standard_error: f64,
    /// Deviation in standard errors; `0` when both the deviation and the error vanish.
    pub z_score: f64,
    /// Deviation within four standard errors.
    pub consistent: bool,
}

impl RunDivergence {
    fn new(run: &SampleRun, crit: &MaverickCriterion, analytic: f64) -> Self {
        let empirical = run.maverick_fraction(crit);
        let standard_error = (analytic * (1.0 - analytic) / run.trials as f64).sqrt();
        let dev = (empirical - analytic).abs();
        let z_score = if dev == 0.0 {
            0.0
        } else {
            dev / standard_error
        };
        Self {
            mode: run.mode,
            trials: run.trials,
            empirical_maverick_fraction: empirical,
            analytic_maverick_fraction: analytic,
            standard_error,
            z_score,
            consistent: dev <= 4.0 * standard_error,
        }
    }
}

/// Side-by-side maverick statistics of a Born run and a counting run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunComparison {
    pub n: u64,
    pub p: f64,
    pub epsilon: f64,
    pub born: RunDivergence,
    pub counting: RunDivergence,
    pub analytic: MeasureReport,
}

pub fn compare_runs(born: &SampleRun, counting: &SampleRun, crit: &MaverickCriterion) -> Result<RunComparison> {
    if born.mode != SampleMode::Born || counting.mode != SampleMode::Counting {
        return Err(Error::Validation(
            "compare_runs expects a born run and a counting run".into(),
        ));
    }
    if born.n != counting.n {
        return Err(Error::Validation(format!(
            "runs cover different spin counts: {} vs {}",
            born.n, counting.n
        )));
    }
    let analytic = branch::measure_report_analytic(crit.p(), born.n, crit.epsilon())?;
    Ok(RunComparison {
        n: born.n,
        p: crit.p(),
        epsilon: crit.epsilon(),
        born: RunDivergence::new(born, crit, analytic.born_maverick_weight),
        counting: RunDivergence::new(counting, crit, analytic.counting_maverick_fraction),
        analytic,
    })
}
