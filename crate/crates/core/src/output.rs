//! CSV layouts. Floats are written with 17 significant digits so every value
//! reads back to the same `f64`.

use std::io::{self, Write};

use crate::branch::{Branch, MaverickCriterion, MeasureReport};
use crate::measurement::OverlapPoint;
use crate::sampling::{RunComparison, RunDivergence, SampleMode, SampleRun};
use crate::state::StateVector;

pub const REPORT_HEADER: [&str; 7] = [
    "n",
    "p",
    "epsilon",
    "counting_maverick_fraction",
    "born_maverick_weight",
    "log10_born_maverick_weight",
    "hoeffding_bound",
];

pub const OVERLAP_HEADER: [&str; 3] = ["n_env", "overlap", "log10_overlap"];

pub const HISTOGRAM_HEADER: [&str; 7] = ["mode", "n", "p", "trials", "seed", "k", "count"];

pub const BRANCH_HEADER: [&str; 7] = [
    "index",
    "bits",
    "plus_count",
    "amplitude_re",
    "amplitude_im",
    "born_weight",
    "class",
];

pub const STATE_HEADER: [&str; 5] = ["index", "bits", "re", "im", "probability"];

pub const COMPARISON_HEADER: [&str; 7] = [
    "mode",
    "trials",
    "empirical_maverick_fraction",
    "analytic_maverick_fraction",
    "standard_error",
    "z_score",
    "consistent",
];

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W, header: &[&str]) -> io::Result<csv::Writer<W>> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

pub fn write_reports<W: Write>(reports: &[MeasureReport], w: W) -> io::Result<()> {
    let mut out = writer(w, &REPORT_HEADER)?;
    for r in reports {
        out.write_record([
            r.n.to_string(),
            format_float(r.p),
            format_float(r.epsilon),
            format_float(r.counting_maverick_fraction),
            format_float(r.born_maverick_weight),
            format_float(r.log10_born_maverick_weight),
            format_float(r.hoeffding_bound),
        ])?;
    }
    out.flush()
}

pub fn write_overlaps<W: Write>(points: &[OverlapPoint], w: W) -> io::Result<()> {
    let mut out = writer(w, &OVERLAP_HEADER)?;
    for pt in points {
        out.write_record([
            pt.n_env.to_string(),
            format_float(pt.overlap),
            format_float(pt.log10_overlap),
        ])?;
    }
    out.flush()
}

/// One row per `+` count `k = 0..=n`. `p` is the per-spin `+` probability
/// the run was drawn with (`0.5` for counting runs).
pub fn write_histogram<W: Write>(run: &SampleRun, p: f64, w: W) -> io::Result<()> {
    let mut out = writer(w, &HISTOGRAM_HEADER)?;
    let p = match run.mode {
        SampleMode::Born => p,
        SampleMode::Counting => 0.5,
    };
    for (k, count) in run.dense_histogram().into_iter().enumerate() {
        out.write_record([
            run.mode.to_string(),
            run.n.to_string(),
            format_float(p),
            run.trials.to_string(),
            run.seed.to_string(),
            k.to_string(),
            count.to_string(),
        ])?;
    }
    out.flush()
}

pub fn write_branches<W, I>(branches: I, crit: &MaverickCriterion, w: W) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = Branch>,
{
    let mut out = writer(w, &BRANCH_HEADER)?;
    for b in branches {
        out.write_record([
            b.outcome_bits.to_string(),
            b.to_string(),
            b.plus_count.to_string(),
            format_float(b.amplitude.re),
            format_float(b.amplitude.im),
            format_float(b.born_weight),
            crate::branch::classify(&b, crit).to_string(),
        ])?;
    }
    out.flush()
}

pub fn write_state<W: Write>(state: &StateVector, w: W) -> io::Result<()> {
    let mut out = writer(w, &STATE_HEADER)?;
    let n = state.num_qubits();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let bits = if n == 0 {
            String::new()
        } else {
            format!("{i:0n$b}")
        };
        out.write_record([
            i.to_string(),
            bits,
            format_float(a.re),
            format_float(a.im),
            format_float(a.norm_sqr()),
        ])?;
    }
    out.flush()
}

pub fn write_comparison<W: Write>(cmp: &RunComparison, w: W) -> io::Result<()> {
    let mut out = writer(w, &COMPARISON_HEADER)?;
    let row = |d: &RunDivergence| {
        [
            d.mode.to_string(),
            d.trials.to_string(),
            format_float(d.empirical_maverick_fraction),
            format_float(d.analytic_maverick_fraction),
            format_float(d.standard_error),
            format_float(d.z_score),
            d.consistent.to_string(),
        ]
    };
    out.write_record(row(&cmp.born))?;
    out.write_record(row(&cmp.counting))?;
    out.flush()
}
