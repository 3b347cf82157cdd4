//! Branch enumeration and the counting/Born measures of the typical and
//! maverick outcome sets.
//!
//! Two routes compute the same [`MeasureReport`]: [`measure_report_exact`]
//! walks every one of the `2^n` branches, [`measure_report_analytic`] sums
//! binomial terms in the log domain and has no size limit.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::binomial::{self, choose_exact};
use crate::error::{Error, Result};
use crate::measurement::SpinPreparation;
use crate::par::{self, CompensatedSum, Execution};
use crate::state::{check_qubits, Amplitude, DEFAULT_MAX_QUBITS};

/// Default maverick threshold.
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Largest `n` for which branch counts are reported as exact integers.
pub const EXACT_COUNT_MAX_N: u64 = 63;

/// One outcome record `m = s_1 ... s_n` with its amplitude `c_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Branch {
    /// Spin 0 is the most significant bit; a set bit is a `-` outcome.
    pub outcome_bits: u64,
    pub n: usize,
    pub amplitude: Amplitude,
    pub born_weight: f64,
    pub plus_count: usize,
}

impl Branch {
    /// Outcome of spin `i`, `true` for `+`.
    pub fn is_plus(&self, i: usize) -> bool {
        (self.outcome_bits >> (self.n - 1 - i)) & 1 == 0
    }

    /// `+`/`-` string, spin 0 first.
    pub fn signs(&self) -> String {
        (0..self.n)
            .map(|i| if self.is_plus(i) { '+' } else { '-' })
            .collect()
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            return Ok(());
        }
        write!(f, "{:0width$b}", self.outcome_bits, width = self.n)
    }
}

#[derive(Debug, Clone, Copy)]
struct SpinFactor {
    amp: [Amplitude; 2],
    weight: [f64; 2],
}

impl From<&SpinPreparation> for SpinFactor {
    fn from(prep: &SpinPreparation) -> Self {
        Self {
            amp: [prep.c_plus(), prep.c_minus()],
            weight: [prep.p(), prep.q()],
        }
    }
}

/// Lazily yields all `2^n` branches in ascending bit-string order.
#[derive(Debug, Clone)]
pub struct Branches {
    factors: Vec<SpinFactor>,
    next: u64,
    end: u64,
}

impl Branches {
    fn branch(&self, index: u64) -> Branch {
        let n = self.factors.len();
        let mut amplitude = Complex64::new(1.0, 0.0);
        let mut born_weight = 1.0;
        for (i, f) in self.factors.iter().enumerate() {
            let bit = ((index >> (n - 1 - i)) & 1) as usize;
            amplitude *= f.amp[bit];
            born_weight *= f.weight[bit];
        }
        Branch {
            outcome_bits: index,
            n,
            amplitude,
            born_weight,
            plus_count: n - index.count_ones() as usize,
        }
    }

    pub fn get(&self, index: u64) -> Option<Branch> {
        (index < (1u64 << self.factors.len())).then(|| self.branch(index))
    }
}

impl Iterator for Branches {
    type Item = Branch;

    fn next(&mut self) -> Option<Branch> {
        if self.next >= self.end {
            return None;
        }
        let b = self.branch(self.next);
        self.next += 1;
        Some(b)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Branches {}

pub fn enumerate_branches(prep: &SpinPreparation, n: usize) -> Result<Branches> {
    enumerate_branches_capped(prep, n, DEFAULT_MAX_QUBITS)
}

/// All branches of `n` identically prepared spins.
pub fn enumerate_branches_capped(prep: &SpinPreparation, n: usize, max_n: usize) -> Result<Branches> {
    enumerate_product_branches(&vec![*prep; n], max_n)
}

/// All branches of independently prepared spins, one preparation per spin.
pub fn enumerate_product_branches(preps: &[SpinPreparation], max_n: usize) -> Result<Branches> {
    let n = preps.len();
    check_qubits("branch enumeration", n, max_n.min(EXACT_COUNT_MAX_N as usize))?;
    Ok(Branches {
        factors: preps.iter().map(SpinFactor::from).collect(),
        next: 0,
        end: 1u64 << n,
    })
}

/// Deviation threshold `epsilon` around the Born frequency `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaverickCriterion {
    epsilon: f64,
    p: f64,
}

impl MaverickCriterion {
    pub fn new(p: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Validation(format!(
                "epsilon = {epsilon} must lie strictly between 0 and 1"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!("p = {p} is outside [0, 1]")));
        }
        Ok(Self { epsilon, p })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn bounds(&self, n: u64) -> (u64, u64) {
        typical_set_bounds(self.p, self.epsilon, n)
    }

    pub fn classify_count(&self, plus_count: u64, n: u64) -> Classification {
        let (lo, hi) = self.bounds(n);
        if lo <= plus_count && plus_count <= hi {
            Classification::Typical
        } else {
            Classification::Maverick
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Typical,
    Maverick,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Typical => "typical",
            Classification::Maverick => "maverick",
        })
    }
}

/// Typical iff `|plus_count / n - p| <= epsilon`, boundary included.
pub fn classify(branch: &Branch, crit: &MaverickCriterion) -> Classification {
    crit.classify_count(branch.plus_count as u64, branch.n as u64)
}

// Products like n * (p - eps) can land one ulp off an integer they equal in
// exact arithmetic; such values are snapped before ceil/floor.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// Integer window `[k_min, k_max]` of `+` counts in the typical set, clamped
/// to `[0, n]`. The window is empty when `k_min > k_max`.
pub fn typical_set_bounds(p: f64, epsilon: f64, n: u64) -> (u64, u64) {
    let nf = n as f64;
    let lo = snap(nf * (p - epsilon)).ceil().clamp(0.0, nf) as u64;
    let hi_raw = snap(nf * (p + epsilon)).floor();
    if hi_raw < 0.0 {
        // Window lies entirely below zero: make it empty.
        return (1, 0);
    }
    (lo, hi_raw.min(nf) as u64)
}

/// Number of branches in a set, exact while it fits a machine word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchCount {
    Exact(u64),
    Log2(f64),
}

impl BranchCount {
    pub fn log2(&self) -> f64 {
        match *self {
            BranchCount::Exact(c) => (c as f64).log2(),
            BranchCount::Log2(l) => l,
        }
    }
}

impl fmt::Display for BranchCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchCount::Exact(c) => write!(f, "{c}"),
            BranchCount::Log2(l) => write!(f, "2^{l}"),
        }
    }
}

/// Counting-measure and Born-measure weight of the maverick set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureReport {
    pub n: u64,
    pub p: f64,
    pub epsilon: f64,
    /// Fraction of the `2^n` branches that are maverick.
    pub counting_maverick_fraction: f64,
    /// Total `|c_m|^2` of the maverick branches.
    pub born_maverick_weight: f64,
    pub log10_born_maverick_weight: f64,
    /// `log10` of the counting-measure weight of the typical set.
    pub log10_counting_typical_fraction: f64,
    pub typical_branch_count: BranchCount,
    /// `2 exp(-2 n epsilon^2)`.
    pub hoeffding_bound: f64,
    pub log10_hoeffding_bound: f64,
}

impl MeasureReport {
    pub fn counting_typical_fraction(&self) -> f64 {
        10f64.powf(self.log10_counting_typical_fraction)
    }

    pub fn born_typical_weight(&self) -> f64 {
        1.0 - self.born_maverick_weight
    }
}

/// `log10(2 exp(-2 n epsilon^2))`.
pub fn log10_hoeffding(n: u64, epsilon: f64) -> f64 {
    std::f64::consts::LOG10_2 - 2.0 * n as f64 * epsilon * epsilon * std::f64::consts::LOG10_E
}

/// Upper bound (as `log10`) on the counting-measure weight of the typical
/// set, `2 exp(-2 n (|p - 1/2| - epsilon)^2)`. `None` when the typical
/// window contains `1/2`.
pub fn log10_counting_typical_bound(p: f64, epsilon: f64, n: u64) -> Option<f64> {
    let gap = (p - 0.5).abs() - epsilon;
    (gap > 0.0).then(|| log10_hoeffding(n, gap))
}

fn finish_report(
    n: u64,
    crit: &MaverickCriterion,
    counting_maverick_fraction: f64,
    log10_counting_typical_fraction: f64,
    born_maverick_weight: f64,
    log10_born_maverick_weight: f64,
    typical_branch_count: BranchCount,
) -> MeasureReport {
    let log10_hoeffding_bound = log10_hoeffding(n, crit.epsilon);
    MeasureReport {
        n,
        p: crit.p,
        epsilon: crit.epsilon,
        counting_maverick_fraction,
        born_maverick_weight,
        log10_born_maverick_weight,
        log10_counting_typical_fraction,
        typical_branch_count,
        hoeffding_bound: 10f64.powf(log10_hoeffding_bound),
        log10_hoeffding_bound,
    }
}

pub fn measure_report_exact(prep: &SpinPreparation, n: usize, epsilon: f64) -> Result<MeasureReport> {
    measure_report_exact_with(prep, n, epsilon, DEFAULT_MAX_QUBITS, Execution::default())
}

/// Brute force over every branch: counts maverick bit-strings and sums their
/// Born weights with compensated summation.
pub fn measure_report_exact_with(
    prep: &SpinPreparation,
    n: usize,
    epsilon: f64,
    max_n: usize,
    exec: Execution,
) -> Result<MeasureReport> {
    let branches = enumerate_branches_capped(prep, n, max_n)?;
    let crit = MaverickCriterion::new(prep.p(), epsilon)?;
    let (lo, hi) = crit.bounds(n as u64);
    let total = 1usize << n;
    let parts = par::map_chunks(total, par::CHUNK, exec, |range| {
        let mut maverick_count = 0u64;
        let mut maverick = CompensatedSum::new();
        let mut typical = CompensatedSum::new();
        for index in range {
            let b = branches.branch(index as u64);
            let k = b.plus_count as u64;
            if lo <= k && k <= hi {
                typical.add(b.born_weight);
            } else {
                maverick_count += 1;
                maverick.add(b.born_weight);
            }
        }
        (maverick_count, maverick, typical)
    });
    let mut maverick_count = 0u64;
    let mut maverick = CompensatedSum::new();
    let mut typical = CompensatedSum::new();
    for (c, m, t) in &parts {
        maverick_count += c;
        maverick.merge(m);
        typical.merge(t);
    }
    let typical_count = total as u64 - maverick_count;
    let born = maverick.value().clamp(0.0, 1.0);
    Ok(finish_report(
        n as u64,
        &crit,
        maverick_count as f64 / total as f64,
        (typical_count as f64).log10() - n as f64 * std::f64::consts::LOG10_2,
        born,
        born.log10(),
        BranchCount::Exact(typical_count),
    ))
}

pub fn measure_report_analytic(p: f64, n: u64, epsilon: f64) -> Result<MeasureReport> {
    measure_report_analytic_with(p, n, epsilon, Execution::default())
}

/// Binomial sums over the `+` count, evaluated with log-gamma and
/// log-sum-exp. Counting-measure terms are summed as exact integers while
/// `n <= 63`.
pub fn measure_report_analytic_with(
    p: f64,
    n: u64,
    epsilon: f64,
    exec: Execution,
) -> Result<MeasureReport> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let crit = MaverickCriterion::new(p, epsilon)?;
    let (lo, hi) = crit.bounds(n);

    let (_, ln_born_maverick) = if p == 0.5 {
        (0.0, f64::NAN)
    } else {
        binomial::ln_window_masses(n, p, lo, hi, exec)
    };
    let born = ln_born_maverick.exp().clamp(0.0, 1.0);
    let log10_born = ln_born_maverick * std::f64::consts::LOG10_E;

    let (counting_maverick, log10_counting_typical, count) = if n <= EXACT_COUNT_MAX_N {
        let typical: u128 = (lo..=hi)
            .map(|k| choose_exact(n as u32, k as u32) as u128)
            .sum();
        let total = 1u128 << n;
        let fraction = (total - typical) as f64 / total as f64;
        let log10_typical = (typical as f64).log10() - n as f64 * std::f64::consts::LOG10_2;
        (fraction, log10_typical, BranchCount::Exact(typical as u64))
    } else {
        let (ln_in, ln_out) = binomial::ln_window_masses(n, 0.5, lo, hi, exec);
        let log2_count = n as f64 + ln_in * std::f64::consts::LOG2_E;
        (
            ln_out.exp().clamp(0.0, 1.0),
            ln_in * std::f64::consts::LOG10_E,
            BranchCount::Log2(log2_count),
        )
    };

    // At p = 1/2 every branch weighs 2^-n, so the two measures are one sum.
    let (born, log10_born) = if p == 0.5 {
        let log10_counting_maverick = if n <= EXACT_COUNT_MAX_N {
            counting_maverick.log10()
        } else {
            binomial::ln_window_masses(n, 0.5, lo, hi, exec).1 * std::f64::consts::LOG10_E
        };
        (counting_maverick, log10_counting_maverick)
    } else {
        (born, log10_born)
    };

    Ok(finish_report(
        n,
        &crit,
        counting_maverick,
        log10_counting_typical,
        born,
        log10_born,
        count,
    ))
}

pub fn everett_limit_scan(p: f64, epsilon: f64, n_values: &[u64]) -> Result<Vec<MeasureReport>> {
    everett_limit_scan_with(p, epsilon, n_values, Execution::default())
}

/// Analytic reports for an ascending list of spin counts.
pub fn everett_limit_scan_with(
    p: f64,
    epsilon: f64,
    n_values: &[u64],
    exec: Execution,
) -> Result<Vec<MeasureReport>> {
    if n_values.is_empty() {
        return Err(Error::Validation("n list is empty".into()));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("n list must be strictly ascending".into()));
    }
    n_values
        .iter()
        .map(|&n| measure_report_analytic_with(p, n, epsilon, exec))
        .collect()
}
