//! Log-domain binomial arithmetic.

use statrs::function::gamma::ln_gamma;

use crate::par::{self, Execution};

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    let nf = n as f64;
    let kf = k as f64;
    ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
}

/// `C(n, k)` for `n <= 63`, computed exactly.
pub fn choose_exact(n: u32, k: u32) -> u64 {
    assert!(n <= 63, "exact binomials are limited to n <= 63");
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as u64
}

/// `ln P[K = k]` for `K ~ Binomial(n, p)`. Handles `p` in `{0, 1}`.
pub fn ln_binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let kf = k as f64;
    let rest = (n - k) as f64;
    ln_choose(n, k) + kf * p.ln() + rest * (-p).ln_1p()
}

/// Streaming log-sum-exp: holds `ln(sum exp(x_i))` as `max + ln(scaled)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn merge(&mut self, other: &LogSum) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max <= self.max {
            self.scaled += other.scaled * (other.max - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - other.max).exp() + other.scaled;
            self.max = other.max;
        }
    }

    /// `ln` of the accumulated sum; `-inf` when empty.
    pub fn ln(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

impl FromIterator<f64> for LogSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `ln(exp(a) + exp(b))`.
pub fn ln_add(a: f64, b: f64) -> f64 {
    let mut s = LogSum::new();
    s.add(a);
    s.add(b);
    s.ln()
}

/// Log-masses of `Binomial(n, p)` inside and outside `[k_min, k_max]`,
/// normalized so that they sum to one in linear space.
///
/// Returns `(ln_inside, ln_outside)`.
pub fn ln_window_masses(n: u64, p: f64, k_min: u64, k_max: u64, exec: Execution) -> (f64, f64) {
    let len = usize::try_from(n + 1).expect("n fits in usize");
    let parts = par::map_chunks(len, par::CHUNK, exec, |range| {
        let mut inside = LogSum::new();
        let mut outside = LogSum::new();
        for k in range {
            let k = k as u64;
            let t = ln_binomial_pmf(n, k, p);
            if k_min <= k && k <= k_max {
                inside.add(t);
            } else {
                outside.add(t);
            }
        }
        (inside, outside)
    });
    let mut inside = LogSum::new();
    let mut outside = LogSum::new();
    for (i, o) in &parts {
        inside.merge(i);
        outside.merge(o);
    }
    let (li, lo) = (inside.ln(), outside.ln());
    let total = ln_add(li, lo);
    (li - total, lo - total)
}
