//! Chunked execution helpers shared by every data-parallel loop in the crate.
//!
//! Work over an index range is always cut into the same fixed-size chunks and
//! the per-chunk results are returned in chunk order, so a parallel run and a
//! sequential run perform identical floating-point operations and produce
//! bit-identical output. Without the `parallel` feature every request runs
//! sequentially.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used for index-space partitions.
pub const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Splits `0..len` into `chunk`-sized ranges.
pub fn chunks(len: usize, chunk: usize) -> Vec<Range<usize>> {
    assert!(chunk > 0);
    (0..len.div_ceil(chunk))
        .map(|c| c * chunk..((c + 1) * chunk).min(len))
        .collect()
}

/// Maps `f` over the chunks of `0..len`, returning results in chunk order.
pub fn map_chunks<T, F>(len: usize, chunk: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let ranges = chunks(len, chunk);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return ranges.into_par_iter().map(f).collect();
    }
    let _ = exec;
    ranges.into_iter().map(f).collect()
}

/// Fills `out[i] = f(i)`.
pub fn fill_indexed<T, F>(out: &mut [T], exec: Execution, f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, slot)| {
            let base = c * CHUNK;
            for (j, v) in slot.iter_mut().enumerate() {
                *v = f(base + j);
            }
        });
        return;
    }
    let _ = exec;
    for (i, v) in out.iter_mut().enumerate() {
        *v = f(i);
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range() {
        let r = chunks(10, 4);
        assert_eq!(r, vec![0..4, 4..8, 8..10]);
        assert!(chunks(0, 4).is_empty());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        acc.add(-1.0);
        assert!((acc.value() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let f = |r: Range<usize>| r.map(|i| (i as f64).sqrt()).collect::<CompensatedSum>();
        let a = map_chunks(100_000, 1000, Execution::Parallel, f);
        let b = map_chunks(100_000, 1000, Execution::Sequential, f);
        assert_eq!(a, b);
    }
}
