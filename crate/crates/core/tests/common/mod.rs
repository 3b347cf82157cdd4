#![allow(dead_code)]

use nalgebra::DMatrix;
use nocollapse::{HermitianOperator, StateVector};
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;

pub fn random_state<R: Rng>(rng: &mut R, num_qubits: usize) -> StateVector {
    let raw: Vec<C> = (0..1usize << num_qubits)
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::new(raw.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// `(A + A^dag) / 2` for a random complex `A`; exactly Hermitian.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> HermitianOperator {
    let a: Vec<Vec<C>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let m = DMatrix::from_fn(dim, dim, |i, j| (a[i][j] + a[j][i].conj()) * 0.5);
    HermitianOperator::new(m).unwrap()
}

type Mat = Vec<Vec<C>>;

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `exp(-i H t)` by scaling and squaring a truncated Taylor series. Shares no
/// code with the eigendecomposition route.
pub fn taylor_propagator(h: &HermitianOperator, t: f64) -> Mat {
    let n = h.dim();
    let a: Mat = (0..n)
        .map(|i| (0..n).map(|j| h.matrix()[(i, j)] * C::new(0.0, -t)).collect())
        .collect();
    let norm: f64 = a
        .iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    while norm / f64::powi(2.0, squarings) > 0.25 {
        squarings += 1;
    }
    let scale = f64::powi(2.0, squarings).recip();
    let scaled: Mat = a
        .iter()
        .map(|row| row.iter().map(|z| z * scale).collect())
        .collect();
    let identity: Mat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).collect())
        .collect();
    let mut sum = identity.clone();
    let mut term = identity;
    for k in 1..=30 {
        term = matmul(&term, &scaled);
        for row in term.iter_mut() {
            for z in row.iter_mut() {
                *z /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

pub fn mat_vec(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Brute-force maverick statistics over every bit-string, independent of the
/// library's enumeration and binomial code.
pub struct BruteForce {
    pub maverick_count: u64,
    pub born_maverick: f64,
}

pub fn brute_force(p: f64, n: u32, epsilon: f64) -> BruteForce {
    let mut maverick_count = 0;
    let mut born_maverick = 0.0;
    let mut carry = 0.0;
    for m in 0u64..(1u64 << n) {
        let minus = m.count_ones() as i32;
        let plus = n as i32 - minus;
        let freq = plus as f64 / n as f64;
        if (freq - p).abs() > epsilon + 1e-12 {
            maverick_count += 1;
            // Kahan
            let w = p.powi(plus) * (1.0 - p).powi(minus) - carry;
            let t = born_maverick + w;
            carry = (t - born_maverick) - w;
            born_maverick = t;
        }
    }
    BruteForce {
        maverick_count,
        born_maverick,
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
