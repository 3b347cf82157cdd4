//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use nocollapse::branch::log10_counting_typical_bound;
use nocollapse::measurement::{environment_records, reduce_to_pointer_pair};
use nocollapse::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn premeasurement_fidelity() -> Outcome {
    let c = |x: f64| Complex64::new(x, 0.0);
    let plus = premeasure(&SpinPreparation::new(c(1.0), c(0.0)).map_err(|e| e.to_string())?);
    let minus = premeasure(&SpinPreparation::new(c(0.0), c(1.0)).map_err(|e| e.to_string())?);
    check(plus.amplitudes() == [c(1.0), c(0.0), c(0.0), c(0.0)], || "|+> (x) |M> != |+, M+>".into())?;
    check(minus.amplitudes() == [c(0.0), c(0.0), c(0.0), c(1.0)], || "|-> (x) |M> != |-, M->".into())?;
    let sup = premeasure(&SpinPreparation::new(c(0.6), c(0.8)).map_err(|e| e.to_string())?);
    let want = [0.6, 0.0, 0.0, 0.8];
    let dev = sup
        .amplitudes()
        .iter()
        .zip(want)
        .map(|(a, w)| (a - c(w)).norm())
        .fold(0.0, f64::max);
    check(dev <= 1e-12, || format!("superposition deviation {dev:e}"))?;
    Ok(format!("max deviation {dev:.1e}"))
}

fn no_collapse_unitarity() -> Outcome {
    let mut worst_norm: f64 = 0.0;
    for p in [0.0, 0.1, 0.36, 0.5, 0.9, 1.0] {
        let prep = SpinPreparation::from_probability(p).unwrap().with_phase_shift(0.3, -1.2);
        let joint = premeasure(&prep);
        worst_norm = worst_norm.max((joint.norm_sqr() - 1.0).abs());
        for theta in [0.0, 0.7, FRAC_PI_2, PI] {
            for n_env in [0, 1, 5, 12] {
                let model = PointerModel::new(n_env, theta).unwrap();
                let full = entangle_environment(&joint, &model).map_err(|e| e.to_string())?;
                worst_norm = worst_norm.max((full.norm_sqr() - 1.0).abs());
            }
        }
        let many = premeasure_n(&[prep; 5]).map_err(|e| e.to_string())?;
        worst_norm = worst_norm.max((many.norm_sqr() - 1.0).abs());
    }
    check(worst_norm < 1e-12, || format!("pipeline norm drift {worst_norm:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_loss: f64 = 0.0;
    for case in 0..100 {
        let qubits = 1 + case % 4;
        let h = random_hermitian(&mut rng, 1 << qubits);
        let psi = random_state(&mut rng, qubits);
        let t = 20.0 * (case as f64 / 100.0) - 10.0;
        let back = evolve_reverse(&evolve(&psi, &h, t).unwrap(), &h, t).unwrap();
        worst_loss = worst_loss.max(1.0 - fidelity(&back, &psi).unwrap());
    }
    check(worst_loss <= 1e-10, || format!("reversal fidelity loss {worst_loss:e}"))?;
    Ok(format!("norm drift {worst_norm:.1e}, fidelity loss {worst_loss:.1e}"))
}

fn decoherence_law() -> Outcome {
    let prep = SpinPreparation::from_probability(0.36).unwrap();
    let joint = premeasure(&prep);
    let coherence = (prep.p() * prep.q()).sqrt();
    let (mut worst_overlap, mut worst_off): (f64, f64) = (0.0, 0.0);
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_2] {
        for n_env in 0..=20 {
            let model = PointerModel::new(n_env, theta).unwrap();
            let full = entangle_environment(&joint, &model).map_err(|e| e.to_string())?;
            let (ep, em) = environment_records(&full, n_env).map_err(|e| e.to_string())?;
            let explicit = inner_product(&ep, &em).unwrap().norm();
            let closed = (theta / 2.0).cos().abs().powi(n_env as i32);
            worst_overlap = worst_overlap.max((explicit - closed).abs());
            let rho = reduce_to_pointer_pair(&full).map_err(|e| e.to_string())?;
            worst_off = worst_off.max((rho.off_diagonal().norm() - coherence * closed).abs());
        }
    }
    check(worst_overlap <= 1e-12, || format!("overlap deviation {worst_overlap:e}"))?;
    check(worst_off <= 1e-12, || format!("off-diagonal deviation {worst_off:e}"))?;
    Ok(format!("overlap dev {worst_overlap:.1e}, off-diagonal dev {worst_off:.1e}"))
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=20usize {
        for tenth in 1..=9 {
            let p = tenth as f64 / 10.0;
            let prep = SpinPreparation::from_probability(p).unwrap();
            for eps in [0.05, 0.1, 0.2] {
                let exact = measure_report_exact(&prep, n, eps).map_err(|e| e.to_string())?;
                let analytic = measure_report_analytic(p, n as u64, eps).map_err(|e| e.to_string())?;
                let e1 = rel_err(exact.counting_maverick_fraction, analytic.counting_maverick_fraction);
                let e2 = rel_err(exact.born_maverick_weight, analytic.born_maverick_weight);
                worst = worst.max(e1).max(e2);
                check(e1 <= 1e-10 && e2 <= 1e-10, || {
                    format!("n={n} p={p} eps={eps}: rel errors {e1:e} {e2:e}")
                })?;
            }
        }
    }
    let half = measure_report_exact(&SpinPreparation::from_probability(0.5).unwrap(), 10, 0.2).unwrap();
    check(half.counting_maverick_fraction == 0.109375, || "counting spot value".into())?;
    check((half.born_maverick_weight - 0.109375).abs() < 1e-12, || "born spot value".into())?;
    let skew = measure_report_analytic(0.9, 10, 0.05).unwrap();
    check((skew.born_maverick_weight - 0.612580).abs() < 5e-7, || {
        format!("born spot value {}", skew.born_maverick_weight)
    })?;
    check((skew.counting_maverick_fraction - 0.990234).abs() < 5e-7, || {
        format!("counting spot value {}", skew.counting_maverick_fraction)
    })?;
    Ok(format!("worst relative error {worst:.1e}"))
}

fn everett_limit() -> Outcome {
    let ns = [100, 1_000, 10_000, 100_000, 1_000_000];
    let start = Instant::now();
    let big = measure_report_analytic(0.9, 1_000_000, 0.05).map_err(|e| e.to_string())?;
    let big_time = start.elapsed();
    check(big_time < Duration::from_secs(10), || format!("n = 1e6 took {big_time:?}"))?;
    let scan = everett_limit_scan(0.9, 0.05, &ns).map_err(|e| e.to_string())?;
    check(scan[4] == big, || "scan disagrees with single report".into())?;
    for w in scan.windows(2) {
        check(w[1].log10_born_maverick_weight < w[0].log10_born_maverick_weight, || {
            format!("born weight not decreasing at n = {}", w[1].n)
        })?;
    }
    for r in &scan {
        check(r.log10_born_maverick_weight <= r.log10_hoeffding_bound, || {
            format!("n = {}: born weight above Hoeffding bound", r.n)
        })?;
        let bound = log10_counting_typical_bound(0.9, 0.05, r.n).expect("window excludes 1/2");
        let direct = 2f64.log10() - 2.0 * r.n as f64 * 0.35 * 0.35 * std::f64::consts::LOG10_E;
        check((bound - direct).abs() < 1e-9 * direct.abs(), || "bound formula".into())?;
        check(r.log10_counting_typical_fraction <= bound, || {
            format!("n = {}: counting typical weight above bound", r.n)
        })?;
    }
    Ok(format!(
        "log10 born maverick at 1e6 = {:.1}, n=1e6 in {:.2?}",
        big.log10_born_maverick_weight, big_time
    ))
}

fn half_symmetry() -> Outcome {
    let prep = SpinPreparation::from_probability(0.5).unwrap();
    let mut worst: f64 = 0.0;
    for eps in [0.01, 0.05, 0.1, 0.2, 0.3] {
        for n in 1..=20usize {
            let r = measure_report_exact(&prep, n, eps).unwrap();
            worst = worst.max((r.counting_maverick_fraction - r.born_maverick_weight).abs());
        }
        for n in [1u64, 7, 20, 63, 64, 100, 1_000, 10_000, 100_000] {
            let r = measure_report_analytic(0.5, n, eps).unwrap();
            worst = worst.max((r.counting_maverick_fraction - r.born_maverick_weight).abs());
        }
        let scan = everett_limit_scan(0.5, eps, &[10, 20, 500]).unwrap();
        for r in scan {
            worst = worst.max((r.counting_maverick_fraction - r.born_maverick_weight).abs());
        }
    }
    check(worst <= 1e-12, || format!("asymmetry {worst:e}"))?;
    Ok(format!("max |counting - born| = {worst:.1e}"))
}

fn sampling_consistency() -> Outcome {
    let prep = SpinPreparation::from_probability(0.3).unwrap();
    let run = sample_born(&prep, 10, 1_000_000, 42).map_err(|e| e.to_string())?;
    check((run.plus_frequency - 0.3).abs() <= 6e-4, || {
        format!("plus frequency {}", run.plus_frequency)
    })?;
    let again = sample_born(&prep, 10, 1_000_000, 42).unwrap();
    check(run == again, || "born run not reproducible".into())?;
    let seq = sampling::sample_born_with(&prep, 10, 1_000_000, 42, Execution::Sequential).unwrap();
    check(run == seq, || "born run depends on execution mode".into())?;

    let mut lines = Vec::new();
    for (p, n, trials, eps) in [(0.9, 100u64, 100_000u64, 0.05), (0.3, 10, 1_000_000, 0.05), (0.5, 30, 100_000, 0.1)] {
        let prep = SpinPreparation::from_probability(p).unwrap();
        let crit = MaverickCriterion::new(p, eps).unwrap();
        let born = sample_born(&prep, n, trials, 7).unwrap();
        let counting = sample_counting(n, trials, 8).unwrap();
        check(counting == sample_counting(n, trials, 8).unwrap(), || "counting run not reproducible".into())?;
        let cmp = compare_runs(&born, &counting, &crit).map_err(|e| e.to_string())?;
        for d in [&cmp.born, &cmp.counting] {
            check(d.consistent, || {
                format!(
                    "{} run (p={p}, n={n}): empirical {} vs analytic {} ({}σ)",
                    d.mode, d.empirical_maverick_fraction, d.analytic_maverick_fraction, d.z_score
                )
            })?;
        }
        lines.push(format!("z(p={p})={:.2}/{:.2}", cmp.born.z_score, cmp.counting.z_score));
    }
    Ok(format!("plus freq {:.5}; {}", run.plus_frequency, lines.join(" ")))
}

fn phase_invariance() -> Outcome {
    let mut checked = 0;
    for p in [0.1, 0.36, 0.5, 0.9] {
        let prep = SpinPreparation::from_probability(p).unwrap();
        for phi in [PI / 7.0, 1.0, PI] {
            let shifted = prep.with_phase_shift(phi, 0.0);
            check((shifted.c_plus() - prep.c_plus() * Complex64::from_polar(1.0, phi)).norm() < 1e-15, || {
                "phase shift is not multiplication by e^{i phi}".into()
            })?;
            for n in [1usize, 5, 10, 16] {
                for eps in [0.05, 0.1, 0.2] {
                    let a = measure_report_exact(&prep, n, eps).unwrap();
                    let b = measure_report_exact(&shifted, n, eps).unwrap();
                    check(a == b, || format!("report changed: p={p} phi={phi} n={n} eps={eps}"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} reports identical"))
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "premeasurement fidelity", budget: Duration::from_secs(1), run: premeasurement_fidelity },
        Criterion { name: "no-collapse unitarity", budget: Duration::from_secs(10), run: no_collapse_unitarity },
        Criterion { name: "decoherence law", budget: Duration::from_secs(30), run: decoherence_law },
        Criterion { name: "oracle equivalence", budget: Duration::from_secs(120), run: oracle_equivalence },
        Criterion { name: "everett limit", budget: Duration::from_secs(60), run: everett_limit },
        Criterion { name: "p = 1/2 symmetry", budget: Duration::from_secs(60), run: half_symmetry },
        Criterion { name: "sampling consistency", budget: Duration::from_secs(60), run: sampling_consistency },
        Criterion { name: "phase invariance", budget: Duration::from_secs(60), run: phase_invariance },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= c.budget {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:.2?}, budget {:?}", c.budget))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS  {:<26} {:>9.2?}  {detail}", c.name, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:<26} {:>9.2?}  {why}", c.name, elapsed)
            }
        }
    }
    println!("SKIP  plot rendering               (separate Python helper; not part of this suite)");
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
