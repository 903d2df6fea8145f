//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use freqborn_core::decomp::{decompose_multilevel, Limits};
use freqborn_core::finite_run::outer_frequency_check;
use freqborn_core::region::region_frequency_analysis_with;
use freqborn_core::{
    brute_force_decompose, chebyshev_bound, check_postulate, decompose_two_level,
    finite_run_distribution, frequency_moments, projector_weight, total_mass, window_masses,
    FrequencyDecomposition, GridWavefunction, Region, SingleCopyState,
};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn two_level(p: f64, n: u32) -> FrequencyDecomposition {
    decompose_two_level(&SingleCopyState::two_level(p).unwrap(), n).unwrap()
}

const PROBS: [f64; 4] = [0.1, 0.3, 0.5, 0.9];
const COPIES: [u32; 4] = [10, 1_000, 100_000, 1_000_000];

fn normalization() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for p in PROBS {
        for n in COPIES {
            let dev = (total_mass(&two_level(p, n)) - 1.0).abs();
            ensure(dev <= 1e-10, || {
                format!("|a|^2={p} N={n}: |mass-1| = {dev:e}")
            })?;
            worst = worst.max(dev);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("max |mass-1| = {worst:e}, {elapsed:.2?}"))
}

fn variance_identity() -> Outcome {
    let mut worst = 0.0f64;
    for p in PROBS {
        for n in COPIES {
            let m = frequency_moments(&two_level(p, n), 0).unwrap();
            let predicted = p * (1.0 - p) / f64::from(n);
            let rel = (m.variance - predicted).abs() / predicted;
            ensure(rel <= 1e-10, || {
                format!("|a|^2={p} N={n}: relative error {rel:e}")
            })?;
            worst = worst.max(rel);
        }
    }
    let multilevel: [&[f64]; 4] = [
        &[0.2, 0.3, 0.5],
        &[0.6, 0.3, 0.1],
        &[0.1, 0.2, 0.3, 0.4],
        &[0.25, 0.25, 0.45, 0.05],
    ];
    for probs in multilevel {
        let s = SingleCopyState::from_probabilities(probs).unwrap();
        for n in [1u32, 2, 7, 25, 60, 120, 200] {
            let d = decompose_multilevel(&s, n).unwrap();
            for (level, &p) in probs.iter().enumerate() {
                let m = frequency_moments(&d, level).unwrap();
                let predicted = p * (1.0 - p) / f64::from(n);
                let rel = (m.variance - predicted).abs() / predicted;
                ensure(rel <= 1e-10, || {
                    format!(
                        "M={} N={n} level {level}: relative error {rel:e}",
                        probs.len()
                    )
                })?;
                worst = worst.max(rel);
            }
        }
    }
    Ok(format!("max relative error {worst:e}"))
}

fn max_gap(a: &FrequencyDecomposition, b: &FrequencyDecomposition) -> Result<f64, String> {
    ensure(a.len() == b.len(), || {
        format!("{} vs {} entries", a.len(), b.len())
    })?;
    let mut gap = 0.0f64;
    for ((oa, wa), (ob, wb)) in a.iter().zip(b.iter()) {
        ensure(oa.as_slice() == ob.as_slice(), || {
            "enumeration order differs".into()
        })?;
        gap = gap.max((wa.linear() - wb.linear()).abs());
    }
    Ok(gap)
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for p in [0.0, 0.3, 0.5, 1.0] {
        let s = SingleCopyState::two_level(p).unwrap();
        for n in 1..=12 {
            let g = max_gap(
                &decompose_two_level(&s, n).unwrap(),
                &brute_force_decompose(&s, n).unwrap(),
            )?;
            ensure(g <= 1e-12, || format!("two-level |a|^2={p} N={n}: {g:e}"))?;
            worst = worst.max(g);
        }
    }
    let s3 = SingleCopyState::new_renormalized(vec![
        Complex64::new(0.5, 0.2),
        Complex64::new(0.1, -0.6),
        Complex64::new(-0.4, 0.3),
    ])
    .unwrap();
    let s4 = SingleCopyState::from_probabilities(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    for (s, max_n) in [(&s3, 9u32), (&s4, 7)] {
        for n in 1..=max_n {
            let g = max_gap(
                &decompose_multilevel(s, n).unwrap(),
                &brute_force_decompose(s, n).unwrap(),
            )?;
            ensure(g <= 1e-12, || format!("M={} N={n}: {g:e}", s.levels()))?;
            worst = worst.max(g);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("max per-weight deviation {worst:e}, {elapsed:.2?}"))
}

fn chebyshev_dominance() -> Outcome {
    let mut cells = 0;
    for eps in [0.02, 0.05, 0.1] {
        for p in [0.1, 0.3, 0.5] {
            let mut previous: Option<f64> = None;
            for n in [100u32, 1_000, 10_000, 100_000] {
                let w = window_masses(&two_level(p, n), 0, p, eps).unwrap();
                let bound = p * (1.0 - p) / (eps * eps * f64::from(n));
                ensure(w.outside() <= bound, || {
                    format!(
                        "eps={eps} |a|^2={p} N={n}: outside {:e} > bound {bound:e}",
                        w.outside()
                    )
                })?;
                if let Some(prev) = previous {
                    ensure(w.outside() < prev, || {
                        format!(
                            "eps={eps} |a|^2={p} N={n}: outside {:e} not below {prev:e}",
                            w.outside()
                        )
                    })?;
                }
                previous = Some(w.outside());
                cells += 1;
            }
        }
    }
    Ok(format!(
        "{cells} cells bounded, strictly decreasing along N"
    ))
}

fn concrete_bound() -> Outcome {
    let bound = chebyshev_bound(0.5, 100, 0.1);
    ensure((bound - 0.25).abs() <= 1e-15, || format!("bound {bound}"))?;
    let w = window_masses(&two_level(0.5, 100), 0, 0.5, 0.1).unwrap();
    ensure(w.chebyshev_bound == bound, || {
        "window carries a different bound".into()
    })?;
    // exact: 2 * sum_{k<40} C(100,k) / 2^100
    let mut c = BigUint::one();
    let mut tail = BigUint::zero();
    for k in 0u32..40 {
        tail += &c;
        c = c * (100 - k) / (k + 1);
    }
    let exact = 2.0 * tail.to_f64().unwrap() / 2f64.powi(100);
    ensure((w.outside() - exact).abs() <= 1e-12, || {
        format!("measured {} vs exact {exact}", w.outside())
    })?;
    ensure(w.outside() <= 0.25, || format!("measured {}", w.outside()))?;
    Ok(format!(
        "bound {bound}, measured outside mass {:.12} (exact {exact:.12})",
        w.outside()
    ))
}

fn postulate_checker() -> Outcome {
    let d = two_level(0.3, 100_000);
    let v = check_postulate(&d.marginal_distribution(0).unwrap(), 0.01, 0.03).unwrap();
    let bound = chebyshev_bound(0.3, 100_000, 0.01);
    ensure(v.localized, || "binomial weights not localized".into())?;
    ensure((v.q0 - 0.3).abs() <= 0.01, || format!("q0 = {}", v.q0))?;
    ensure(v.residual_outside <= bound, || {
        format!("residual {:e} > {bound}", v.residual_outside)
    })?;
    let uniform: Vec<(f64, f64)> = (0..100).map(|k| (k as f64 / 99.0, 0.01)).collect();
    let u = check_postulate(&uniform, 0.05, 0.03).unwrap();
    ensure(!u.localized, || {
        "uniform distribution reported localized".into()
    })?;
    Ok(format!(
        "q0 = {}, residual {:e} <= {bound}; uniform residual {:.3}",
        v.q0, v.residual_outside, u.residual_outside
    ))
}

fn region_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for a_sq in [0.25, 0.5] {
        let s = SingleCopyState::two_level(a_sq).unwrap();
        for n in 1..=1000u32 {
            let d = decompose_two_level(&s, n).unwrap();
            for k in 0..=n {
                let gap = (projector_weight(a_sq, n, k).unwrap()
                    - d.two_level_weight(k).unwrap().linear())
                .abs();
                ensure(gap <= 1e-12, || format!("a_sq={a_sq} N={n} n={k}: {gap:e}"))?;
                worst = worst.max(gap);
            }
        }
    }
    let h = 0.01;
    let samples: Vec<Complex64> = (0..1600)
        .map(|k| {
            let x = -8.0 + k as f64 * h;
            Complex64::new((-x * x / 2.0).exp(), 0.0)
        })
        .collect();
    let psi = GridWavefunction::new_renormalized(-8.0, h, samples).unwrap();
    let half_line = Region::new(vec![(0.0, f64::INFINITY)]).unwrap();
    let analysis =
        region_frequency_analysis_with(&psi, &half_line, 10_000, 0.05, &Limits::default()).unwrap();
    ensure((analysis.a_sq - 0.5).abs() <= 10.0 * h, || {
        format!("|a|^2 = {}", analysis.a_sq)
    })?;
    let direct = window_masses(&two_level(analysis.a_sq, 10_000), 0, analysis.a_sq, 0.05).unwrap();
    ensure(direct == analysis.window, || {
        "region window differs from two-level window".into()
    })?;
    Ok(format!(
        "max projector gap {worst:e}; Gaussian half-line |a|^2 = {:.6}",
        analysis.a_sq
    ))
}

fn finite_run_reproduction() -> Outcome {
    let d = finite_run_distribution(&SingleCopyState::two_level(0.3).unwrap(), 100).unwrap();
    // exact argmax of C(100,k) 3^k 7^(100-k)
    let mut best = (0u32, BigUint::zero());
    let mut c = BigUint::one();
    for k in 0..=100u32 {
        let v = &c * BigUint::from(3u32).pow(k) * BigUint::from(7u32).pow(100 - k);
        if v > best.1 {
            best = (k, v);
        }
        c = c * (100 - k) / (k + 1);
    }
    ensure(best.0 == 30, || format!("oracle argmax {}", best.0))?;
    ensure(d.argmax() == 30, || format!("argmax {}", d.argmax()))?;
    let total = freqborn_core::sum::sum(d.masses.iter().copied());
    ensure((total - 1.0).abs() <= 1e-10, || {
        format!("masses sum to {total}")
    })?;
    let w = outer_frequency_check(&d, 10_000, 30, 0.05).unwrap();
    let p = d.masses[30];
    let bound = p * (1.0 - p) / (0.05 * 0.05) / 10_000.0;
    ensure(w.chebyshev_bound == bound, || {
        format!("bound {} vs {bound}", w.chebyshev_bound)
    })?;
    ensure(w.outside() <= bound, || {
        format!("outer outside {:e} > {bound:e}", w.outside())
    })?;
    Ok(format!(
        "argmax 30, masses[30] = {p:.6}, outer outside {:e} <= {bound:.3e}",
        w.outside()
    ))
}

fn run_cli(args: &[&str], dir: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_freqborn"))
        .args(args)
        .current_dir(dir)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || {
        format!("{args:?} exited with {status}")
    })
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut psi = String::from("x,re,im\n");
    for k in 0..200 {
        let x = -4.0 + k as f64 * 0.04;
        psi.push_str(&format!("{x},{},{}\n", (-x * x / 2.0).exp(), 0.1 * x));
    }
    std::fs::write(dir.path().join("psi.csv"), psi).map_err(|e| e.to_string())?;
    let runs: [&[&str]; 8] = [
        &["decompose", "--a2", "0.3", "--n", "1000"],
        &[
            "decompose",
            "--amps",
            "0.6,0.48+0.36i,0.52915026221",
            "--n",
            "20",
            "--format",
            "json",
        ],
        &[
            "scan",
            "--a2",
            "0.3",
            "--ns",
            "100,1000,10000",
            "--eps",
            "0.05",
        ],
        &[
            "bound", "--a2", "0.5", "--n", "100", "--eps", "0.1", "--format", "json",
        ],
        &[
            "cv",
            "--psi",
            "psi.csv",
            "--region",
            "0:inf",
            "--n",
            "5000",
            "--renormalize",
        ],
        &[
            "finite-run",
            "--a2",
            "0.3",
            "--n",
            "100",
            "--observed",
            "12",
            "--outer",
            "10000",
        ],
        &["oracle-check", "--a2", "0.3", "--n", "10"],
        &[
            "oracle-check",
            "--probs",
            "0.2,0.3,0.5",
            "--n",
            "8",
            "--format",
            "json",
        ],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let name = format!("out-{i}-{rep}");
            let mut full: Vec<&str> = args.to_vec();
            full.extend(["--out", &name]);
            run_cli(&full, dir.path())?;
            outputs.push(std::fs::read(dir.path().join(&name)).map_err(|e| e.to_string())?);
        }
        ensure(outputs[0] == outputs[1], || {
            format!("{args:?} produced different bytes")
        })?;
        ensure(!outputs[0].is_empty(), || {
            format!("{args:?} produced nothing")
        })?;
    }
    Ok(format!(
        "{} commands byte-identical across runs",
        runs.len()
    ))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC1", "normalization", normalization),
        ("AC2", "variance identity", variance_identity),
        ("AC3", "oracle equivalence", oracle_equivalence),
        ("AC4", "Chebyshev dominance", chebyshev_dominance),
        ("AC5", "concrete bound check", concrete_bound),
        ("AC6", "postulate checker", postulate_checker),
        ("AC7", "region reduction equivalence", region_equivalence),
        ("AC8", "finite-run reproduction", finite_run_reproduction),
        ("AC9", "CLI determinism", determinism),
    ];
    let mut failures = 0;
    for (id, name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {id} {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {id} {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
