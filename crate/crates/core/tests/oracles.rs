//! Closed-form routes checked against independent oracles: exact big-integer
//! combinatorics and direct expansion of outcome sequences.

use freqborn_core::decomp::{decompose_multilevel_with, Limits};
use freqborn_core::{
    brute_force_decompose, decompose_multilevel, decompose_two_level, log_binomial, log_factorial,
    log_multinomial, total_mass, FrequencyDecomposition, SingleCopyState,
};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

fn big_factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

#[test]
fn log_factorial_against_big_integers() {
    let mut fact = BigUint::one();
    for n in 1..=3000u64 {
        fact *= n;
        if n <= 200 || n % 97 == 0 {
            let exact = big_ln(&fact);
            assert!(
                rel_err(log_factorial(n).unwrap(), exact) <= 1e-12,
                "n = {n}"
            );
        }
    }
}

#[test]
fn log_factorial_at_scale() {
    // ln Gamma(n + 1) evaluated at 40 significant digits
    let frozen = [
        (21u64, 45.38013889847691),
        (100, 363.73937555556347),
        (12345, 103962.95347844968),
        (1_000_000, 12815518.384658169),
        (10_000_000, 151180965.48756957),
        (100_000_000, 1742068084.5245154),
    ];
    for (n, v) in frozen {
        assert!(rel_err(log_factorial(n).unwrap(), v) <= 1e-12, "n = {n}");
    }
}

#[test]
fn log_binomial_hundred_choose_fifty() {
    let exact = big_factorial(100) / (big_factorial(50) * big_factorial(50));
    assert!(rel_err(log_binomial(100, 50).unwrap(), big_ln(&exact)) <= 1e-12);
}

#[test]
fn pascal_recurrence() {
    for n in 1..=60u64 {
        for k in 1..n {
            let c = log_binomial(n, k).unwrap().exp();
            let a = log_binomial(n - 1, k - 1).unwrap().exp();
            let b = log_binomial(n - 1, k).unwrap().exp();
            assert!((c - a - b).abs() <= 1e-9 * c, "C({n},{k})");
        }
    }
}

fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn log_multinomial_against_big_integers() {
    for total in 0..=30u64 {
        for parts in 1..=4 {
            for c in compositions(total, parts) {
                let denom = c
                    .iter()
                    .fold(BigUint::one(), |acc, &k| acc * big_factorial(k));
                let exact = big_ln(&(big_factorial(total) / denom));
                let got = log_multinomial(&c).unwrap();
                assert!((got - exact).abs() <= 1e-12 * exact.max(1.0), "{c:?}");
            }
        }
    }
}

fn max_weight_gap(a: &FrequencyDecomposition, b: &FrequencyDecomposition) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|((oa, wa), (ob, wb))| {
            assert_eq!(oa.as_slice(), ob.as_slice());
            (wa.linear() - wb.linear()).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn two_level_matches_sequence_expansion() {
    for &p in &[0.0, 0.3, 0.5, 1.0, 0.123] {
        let s = SingleCopyState::two_level(p).unwrap();
        for n in 1..=12 {
            let closed = decompose_two_level(&s, n).unwrap();
            let oracle = brute_force_decompose(&s, n).unwrap();
            assert!(max_weight_gap(&closed, &oracle) <= 1e-12, "p={p} n={n}");
        }
    }
}

#[test]
fn multilevel_matches_sequence_expansion() {
    let s3 = SingleCopyState::new_renormalized(vec![
        Complex64::new(0.5, 0.1),
        Complex64::new(-0.3, 0.6),
        Complex64::new(0.2, -0.4),
    ])
    .unwrap();
    for n in 1..=9 {
        let gap = max_weight_gap(
            &decompose_multilevel(&s3, n).unwrap(),
            &brute_force_decompose(&s3, n).unwrap(),
        );
        assert!(gap <= 1e-12, "M=3 n={n}: {gap}");
    }
    let s4 = SingleCopyState::from_probabilities(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    for n in 1..=7 {
        let gap = max_weight_gap(
            &decompose_multilevel(&s4, n).unwrap(),
            &brute_force_decompose(&s4, n).unwrap(),
        );
        assert!(gap <= 1e-12, "M=4 n={n}: {gap}");
    }
}

#[test]
fn zero_amplitude_level_matches_oracle() {
    let s = SingleCopyState::from_probabilities(&[0.6, 0.0, 0.4]).unwrap();
    let closed = decompose_multilevel(&s, 6).unwrap();
    let oracle = brute_force_decompose(&s, 6).unwrap();
    assert!(max_weight_gap(&closed, &oracle) <= 1e-12);
    for (occ, w) in closed.iter() {
        if occ.get(1) > 0 {
            assert!(w.is_zero());
        }
    }
}

#[test]
fn three_sequences_of_point_three() {
    // all 8 outcome sequences of three copies, grouped by the number of level-0 outcomes
    let p = [0.3, 0.7];
    let mut grouped = [0.0f64; 4];
    for seq in 0..8u32 {
        let ones = (0..3).filter(|b| seq >> b & 1 == 0).count();
        grouped[ones] += (0..3).map(|b| p[(seq >> b & 1) as usize]).product::<f64>();
    }
    let d = decompose_two_level(&SingleCopyState::two_level(0.3).unwrap(), 3).unwrap();
    for (w, g) in d.weights().iter().zip(grouped) {
        assert!((w.linear() - g).abs() < 1e-12);
    }
    assert!((grouped[0] - 0.343).abs() < 1e-15 && (grouped[3] - 0.027).abs() < 1e-15);
}

#[test]
fn single_copy_weights_are_the_probabilities() {
    let s = SingleCopyState::from_probabilities(&[0.25, 0.35, 0.4]).unwrap();
    let d = brute_force_decompose(&s, 1).unwrap();
    for (occ, w) in d.iter() {
        let level = occ.as_slice().iter().position(|&c| c == 1).unwrap();
        assert!((w.linear() - s.probabilities()[level]).abs() < 1e-15);
    }
}

#[test]
fn random_four_level_state_sums_to_one() {
    let amps = vec![
        Complex64::new(0.31, -0.22),
        Complex64::new(-0.47, 0.05),
        Complex64::new(0.12, 0.58),
        Complex64::new(0.40, 0.33),
    ];
    let s = SingleCopyState::new_renormalized(amps).unwrap();
    let oracle = brute_force_decompose(&s, 8).unwrap();
    let oracle_sum: f64 = oracle.weights().iter().map(|w| w.linear()).sum();
    assert!((oracle_sum - 1.0).abs() < 1e-10);
    assert!((total_mass(&decompose_multilevel(&s, 8).unwrap()) - 1.0).abs() < 1e-10);
}

#[test]
fn multilevel_with_two_levels_is_the_two_level_path() {
    for &p in &[0.0, 0.3, 0.5, 0.77, 1.0] {
        let s = SingleCopyState::two_level(p).unwrap();
        for n in [1u32, 7, 100, 1000] {
            let dense = decompose_two_level(&s, n).unwrap();
            let general = decompose_multilevel(&s, n).unwrap();
            assert_eq!(dense.len(), general.len());
            for (a, b) in dense.weights().iter().zip(general.weights()) {
                assert_eq!(a.ln().to_bits(), b.ln().to_bits());
            }
        }
    }
}

#[test]
fn marginals_reduce_to_two_levels() {
    let s = SingleCopyState::from_probabilities(&[0.2, 0.5, 0.1, 0.2]).unwrap();
    let d = decompose_multilevel_with(&s, 30, &Limits::default()).unwrap();
    for level in 0..4 {
        let p = s.probabilities()[level];
        let two = decompose_two_level(&SingleCopyState::two_level(p).unwrap(), 30).unwrap();
        for (m, w) in d.marginal(level).unwrap().iter().zip(two.weights()) {
            assert!((m.linear() - w.linear()).abs() <= 1e-10);
        }
    }
}

#[test]
fn phase_invariance() {
    let base = [0.6f64, 0.8];
    let plain = SingleCopyState::new(vec![
        Complex64::new(base[0], 0.0),
        Complex64::new(base[1], 0.0),
    ])
    .unwrap();
    // multiplication by +-1, +-i is exact, so the weights agree to the last bit
    let quarter_turns = SingleCopyState::new(vec![
        Complex64::new(0.0, base[0]),
        Complex64::new(-base[1], 0.0),
    ])
    .unwrap();
    let a = decompose_two_level(&plain, 500).unwrap();
    let b = decompose_two_level(&quarter_turns, 500).unwrap();
    assert_eq!(a.weights(), b.weights());

    // generic phases only perturb |a_i|^2 by rounding
    let (t0, t1) = (0.7f64, -2.1f64);
    let rotated = SingleCopyState::new(vec![
        Complex64::from_polar(base[0], t0),
        Complex64::from_polar(base[1], t1),
    ])
    .unwrap();
    let c = decompose_two_level(&rotated, 500).unwrap();
    for (x, y) in a.weights().iter().zip(c.weights()) {
        assert!((x.linear() - y.linear()).abs() < 1e-12);
    }
}
