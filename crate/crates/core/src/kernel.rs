//! Saddle-point evaluation of multinomial log-probabilities.
//!
//! `ln N! - sum ln n_i! + sum n_i ln p_i` loses roughly `ln(N!) * eps` of
//! absolute accuracy when it is evaluated as a difference of log-factorials,
//! which is already ~1e-9 at `N = 10^6`. Writing every factorial as
//! Stirling's leading term plus a small remainder and collecting the large
//! terms into deviance functions keeps the result accurate to a few ulps of
//! the log-weight itself at any `N`.

/// `0.5 * ln(2 pi)`
pub(crate) const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `ln n! - [(n + 1/2) ln n - n + 1/2 ln(2 pi)]` for `n = 0..=15`.
/// Entry 0 is unused.
const STIRLING_REMAINDER: [f64; 16] = [
    0.0,
    0.08106146679532726,
    0.0413406959554093,
    0.02767792568499834,
    0.020790672103765093,
    0.016644691189821193,
    0.013876128823070748,
    0.01189670994589177,
    0.010411265261972096,
    0.009255462182712733,
    0.00833056343336287,
    0.007573675487951841,
    0.00694284010720953,
    0.006408994188004207,
    0.0059513701127588475,
    0.005554733551962801,
];

/// Remainder of Stirling's approximation, `ln n! - (n + 1/2) ln n + n - 1/2 ln(2 pi)`.
/// Requires `n >= 1`.
pub(crate) fn stirling_remainder(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return STIRLING_REMAINDER[n as usize];
    }
    let x = n as f64;
    let xx = x * x;
    if n > 500 {
        (S0 - S1 / xx) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// Deviance term `x ln(x / m) + m - x`, evaluated without cancellation when
/// `x` is close to `m`.
pub(crate) fn deviance(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        return m;
    }
    if libm::fabs(x - m) < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        let v2 = v * v;
        let mut j = 1u32;
        loop {
            ej *= v2;
            let s1 = s + ej / f64::from(2 * j + 1);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1;
            if j > 1000 {
                return s;
            }
        }
    }
    x * libm::log(x / m) + m - x
}

/// Natural log of the multinomial probability of `counts` under `probs`.
///
/// `probs` must sum to one. Returns `None` for an impossible configuration
/// (a positive count on a zero-probability level), without touching the
/// log of zero.
pub(crate) fn ln_multinomial_pmf(counts: &[u32], probs: &[f64]) -> Option<f64> {
    debug_assert_eq!(counts.len(), probs.len());
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return Some(0.0);
    }
    let n = total as f64;
    let mut level_terms = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        if c == 0 {
            level_terms += n * p;
            continue;
        }
        if p == 0.0 {
            return None;
        }
        let x = f64::from(c);
        level_terms += stirling_remainder(u64::from(c))
            + deviance(x, n * p)
            + 0.5 * libm::log(x)
            + HALF_LN_TWO_PI;
    }
    Some(stirling_remainder(total) + 0.5 * libm::log(n) + HALF_LN_TWO_PI - level_terms)
}
