//! Log-space combinatorial kernel.
//!
//! All functions return natural logarithms. Conversion to the linear domain
//! happens only where a probability is reported.

use core::ops::Mul;

use crate::error::{Error, Result};
use crate::kernel::{stirling_remainder, HALF_LN_TWO_PI};
use crate::sum::NeumaierSum;

/// Largest argument accepted by [`log_factorial`].
pub const MAX_FACTORIAL_ARG: u64 = 100_000_000;

/// `ln n!` for `n = 0..=20`, from the exact integer factorials.
const LN_FACTORIAL_TABLE: [f64; 21] = [
    0.0,
    0.0,
    core::f64::consts::LN_2,
    1.791759469228055,
    3.1780538303479458,
    4.787491742782046,
    6.579251212010101,
    8.525161361065415,
    10.60460290274525,
    12.801827480081469,
    15.104412573075516,
    17.502307845873887,
    19.987214495661885,
    22.552163853123425,
    25.19122118273868,
    27.89927138384089,
    30.671860106080672,
    33.50507345013689,
    36.39544520803305,
    39.339884187199495,
    42.335616460753485,
];

/// A non-negative weight stored as its natural logarithm.
///
/// Weight zero is the distinguished element [`LogWeight::ZERO`] (stored as
/// negative infinity). It absorbs under multiplication and is the identity
/// of [`log_sum_exp`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    /// Wraps a natural log. NaN and `+inf` are rejected.
    pub fn from_ln(value: f64) -> Option<Self> {
        if value.is_nan() || value == f64::INFINITY {
            None
        } else {
            Some(LogWeight(value))
        }
    }

    /// Converts a linear non-negative weight.
    pub fn from_linear(weight: f64) -> Option<Self> {
        if weight.is_nan() || weight < 0.0 || weight.is_infinite() {
            None
        } else if weight == 0.0 {
            Some(Self::ZERO)
        } else {
            Some(LogWeight(libm::log(weight)))
        }
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// The weight in the linear domain.
    #[inline]
    pub fn linear(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            libm::exp(self.0)
        }
    }
}

impl Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, rhs: LogWeight) -> LogWeight {
        if self.is_zero() || rhs.is_zero() {
            LogWeight::ZERO
        } else {
            LogWeight(self.0 + rhs.0)
        }
    }
}

/// `ln n!`, exact-table for `n <= 20` and Stirling series beyond.
pub fn log_factorial(n: u64) -> Result<f64> {
    if n > MAX_FACTORIAL_ARG {
        return Err(Error::Range {
            what: "factorial argument",
            value: n,
            max: MAX_FACTORIAL_ARG,
        });
    }
    Ok(ln_factorial_unchecked(n))
}

pub(crate) fn ln_factorial_unchecked(n: u64) -> f64 {
    if n <= 20 {
        return LN_FACTORIAL_TABLE[n as usize];
    }
    let x = n as f64;
    (x + 0.5) * libm::log(x) - x + HALF_LN_TWO_PI + stirling_remainder(n)
}

/// `ln C(total, k)`. Symmetric in `k <-> total - k` bit-for-bit.
pub fn log_binomial(total: u64, k: u64) -> Result<f64> {
    if k > total {
        return Err(Error::domain(alloc::format!(
            "binomial lower index {k} exceeds upper index {total}"
        )));
    }
    let lf_total = log_factorial(total)?;
    let small = k.min(total - k);
    Ok(lf_total - ln_factorial_unchecked(small) - ln_factorial_unchecked(total - small))
}

/// `ln(N! / prod n_i!)` with `N = sum n_i`.
pub fn log_multinomial(counts: &[u64]) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::domain("multinomial of an empty count list"));
    }
    let total = counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or(Error::Range {
            what: "multinomial total",
            value: u64::MAX,
            max: MAX_FACTORIAL_ARG,
        })?;
    if counts.len() == 2 {
        return log_binomial(total, counts[0]);
    }
    let mut value = log_factorial(total)?;
    for &c in counts {
        value -= ln_factorial_unchecked(c);
    }
    Ok(value)
}

/// `ln sum exp(v_i)` with a max shift. The empty sum is [`LogWeight::ZERO`].
pub fn log_sum_exp(values: &[LogWeight]) -> LogWeight {
    let max = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return LogWeight::ZERO;
    }
    let mut acc = NeumaierSum::new();
    for v in values {
        if !v.is_zero() {
            acc.add(libm::exp(v.0 - max));
        }
    }
    LogWeight(max + libm::log(acc.value()))
}
