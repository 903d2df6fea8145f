use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `sum |a_i|^2 = 1` accepted at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Amplitudes `a_1 .. a_M` of one copy of an `M`-level system, `M >= 2`.
///
/// The level probabilities are cached as `|a_i|^2 / sum_j |a_j|^2`, so they
/// sum to one up to rounding even when the amplitudes were accepted within
/// [`NORMALIZATION_TOLERANCE`]. Every decomposition uses these cached
/// probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleCopyState {
    amplitudes: Vec<Complex64>,
    probabilities: Vec<f64>,
}

impl SingleCopyState {
    /// Accepts amplitudes whose squared norm is within tolerance of one.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = squared_norm(&amplitudes)?;
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized {
                norm,
                tolerance: NORMALIZATION_TOLERANCE,
            });
        }
        Ok(Self::from_parts(amplitudes, norm))
    }

    /// Rescales the amplitudes to unit norm.
    pub fn new_renormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = squared_norm(&amplitudes)?;
        if norm == 0.0 {
            return Err(Error::domain("cannot renormalize the zero vector"));
        }
        let scale = 1.0 / libm::sqrt(norm);
        let amplitudes: Vec<_> = amplitudes.into_iter().map(|a| a * scale).collect();
        let norm = squared_norm(&amplitudes)?;
        Ok(Self::from_parts(amplitudes, norm))
    }

    /// Real non-negative amplitudes `sqrt(p_i)`. The given probabilities are
    /// kept as-is when they already sum to exactly one.
    pub fn from_probabilities(probabilities: &[f64]) -> Result<Self> {
        let total = probability_sum(probabilities)?;
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized {
                norm: total,
                tolerance: NORMALIZATION_TOLERANCE,
            });
        }
        Ok(Self::from_probability_parts(probabilities, total))
    }

    pub fn from_probabilities_renormalized(probabilities: &[f64]) -> Result<Self> {
        let total = probability_sum(probabilities)?;
        if total == 0.0 {
            return Err(Error::domain(
                "cannot renormalize an all-zero probability vector",
            ));
        }
        Ok(Self::from_probability_parts(probabilities, total))
    }

    /// Two-level state with `|a|^2 = a_sq` and `|b|^2 = 1 - a_sq`.
    pub fn two_level(a_sq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a_sq) {
            return Err(Error::domain(alloc::format!(
                "|a|^2 = {a_sq} is not in [0, 1]"
            )));
        }
        Self::from_probabilities(&[a_sq, 1.0 - a_sq])
    }

    fn from_parts(amplitudes: Vec<Complex64>, norm: f64) -> Self {
        let probabilities = if norm == 1.0 {
            amplitudes.iter().map(|a| a.norm_sqr()).collect()
        } else {
            amplitudes.iter().map(|a| a.norm_sqr() / norm).collect()
        };
        SingleCopyState {
            amplitudes,
            probabilities,
        }
    }

    fn from_probability_parts(probabilities: &[f64], total: f64) -> Self {
        let probabilities: Vec<f64> = if total == 1.0 {
            probabilities.to_vec()
        } else {
            probabilities.iter().map(|p| p / total).collect()
        };
        let amplitudes = probabilities
            .iter()
            .map(|&p| Complex64::new(libm::sqrt(p), 0.0))
            .collect();
        SingleCopyState {
            amplitudes,
            probabilities,
        }
    }

    #[inline]
    pub fn levels(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `|a_i|^2` for every level, summing to one.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, level: usize) -> Option<f64> {
        self.probabilities.get(level).copied()
    }
}

fn squared_norm(amplitudes: &[Complex64]) -> Result<f64> {
    if amplitudes.len() < 2 {
        return Err(Error::domain(
            "a single-copy state needs at least two levels",
        ));
    }
    if amplitudes
        .iter()
        .any(|a| !a.re.is_finite() || !a.im.is_finite())
    {
        return Err(Error::domain("amplitudes must be finite"));
    }
    Ok(crate::sum::sum(amplitudes.iter().map(|a| a.norm_sqr())))
}

fn probability_sum(probabilities: &[f64]) -> Result<f64> {
    if probabilities.len() < 2 {
        return Err(Error::domain(
            "a single-copy state needs at least two levels",
        ));
    }
    if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::domain(
            "probabilities must be finite and non-negative",
        ));
    }
    Ok(crate::sum::sum(probabilities.iter().copied()))
}

/// Occupation counts `n_i` of one fixed-frequency basis state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyVector {
    counts: Vec<u32>,
    total: u64,
}

impl FrequencyVector {
    pub fn new(counts: Vec<u32>) -> Self {
        let total = counts.iter().map(|&c| u64::from(c)).sum();
        FrequencyVector { counts, total }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// `r_i = n_i / N`; all zero for the empty configuration.
    pub fn relative_frequencies(&self) -> Vec<f64> {
        if self.total == 0 {
            return alloc::vec![0.0; self.counts.len()];
        }
        let n = self.total as f64;
        self.counts.iter().map(|&c| f64::from(c) / n).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let err = SingleCopyState::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.6, 0.0)]);
        assert!(matches!(err, Err(Error::NotNormalized { .. })));
        let s = SingleCopyState::new_renormalized(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.6, 0.0),
        ])
        .unwrap();
        assert!((s.probability(0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn accepts_within_tolerance_and_normalizes_probabilities() {
        let a = libm::sqrt(0.3 + 4e-10);
        let b = libm::sqrt(0.7);
        let s = SingleCopyState::new(vec![Complex64::new(a, 0.0), Complex64::new(0.0, b)]).unwrap();
        let p = s.probabilities();
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn needs_two_levels() {
        assert!(SingleCopyState::new(vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(SingleCopyState::from_probabilities(&[1.0]).is_err());
    }

    #[test]
    fn two_level_keeps_given_probability() {
        let s = SingleCopyState::two_level(0.3).unwrap();
        assert_eq!(s.probability(0), Some(0.3));
        assert_eq!(s.probability(1), Some(0.7));
        assert!(SingleCopyState::two_level(1.5).is_err());
        assert!(SingleCopyState::from_probabilities(&[0.5, -0.1, 0.6]).is_err());
    }

    #[test]
    fn frequency_vector() {
        let f = FrequencyVector::new(vec![1, 3]);
        assert_eq!(f.total(), 4);
        assert_eq!(f.relative_frequencies(), vec![0.25, 0.75]);
    }
}
