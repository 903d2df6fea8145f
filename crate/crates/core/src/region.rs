//! Reduction of a sampled one-dimensional wavefunction to a two-level (or
//! `K`-level) system by splitting space into regions.
//!
//! With `|a|^2` the probability of finding the particle in `Delta`, the
//! weight of the sector with `n` of `N` particles inside `Delta` is the
//! binomial weight `C(N,n) |a|^(2n) |b|^(2(N-n))`, identical to the
//! two-level repetition-state weight.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::decomp::{
    decompose_multilevel_with, decompose_two_level_with, frequency_moments, FrequencyDecomposition,
    Limits, MomentReport,
};
use crate::error::{Error, Result};
use crate::kernel::ln_multinomial_pmf;
use crate::rho::{window_masses, WindowMass};
use crate::state::SingleCopyState;
use crate::sum::NeumaierSum;

/// Tolerance on `sum_k |psi(x_k)|^2 h = 1`.
pub const GRID_NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Samples `psi(x_k)` on the uniform grid `x_k = origin + k * spacing`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    origin: f64,
    spacing: f64,
    samples: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(origin: f64, spacing: f64, samples: Vec<Complex64>) -> Result<Self> {
        let psi = Self::unchecked(origin, spacing, samples)?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > GRID_NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized {
                norm,
                tolerance: GRID_NORMALIZATION_TOLERANCE,
            });
        }
        Ok(psi)
    }

    pub fn new_renormalized(origin: f64, spacing: f64, samples: Vec<Complex64>) -> Result<Self> {
        let mut psi = Self::unchecked(origin, spacing, samples)?;
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::domain("cannot renormalize a vanishing wavefunction"));
        }
        let scale = 1.0 / libm::sqrt(norm);
        for s in &mut psi.samples {
            *s *= scale;
        }
        Ok(psi)
    }

    fn unchecked(origin: f64, spacing: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !origin.is_finite() || !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::domain(
                "grid origin must be finite and spacing positive",
            ));
        }
        if samples.is_empty() {
            return Err(Error::domain("wavefunction has no samples"));
        }
        if samples
            .iter()
            .any(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(Error::domain("wavefunction samples must be finite"));
        }
        Ok(GridWavefunction {
            origin,
            spacing,
            samples,
        })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn x(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.spacing
    }

    /// Left-point Riemann sum of `|psi|^2`.
    pub fn norm(&self) -> f64 {
        crate::sum::sum(self.samples.iter().map(|s| s.norm_sqr())) * self.spacing
    }

    fn mass_where(&self, mut keep: impl FnMut(f64) -> bool) -> f64 {
        let mut acc = NeumaierSum::new();
        for (k, s) in self.samples.iter().enumerate() {
            if keep(self.x(k)) {
                acc.add(s.norm_sqr());
            }
        }
        acc.value() * self.spacing
    }
}

/// Union of disjoint half-open intervals `[lo, hi)`, sorted by `lo`.
/// Endpoints may be infinite.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Region {
    intervals: Vec<(f64, f64)>,
}

impl Region {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::domain(alloc::format!(
                    "invalid interval [{lo}, {hi})"
                )));
            }
        }
        if intervals.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(Error::domain(
                "intervals must be sorted and pairwise disjoint",
            ));
        }
        Ok(Region { intervals })
    }

    pub fn empty() -> Self {
        Region {
            intervals: Vec::new(),
        }
    }

    pub fn whole_line() -> Self {
        Region {
            intervals: alloc::vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x < hi)
    }

    /// The complement on the real line, again as half-open intervals.
    pub fn complement(&self) -> Region {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut start = f64::NEG_INFINITY;
        for &(lo, hi) in &self.intervals {
            if start < lo {
                out.push((start, lo));
            }
            start = hi;
        }
        if start < f64::INFINITY {
            out.push((start, f64::INFINITY));
        }
        Region { intervals: out }
    }

    fn overlaps(&self, other: &Region) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| other.intervals.iter().any(|&(c, d)| a < d && c < b))
    }
}

/// `sum_{x_k in Delta} |psi(x_k)|^2 h`, clamped to `[0, 1]`.
pub fn region_probability(psi: &GridWavefunction, delta: &Region) -> f64 {
    psi.mass_where(|x| delta.contains(x)).clamp(0.0, 1.0)
}

/// Weight of the sector with `n` of `copies` particles inside a region of
/// probability `a_sq`.
pub fn projector_weight(a_sq: f64, copies: u32, n: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&a_sq) {
        return Err(Error::domain(alloc::format!(
            "|a|^2 = {a_sq} is not in [0, 1]"
        )));
    }
    if copies == 0 {
        return Err(Error::domain("copy number N must be positive"));
    }
    if n > copies {
        return Err(Error::domain(alloc::format!(
            "sector n = {n} exceeds N = {copies}"
        )));
    }
    Ok(ln_multinomial_pmf(&[n, copies - n], &[a_sq, 1.0 - a_sq]).map_or(0.0, libm::exp))
}

/// Full region pipeline: `|a|^2`, the effective two-level moments and the
/// window at `r0 = |a|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionAnalysis {
    pub a_sq: f64,
    pub moments: MomentReport,
    pub window: WindowMass,
}

pub fn region_frequency_analysis(
    psi: &GridWavefunction,
    delta: &Region,
    copies: u32,
    epsilon: f64,
) -> Result<RegionAnalysis> {
    region_frequency_analysis_with(psi, delta, copies, epsilon, &Limits::default())
}

pub fn region_frequency_analysis_with(
    psi: &GridWavefunction,
    delta: &Region,
    copies: u32,
    epsilon: f64,
    limits: &Limits,
) -> Result<RegionAnalysis> {
    let a_sq = region_probability(psi, delta);
    let state = SingleCopyState::two_level(a_sq)?;
    let decomp = decompose_two_level_with(&state, copies, limits)?;
    Ok(RegionAnalysis {
        a_sq,
        moments: frequency_moments(&decomp, 0)?,
        window: window_masses(&decomp, 0, a_sq, epsilon)?,
    })
}

/// `K` pairwise disjoint regions plus their common complement as a
/// `(K+1)`-level system; level `K` is the remainder.
pub fn multi_region_decomposition(
    psi: &GridWavefunction,
    regions: &[Region],
    copies: u32,
    limits: &Limits,
) -> Result<FrequencyDecomposition> {
    if regions.is_empty() {
        return Err(Error::domain("at least one region is required"));
    }
    for (i, a) in regions.iter().enumerate() {
        if regions[i + 1..].iter().any(|b| a.overlaps(b)) {
            return Err(Error::domain("regions must be pairwise disjoint"));
        }
    }
    let mut probabilities: Vec<f64> = regions
        .iter()
        .map(|r| psi.mass_where(|x| r.contains(x)))
        .collect();
    probabilities.push(psi.mass_where(|x| !regions.iter().any(|r| r.contains(x))));
    let state = SingleCopyState::from_probabilities_renormalized(&probabilities)?;
    decompose_multilevel_with(&state, copies, limits)
}
