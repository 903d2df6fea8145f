//! Frequency functional, window masses and the Chebyshev tail bound.
//!
//! `rho_{r,N}` is the weight of the admissible frequency `n/N` nearest to
//! `r`; `N rho_{r,N}` is its density approximant on the grid of spacing
//! `1/N`. Concentration is reported as finite-`N` window masses next to
//! the bound `|a|^2 |b|^2 / (eps^2 N)` they must respect.

use alloc::vec::Vec;

use crate::decomp::{decompose_two_level_with, FrequencyDecomposition, Limits};
use crate::error::{Error, Result};
use crate::state::SingleCopyState;
use crate::sum::NeumaierSum;

/// Grid points within this distance of `r0 +- eps` are counted inside the
/// closed window, so `0.3 - 0.1` and `0.2` classify the same way.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Masses of a distribution over `r` below, inside and above the closed
/// window `[r0 - eps, r0 + eps]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowMass {
    pub center: f64,
    pub epsilon: f64,
    pub copies: u32,
    pub mass_below: f64,
    pub mass_inside: f64,
    pub mass_above: f64,
    /// `|a|^2 (1 - |a|^2) / (eps^2 N)` for the level's `|a|^2`.
    pub chebyshev_bound: f64,
}

impl WindowMass {
    pub fn outside(&self) -> f64 {
        self.mass_below + self.mass_above
    }

    pub fn total(&self) -> f64 {
        self.mass_below + self.mass_inside + self.mass_above
    }
}

/// Upper bound on the mass with `|r - a_sq| > eps` after `copies` copies.
pub fn chebyshev_bound(a_sq: f64, copies: u32, epsilon: f64) -> f64 {
    a_sq * (1.0 - a_sq) / (epsilon * epsilon) / f64::from(copies)
}

fn nearest_count(r: f64, copies: u32) -> Result<u32> {
    if !r.is_finite() {
        return Err(Error::domain("frequency must be finite"));
    }
    // ceil(x - 1/2) rounds to nearest with ties going to the lower count
    let x = libm::ceil(r * f64::from(copies) - 0.5);
    Ok(x.clamp(0.0, f64::from(copies)) as u32)
}

/// `|c_N(r_N)|^2` at the admissible frequency `r_N = n/N` nearest to `r`.
pub fn rho_r_n(decomp: &FrequencyDecomposition, r: f64) -> Result<f64> {
    let n = nearest_count(r, decomp.copies())?;
    Ok(decomp.two_level_weight(n)?.linear())
}

/// `N rho_{r,N}`, the density approximant whose Riemann sum is the total mass.
pub fn scaled_density(decomp: &FrequencyDecomposition, r: f64) -> Result<f64> {
    Ok(f64::from(decomp.copies()) * rho_r_n(decomp, r)?)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::domain(alloc::format!(
            "window half-width {epsilon} must be positive"
        )));
    }
    Ok(())
}

/// Partitions the marginal distribution of `r_level` around `center`.
pub fn window_masses(
    decomp: &FrequencyDecomposition,
    level: usize,
    center: f64,
    epsilon: f64,
) -> Result<WindowMass> {
    check_epsilon(epsilon)?;
    if !(0.0..=1.0).contains(&center) {
        return Err(Error::domain(alloc::format!(
            "window center {center} is not in [0, 1]"
        )));
    }
    let marginal = decomp.marginal(level)?;
    let copies = decomp.copies();
    let n = f64::from(copies);
    let lower = center - epsilon - BOUNDARY_SLACK;
    let upper = center + epsilon + BOUNDARY_SLACK;
    let (mut below, mut inside, mut above) =
        (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    for (k, w) in marginal.iter().enumerate() {
        let r = k as f64 / n;
        let w = w.linear();
        if r < lower {
            below.add(w);
        } else if r > upper {
            above.add(w);
        } else {
            inside.add(w);
        }
    }
    Ok(WindowMass {
        center,
        epsilon,
        copies,
        mass_below: below.value(),
        mass_inside: inside.value(),
        mass_above: above.value(),
        chebyshev_bound: chebyshev_bound(decomp.probabilities()[level], copies, epsilon),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub copies: u32,
    pub window: WindowMass,
}

/// Window masses at `r0 = |a|^2` for an increasing sequence of copy numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceScan {
    pub probability: f64,
    pub epsilon: f64,
    pub records: Vec<ScanRecord>,
}

pub fn convergence_scan(
    state: &SingleCopyState,
    epsilon: f64,
    copies: &[u32],
) -> Result<ConvergenceScan> {
    convergence_scan_with(state, epsilon, copies, &Limits::default())
}

pub fn convergence_scan_with(
    state: &SingleCopyState,
    epsilon: f64,
    copies: &[u32],
    limits: &Limits,
) -> Result<ConvergenceScan> {
    check_epsilon(epsilon)?;
    if state.levels() != 2 {
        return Err(Error::domain("convergence scans take a two-level state"));
    }
    if copies.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(
            "copy numbers of a scan must be strictly increasing",
        ));
    }
    let p = state.probabilities()[0];
    let records = copies
        .iter()
        .map(|&n| {
            let decomp = decompose_two_level_with(state, n, limits)?;
            Ok(ScanRecord {
                copies: n,
                window: window_masses(&decomp, 0, p, epsilon)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceScan {
        probability: p,
        epsilon,
        records,
    })
}

/// Outcome of testing whether a distribution is localized at one value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationVerdict {
    pub localized: bool,
    /// Weighted median of the distribution.
    pub q0: f64,
    pub residual_outside: f64,
    pub epsilon: f64,
    pub tolerance: f64,
}

/// Tolerance on the total mass handed to [`check_postulate`].
pub const POSTULATE_MASS_TOLERANCE: f64 = 1e-6;

/// Decides whether `(q, mass)` pairs put all but `tolerance` of their mass
/// within `epsilon` of a single value `q0`.
pub fn check_postulate(
    weights: &[(f64, f64)],
    epsilon: f64,
    tolerance: f64,
) -> Result<LocalizationVerdict> {
    check_epsilon(epsilon)?;
    if weights
        .iter()
        .any(|&(q, m)| !q.is_finite() || !m.is_finite() || m < 0.0)
    {
        return Err(Error::domain(
            "weights need finite values and non-negative finite masses",
        ));
    }
    let total = crate::sum::sum(weights.iter().map(|&(_, m)| m));
    if (total - 1.0).abs() > POSTULATE_MASS_TOLERANCE {
        return Err(Error::domain(alloc::format!(
            "distribution mass {total} is not 1 within {POSTULATE_MASS_TOLERANCE}"
        )));
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| weights[i].0.total_cmp(&weights[j].0));

    let half = 0.5 * total;
    let mut cumulative = NeumaierSum::new();
    let mut q0 = weights[order[0]].0;
    for &i in &order {
        cumulative.add(weights[i].1);
        if cumulative.value() >= half {
            q0 = weights[i].0;
            break;
        }
    }
    let lower = q0 - epsilon - BOUNDARY_SLACK;
    let upper = q0 + epsilon + BOUNDARY_SLACK;
    let residual_outside = crate::sum::sum(
        weights
            .iter()
            .filter(|&&(q, _)| q < lower || q > upper)
            .map(|&(_, m)| m),
    );
    Ok(LocalizationVerdict {
        localized: residual_outside <= tolerance,
        q0,
        residual_outside,
        epsilon,
        tolerance,
    })
}
