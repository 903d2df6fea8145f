//! Statistics of a finite run of `N_inner` measurements.
//!
//! The run itself is a two-level repetition state; repeating the whole run
//! `N_outer` times and asking how often exactly `n0` successes occur is a
//! two-level question again, with `|a|^2 = masses[n0]`.

use alloc::vec::Vec;

use crate::decomp::{decompose_two_level_with, Limits};
use crate::error::{Error, Result};
use crate::rho::{window_masses, WindowMass};
use crate::state::SingleCopyState;
use crate::sum::NeumaierSum;

/// Distribution of the number of level-0 outcomes in `n_inner` copies.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteRunDistribution {
    pub n_inner: u32,
    pub a_sq: f64,
    /// `masses[n] = |c_{N_inner}(n)|^2`.
    pub masses: Vec<f64>,
}

impl FiniteRunDistribution {
    /// Most likely count, lowest index on ties.
    pub fn argmax(&self) -> u32 {
        let mut best = 0;
        for (n, &m) in self.masses.iter().enumerate() {
            if m > self.masses[best] {
                best = n;
            }
        }
        best as u32
    }
}

pub fn finite_run_distribution(
    state: &SingleCopyState,
    n_inner: u32,
) -> Result<FiniteRunDistribution> {
    finite_run_distribution_with(state, n_inner, &Limits::default())
}

pub fn finite_run_distribution_with(
    state: &SingleCopyState,
    n_inner: u32,
    limits: &Limits,
) -> Result<FiniteRunDistribution> {
    let decomp = decompose_two_level_with(state, n_inner, limits)?;
    Ok(FiniteRunDistribution {
        n_inner,
        a_sq: decomp.probabilities()[0],
        masses: decomp.weights().iter().map(|w| w.linear()).collect(),
    })
}

fn check_count(dist: &FiniteRunDistribution, n: u32) -> Result<()> {
    if n > dist.n_inner {
        return Err(Error::domain(alloc::format!(
            "count {n} is outside 0..={}",
            dist.n_inner
        )));
    }
    Ok(())
}

/// Window analysis of the relative frequency, over `n_outer` repeated runs,
/// of runs that produced exactly `n0` successes. Concentrates at `masses[n0]`.
pub fn outer_frequency_check(
    dist: &FiniteRunDistribution,
    n_outer: u32,
    n0: u32,
    epsilon: f64,
) -> Result<WindowMass> {
    outer_frequency_check_with(dist, n_outer, n0, epsilon, &Limits::default())
}

pub fn outer_frequency_check_with(
    dist: &FiniteRunDistribution,
    n_outer: u32,
    n0: u32,
    epsilon: f64,
    limits: &Limits,
) -> Result<WindowMass> {
    check_count(dist, n0)?;
    let p = dist.masses[n0 as usize].clamp(0.0, 1.0);
    let outcome = SingleCopyState::two_level(p)?;
    let decomp = decompose_two_level_with(&outcome, n_outer, limits)?;
    window_masses(&decomp, 0, p, epsilon)
}

/// Total mass of outcomes no more likely than `observed`, relative to the
/// total mass: 1 for the most likely count, small for surprising ones.
pub fn surprise_index(dist: &FiniteRunDistribution, observed: u32) -> Result<f64> {
    check_count(dist, observed)?;
    let threshold = dist.masses[observed as usize];
    let mut tail = NeumaierSum::new();
    let mut total = NeumaierSum::new();
    for &m in &dist.masses {
        total.add(m);
        if m <= threshold {
            tail.add(m);
        }
    }
    Ok(tail.value() / total.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: f64, n: u32) -> FiniteRunDistribution {
        finite_run_distribution(&SingleCopyState::two_level(p).unwrap(), n).unwrap()
    }

    #[test]
    fn single_measurement() {
        let d = dist(0.3, 1);
        assert!((d.masses[0] - 0.7).abs() < 1e-15);
        assert!((d.masses[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn surprise_examples() {
        let d = dist(0.5, 100);
        assert_eq!(surprise_index(&d, d.argmax()).unwrap(), 1.0);
        assert!(surprise_index(&d, 0).unwrap() <= libm::exp2(-90.0));
        for n in 0..=100 {
            assert_eq!(
                surprise_index(&d, n).unwrap(),
                surprise_index(&d, 100 - n).unwrap()
            );
        }
        assert!(surprise_index(&d, 101).is_err());
    }

    #[test]
    fn outer_check_examples() {
        let d = dist(0.5, 2);
        assert!((d.masses[1] - 0.5).abs() < 1e-15);
        let w = outer_frequency_check(&d, 1000, 1, 0.05).unwrap();
        assert_eq!(w.center, d.masses[1]);
        let w = outer_frequency_check(&d, 1000, 1, 1.0).unwrap();
        assert_eq!(w.outside(), 0.0);
        assert!(outer_frequency_check(&d, 1000, 3, 0.1).is_err());
    }
}
