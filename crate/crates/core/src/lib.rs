//! Fixed-relative-frequency decomposition of N-copy repetition states.
//!
//! A single-copy state `a_1|1> + ... + a_M|M>` repeated `N` times is expanded
//! in the basis of symmetrized states with fixed occupation counts `{n_i}`.
//! The squared coefficients form a multinomial distribution over relative
//! frequencies `r_i = n_i / N` that concentrates at `|a_i|^2` as `N` grows.
//! This crate computes those weights in log space, their exact moments,
//! window masses with the Chebyshev tail bound, a localization checker for
//! arbitrary weight distributions, the continuous-variable region reduction
//! and finite-run statistics.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod combinatorics;
pub mod decomp;
mod error;
pub mod finite_run;
mod kernel;
pub mod region;
pub mod rho;
pub mod state;
pub mod sum;

pub use combinatorics::{log_binomial, log_factorial, log_multinomial, log_sum_exp, LogWeight};
pub use decomp::{
    brute_force_decompose, composition_count, decompose_multilevel, decompose_two_level,
    frequency_moments, total_mass, FrequencyDecomposition, Limits, MomentReport, Occupation,
};
pub use error::{Error, Result};
pub use finite_run::{
    finite_run_distribution, outer_frequency_check, surprise_index, FiniteRunDistribution,
};
pub use region::{
    multi_region_decomposition, projector_weight, region_frequency_analysis, region_probability,
    GridWavefunction, Region, RegionAnalysis,
};
pub use rho::{
    chebyshev_bound, check_postulate, convergence_scan, rho_r_n, scaled_density, window_masses,
    ConvergenceScan, LocalizationVerdict, ScanRecord, WindowMass,
};
pub use state::{FrequencyVector, SingleCopyState, NORMALIZATION_TOLERANCE};
