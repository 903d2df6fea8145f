//! Expansion of `N`-copy repetition states in the fixed-frequency basis.
//!
//! The weight of the symmetrized basis state with occupation counts `{n_i}`
//! is the multinomial probability `N!/prod n_i! * prod |a_i|^(2 n_i)`. The
//! two-level case is stored densely, indexed by the count `n` of level 0.
//! Larger level counts enumerate compositions of `N` in lexicographic order.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::combinatorics::{log_sum_exp, LogWeight};
use crate::error::{Error, Result};
use crate::kernel::ln_multinomial_pmf;
use crate::state::SingleCopyState;
use crate::sum::NeumaierSum;

/// Size guards for the enumerating routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `N` for the dense two-level path.
    pub max_two_level_copies: u64,
    /// Largest number of compositions `C(N+M-1, M-1)` enumerated.
    pub max_compositions: u128,
    /// Largest number of outcome sequences `M^N` expanded by the oracle.
    pub max_sequences: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_two_level_copies: 10_000_000,
            max_compositions: 10_000_000,
            max_sequences: 20_000_000,
        }
    }
}

impl Limits {
    /// Applies one cap to every guard.
    pub fn uniform(cap: u64) -> Self {
        Limits {
            max_two_level_copies: cap,
            max_compositions: u128::from(cap),
            max_sequences: u128::from(cap),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<LogWeight>),
    Compositions {
        counts: Vec<u32>,
        weights: Vec<LogWeight>,
    },
}

/// Occupation counts of one entry of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupation<'a> {
    Pair([u32; 2]),
    Counts(&'a [u32]),
}

impl Occupation<'_> {
    pub fn get(&self, level: usize) -> u32 {
        match self {
            Occupation::Pair(c) => c[level],
            Occupation::Counts(c) => c[level],
        }
    }

    pub fn as_slice(&self) -> &[u32] {
        match self {
            Occupation::Pair(c) => c,
            Occupation::Counts(c) => c,
        }
    }
}

/// Log-domain weights `ln |c_N({n_i})|^2` over all occupation vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyDecomposition {
    copies: u32,
    probabilities: Vec<f64>,
    storage: Storage,
}

impl FrequencyDecomposition {
    /// Number of copies `N`.
    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn levels(&self) -> usize {
        self.probabilities.len()
    }

    /// The `|a_i|^2` the decomposition was built from.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.weights().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weights in storage order.
    pub fn weights(&self) -> &[LogWeight] {
        match &self.storage {
            Storage::Dense(w) => w,
            Storage::Compositions { weights, .. } => weights,
        }
    }

    pub fn occupation(&self, index: usize) -> Occupation<'_> {
        match &self.storage {
            Storage::Dense(_) => Occupation::Pair([index as u32, self.copies - index as u32]),
            Storage::Compositions { counts, .. } => {
                let m = self.levels();
                Occupation::Counts(&counts[index * m..(index + 1) * m])
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Occupation<'_>, LogWeight)> + '_ {
        self.weights()
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.occupation(i), w))
    }

    /// Weight of the two-level basis state with `n` copies in level 0.
    pub fn two_level_weight(&self, n: u32) -> Result<LogWeight> {
        if self.levels() != 2 {
            return Err(Error::domain("decomposition is not two-level"));
        }
        if n > self.copies {
            return Err(Error::domain(alloc::format!(
                "count {n} exceeds copy number {}",
                self.copies
            )));
        }
        // both storages order two-level entries by ascending n_0
        Ok(self.weights()[n as usize])
    }

    /// Weight of the basis state with the given counts, if it is stored.
    pub fn weight_of(&self, counts: &[u32]) -> Option<LogWeight> {
        if counts.len() != self.levels()
            || counts.iter().map(|&c| u64::from(c)).sum::<u64>() != u64::from(self.copies)
        {
            return None;
        }
        match &self.storage {
            Storage::Dense(w) => w.get(counts[0] as usize).copied(),
            Storage::Compositions {
                counts: all,
                weights,
            } => {
                let m = self.levels();
                let (mut lo, mut hi) = (0usize, weights.len());
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    match all[mid * m..(mid + 1) * m].cmp(counts) {
                        core::cmp::Ordering::Less => lo = mid + 1,
                        core::cmp::Ordering::Greater => hi = mid,
                        core::cmp::Ordering::Equal => return Some(weights[mid]),
                    }
                }
                None
            }
        }
    }

    /// Weights summed over every level except `level`, indexed by `n_level`.
    pub fn marginal(&self, level: usize) -> Result<Vec<LogWeight>> {
        self.check_level(level)?;
        let len = self.copies as usize + 1;
        if let (Storage::Dense(w), 0) = (&self.storage, level) {
            return Ok(w.clone());
        }
        let mut max = vec![f64::NEG_INFINITY; len];
        for (occ, w) in self.iter() {
            let slot = &mut max[occ.get(level) as usize];
            *slot = slot.max(w.ln());
        }
        let mut acc = vec![NeumaierSum::new(); len];
        for (occ, w) in self.iter() {
            let k = occ.get(level) as usize;
            if !w.is_zero() {
                acc[k].add(libm::exp(w.ln() - max[k]));
            }
        }
        Ok(max
            .iter()
            .zip(&acc)
            .map(|(&m, s)| {
                if m == f64::NEG_INFINITY {
                    LogWeight::ZERO
                } else {
                    LogWeight::from_ln(m + libm::log(s.value())).unwrap_or(LogWeight::ZERO)
                }
            })
            .collect())
    }

    /// `(r, mass)` pairs of the marginal distribution of `r_level = n_level / N`.
    pub fn marginal_distribution(&self, level: usize) -> Result<Vec<(f64, f64)>> {
        let n = f64::from(self.copies);
        Ok(self
            .marginal(level)?
            .iter()
            .enumerate()
            .map(|(k, w)| (k as f64 / n, w.linear()))
            .collect())
    }

    pub(crate) fn check_level(&self, level: usize) -> Result<()> {
        if level >= self.levels() {
            return Err(Error::domain(alloc::format!(
                "level {level} out of range for a {}-level decomposition",
                self.levels()
            )));
        }
        Ok(())
    }
}

fn check_copies(copies: u32) -> Result<()> {
    if copies == 0 {
        return Err(Error::domain("copy number N must be positive"));
    }
    Ok(())
}

fn basis_weight(counts: &[u32], probabilities: &[f64]) -> LogWeight {
    ln_multinomial_pmf(counts, probabilities)
        .and_then(LogWeight::from_ln)
        .unwrap_or(LogWeight::ZERO)
}

/// Dense two-level expansion, `weights[n] = ln C(N,n) + n ln|a|^2 + (N-n) ln|b|^2`.
pub fn decompose_two_level(state: &SingleCopyState, copies: u32) -> Result<FrequencyDecomposition> {
    decompose_two_level_with(state, copies, &Limits::default())
}

pub fn decompose_two_level_with(
    state: &SingleCopyState,
    copies: u32,
    limits: &Limits,
) -> Result<FrequencyDecomposition> {
    if state.levels() != 2 {
        return Err(Error::domain(alloc::format!(
            "two-level expansion of a {}-level state",
            state.levels()
        )));
    }
    check_copies(copies)?;
    if u64::from(copies) > limits.max_two_level_copies {
        return Err(Error::Range {
            what: "two-level copy number",
            value: u64::from(copies),
            max: limits.max_two_level_copies,
        });
    }
    let probabilities = state.probabilities().to_vec();
    let weights = (0..=copies)
        .map(|n| basis_weight(&[n, copies - n], &probabilities))
        .collect();
    Ok(FrequencyDecomposition {
        copies,
        probabilities,
        storage: Storage::Dense(weights),
    })
}

/// Number of compositions of `copies` into `levels` non-negative parts,
/// saturating at `u128::MAX`.
pub fn composition_count(copies: u32, levels: usize) -> u128 {
    // C(N + M - 1, M - 1), built incrementally so every step is an integer
    let mut count: u128 = 1;
    for i in 1..levels as u128 {
        match count.checked_mul(u128::from(copies) + i) {
            Some(v) => count = v / i,
            None => return u128::MAX,
        }
    }
    count
}

/// Expansion over all compositions of `N` into `M` parts, lexicographic.
pub fn decompose_multilevel(
    state: &SingleCopyState,
    copies: u32,
) -> Result<FrequencyDecomposition> {
    decompose_multilevel_with(state, copies, &Limits::default())
}

pub fn decompose_multilevel_with(
    state: &SingleCopyState,
    copies: u32,
    limits: &Limits,
) -> Result<FrequencyDecomposition> {
    check_copies(copies)?;
    let m = state.levels();
    let required = composition_count(copies, m);
    if required > limits.max_compositions {
        return Err(Error::Capacity {
            what: "multilevel composition enumeration",
            required,
            limit: limits.max_compositions,
        });
    }
    let probabilities = state.probabilities().to_vec();
    let len = required as usize;
    let mut counts = Vec::with_capacity(len * m);
    let mut weights = Vec::with_capacity(len);
    let mut current = vec![0u32; m];
    enumerate_compositions(
        0,
        copies,
        false,
        &mut current,
        &probabilities,
        &mut |c, w| {
            counts.extend_from_slice(c);
            weights.push(w);
        },
    );
    Ok(FrequencyDecomposition {
        copies,
        probabilities,
        storage: Storage::Compositions { counts, weights },
    })
}

fn enumerate_compositions(
    level: usize,
    remaining: u32,
    impossible: bool,
    current: &mut [u32],
    probabilities: &[f64],
    emit: &mut impl FnMut(&[u32], LogWeight),
) {
    let last = current.len() - 1;
    if level == last {
        current[level] = remaining;
        let impossible = impossible || (remaining > 0 && probabilities[level] == 0.0);
        let w = if impossible {
            LogWeight::ZERO
        } else {
            basis_weight(current, probabilities)
        };
        emit(current, w);
        return;
    }
    for c in 0..=remaining {
        current[level] = c;
        let impossible = impossible || (c > 0 && probabilities[level] == 0.0);
        enumerate_compositions(
            level + 1,
            remaining - c,
            impossible,
            current,
            probabilities,
            emit,
        );
    }
}

/// Direct expansion of the tensor product: every one of the `M^N` outcome
/// sequences contributes `|prod_j a_{s_j}|^2` to its occupation vector.
///
/// Shares nothing with the closed-form routes beyond complex arithmetic and
/// is used as their oracle.
pub fn brute_force_decompose(
    state: &SingleCopyState,
    copies: u32,
) -> Result<FrequencyDecomposition> {
    brute_force_decompose_with(state, copies, &Limits::default())
}

pub fn brute_force_decompose_with(
    state: &SingleCopyState,
    copies: u32,
    limits: &Limits,
) -> Result<FrequencyDecomposition> {
    check_copies(copies)?;
    let m = state.levels();
    let required = (m as u128).checked_pow(copies).unwrap_or(u128::MAX);
    if required > limits.max_sequences {
        return Err(Error::Capacity {
            what: "outcome-sequence expansion",
            required,
            limit: limits.max_sequences,
        });
    }
    let norm: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    let scale = 1.0 / libm::sqrt(norm);
    let amplitudes: Vec<Complex64> = state.amplitudes().iter().map(|a| a * scale).collect();

    let mut groups: BTreeMap<Vec<u32>, NeumaierSum> = BTreeMap::new();
    let mut counts = vec![0u32; m];
    expand_sequences(
        copies,
        Complex64::new(1.0, 0.0),
        &amplitudes,
        &mut counts,
        &mut groups,
    );

    let mut flat = Vec::with_capacity(groups.len() * m);
    let mut weights = Vec::with_capacity(groups.len());
    for (key, mass) in groups {
        flat.extend_from_slice(&key);
        weights.push(LogWeight::from_linear(mass.value()).unwrap_or(LogWeight::ZERO));
    }
    Ok(FrequencyDecomposition {
        copies,
        probabilities: state.probabilities().to_vec(),
        storage: Storage::Compositions {
            counts: flat,
            weights,
        },
    })
}

fn expand_sequences(
    remaining: u32,
    amplitude: Complex64,
    amplitudes: &[Complex64],
    counts: &mut [u32],
    groups: &mut BTreeMap<Vec<u32>, NeumaierSum>,
) {
    if remaining == 0 {
        groups
            .entry(counts.to_vec())
            .or_default()
            .add(amplitude.norm_sqr());
        return;
    }
    for (level, &a) in amplitudes.iter().enumerate() {
        counts[level] += 1;
        expand_sequences(remaining - 1, amplitude * a, amplitudes, counts, groups);
        counts[level] -= 1;
    }
}

/// `sum_{n_i} |c_N({n_i})|^2` in the linear domain.
pub fn total_mass(decomp: &FrequencyDecomposition) -> f64 {
    log_sum_exp(decomp.weights()).linear()
}

/// First and second moments of `r_i = n_i / N` for one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub level: usize,
    pub copies: u32,
    /// `|a_i|^2` of the underlying state.
    pub probability: f64,
    pub mean: f64,
    /// Second moment about `|a_i|^2`.
    pub variance: f64,
    /// Second moment about the empirical mean.
    pub empirical_variance: f64,
    /// `|a_i|^2 (1 - |a_i|^2) / N`.
    pub predicted_variance: f64,
    pub mean_deviation: f64,
    pub variance_deviation: f64,
}

pub fn frequency_moments(decomp: &FrequencyDecomposition, level: usize) -> Result<MomentReport> {
    decomp.check_level(level)?;
    let p = decomp.probabilities[level];
    let n = f64::from(decomp.copies);
    let marginal = decomp.marginal(level)?;
    let mut mean = NeumaierSum::new();
    let mut second = NeumaierSum::new();
    for (k, w) in marginal.iter().enumerate() {
        let w = w.linear();
        let r = k as f64 / n;
        mean.add(r * w);
        second.add((r - p) * (r - p) * w);
    }
    let mean = mean.value();
    let variance = second.value();
    let empirical_variance = crate::sum::sum(marginal.iter().enumerate().map(|(k, w)| {
        let d = k as f64 / n - mean;
        d * d * w.linear()
    }));
    let predicted_variance = p * (1.0 - p) / n;
    Ok(MomentReport {
        level,
        copies: decomp.copies,
        probability: p,
        mean,
        variance,
        empirical_variance,
        predicted_variance,
        mean_deviation: (mean - p).abs(),
        variance_deviation: (variance - predicted_variance).abs(),
    })
}
