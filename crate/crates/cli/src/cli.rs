use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "freqborn",
    version,
    about = "Fixed-relative-frequency decomposition of N-copy repetition states",
    long_about = "Expands N-copy repetition states in the fixed-relative-frequency basis and \
                  reports weights, moments, window masses and Chebyshev bounds as versioned \
                  CSV (`#schema=v1`) or JSON tables. All computations are deterministic.\n\n\
                  Exit codes: 0 success, 1 I/O error, 2 usage or input error, 3 range or \
                  capacity error, 4 numerical-contract violation.\n\nEnvironment: FREQBORN_MAX_N caps every enumeration guard \
                  (two-level copy number, composition count, oracle sequence count)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weights of every fixed-frequency basis state.
    #[command(long_about = "Weights of every fixed-frequency basis state.\n\n\
        Two-level table `weights`: n,r,log_weight,weight (n counts level 0, r = n/N).\n\
        M-level table `weights`: n_0..n_{M-1},r_0..r_{M-1},log_weight,weight, compositions in \
        lexicographic order. log_weight is -inf (JSON null) for weight zero.\n\
        Table `moments`: level,probability,mean,variance,predicted_variance,empirical_variance \
        with variance taken about |a_i|^2 and predicted_variance = |a_i|^2(1-|a_i|^2)/N.")]
    Decompose {
        #[command(flatten)]
        state: StateArgs,
        /// Number of copies N.
        #[arg(long = "n")]
        copies: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Window masses at r0 = |a|^2 against the Chebyshev bound for a list of N.
    #[command(
        long_about = "Window masses at r0 = |a|^2 against the Chebyshev bound.\n\n\
        Table `scan`: n,outside_mass,bound,inside_mass with bound = |a|^2|b|^2/(eps^2 N)."
    )]
    Scan {
        #[command(flatten)]
        state: StateArgs,
        /// Window half-width.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Strictly increasing copy numbers, comma separated.
        #[arg(long)]
        ns: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Window masses and Chebyshev bound at a single N.
    #[command(long_about = "Window masses and Chebyshev bound at a single N.\n\n\
        Table `window`: a2,n,eps,r0,mass_below,mass_inside,mass_above,outside_mass,bound. \
        Below/above are strict (r < r0-eps, r > r0+eps); boundary points count as inside.")]
    Bound {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long = "n")]
        copies: u32,
        #[arg(long)]
        eps: f64,
        /// Window center, defaults to |a|^2.
        #[arg(long)]
        r0: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Region reduction of a sampled wavefunction.
    #[command(long_about = "Region reduction of a sampled wavefunction.\n\n\
        Reads a CSV with header x,re,im on a uniform grid, computes |a|^2 as the left-point \
        Riemann sum of |psi|^2 over the region and analyses the effective two-level system.\n\
        Table `analysis`: a2,b2,n,eps,mean,variance,predicted_variance,empirical_variance,\
        mass_below,mass_inside,mass_above,outside_mass,bound.")]
    Cv {
        /// Wavefunction CSV file.
        #[arg(long)]
        psi: PathBuf,
        /// Region as half-open intervals `lo:hi[,lo:hi...]`; `inf`/`-inf` allowed.
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long = "n")]
        copies: u32,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Distribution of successes in a finite run, with optional surprise and outer checks.
    #[command(
        long_about = "Distribution of successes in a run of N measurements.\n\n\
        Table `masses`: n,r,mass.\n\
        With --observed, table `surprise`: observed_n,mass,surprise_index (mass of outcomes no \
        more likely than the observed one).\n\
        With --outer, table `outer`: n0,p,n_outer,eps,mass_below,mass_inside,mass_above,\
        outside_mass,bound for the frequency of runs with exactly n0 successes."
    )]
    FiniteRun {
        #[command(flatten)]
        state: StateArgs,
        /// Measurements per run.
        #[arg(long = "n")]
        copies: u32,
        /// Observed success count to score with the surprise index.
        #[arg(long)]
        observed: Option<u32>,
        /// Number of repeated runs for the outer frequency check.
        #[arg(long)]
        outer: Option<u32>,
        /// Success count tracked by the outer check; defaults to --observed, else the mode.
        #[arg(long)]
        n0: Option<u32>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare the closed form against direct expansion of all M^N sequences.
    #[command(
        long_about = "Compare the closed form against direct expansion of all M^N \
        outcome sequences.\n\nTable `oracle`: levels,n,entries,max_abs_deviation,tolerance,status. \
        Exits 0 on PASS (deviation <= 1e-12) and 4 on FAIL."
    )]
    OracleCheck {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long = "n")]
        copies: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Single-copy state: exactly one of the three forms.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct StateArgs {
    /// Two-level shorthand: |a|^2, with |b|^2 = 1 - |a|^2.
    #[arg(long)]
    pub a2: Option<f64>,
    /// Complex amplitudes `re+imi`, comma separated.
    #[arg(long, alias = "amps-m3", allow_hyphen_values = true)]
    pub amps: Option<String>,
    /// Level probabilities |a_i|^2, comma separated.
    #[arg(long)]
    pub probs: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; written atomically. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rescale amplitudes (or the wavefunction) to unit norm instead of rejecting them.
    #[arg(long)]
    pub renormalize: bool,
}
