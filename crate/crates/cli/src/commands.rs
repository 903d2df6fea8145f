use freqborn_core::decomp::{
    brute_force_decompose_with, decompose_multilevel_with, decompose_two_level_with, Limits,
};
use freqborn_core::finite_run::{finite_run_distribution_with, outer_frequency_check_with};
use freqborn_core::region::region_frequency_analysis_with;
use freqborn_core::rho::convergence_scan_with;
use freqborn_core::{
    frequency_moments, surprise_index, window_masses, FrequencyDecomposition, SingleCopyState,
    WindowMass,
};
use serde_json::Value;

use crate::cli::{Command, CommonArgs, StateArgs};
use crate::error::{CliError, Result};
use crate::output::{Cell, Report, Table};
use crate::parse::{parse_amplitudes, parse_counts, parse_reals, parse_region};
use crate::wavefunction::read_wavefunction;

/// Per-weight agreement required between closed form and oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-12;
/// Allowed deviation from one of any emitted distribution column.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// A finished command: the report to write, and a contract violation to
/// signal after writing it.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub violation: Option<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome {
            report,
            violation: None,
        }
    }
}

/// Reads `FREQBORN_MAX_N`; unset means the default guards.
pub fn limits_from_env() -> Result<Limits> {
    match std::env::var("FREQBORN_MAX_N") {
        Err(_) => Ok(Limits::default()),
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Limits::uniform)
            .map_err(|_| CliError::Usage(format!("FREQBORN_MAX_N=`{v}` is not an integer"))),
    }
}

pub fn common_args(command: &Command) -> &CommonArgs {
    match command {
        Command::Decompose { common, .. }
        | Command::Scan { common, .. }
        | Command::Bound { common, .. }
        | Command::Cv { common, .. }
        | Command::FiniteRun { common, .. }
        | Command::OracleCheck { common, .. } => common,
    }
}

pub fn execute(command: &Command, limits: &Limits) -> Result<Outcome> {
    match command {
        Command::Decompose {
            state,
            copies,
            common,
        } => decompose(state, *copies, common, limits),
        Command::Scan {
            state,
            eps,
            ns,
            common,
        } => scan(state, *eps, ns, common, limits),
        Command::Bound {
            state,
            copies,
            eps,
            r0,
            common,
        } => bound(state, *copies, *eps, *r0, common, limits),
        Command::Cv {
            psi,
            region,
            copies,
            eps,
            common,
        } => {
            let wavefunction = read_wavefunction(psi, common.renormalize)?;
            let delta = parse_region(region)?;
            let analysis =
                region_frequency_analysis_with(&wavefunction, &delta, *copies, *eps, limits)?;
            let mut report = Report::new("cv");
            report
                .param("psi", psi.display().to_string())
                .param("region", region.as_str())
                .param("n", *copies)
                .param("eps", *eps)
                .param("renormalize", common.renormalize)
                .param("grid_points", wavefunction.samples().len())
                .param("spacing", wavefunction.spacing());
            let m = &analysis.moments;
            let w = &analysis.window;
            let mut t = Table::new(
                "analysis",
                [
                    "a2",
                    "b2",
                    "n",
                    "eps",
                    "mean",
                    "variance",
                    "predicted_variance",
                    "empirical_variance",
                    "mass_below",
                    "mass_inside",
                    "mass_above",
                    "outside_mass",
                    "bound",
                ],
            );
            t.push(vec![
                analysis.a_sq.into(),
                (1.0 - analysis.a_sq).into(),
                (*copies).into(),
                (*eps).into(),
                m.mean.into(),
                m.variance.into(),
                m.predicted_variance.into(),
                m.empirical_variance.into(),
                w.mass_below.into(),
                w.mass_inside.into(),
                w.mass_above.into(),
                w.outside().into(),
                w.chebyshev_bound.into(),
            ]);
            report.tables.push(t);
            Ok(Outcome::ok(report))
        }
        Command::FiniteRun {
            state,
            copies,
            observed,
            outer,
            n0,
            eps,
            common,
        } => finite_run(state, *copies, *observed, *outer, *n0, *eps, common, limits),
        Command::OracleCheck {
            state,
            copies,
            common,
        } => oracle_check(state, *copies, common, limits),
    }
}

fn build_state(args: &StateArgs, renormalize: bool) -> Result<SingleCopyState> {
    let state = match (&args.a2, &args.amps, &args.probs) {
        (Some(a2), None, None) => SingleCopyState::two_level(*a2)?,
        (None, Some(amps), None) => {
            let amps = parse_amplitudes(amps)?;
            if renormalize {
                SingleCopyState::new_renormalized(amps)?
            } else {
                SingleCopyState::new(amps)?
            }
        }
        (None, None, Some(probs)) => {
            let probs = parse_reals(probs)?;
            if renormalize {
                SingleCopyState::from_probabilities_renormalized(&probs)?
            } else {
                SingleCopyState::from_probabilities(&probs)?
            }
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --a2, --amps, --probs".into(),
            ))
        }
    };
    Ok(state)
}

fn state_params(report: &mut Report, args: &StateArgs, state: &SingleCopyState, renormalize: bool) {
    if let Some(a2) = args.a2 {
        report.param("a2", a2);
    }
    if let Some(amps) = &args.amps {
        report.param("amps", amps.as_str());
    }
    if let Some(probs) = &args.probs {
        report.param("probs", probs.as_str());
    }
    report
        .param("renormalize", renormalize)
        .param("probabilities", Value::from(state.probabilities().to_vec()));
}

fn check_distribution(table: &Table, column: &str) -> Option<String> {
    let values = table.float_column(column)?;
    let total = freqborn_core::sum::sum(values);
    ((total - 1.0).abs() > DISTRIBUTION_TOLERANCE).then(|| {
        format!(
            "column `{column}` of table `{}` sums to {total}",
            table.name
        )
    })
}

fn decompose_any(
    state: &SingleCopyState,
    copies: u32,
    limits: &Limits,
) -> freqborn_core::Result<FrequencyDecomposition> {
    if state.levels() == 2 {
        decompose_two_level_with(state, copies, limits)
    } else {
        decompose_multilevel_with(state, copies, limits)
    }
}

fn decompose(
    state_args: &StateArgs,
    copies: u32,
    common: &CommonArgs,
    limits: &Limits,
) -> Result<Outcome> {
    let state = build_state(state_args, common.renormalize)?;
    let decomp = decompose_any(&state, copies, limits)?;
    let mut report = Report::new("decompose");
    state_params(&mut report, state_args, &state, common.renormalize);
    report.param("n", copies).param("levels", state.levels());

    let n = f64::from(copies);
    let table = if state.levels() == 2 {
        let mut t = Table::new("weights", ["n", "r", "log_weight", "weight"]);
        for (occ, w) in decomp.iter() {
            let k = occ.get(0);
            t.push(vec![
                k.into(),
                (f64::from(k) / n).into(),
                w.ln().into(),
                w.linear().into(),
            ]);
        }
        t
    } else {
        let m = state.levels();
        let columns = (0..m)
            .map(|i| format!("n_{i}"))
            .chain((0..m).map(|i| format!("r_{i}")))
            .chain(["log_weight".to_owned(), "weight".to_owned()]);
        let mut t = Table::new("weights", columns);
        for (occ, w) in decomp.iter() {
            let counts = occ.as_slice();
            let mut row: Vec<Cell> = counts.iter().map(|&c| c.into()).collect();
            row.extend(counts.iter().map(|&c| Cell::from(f64::from(c) / n)));
            row.push(w.ln().into());
            row.push(w.linear().into());
            t.push(row);
        }
        t
    };
    let violation = check_distribution(&table, "weight");
    report.tables.push(table);
    report.tables.push(moments_table(&decomp)?);
    Ok(Outcome { report, violation })
}

fn scan(
    state_args: &StateArgs,
    eps: f64,
    ns: &str,
    common: &CommonArgs,
    limits: &Limits,
) -> Result<Outcome> {
    let state = build_state(state_args, common.renormalize)?;
    let copies = parse_counts(ns)?;
    let scan = convergence_scan_with(&state, eps, &copies, limits)?;
    let mut report = Report::new("scan");
    state_params(&mut report, state_args, &state, common.renormalize);
    report
        .param("eps", eps)
        .param("ns", Value::from(copies.clone()));
    let mut t = Table::new("scan", ["n", "outside_mass", "bound", "inside_mass"]);
    for rec in &scan.records {
        let w = &rec.window;
        t.push(vec![
            rec.copies.into(),
            w.outside().into(),
            w.chebyshev_bound.into(),
            w.mass_inside.into(),
        ]);
    }
    report.tables.push(t);
    Ok(Outcome::ok(report))
}

const WINDOW_COLUMNS: [&str; 5] = [
    "mass_below",
    "mass_inside",
    "mass_above",
    "outside_mass",
    "bound",
];

fn window_cells(w: &WindowMass) -> [Cell; 5] {
    [
        w.mass_below.into(),
        w.mass_inside.into(),
        w.mass_above.into(),
        w.outside().into(),
        w.chebyshev_bound.into(),
    ]
}

fn bound(
    state_args: &StateArgs,
    copies: u32,
    eps: f64,
    r0: Option<f64>,
    common: &CommonArgs,
    limits: &Limits,
) -> Result<Outcome> {
    let state = build_state(state_args, common.renormalize)?;
    let decomp = decompose_two_level_with(&state, copies, limits)?;
    let p = state.probabilities()[0];
    let center = r0.unwrap_or(p);
    let w = window_masses(&decomp, 0, center, eps)?;
    let mut report = Report::new("bound");
    state_params(&mut report, state_args, &state, common.renormalize);
    report
        .param("n", copies)
        .param("eps", eps)
        .param("r0", center);
    let mut t = Table::new(
        "window",
        ["a2", "n", "eps", "r0"].into_iter().chain(WINDOW_COLUMNS),
    );
    let mut row: Vec<Cell> = vec![p.into(), copies.into(), eps.into(), center.into()];
    row.extend(window_cells(&w));
    t.push(row);
    report.tables.push(t);
    Ok(Outcome::ok(report))
}

#[allow(clippy::too_many_arguments)]
fn finite_run(
    state_args: &StateArgs,
    copies: u32,
    observed: Option<u32>,
    outer: Option<u32>,
    n0: Option<u32>,
    eps: f64,
    common: &CommonArgs,
    limits: &Limits,
) -> Result<Outcome> {
    let state = build_state(state_args, common.renormalize)?;
    let dist = finite_run_distribution_with(&state, copies, limits)?;
    let mut report = Report::new("finite-run");
    state_params(&mut report, state_args, &state, common.renormalize);
    report.param("n", copies);

    let n = f64::from(copies);
    let mut masses = Table::new("masses", ["n", "r", "mass"]);
    for (k, &m) in dist.masses.iter().enumerate() {
        masses.push(vec![k.into(), (k as f64 / n).into(), m.into()]);
    }
    let violation = check_distribution(&masses, "mass");
    report.tables.push(masses);

    if let Some(obs) = observed {
        let index = surprise_index(&dist, obs)?;
        report.param("observed", obs);
        let mut t = Table::new("surprise", ["observed_n", "mass", "surprise_index"]);
        t.push(vec![
            obs.into(),
            dist.masses[obs as usize].into(),
            index.into(),
        ]);
        report.tables.push(t);
    }
    if let Some(n_outer) = outer {
        let target = n0.or(observed).unwrap_or_else(|| dist.argmax());
        let w = outer_frequency_check_with(&dist, n_outer, target, eps, limits)?;
        report
            .param("outer", n_outer)
            .param("n0", target)
            .param("eps", eps);
        let mut t = Table::new(
            "outer",
            ["n0", "p", "n_outer", "eps"]
                .into_iter()
                .chain(WINDOW_COLUMNS),
        );
        let mut row: Vec<Cell> = vec![target.into(), w.center.into(), n_outer.into(), eps.into()];
        row.extend(window_cells(&w));
        t.push(row);
        report.tables.push(t);
    }
    Ok(Outcome { report, violation })
}

fn oracle_check(
    state_args: &StateArgs,
    copies: u32,
    common: &CommonArgs,
    limits: &Limits,
) -> Result<Outcome> {
    let state = build_state(state_args, common.renormalize)?;
    let oracle = brute_force_decompose_with(&state, copies, limits)?;
    let closed = decompose_any(&state, copies, limits)?;
    if oracle.len() != closed.len() {
        return Err(CliError::Contract(format!(
            "oracle has {} entries, closed form {}",
            oracle.len(),
            closed.len()
        )));
    }
    let mut max_dev = 0.0f64;
    for ((oa, wa), (ob, wb)) in closed.iter().zip(oracle.iter()) {
        if oa.as_slice() != ob.as_slice() {
            return Err(CliError::Contract(
                "oracle and closed form enumerate differently".into(),
            ));
        }
        max_dev = max_dev.max((wa.linear() - wb.linear()).abs());
    }
    let pass = max_dev <= ORACLE_TOLERANCE;
    let mut report = Report::new("oracle-check");
    state_params(&mut report, state_args, &state, common.renormalize);
    report.param("n", copies);
    let mut t = Table::new(
        "oracle",
        [
            "levels",
            "n",
            "entries",
            "max_abs_deviation",
            "tolerance",
            "status",
        ],
    );
    t.push(vec![
        state.levels().into(),
        copies.into(),
        closed.len().into(),
        max_dev.into(),
        ORACLE_TOLERANCE.into(),
        (if pass { "PASS" } else { "FAIL" }).into(),
    ]);
    report.tables.push(t);
    let violation = (!pass)
        .then(|| format!("max per-weight deviation {max_dev:e} exceeds {ORACLE_TOLERANCE:e}"));
    Ok(Outcome { report, violation })
}

fn moments_table(decomp: &FrequencyDecomposition) -> Result<Table> {
    let mut t = Table::new(
        "moments",
        [
            "level",
            "probability",
            "mean",
            "variance",
            "predicted_variance",
            "empirical_variance",
        ],
    );
    for level in 0..decomp.levels() {
        let m = frequency_moments(decomp, level)?;
        t.push(vec![
            level.into(),
            m.probability.into(),
            m.mean.into(),
            m.variance.into(),
            m.predicted_variance.into(),
            m.empirical_variance.into(),
        ]);
    }
    Ok(t)
}
