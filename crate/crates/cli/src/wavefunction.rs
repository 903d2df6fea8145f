//! Wavefunction input files: CSV with header `x,re,im`, one uniformly spaced
//! sample per row. Lines starting with `#` are comments.

use std::io::Read;
use std::path::Path;

use freqborn_core::GridWavefunction;
use num_complex::Complex64;

use crate::error::{CliError, Result};

/// Relative tolerance on the spacing between consecutive grid points.
pub const SPACING_TOLERANCE: f64 = 1e-9;

pub fn read_wavefunction(path: &Path, renormalize: bool) -> Result<GridWavefunction> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_wavefunction(file, renormalize)
}

pub fn parse_wavefunction<R: Read>(input: R, renormalize: bool) -> Result<GridWavefunction> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "re", "im"] {
        return Err(CliError::Input(format!(
            "expected header `x,re,im`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut xs = Vec::new();
    let mut samples = Vec::new();
    for (line, record) in reader.deserialize::<(f64, f64, f64)>().enumerate() {
        let (x, re, im) = record.map_err(|e| CliError::Input(format!("row {}: {e}", line + 1)))?;
        xs.push(x);
        samples.push(Complex64::new(re, im));
    }
    if xs.len() < 2 {
        return Err(CliError::Input(
            "at least two grid points are required".into(),
        ));
    }
    let spacing = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if spacing.is_nan() || spacing <= 0.0 {
        return Err(CliError::Input("grid must be strictly increasing".into()));
    }
    for (k, pair) in xs.windows(2).enumerate() {
        let step = pair[1] - pair[0];
        if (step - spacing).abs() > SPACING_TOLERANCE * spacing {
            return Err(CliError::Input(format!(
                "non-uniform grid: step {step} between rows {} and {} differs from spacing {spacing}",
                k + 1,
                k + 2
            )));
        }
    }
    let psi = if renormalize {
        GridWavefunction::new_renormalized(xs[0], spacing, samples)?
    } else {
        GridWavefunction::new(xs[0], spacing, samples)?
    };
    Ok(psi)
}
