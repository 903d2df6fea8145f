//! Parsers for command-line value syntaxes.

use freqborn_core::Region;
use num_complex::Complex64;

use crate::error::{CliError, Result};

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("invalid number `{s}`")))
}

/// Parses `re`, `re+imi`, `re-imi`, `imi`, `i` or `-i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(usage("empty amplitude".into()));
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(Complex64::new(parse_real(&s)?, 0.0));
    };
    // split before the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other)?,
    };
    Ok(Complex64::new(re, im))
}

pub fn parse_amplitudes(text: &str) -> Result<Vec<Complex64>> {
    text.split(',').map(parse_complex).collect()
}

pub fn parse_reals(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_real).collect()
}

pub fn parse_counts(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<u32>()
                .ok()
                .or_else(|| {
                    // accept 1e5-style literals that are exact integers
                    let v = s.parse::<f64>().ok()?;
                    (v.fract() == 0.0 && (0.0..=f64::from(u32::MAX)).contains(&v))
                        .then_some(v as u32)
                })
                .ok_or_else(|| usage(format!("invalid copy number `{s}`")))
        })
        .collect()
}

/// Parses `lo:hi[,lo:hi...]` into a region of half-open intervals.
/// `inf` and `-inf` are accepted as endpoints; an empty string is the empty
/// region.
pub fn parse_region(text: &str) -> Result<Region> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Region::empty());
    }
    let mut intervals = text
        .split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| usage(format!("interval `{part}` is not of the form lo:hi")))?;
            Ok((parse_real(lo)?, parse_real(hi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Region::new(intervals)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(
            parse_complex("0.5+0.25i").unwrap(),
            Complex64::new(0.5, 0.25)
        );
        assert_eq!(
            parse_complex("-0.3-0.2i").unwrap(),
            Complex64::new(-0.3, -0.2)
        );
        assert_eq!(parse_complex("0.7i").unwrap(), Complex64::new(0.0, 0.7));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2E-2i").unwrap(),
            Complex64::new(1e-3, 2e-2)
        );
        assert_eq!(parse_complex("1e-3").unwrap(), Complex64::new(1e-3, 0.0));
        assert_eq!(
            parse_complex(" 0.6 - 0.8i ").unwrap(),
            Complex64::new(0.6, -0.8)
        );
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_amplitudes("1,0").unwrap().len(), 2);
        assert_eq!(
            parse_counts("100, 1000,1e4").unwrap(),
            vec![100, 1000, 10000]
        );
        assert!(parse_counts("1.5").is_err());
        assert!(parse_counts("-3").is_err());
    }

    #[test]
    fn regions() {
        let r = parse_region("0.5:1,-inf:0").unwrap();
        assert_eq!(r.intervals(), &[(f64::NEG_INFINITY, 0.0), (0.5, 1.0)]);
        assert_eq!(parse_region("").unwrap(), Region::empty());
        assert!(parse_region("0:1,0.5:2").is_err());
        assert!(parse_region("0-1").is_err());
    }
}
