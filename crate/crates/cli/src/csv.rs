//! CSV emission and parsing for experiment results. Reals carry six
//! significant digits; row order follows the budget grid, so identical
//! configurations produce byte-identical files.

use std::io::Write;

use crate::config::Scheme;
use crate::error::{CliError, Result};
use crate::harness::ResultRow;

pub const HEADER: &str = "topology,d_or_n,scheme,K,r,p,q,N,trials,detect_prob,stderr,mean_budget";

/// Formats with six significant digits, plain decimal notation for the
/// magnitudes the tables produce and scientific notation beyond them.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..=8).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(CliError::Config("no result rows to write".into()));
    }
    writeln!(out, "{HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.topology,
            row.d_or_n,
            row.scheme,
            row.budget,
            row.repetition,
            format_real(row.p),
            format_real(row.q),
            row.n_infected,
            row.trials,
            format_real(row.detect_prob),
            format_real(row.stderr),
            format_real(row.mean_budget),
        )?;
    }
    Ok(())
}

/// Parses text produced by [`write_csv`] back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == HEADER => {}
        other => return Err(CliError::Config(format!("unexpected header: {other:?}"))),
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(CliError::Config(format!(
                "expected 12 columns, got {} in '{line}'",
                fields.len()
            )));
        }
        let real = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| CliError::Config(format!("bad real '{}'", fields[i])))
        };
        let int = |i: usize| -> Result<usize> {
            fields[i]
                .parse()
                .map_err(|_| CliError::Config(format!("bad integer '{}'", fields[i])))
        };
        rows.push(ResultRow {
            topology: fields[0].to_string(),
            d_or_n: int(1)?,
            scheme: Scheme::parse(fields[2])?,
            budget: int(3)? as u32,
            repetition: int(4)? as u32,
            p: real(5)?,
            q: real(6)?,
            n_infected: int(7)?,
            trials: int(8)?,
            detect_prob: real(9)?,
            stderr: real(10)?,
            mean_budget: real(11)?,
        });
    }
    Ok(rows)
}
