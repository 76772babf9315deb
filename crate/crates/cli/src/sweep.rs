//! Guessing probability of [`asymmetric_four`] over a grid of `h`, written as CSV.

use std::io::Write;

use qubit_md::families::{asymmetric_four, ASYMMETRIC_FOUR_H_MAX};
use qubit_md::{solve_with, SolveError, Tolerances};

use crate::closed_form;

pub const HEADER: [&str; 6] = [
    "h",
    "p_guess",
    "nonzero_count",
    "branch",
    "closed_form_value",
    "abs_error",
];

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid range: need 0 <= h_min <= h_max <= {max}, got [{h_min}, {h_max}]", max = ASYMMETRIC_FOUR_H_MAX)]
    Range { h_min: f64, h_max: f64 },
    #[error("steps must be at least 1")]
    Steps,
    #[error("h = {h}: {source}")]
    Solve { h: f64, source: SolveError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub p_guess: f64,
    pub nonzero_count: usize,
    pub branch: String,
    pub closed_form_value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// First grid point with fewer than four nonzero elements.
    pub transition: Option<f64>,
}

impl Sweep {
    pub fn max_abs_error(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }
}

/// Solves `steps + 1` equally spaced points of `[h_min, h_max]`.
pub fn run(h_min: f64, h_max: f64, steps: usize, tol: &Tolerances) -> Result<Sweep, SweepError> {
    // small slack so that a rounded √2 − 1 is accepted
    if !(0.0..=h_max).contains(&h_min) || h_max > ASYMMETRIC_FOUR_H_MAX + 1e-12 {
        return Err(SweepError::Range { h_min, h_max });
    }
    if steps == 0 {
        return Err(SweepError::Steps);
    }
    let h_max = h_max.min(ASYMMETRIC_FOUR_H_MAX);
    let mut solved = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let h = h_min + (h_max - h_min) * k as f64 / steps as f64;
        let ens = asymmetric_four(h).map_err(|e| SweepError::Solve { h, source: e.into() })?;
        let s = solve_with(&ens, tol).map_err(|source| SweepError::Solve { h, source })?;
        solved.push((h, s));
    }
    let transition = solved
        .iter()
        .find(|(_, s)| s.nonzero_count() < 4)
        .map(|(h, _)| *h);
    let h_star = transition.unwrap_or(f64::INFINITY);
    let rows = solved
        .into_iter()
        .map(|(h, s)| {
            let closed_form_value = closed_form::piecewise(h, h_star);
            SweepRow {
                h,
                p_guess: s.p_guess,
                nonzero_count: s.nonzero_count(),
                branch: s.branch.to_string(),
                closed_form_value,
                abs_error: (s.p_guess - closed_form_value).abs(),
            }
        })
        .collect();
    Ok(Sweep { rows, transition })
}

pub fn write_csv<W: Write>(sweep: &Sweep, out: W) -> Result<(), SweepError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(HEADER)?;
    for r in &sweep.rows {
        writer.write_record([
            significant(r.h, 12),
            significant(r.p_guess, 12),
            r.nonzero_count.to_string(),
            r.branch.clone(),
            significant(r.closed_form_value, 12),
            significant(r.abs_error, 12),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Positional decimal notation with `digits` significant digits.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let text = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.99… → 10.0…)
    let significant_len = text
        .trim_start_matches(['-', '0', '.'])
        .chars()
        .filter(|c| c.is_ascii_digit())
        .count();
    if significant_len > digits && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        text
    }
}
