//! Subcommand bodies; each returns the process exit code.

use std::io::Write;
use std::path::Path;

use qubit_md::oracle::{DEFAULT_MAX_ITER, DEFAULT_TOL_OPT};
use qubit_md::{dual_socp, helstrom_two, primal_sampler, solve_with, OracleError, SolveError, Tolerances};

use crate::file::{EnsembleFile, FileError};
use crate::report::{solve_text, verify_text, SolveOut, VerifyOut};
use crate::sweep::{self, SweepError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;
pub const EXIT_DISCREPANCY: i32 = 4;

/// Largest solver/oracle disagreement accepted by `verify`.
pub const VERIFY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flags {
    /// Overrides the validation tolerance of the file.
    pub tol: Option<f64>,
    pub seed: u64,
    pub trials: usize,
    pub json: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Self {
            tol: None,
            seed: 0,
            trials: 10_000,
            json: false,
        }
    }
}

fn load(path: &Path, flags: &Flags) -> Result<(qubit_md::Ensemble, Tolerances), FileError> {
    let file = EnsembleFile::read(path)?;
    let mut tol = file.tolerances();
    if let Some(t) = flags.tol {
        tol.tol = t;
    }
    Ok((file.ensemble(tol.tol)?, tol))
}

fn solve_error_code(e: &SolveError) -> i32 {
    match e {
        SolveError::CertificateFailure(_) => EXIT_CERTIFICATE,
        SolveError::InvalidEnsemble(_) => EXIT_PARSE,
        SolveError::Condition(_) => EXIT_FAILURE,
    }
}

pub fn cmd_solve(path: &Path, flags: &Flags, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (ensemble, tol) = match load(path, flags) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_PARSE;
        }
    };
    let solution = match solve_with(&ensemble, &tol) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return solve_error_code(&e);
        }
    };
    let report = SolveOut::new(&solution);
    let written = if flags.json {
        serde_json::to_writer_pretty(&mut *out, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(out))
    } else {
        out.write_all(solve_text(&report).as_bytes())
    };
    if written.is_err() {
        return EXIT_FAILURE;
    }
    EXIT_OK
}

pub fn cmd_verify(path: &Path, flags: &Flags, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (ensemble, tol) = match load(path, flags) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_PARSE;
        }
    };
    let solution = match solve_with(&ensemble, &tol) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return solve_error_code(&e);
        }
    };
    let (dual, converged) = match dual_socp(&ensemble, DEFAULT_TOL_OPT, DEFAULT_MAX_ITER) {
        Ok(d) => (d, true),
        Err(OracleError::MaxIterationsExceeded(d)) => (d, false),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_FAILURE;
        }
    };
    let sample = primal_sampler(&ensemble, solution.p_guess, flags.trials, flags.seed);
    let helstrom = helstrom_two(&ensemble).ok();
    let discrepancy = (solution.p_guess - dual.value)
        .abs()
        .max(helstrom.map_or(0.0, |h| (solution.p_guess - h).abs()))
        .max(sample.violation);
    let report = VerifyOut {
        solve: solution.p_guess,
        dual: dual.value,
        dual_gap_estimate: dual.gap_estimate,
        dual_converged: converged,
        sampler_best: sample.best,
        sampler_trials: sample.trials,
        helstrom,
        discrepancy,
        threshold: VERIFY_THRESHOLD,
        ok: discrepancy <= VERIFY_THRESHOLD,
    };
    let written = if flags.json {
        serde_json::to_writer_pretty(&mut *out, &report)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(out))
    } else {
        out.write_all(verify_text(&report).as_bytes())
    };
    if written.is_err() {
        return EXIT_FAILURE;
    }
    if report.ok {
        EXIT_OK
    } else {
        EXIT_DISCREPANCY
    }
}

pub fn cmd_sweep(
    h_min: f64,
    h_max: f64,
    steps: usize,
    out_path: Option<&Path>,
    flags: &Flags,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let mut tol = Tolerances::DEFAULT;
    if let Some(t) = flags.tol {
        tol.tol = t;
    }
    let result = sweep::run(h_min, h_max, steps, &tol).and_then(|s| {
        match out_path {
            Some(p) => {
                let file = std::fs::File::create(p).map_err(csv::Error::from)?;
                sweep::write_csv(&s, std::io::BufWriter::new(file))?;
            }
            None => sweep::write_csv(&s, &mut *out)?,
        }
        Ok(s)
    });
    match result {
        Ok(s) => {
            let transition = s.transition.map_or("none".to_string(), |h| format!("{h:.6}"));
            let _ = writeln!(
                err,
                "{} rows, 4 -> 3 transition at h = {transition}, max |p_guess - closed form| = {:.3e}",
                s.rows.len(),
                s.max_abs_error()
            );
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                SweepError::Range { .. } | SweepError::Steps => EXIT_PARSE,
                SweepError::Solve { source, .. } => solve_error_code(&source),
                SweepError::Csv(_) => EXIT_FAILURE,
            }
        }
    }
}
