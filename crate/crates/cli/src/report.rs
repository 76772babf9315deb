//! Human-readable and JSON renderings of solver and oracle results.

use std::fmt::Write as _;

use qubit_md::{ConditionReport, KktResiduals, Solution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementOut {
    pub p: f64,
    pub u: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementaryOut {
    pub r: f64,
    pub w: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseOut {
    pub clause: String,
    pub holds: bool,
    /// `None` when the clause could not be evaluated.
    pub margin: Option<f64>,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionOut {
    pub holds: bool,
    pub clauses: Vec<ClauseOut>,
    pub cw_norm: Option<f64>,
    pub vg_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOut {
    pub p_guess: f64,
    pub branch: String,
    pub nonzero_count: usize,
    pub povm: Vec<ElementOut>,
    pub complementary: Option<Vec<ComplementaryOut>>,
    pub condition: Option<ConditionOut>,
    pub certificate: KktResiduals,
    pub closed_form_discrepancy: Option<f64>,
}

impl SolveOut {
    pub fn new(s: &Solution) -> Self {
        Self {
            p_guess: s.p_guess,
            branch: s.branch.to_string(),
            nonzero_count: s.nonzero_count(),
            povm: s
                .povm
                .iter()
                .map(|e| ElementOut {
                    p: e.p,
                    u: e.u.to_array(),
                })
                .collect(),
            complementary: s.complementary.as_ref().map(|c| {
                c.iter()
                    .map(|c| ComplementaryOut {
                        r: c.r,
                        w: c.w.to_array(),
                    })
                    .collect()
            }),
            condition: s.condition.as_ref().map(condition_out),
            certificate: s.certificate,
            closed_form_discrepancy: s.closed_form_discrepancy,
        }
    }
}

fn condition_out(report: &ConditionReport) -> ConditionOut {
    ConditionOut {
        holds: report.holds,
        clauses: report
            .clauses
            .iter()
            .map(|c| ClauseOut {
                clause: c.kind.to_string(),
                holds: c.holds,
                margin: c.margin.is_finite().then_some(c.margin),
                boundary: c.boundary,
            })
            .collect(),
        cw_norm: report.cw_norm,
        vg_norm: report.vg_norm,
    }
}

fn vec3(v: [f64; 3]) -> String {
    // print rounding noise as +0 rather than -0.000000000000
    let v = v.map(|x| if x.abs() < 5e-13 { 0.0 } else { x });
    format!("[{:+.12}, {:+.12}, {:+.12}]", v[0], v[1], v[2])
}

pub fn solve_text(out: &SolveOut) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "p_guess {:.12}", out.p_guess);
    let _ = writeln!(t, "branch  {}", out.branch);
    let _ = writeln!(t, "povm");
    for (k, e) in out.povm.iter().enumerate() {
        let _ = writeln!(t, "  {}  p {:.12}  u {}", k + 1, e.p, vec3(e.u));
    }
    if let Some(c) = &out.complementary {
        let _ = writeln!(t, "complementary");
        for (k, c) in c.iter().enumerate() {
            let _ = writeln!(t, "  {}  r {:.12}  w {}", k + 1, c.r, vec3(c.w));
        }
    }
    match &out.condition {
        Some(c) => {
            let _ = writeln!(t, "conditions ({})", if c.holds { "hold" } else { "fail" });
            for clause in &c.clauses {
                let margin = clause
                    .margin
                    .map_or("undefined".to_string(), |m| format!("{m:+.3e}"));
                let status = match (clause.holds, clause.boundary) {
                    (true, _) => "ok",
                    (false, true) => "FAIL (boundary)",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(t, "  {:<58} {:>11}  {}", clause.clause, margin, status);
            }
            if let (Some(cw), Some(vg)) = (c.cw_norm, c.vg_norm) {
                let _ = writeln!(t, "  |c_w| = {cw:.12}, |v_g| = {vg:.12}");
            }
        }
        None => {
            let _ = writeln!(
                t,
                "conditions (not applicable: fewer than two members or degenerate simplex)"
            );
        }
    }
    let _ = writeln!(t, "certificate {}", out.certificate);
    if let Some(d) = out.closed_form_discrepancy {
        let _ = writeln!(t, "explicit element formulas agree within {d:.3e}");
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOut {
    pub solve: f64,
    pub dual: f64,
    pub dual_gap_estimate: f64,
    pub dual_converged: bool,
    pub sampler_best: f64,
    pub sampler_trials: usize,
    pub helstrom: Option<f64>,
    /// Largest of `|solve − dual|`, `|solve − helstrom|` and `max(0, sampler_best − solve)`.
    pub discrepancy: f64,
    pub threshold: f64,
    pub ok: bool,
}

pub fn verify_text(v: &VerifyOut) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "solve        {:.12}", v.solve);
    let _ = writeln!(
        t,
        "dual oracle  {:.12}  (gap estimate {:.1e}{})",
        v.dual,
        v.dual_gap_estimate,
        if v.dual_converged { "" } else { ", not converged" }
    );
    let _ = writeln!(
        t,
        "sampler best {:.12}  ({} trials)",
        v.sampler_best, v.sampler_trials
    );
    if let Some(h) = v.helstrom {
        let _ = writeln!(t, "two-state    {h:.12}");
    }
    let _ = writeln!(
        t,
        "discrepancy  {:.3e}  ({} {:.0e})",
        v.discrepancy,
        if v.ok { "within" } else { "ABOVE" },
        v.threshold
    );
    t
}
