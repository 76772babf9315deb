//! Minimum-error discrimination for up to four qubit states.
//!
//! When the displaced simplex is full-dimensional and [`check_condition`] holds, the optimum is
//! unique, every POVM element is nonzero and `p_guess = q_1 + |c_w|`. Otherwise some optimal
//! POVM has a null element and `p_guess` is the best value over the `(N−1)`-member
//! sub-ensembles. Every returned [`Solution`] carries a dual operator `K` and the KKT residuals
//! checked against the full ensemble.

use alloc::vec::Vec;
use core::fmt;

use crate::bloch::{
    success_probability, validate_povm, BlochError, BlochVector, ComplementaryState, Ensemble,
    HermitianOperator2, PovmElement,
};
use crate::conditions::{check_condition, ConditionError, ConditionReport};
use crate::geometry::{displaced_geometry, DisplacedGeometry};
use crate::math::cos;
use crate::oracle;
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(#[from] BlochError),
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error("optimality certificate failed: {0}")]
    CertificateFailure(KktResiduals),
}

/// How the optimum was obtained.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Branch {
    /// Closed form with all `n` elements nonzero (`n = 1` is the single-state case).
    Interior(usize),
    /// Optimum of the sub-ensemble at `active` (original indices), lifted to the full
    /// ensemble. `oracle_fallback` is set when the lifted dual operator failed to dominate an
    /// excluded state and `p_guess` was replaced by the numerical dual value.
    Subset {
        active: Vec<usize>,
        oracle_fallback: bool,
    },
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Interior(n) => write!(f, "Interior({n})"),
            Self::Subset {
                active,
                oracle_fallback,
            } => {
                write!(f, "Subset({{")?;
                for (k, i) in active.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", i + 1)?;
                }
                write!(f, "}})")?;
                if *oracle_fallback {
                    write!(f, " [oracle fallback]")?;
                }
                Ok(())
            }
        }
    }
}

/// KKT residuals; all are `≥ 0` and the certificate is valid when each is `≤ tol_cert`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KktResiduals {
    /// Largest violation of the POVM constraints.
    pub primal: f64,
    /// Largest deviation of `(q_i + r_i, q_i v_i + r_i w_i)` from `K`, including
    /// `r_i ≥ 0`, `|w_i| ≤ 1` and [`Self::psd_violation`].
    pub dual: f64,
    /// `max_i |p_i r_i (1 + u_i·w_i)|`.
    pub slackness: f64,
    /// `|Σ q_i p_i (1 + u_i·v_i) − tr K|`.
    pub duality_gap: f64,
    /// `max_j max(0, −λ_min(K − q_j ρ_j))` over every member.
    pub psd_violation: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.primal
            .max(self.dual)
            .max(self.slackness)
            .max(self.duality_gap)
    }

    pub fn is_valid(&self, tol_cert: f64) -> bool {
        self.max() <= tol_cert
    }
}

impl fmt::Display for KktResiduals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "primal {:.3e}, dual {:.3e}, slackness {:.3e}, gap {:.3e}, psd {:.3e}",
            self.primal, self.dual, self.slackness, self.duality_gap, self.psd_violation
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Solution {
    pub p_guess: f64,
    /// One element per member, in the ensemble's order; excluded members get zero elements.
    pub povm: Vec<PovmElement>,
    pub complementary: Option<Vec<ComplementaryState>>,
    /// Original indices of nonzero elements, ascending.
    pub active: Vec<usize>,
    pub branch: Branch,
    pub certificate: KktResiduals,
    /// The dual optimum `K` with `tr K = p_guess`.
    pub dual_operator: HermitianOperator2,
    /// Condition report of the full ensemble; absent when it is not full-dimensional.
    pub condition: Option<ConditionReport>,
    /// Four-state interior case: largest disagreement between the explicit element formulas
    /// and the construction from `c_w`.
    pub closed_form_discrepancy: Option<f64>,
}

impl Solution {
    pub fn nonzero_count(&self) -> usize {
        self.active.len()
    }
}

pub fn solve(ensemble: &Ensemble) -> Result<Solution, SolveError> {
    solve_with(ensemble, &Tolerances::DEFAULT)
}

pub fn solve_with(ensemble: &Ensemble, tol: &Tolerances) -> Result<Solution, SolveError> {
    let n = ensemble.len();
    if n == 1 {
        return Ok(single_state(ensemble));
    }
    let geom = displaced_geometry(ensemble, tol.rank);
    let report = if geom.is_full_dimensional() {
        Some(check_condition(&geom, tol)?)
    } else {
        None
    };
    match report {
        Some(report) if report.holds => interior_solution(ensemble, &geom, report, tol),
        report => subset_solution(ensemble, report, tol),
    }
}

fn single_state(ensemble: &Ensemble) -> Solution {
    let m = ensemble.members()[0];
    let mut solution = Solution {
        p_guess: m.weight,
        povm: alloc::vec![PovmElement::IDENTITY],
        complementary: Some(alloc::vec![ComplementaryState {
            r: 0.0,
            w: BlochVector::ZERO
        }]),
        active: alloc::vec![0],
        branch: Branch::Interior(1),
        certificate: KktResiduals::default(),
        dual_operator: m.operator(),
        condition: None,
        closed_form_discrepancy: None,
    };
    solution.certificate = kkt_certificate(ensemble, &solution);
    solution
}

/// Optimal POVM and complementary states from the candidate point `c_w` of a report that holds.
pub fn interior_solution(
    ensemble: &Ensemble,
    geom: &DisplacedGeometry,
    report: ConditionReport,
    tol: &Tolerances,
) -> Result<Solution, SolveError> {
    let n = geom.len();
    let (c, cw_norm, vg_norm, tbar) = match (&report.cw, report.cw_norm, report.vg_norm, &report.tbar) {
        (Some(c), Some(cw), Some(vg), Some(tbar)) if report.holds => (*c, cw, vg, tbar),
        _ => return Err(ConditionError::WrongDimension { dim: geom.dim, n }.into()),
    };
    let ratio = cw_norm / vg_norm;
    let t: Vec<f64> = core::iter::once(1.0 - ratio)
        .chain(tbar.iter().map(|tb| ratio * tb))
        .collect();
    let r: Vec<f64> = geom.s.iter().map(|&s| s.distance(c)).collect();
    let norm: f64 = t.iter().zip(&r).map(|(t, r)| t * r).sum();

    let mut povm = alloc::vec![PovmElement::ZERO; n];
    let mut complementary = alloc::vec![ComplementaryState { r: 0.0, w: BlochVector::ZERO }; n];
    let mut internal_povm = Vec::with_capacity(n);
    for k in 0..n {
        let u = (geom.s[k] - c) / r[k];
        let element = PovmElement::new(t[k] * r[k] / norm, u);
        internal_povm.push(element);
        povm[geom.order[k]] = element;
        complementary[geom.order[k]] = ComplementaryState { r: r[k], w: -u };
    }

    let q0 = geom.weights[0];
    let dual_operator =
        HermitianOperator2::from_scaled(q0 + r[0], geom.states[0] * q0 - internal_povm[0].u * r[0]);
    let closed_form_discrepancy = if n == 4 {
        Some(tetra_closed_form_discrepancy(geom, &report, &internal_povm))
    } else {
        None
    };

    let mut solution = Solution {
        p_guess: q0 + cw_norm,
        povm,
        complementary: Some(complementary),
        active: (0..n).collect(),
        branch: Branch::Interior(n),
        certificate: KktResiduals::default(),
        dual_operator,
        condition: Some(report),
        closed_form_discrepancy,
    };
    solution.certificate = kkt_certificate(ensemble, &solution);
    if !solution.certificate.is_valid(tol.cert) {
        return Err(SolveError::CertificateFailure(solution.certificate));
    }
    Ok(solution)
}

/// Explicit four-state element formulas in terms of face areas, `Γ`, `β`, `l` and `e`,
/// compared against `povm` (internal order).
fn tetra_closed_form_discrepancy(
    geom: &DisplacedGeometry,
    report: &ConditionReport,
    povm: &[PovmElement],
) -> f64 {
    let (Some(simplex), Some(cone)) = (report.simplex.as_ref(), report.cone.as_ref()) else {
        return f64::NAN;
    };
    let (l, e, s) = (&geom.l, &geom.e, &geom.s);
    let volume = simplex.volume;
    let weight = |z: usize| simplex.area[z] * cone.big_gamma[z];
    let weighted_sum: f64 = (1..4).map(weight).sum();
    let weighted_e: f64 = (1..4).map(|k| e[k] * weight(k)).sum();
    let weighted_s: BlochVector = (1..4).map(|k| s[k] * weight(k)).sum();
    let lead = |i: usize| l[i] * cos(cone.beta[i]) + e[i];
    let spread = |i: usize| l[i] * l[i] + e[i] * e[i] + 2.0 * l[i] * e[i] * cos(cone.beta[i]);
    let denom = 3.0 * volume + weighted_e;

    let p0 = (6.0 * volume * lead(1) - (l[1] * l[1] - e[1] * e[1]) * weighted_sum) / (2.0 * lead(1) * denom);
    let u0 = -weighted_s / (3.0 * volume);
    let mut worst = (p0 - povm[0].p).abs().max((u0 - povm[0].u).norm());
    for i in 1..4 {
        let pi = weight(i) * spread(i) / (2.0 * lead(i) * denom);
        let ui = (s[i] * (6.0 * volume * lead(i)) - weighted_s * (l[i] * l[i] - e[i] * e[i]))
            / (3.0 * volume * spread(i));
        worst = worst.max((pi - povm[i].p).abs()).max((ui - povm[i].u).norm());
    }
    worst
}

fn subset_solution(
    ensemble: &Ensemble,
    condition: Option<ConditionReport>,
    tol: &Tolerances,
) -> Result<Solution, SolveError> {
    let n = ensemble.len();
    let tie = 1e-14 * ensemble.weight_sum().max(f64::MIN_POSITIVE);
    let mut best: Option<(Vec<usize>, Solution)> = None;
    // kept sets in lexicographic order: drop the last member first
    for excluded in (0..n).rev() {
        let kept: Vec<usize> = (0..n).filter(|&i| i != excluded).collect();
        let sub = solve_with(&ensemble.subset(&kept)?, tol)?;
        if best.as_ref().is_none_or(|(_, b)| sub.p_guess > b.p_guess + tie) {
            best = Some((kept, sub));
        }
    }
    let (kept, sub) = best.expect("at least one subset");

    let mut povm = alloc::vec![PovmElement::ZERO; n];
    for (k, &i) in kept.iter().enumerate() {
        povm[i] = sub.povm[k];
    }
    let active: Vec<usize> = sub.active.iter().map(|&k| kept[k]).collect();
    let k_op = sub.dual_operator;
    let complementary = ensemble
        .members()
        .iter()
        .map(|m| {
            let r = k_op.trace - m.weight;
            let residual = k_op.scaled_bloch() - m.bloch * m.weight;
            let w = if r > tol.tol {
                residual / r
            } else {
                BlochVector::ZERO
            };
            ComplementaryState { r, w }
        })
        .collect();

    let mut solution = Solution {
        p_guess: sub.p_guess,
        povm,
        complementary: Some(complementary),
        active: active.clone(),
        branch: Branch::Subset {
            active,
            oracle_fallback: false,
        },
        certificate: KktResiduals::default(),
        dual_operator: k_op,
        condition,
        closed_form_discrepancy: None,
    };
    solution.certificate = kkt_certificate(ensemble, &solution);
    if solution.certificate.psd_violation > tol.cert {
        let dual = match oracle::dual_socp(ensemble, oracle::DEFAULT_TOL_OPT, oracle::DEFAULT_MAX_ITER) {
            Ok(d) | Err(oracle::OracleError::MaxIterationsExceeded(d)) => d,
            Err(oracle::OracleError::WrongN { .. }) => return Ok(solution),
        };
        solution.p_guess = dual.value;
        solution.dual_operator = HermitianOperator2::from_scaled(dual.value, dual.m);
        if let Branch::Subset { oracle_fallback, .. } = &mut solution.branch {
            *oracle_fallback = true;
        }
    }
    Ok(solution)
}

/// KKT residuals of `solution` against `ensemble`. Missing complementary states are
/// reconstructed from `K` as `r_i = tr K − q_i`, `w_i = (tr[Kσ] − q_i v_i)/r_i`.
pub fn kkt_certificate(ensemble: &Ensemble, solution: &Solution) -> KktResiduals {
    let k_op = solution.dual_operator;
    let k_scaled = k_op.scaled_bloch();
    let members = ensemble.members();
    let complementary: Vec<ComplementaryState> = match &solution.complementary {
        Some(c) if c.len() == members.len() => c.clone(),
        _ => members
            .iter()
            .map(|m| {
                let r = k_op.trace - m.weight;
                let residual = k_scaled - m.bloch * m.weight;
                ComplementaryState {
                    r,
                    w: if r > 0.0 { residual / r } else { BlochVector::ZERO },
                }
            })
            .collect(),
    };

    let primal = if solution.povm.len() == members.len() {
        validate_povm(&solution.povm, 0.0).max_violation()
    } else {
        f64::INFINITY
    };
    let psd_violation = members
        .iter()
        .map(|m| -(k_op - m.operator()).min_eigenvalue())
        .fold(0.0, f64::max);
    let mut dual = psd_violation;
    let mut slackness: f64 = 0.0;
    for ((m, c), e) in members.iter().zip(&complementary).zip(&solution.povm) {
        let trace_dev = (m.weight + c.r - k_op.trace).abs();
        let bloch_dev = (m.bloch * m.weight + c.w * c.r - k_scaled).norm();
        dual = dual.max(trace_dev).max(bloch_dev).max(-c.r).max(c.w.norm() - 1.0);
        slackness = slackness.max((e.p * c.r * (1.0 + e.u.dot(c.w))).abs());
    }
    let duality_gap = success_probability(ensemble, &solution.povm)
        .map(|p| (p - k_op.trace).abs())
        .unwrap_or(f64::INFINITY);
    KktResiduals {
        primal,
        dual,
        slackness,
        duality_gap,
        psd_violation,
    }
}
