//! Closed-form test for an optimal measurement without null elements.
//!
//! For a full-dimensional displaced simplex the optimal dual point `c*` must lie on every
//! hyperboloid `C_i = {c : |c − s_i| − |c| = e_i}` and inside the relative interior `Ω` of
//! `conv{s_i}`. The candidate `c_w` is located through the angles `Θ_i` between `c_w` and
//! `s_i`; its norm follows from
//!
//! ```text
//! |c_w| = (l_i² − e_i²) / (2 (l_i cos Θ_i + e_i))      for every i ≥ 1
//! ```
//!
//! and interiority is decided by comparing `|c_w|` with the distance `|v_g|` from the origin to
//! the opposite face along the same ray. [`check_condition`] evaluates the clauses in order
//! (hyperbola reachability, discriminants, cone bounds, interiority) and, when all hold,
//! emits `c_w`.
//!
//! Indices are internal (see [`crate::geometry`]): member 0 has the largest weight and
//! `I = {1, …, N−1}`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::bloch::BlochVector;
use crate::geometry::{others, simplex_angles, DisplacedGeometry, GeometryError, SimplexAngles};
use crate::math::{acos_checked, cos, sin, sqrt};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConditionError {
    #[error("affine dimension {dim} does not match {n} members")]
    WrongDimension { dim: usize, n: usize },
    #[error("hyperbola prerequisite l > e fails for member {index}")]
    PrerequisiteFailed { index: usize },
    #[error("simplex angle too close to 0 or π")]
    DegenerateAngle,
    #[error("negative discriminant {value:.3e} for pair ({x}, {y})")]
    NegativeDiscriminant { x: usize, y: usize, value: f64 },
    #[error("sin β_{index} vanishes")]
    DegenerateBeta { index: usize },
    #[error("radius denominator vanishes for member {index}")]
    DivisionNearZero { index: usize },
    #[error("gauge point denominator vanishes")]
    DegenerateDenominator,
    #[error("arccos argument {value} outside [-1, 1] ({what})")]
    NumericalInconsistency { what: &'static str, value: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `X_xy` and `Y_xy` for every ordered pair, plus the barred combinations for tetrahedra.
/// Undefined entries are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HyperbolaCoefficients {
    pub n: usize,
    pub x: [[f64; 4]; 4],
    pub y: [[f64; 4]; 4],
    pub xbar: [f64; 4],
    pub ybar: [f64; 4],
    pub zbar: [f64; 4],
}

impl HyperbolaCoefficients {
    /// `Z̄_z² − (X̄_z + sin²φ_z)(Ȳ_z − sin²φ_z)`.
    pub fn discriminant(&self, z: usize, angles: &SimplexAngles) -> f64 {
        let s2 = sin(angles.phi[z]) * sin(angles.phi[z]);
        self.zbar[z] * self.zbar[z] - (self.xbar[z] + s2) * (self.ybar[z] - s2)
    }
}

/// Angles locating `c_w`. Undefined entries are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeAngles {
    /// Triangle case: `alpha[x]`.
    pub alpha: [f64; 4],
    /// Tetrahedron case: `beta[z]`.
    pub beta: [f64; 4],
    /// Tetrahedron case: `gamma[x][y]`, dihedral angle along `{0, s_x}` between the planes
    /// through `c_w` and through `s_y`.
    pub gamma: [[f64; 4]; 4],
    /// Tetrahedron case: `big_gamma[z] = sin β_x sin γ_xy` with `{x, y}` the other indices.
    pub big_gamma: [f64; 4],
    /// `Θ_i`: `alpha`, `beta`, or 0 for a segment.
    pub theta_cap: [f64; 4],
}

impl ConeAngles {
    fn empty() -> Self {
        Self {
            alpha: [f64::NAN; 4],
            beta: [f64::NAN; 4],
            gamma: [[f64::NAN; 4]; 4],
            big_gamma: [f64::NAN; 4],
            theta_cap: [f64::NAN; 4],
        }
    }
}

pub fn hyperbola_coeffs(
    geom: &DisplacedGeometry,
    angles: &SimplexAngles,
    tol: f64,
) -> Result<HyperbolaCoefficients, ConditionError> {
    let n = geom.len();
    let (l, e) = (&geom.l, &geom.e);
    for i in 1..n {
        if !(l[i] > e[i]) {
            return Err(ConditionError::PrerequisiteFailed { index: i });
        }
    }
    let a = |i: usize| l[i] * l[i] - e[i] * e[i];
    let mut out = HyperbolaCoefficients {
        n,
        x: [[f64::NAN; 4]; 4],
        y: [[f64::NAN; 4]; 4],
        xbar: [f64::NAN; 4],
        ybar: [f64::NAN; 4],
        zbar: [f64::NAN; 4],
    };
    for x in 1..n {
        for y in (1..n).filter(|&y| y != x) {
            let th = angles.theta(x, y);
            let sin_th = sin(th);
            if !(sin_th > tol) {
                return Err(ConditionError::DegenerateAngle);
            }
            let den = l[y] * a(x) * sin_th;
            out.x[x][y] = (l[x] * a(y) - l[y] * a(x) * cos(th)) / den;
            out.y[x][y] = (e[x] * a(y) - e[y] * a(x)) / den;
        }
    }
    if n == 4 {
        for z in 1..4 {
            let (x, y) = others(z);
            if !(sin(angles.phi[z]) > tol) {
                return Err(ConditionError::DegenerateAngle);
            }
            let c = cos(angles.phi[z]);
            let (xa, xb) = (out.x[z][x], out.x[z][y]);
            let (ya, yb) = (out.y[z][x], out.y[z][y]);
            out.xbar[z] = xa * xa + xb * xb - 2.0 * xa * xb * c;
            out.ybar[z] = ya * ya + yb * yb - 2.0 * ya * yb * c;
            out.zbar[z] = xa * ya + xb * yb - (xa * yb + ya * xb) * c;
        }
    }
    Ok(out)
}

/// `1 + X_xy² − Y_xy²`, the quantity under the root of `α_x`.
pub fn alpha_discriminant(coeffs: &HyperbolaCoefficients, x: usize, y: usize) -> f64 {
    let (xx, yy) = (coeffs.x[x][y], coeffs.y[x][y]);
    1.0 + xx * xx - yy * yy
}

/// `α_1` and `α_2` for a triangle, stored at indices 1 and 2.
pub fn alpha_angles(coeffs: &HyperbolaCoefficients) -> Result<[f64; 4], ConditionError> {
    let mut alpha = [f64::NAN; 4];
    for (x, y) in [(1, 2), (2, 1)] {
        let disc = alpha_discriminant(coeffs, x, y);
        if disc < 0.0 {
            return Err(ConditionError::NegativeDiscriminant { x, y, value: disc });
        }
        let (xx, yy) = (coeffs.x[x][y], coeffs.y[x][y]);
        let arg = (-xx * yy + sqrt(disc)) / (1.0 + xx * xx);
        alpha[x] = acos_checked(arg).ok_or(ConditionError::NumericalInconsistency {
            what: "alpha",
            value: arg,
        })?;
    }
    Ok(alpha)
}

/// Outcome of the tetrahedron angle computation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum TetraAngles {
    Found(ConeAngles),
    /// Some discriminant is below `−strict`; values indexed by `z`.
    DiscriminantFailure {
        discriminants: [f64; 4],
    },
}

/// `β_z`, `γ_xy` and `Γ_z` for a tetrahedron.
pub fn beta_gamma_angles(
    coeffs: &HyperbolaCoefficients,
    angles: &SimplexAngles,
    tol: &Tolerances,
) -> Result<TetraAngles, ConditionError> {
    let mut discriminants = [f64::NAN; 4];
    for z in 1..4 {
        discriminants[z] = coeffs.discriminant(z, angles);
    }
    if discriminants[1..].iter().any(|&d| !(d >= -tol.strict)) {
        return Ok(TetraAngles::DiscriminantFailure { discriminants });
    }
    let mut cone = ConeAngles::empty();
    for z in 1..4 {
        let s2 = sin(angles.phi[z]) * sin(angles.phi[z]);
        let lead = coeffs.xbar[z] + s2;
        let arg = (-coeffs.zbar[z] + sqrt(discriminants[z].max(0.0))) / lead;
        cone.beta[z] = acos_checked(arg).ok_or(ConditionError::NumericalInconsistency {
            what: "beta",
            value: arg,
        })?;
        cone.theta_cap[z] = cone.beta[z];
    }
    for x in 1..4 {
        let sb = sin(cone.beta[x]);
        if !(sb > tol.tol) {
            return Err(ConditionError::DegenerateBeta { index: x });
        }
        for y in (1..4).filter(|&y| y != x) {
            let arg = (coeffs.x[x][y] * cos(cone.beta[x]) + coeffs.y[x][y]) / sb;
            cone.gamma[x][y] = acos_checked(arg).ok_or(ConditionError::NumericalInconsistency {
                what: "gamma",
                value: arg,
            })?;
        }
    }
    for z in 1..4 {
        let (x, y) = others(z);
        cone.big_gamma[z] = sin(cone.beta[x]) * sin(cone.gamma[x][y]);
    }
    Ok(TetraAngles::Found(cone))
}

/// `(l_i² − e_i²) / (2 (l_i cos Θ_i + e_i))`.
pub fn candidate_radius(
    geom: &DisplacedGeometry,
    theta_cap: f64,
    i: usize,
    tol: f64,
) -> Result<f64, ConditionError> {
    let (l, e) = (geom.l[i], geom.e[i]);
    if !(l > e) {
        return Err(ConditionError::PrerequisiteFailed { index: i });
    }
    let den = l * cos(theta_cap) + e;
    if !(den > tol) {
        return Err(ConditionError::DivisionNearZero { index: i });
    }
    Ok((l * l - e * e) / (2.0 * den))
}

/// `|v_g|` and the affine coordinates `t̄` of `v_g` on the face opposite the origin.
/// `t̄` is indexed like `I`, i.e. `tbar[k]` belongs to internal member `k + 1`.
pub fn gauge_point(
    geom: &DisplacedGeometry,
    angles: Option<&SimplexAngles>,
    cone: &ConeAngles,
    tol: f64,
) -> Result<(f64, Vec<f64>), ConditionError> {
    let l = &geom.l;
    match geom.len() {
        2 => Ok((l[1], alloc::vec![1.0])),
        3 => {
            let angles = angles.ok_or(GeometryError::DegenerateSimplex)?;
            let (a1, a2) = (cone.alpha[1], cone.alpha[2]);
            let den = l[1] * sin(a1) + l[2] * sin(a2);
            if !(den > tol) {
                return Err(ConditionError::DegenerateDenominator);
            }
            let vg = l[1] * l[2] * sin(angles.theta(1, 2)) / den;
            Ok((vg, alloc::vec![l[2] * sin(a2) / den, l[1] * sin(a1) / den]))
        }
        4 => {
            let angles = angles.ok_or(GeometryError::DegenerateSimplex)?;
            let weighted: Vec<f64> = (1..4).map(|z| angles.area[z] * cone.big_gamma[z]).collect();
            let den: f64 = weighted.iter().sum();
            if !(den > tol) {
                return Err(ConditionError::DegenerateDenominator);
            }
            let vg = 3.0 * angles.volume / den;
            Ok((vg, weighted.iter().map(|w| w / den).collect()))
        }
        n => Err(GeometryError::Unsupported(n).into()),
    }
}

/// Which inequality a [`Clause`] records. Indices are internal and printed one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClauseKind {
    /// `l_i > e_i`.
    HyperbolaReachable { i: usize },
    /// `1 + X_xy² − Y_xy² ≥ 0` (triangle).
    AlphaDiscriminant { x: usize, y: usize },
    /// `α_x < θ_xy` (triangle).
    AlphaBound { x: usize, y: usize },
    /// `α_x + α_y < π` (triangle).
    AlphaSum,
    /// `Z̄_z² ≥ (X̄_z + sin²φ_z)(Ȳ_z − sin²φ_z)` (tetrahedron).
    Discriminant { z: usize },
    /// `β_z` and `γ_xy` are well defined (tetrahedron): arccos arguments within `[−1, 1]`
    /// and `sin β_x > 0`.
    ConeAnglesDefined,
    /// `γ_zx < φ_z` (tetrahedron).
    GammaBound { z: usize, x: usize },
    /// `γ_zx + γ_zy < π` (tetrahedron).
    GammaSum { z: usize },
    /// `l_i cos Θ_i + e_i > 0`.
    RadiusDefined { i: usize },
    /// `|c_w| < |v_g|`.
    Interior,
}

impl fmt::Display for ClauseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::HyperbolaReachable { i } => write!(f, "l_{0} > e_{0}", i + 1),
            Self::AlphaDiscriminant { x, y } => {
                write!(f, "1 + X_{0}{1}^2 - Y_{0}{1}^2 >= 0", x + 1, y + 1)
            }
            Self::AlphaBound { x, y } => {
                write!(f, "alpha_{} < theta_{}{}", x + 1, x.min(y) + 1, x.max(y) + 1)
            }
            Self::AlphaSum => write!(f, "alpha_2 + alpha_3 < pi"),
            Self::Discriminant { z } => write!(
                f,
                "Zbar_{0}^2 >= (Xbar_{0} + sin^2 phi_{0})(Ybar_{0} - sin^2 phi_{0})",
                z + 1
            ),
            Self::ConeAnglesDefined => write!(f, "beta, gamma defined"),
            Self::GammaBound { z, x } => write!(f, "gamma_{0}{1} < phi_{0}", z + 1, x + 1),
            Self::GammaSum { z } => {
                let (x, y) = others(z);
                write!(f, "gamma_{0}{1} + gamma_{0}{2} < pi", z + 1, x + 1, y + 1)
            }
            Self::RadiusDefined { i } => write!(f, "l_{0} cos Theta_{0} + e_{0} > 0", i + 1),
            Self::Interior => write!(f, "|c_w| < |v_g|"),
        }
    }
}

/// One evaluated inequality; `margin` is `lhs − rhs` oriented so that positive means "holds".
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Clause {
    pub kind: ClauseKind,
    pub holds: bool,
    pub margin: f64,
    /// Within `±strict` of the boundary; counted as failed.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionReport {
    pub n: usize,
    pub holds: bool,
    pub clauses: Vec<Clause>,
    pub cw_norm: Option<f64>,
    pub vg_norm: Option<f64>,
    /// Affine coordinates of `v_g` over members `1..N`.
    pub tbar: Option<Vec<f64>>,
    pub cw: Option<BlochVector>,
    /// Largest disagreement of the radius formula across members.
    pub radius_spread: Option<f64>,
    /// Largest disagreement between the two admissible choices of `x` in `Γ_z`.
    pub big_gamma_spread: Option<f64>,
    pub simplex: Option<SimplexAngles>,
    pub cone: Option<ConeAngles>,
}

impl ConditionReport {
    fn new(n: usize) -> Self {
        Self {
            n,
            holds: false,
            clauses: Vec::new(),
            cw_norm: None,
            vg_norm: None,
            tbar: None,
            cw: None,
            radius_spread: None,
            big_gamma_spread: None,
            simplex: None,
            cone: None,
        }
    }

    /// The first failed clause, if any.
    pub fn first_failure(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.holds)
    }

    fn strict(&mut self, kind: ClauseKind, margin: f64, eps: f64) -> bool {
        let holds = margin > eps;
        self.clauses.push(Clause {
            kind,
            holds,
            margin,
            boundary: margin.abs() <= eps,
        });
        holds
    }

    fn non_strict(&mut self, kind: ClauseKind, margin: f64, eps: f64) -> bool {
        let holds = margin >= -eps;
        self.clauses.push(Clause {
            kind,
            holds,
            margin,
            boundary: margin.abs() <= eps,
        });
        holds
    }

    /// A clause that could not be evaluated at all (singular or out-of-domain quantity).
    fn undefined(&mut self, kind: ClauseKind) {
        self.clauses.push(Clause {
            kind,
            holds: false,
            margin: f64::NAN,
            boundary: true,
        });
    }

    fn stage_failed(&self) -> bool {
        self.clauses.iter().any(|c| !c.holds)
    }
}

/// Evaluates the no-null-element condition for a full-dimensional displaced simplex.
///
/// Clauses are evaluated stage by stage; evaluation stops after the first stage containing a
/// failure. Singular intermediate quantities are recorded as failed boundary clauses rather
/// than errors, so a `false` report always means "fall back to subsets".
pub fn check_condition(
    geom: &DisplacedGeometry,
    tol: &Tolerances,
) -> Result<ConditionReport, ConditionError> {
    let n = geom.len();
    if n < 2 || !geom.is_full_dimensional() {
        return Err(ConditionError::WrongDimension { dim: geom.dim, n });
    }
    let eps = tol.strict;
    let mut report = ConditionReport::new(n);
    for i in 1..n {
        report.strict(ClauseKind::HyperbolaReachable { i }, geom.l[i] - geom.e[i], eps);
    }
    if report.stage_failed() {
        return Ok(report);
    }

    let mut cone = ConeAngles::empty();
    let simplex = match n {
        2 => {
            cone.theta_cap[1] = 0.0;
            None
        }
        _ => {
            let simplex = simplex_angles(geom, tol.tol)?;
            report.simplex = Some(simplex);
            let coeffs = hyperbola_coeffs(geom, &simplex, tol.tol)?;
            let found = if n == 3 {
                triangle_cone(&mut report, &coeffs, &simplex, eps)
            } else {
                tetra_cone(&mut report, &coeffs, &simplex, tol)?
            };
            match found {
                Some(c) => cone = c,
                None => return Ok(report),
            }
            Some(simplex)
        }
    };
    report.cone = Some(cone);

    let mut radii = Vec::with_capacity(n - 1);
    for i in 1..n {
        let den = geom.l[i] * cos(cone.theta_cap[i]) + geom.e[i];
        if report.strict(ClauseKind::RadiusDefined { i }, den, tol.tol) {
            radii.push(candidate_radius(geom, cone.theta_cap[i], i, tol.tol)?);
        }
    }
    if report.stage_failed() {
        return Ok(report);
    }
    let cw_norm = radii[0];
    let spread = radii.iter().map(|r| (r - cw_norm).abs()).fold(0.0, f64::max);
    report.radius_spread = Some(spread);

    let (vg_norm, tbar) = match gauge_point(geom, simplex.as_ref(), &cone, tol.tol) {
        Ok(g) => g,
        Err(ConditionError::DegenerateDenominator) => {
            report.undefined(ClauseKind::Interior);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.cw_norm = Some(cw_norm);
    report.vg_norm = Some(vg_norm);
    report.tbar = Some(tbar.clone());
    if report.strict(ClauseKind::Interior, vg_norm - cw_norm, eps) {
        let ratio = cw_norm / vg_norm;
        report.cw = Some(
            tbar.iter()
                .zip(&geom.s[1..])
                .map(|(&t, &s)| s * (t * ratio))
                .sum(),
        );
        report.holds = true;
    }
    Ok(report)
}

fn triangle_cone(
    report: &mut ConditionReport,
    coeffs: &HyperbolaCoefficients,
    simplex: &SimplexAngles,
    eps: f64,
) -> Option<ConeAngles> {
    for (x, y) in [(1, 2), (2, 1)] {
        report.non_strict(
            ClauseKind::AlphaDiscriminant { x, y },
            alpha_discriminant(coeffs, x, y),
            eps,
        );
    }
    if report.stage_failed() {
        return None;
    }
    let alpha = match alpha_angles(coeffs) {
        Ok(a) => a,
        Err(_) => {
            report.undefined(ClauseKind::AlphaBound { x: 1, y: 2 });
            return None;
        }
    };
    let theta = simplex.theta(1, 2);
    report.strict(ClauseKind::AlphaBound { x: 1, y: 2 }, theta - alpha[1], eps);
    report.strict(ClauseKind::AlphaBound { x: 2, y: 1 }, theta - alpha[2], eps);
    report.strict(ClauseKind::AlphaSum, PI - alpha[1] - alpha[2], eps);
    if report.stage_failed() {
        return None;
    }
    let mut cone = ConeAngles::empty();
    cone.alpha = alpha;
    cone.theta_cap = alpha;
    Some(cone)
}

fn tetra_cone(
    report: &mut ConditionReport,
    coeffs: &HyperbolaCoefficients,
    simplex: &SimplexAngles,
    tol: &Tolerances,
) -> Result<Option<ConeAngles>, ConditionError> {
    let eps = tol.strict;
    for z in 1..4 {
        report.non_strict(
            ClauseKind::Discriminant { z },
            coeffs.discriminant(z, simplex),
            eps,
        );
    }
    if report.stage_failed() {
        return Ok(None);
    }
    let cone = match beta_gamma_angles(coeffs, simplex, tol) {
        Ok(TetraAngles::Found(cone)) => cone,
        Ok(TetraAngles::DiscriminantFailure { .. }) => unreachable!("discriminants checked above"),
        Err(ConditionError::DegenerateBeta { .. } | ConditionError::NumericalInconsistency { .. }) => {
            report.undefined(ClauseKind::ConeAnglesDefined);
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    for z in 1..4 {
        let (x, y) = others(z);
        let phi = simplex.phi[z];
        report.strict(ClauseKind::GammaBound { z, x }, phi - cone.gamma[z][x], eps);
        report.strict(ClauseKind::GammaBound { z, x: y }, phi - cone.gamma[z][y], eps);
        report.strict(
            ClauseKind::GammaSum { z },
            PI - cone.gamma[z][x] - cone.gamma[z][y],
            eps,
        );
    }
    if report.stage_failed() {
        return Ok(None);
    }
    let spread = (1..4)
        .map(|z| {
            let (x, y) = others(z);
            (cone.big_gamma[z] - sin(cone.beta[y]) * sin(cone.gamma[y][x])).abs()
        })
        .fold(0.0, f64::max);
    report.big_gamma_spread = Some(spread);
    Ok(Some(cone))
}
