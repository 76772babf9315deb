/// Numerical thresholds shared by every stage of the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Tolerances {
    /// PSD, completeness and Bloch-norm checks.
    pub tol: f64,
    /// Relative singular-value threshold for the affine dimension.
    pub rank: f64,
    /// Margin for the strict inequalities of the optimality test.
    pub strict: f64,
    /// Maximum KKT residual accepted from the closed-form branch.
    pub cert: f64,
    /// Agreement required between the two closed-form routes for four states.
    pub cross: f64,
}

impl Tolerances {
    pub const DEFAULT: Self = Self {
        tol: 1e-9,
        rank: 1e-8,
        strict: 1e-10,
        cert: 1e-8,
        cross: 1e-7,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
