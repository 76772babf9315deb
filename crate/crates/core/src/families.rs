//! Parameterised ensembles with known optima.

use crate::bloch::{BlochError, Ensemble};
use crate::math::sqrt;

/// Largest `h` accepted by [`asymmetric_four`]; beyond it the second state leaves the ball.
pub const ASYMMETRIC_FOUR_H_MAX: f64 = core::f64::consts::SQRT_2 - 1.0;

/// Four mixed states with priors `((1+h)/4, 1/4, 1/4, (1−h)/4)`, `0 ≤ h ≤ √2 − 1`.
///
/// At `h = 0` the Bloch vectors form a symmetric tetrahedron with circumradius `1/√2`;
/// for small `h` every optimal element is nonzero, above a transition near `h ≈ 0.144`
/// the fourth element vanishes.
pub fn asymmetric_four(h: f64) -> Result<Ensemble, BlochError> {
    Ensemble::from_pairs(&[
        ((1.0 + h) / 4.0, [0.5, 0.0, -0.5]),
        (0.25, [-(1.0 + h) / 2.0, 0.0, -(1.0 + h) / 2.0]),
        (0.25, [0.0, (1.0 - h) / 2.0, (1.0 - h) / 2.0]),
        ((1.0 - h) / 4.0, [0.0, -0.5, 0.5]),
    ])
}

/// Four equiprobable states on a regular tetrahedron of radius `f`; `p_guess = (1 + f)/4`.
pub fn regular_tetrahedron(f: f64) -> Result<Ensemble, BlochError> {
    let k = f / sqrt(3.0);
    Ensemble::from_pairs(&[
        (0.25, [k, k, k]),
        (0.25, [k, -k, -k]),
        (0.25, [-k, k, -k]),
        (0.25, [-k, -k, k]),
    ])
}
