//! Float helpers that work without `std`.

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// Slack allowed on an `arccos` argument before it is treated as a genuine domain violation.
pub(crate) const ACOS_SLACK: f64 = 1e-12;

/// `arccos` that clamps rounding excursions of at most [`ACOS_SLACK`]; `None` beyond that.
pub(crate) fn acos_checked(x: f64) -> Option<f64> {
    if !(-1.0 - ACOS_SLACK..=1.0 + ACOS_SLACK).contains(&x) {
        return None;
    }
    Some(libm::acos(x.clamp(-1.0, 1.0)))
}
