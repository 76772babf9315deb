//! Piecewise closed form of the guessing probability for [`qubit_md::families::asymmetric_four`].
//!
//! Used only to generate expected values; it shares no code with the solver.

/// The four-element branch, valid below the transition `h*`.
pub fn four_element_branch(h: f64) -> f64 {
    let h2 = h * h;
    let h3 = h2 * h;
    let h4 = h3 * h;
    let h5 = h4 * h;
    let h6 = h5 * h;
    let h7 = h6 * h;
    let h8 = h7 * h;
    let numerator = 1.0 - 4.0 * h2 + 2.0 * h3 + 12.0 * h4 + 4.0 * h5 - h6 + 2.0 * h7 + 2.0 * h8;
    let denominator = 4.0 * h * (2.0 - h - 10.0 * h2 - 2.0 * h3 + 2.0 * h4 - h5 - 2.0 * h6)
        + 4.0 * (1.0 - h2) * (2.0 - 10.0 * h2 + 5.0 * h4 - h8).sqrt();
    0.25 + h / 4.0 + numerator / denominator
}

/// The three-element branch, valid from the transition `h*` up to `√2 − 1`.
pub fn three_element_branch(h: f64) -> f64 {
    let h2 = h * h;
    let h3 = h2 * h;
    let h4 = h3 * h;
    let h5 = h4 * h;
    let h6 = h5 * h;
    let numerator = 9.0 + 18.0 * h + h2 - 8.0 * h3 + 13.0 * h4 + 6.0 * h5 + h6;
    let denominator = 8.0 * h * (7.0 + 10.0 * h - 6.0 * h2 - 2.0 * h3 - h4)
        + 8.0 * (1.0 + h) * ((1.0 + 2.0 * h) * (9.0 - h4) * (5.0 - 2.0 * h + h2)).sqrt();
    0.25 + h / 4.0 + numerator / denominator
}

/// `four_element_branch` below `h_star`, `three_element_branch` from it on.
pub fn piecewise(h: f64, h_star: f64) -> f64 {
    if h < h_star {
        four_element_branch(h)
    } else {
        three_element_branch(h)
    }
}
