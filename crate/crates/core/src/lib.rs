//! Minimum-error discrimination of qubit ensembles.
//!
//! Given up to four qubit states `ρ_i` with prior weights `q_i`, this crate computes the
//! guessing probability
//!
//! ```text
//! p_guess = max_{M} Σ_i q_i tr[ρ_i M_i]
//! ```
//!
//! together with the optimal POVM and a set of complementary states certifying optimality.
//! The solver works entirely in Bloch coordinates:
//!
//! - [`geometry`] builds the displaced simplex `s_i = q_i v_i − q_1 v_1` and its angles.
//! - [`conditions`] evaluates the closed-form test deciding whether every optimal POVM element
//!   is nonzero, and locates the optimal dual point when it is.
//! - [`solver`] applies that test and otherwise recurses over subsets of the ensemble.
//! - [`families`] builds parameterised test ensembles with known optima.
//! - [`oracle`] holds independent checks: a numerical solver for the dual problem, the
//!   two-state trace-norm formula, and a random primal sampler.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is disabled.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]
// `!(x > y)` is used deliberately so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bloch;
pub mod conditions;
pub mod families;
pub mod geometry;
mod math;
pub mod oracle;
pub mod solver;
mod tolerance;

#[cfg(test)]
mod fixtures;

pub use bloch::{
    from_density_matrix, success_probability, validate_povm, BlochError, BlochVector, ComplementaryState,
    Ensemble, HermitianOperator2, PovmElement, PovmReport, WeightedState,
};
pub use conditions::{check_condition, Clause, ClauseKind, ConditionError, ConditionReport};
pub use geometry::{
    barycentric, displaced_geometry, simplex_angles, DisplacedGeometry, GeometryError, SimplexAngles,
};
pub use oracle::{dual_socp, helstrom_two, primal_sampler, DualPoint, OracleError, SampleReport};
pub use solver::{kkt_certificate, solve, solve_with, Branch, KktResiduals, Solution, SolveError};
pub use tolerance::Tolerances;
