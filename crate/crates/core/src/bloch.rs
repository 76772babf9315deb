//! Qubit states, POVM elements and complementary states in Bloch coordinates.
//!
//! A 2×2 Hermitian operator `A` is written `A = (tr A / 2)(I + r·σ)`. Complex matrices only
//! appear at this module's boundary ([`from_density_matrix`], [`HermitianOperator2::to_matrix`]);
//! everything downstream is real 3-vector arithmetic.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

pub use num_complex::Complex64;

use crate::math;

/// A 2×2 complex matrix, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BlochError {
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NonHermitian(f64),
    #[error("operator trace {0} is not positive")]
    NonPositiveTrace(f64),
    #[error("weight {0} is negative or not finite")]
    InvalidWeight(f64),
    #[error("Bloch vector norm {0} exceeds 1")]
    OutsideBall(f64),
    #[error("ensemble has {0} members; 1 to 4 are supported")]
    InvalidSize(usize),
    #[error("expected {expected} POVM elements, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// A real 3-vector; used for state, measurement and complementary Bloch vectors alike.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[f64; 3]", into = "[f64; 3]"))]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const X: Self = Self::new(1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 1.0, 0.0);
    pub const Z: Self = Self::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_squared())
    }

    /// Unit vector along `self`, or `None` for a vector shorter than `eps`.
    pub fn normalized(self, eps: f64) -> Option<Self> {
        let n = self.norm();
        (n > eps).then(|| self / n)
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Angle in `[0, π]` between two nonzero vectors.
    pub fn angle(self, other: Self) -> f64 {
        math::atan2(self.cross(other).norm(), self.dot(other))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for BlochVector {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        v.to_array()
    }
}

impl Index<usize> for BlochVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("BlochVector index {i} out of range"),
        }
    }
}

impl Add for BlochVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for BlochVector {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for BlochVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for BlochVector {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Mul<f64> for BlochVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<BlochVector> for f64 {
    type Output = BlochVector;
    fn mul(self, v: BlochVector) -> BlochVector {
        v * self
    }
}

impl Div<f64> for BlochVector {
    type Output = Self;
    fn div(self, k: f64) -> Self {
        Self::new(self.x / k, self.y / k, self.z / k)
    }
}

impl Neg for BlochVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl core::iter::Sum for BlochVector {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "({:.p$}, {:.p$}, {:.p$})", self.x, self.y, self.z, p = p),
            None => write!(f, "({}, {}, {})", self.x, self.y, self.z),
        }
    }
}

/// Validates a Bloch vector of a physical operator, clamping norms in `(1, 1 + tol]` to 1.
fn checked_unit_ball(v: BlochVector, tol: f64) -> Result<BlochVector, BlochError> {
    let n = v.norm();
    if !n.is_finite() || n > 1.0 + tol {
        return Err(BlochError::OutsideBall(n));
    }
    Ok(if n > 1.0 { v / n } else { v })
}

/// One ensemble member: a prior weight `q_i` and a state `ρ_i = (I + v_i·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedState {
    pub weight: f64,
    pub bloch: BlochVector,
}

impl WeightedState {
    pub fn new(weight: f64, bloch: impl Into<BlochVector>, tol: f64) -> Result<Self, BlochError> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(BlochError::InvalidWeight(weight));
        }
        let bloch = checked_unit_ball(bloch.into(), tol)?;
        Ok(Self { weight, bloch })
    }

    /// The weighted operator `q ρ` as a Hermitian operator.
    pub fn operator(&self) -> HermitianOperator2 {
        HermitianOperator2 {
            trace: self.weight,
            bloch: self.bloch,
        }
    }
}

/// An ordered list of one to four weighted states. Weights need not sum to one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Ensemble {
    members: Vec<WeightedState>,
}

impl Ensemble {
    pub const MAX_MEMBERS: usize = 4;

    pub fn new(members: Vec<WeightedState>) -> Result<Self, BlochError> {
        if members.is_empty() || members.len() > Self::MAX_MEMBERS {
            return Err(BlochError::InvalidSize(members.len()));
        }
        Ok(Self { members })
    }

    /// Builds an ensemble from `(weight, bloch)` pairs with the default tolerance.
    pub fn from_pairs(pairs: &[(f64, [f64; 3])]) -> Result<Self, BlochError> {
        let tol = crate::Tolerances::DEFAULT.tol;
        let members = pairs
            .iter()
            .map(|&(w, v)| WeightedState::new(w, v, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(members)
    }

    pub fn members(&self) -> &[WeightedState] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.members.iter().map(|m| m.weight).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.members.iter().map(|m| m.weight).fold(0.0, f64::max)
    }

    /// The members at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, BlochError> {
        Self::new(indices.iter().map(|&i| self.members[i]).collect())
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, BlochError> {
        let tol = crate::Tolerances::DEFAULT.tol;
        let members = self
            .members
            .iter()
            .map(|m| WeightedState::new(m.weight * factor, m.bloch, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(members)
    }

    /// Members reordered so that position `k` holds the old member `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, BlochError> {
        self.subset(perm)
    }

    /// Every Bloch vector mapped through `f` (e.g. a rotation).
    pub fn map_bloch(&self, f: impl Fn(BlochVector) -> BlochVector) -> Self {
        Self {
            members: self
                .members
                .iter()
                .map(|m| WeightedState {
                    weight: m.weight,
                    bloch: f(m.bloch),
                })
                .collect(),
        }
    }
}

/// `M = p (I + u·σ)`; positive iff `p ≥ 0` and `|u| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PovmElement {
    pub p: f64,
    pub u: BlochVector,
}

impl PovmElement {
    pub const ZERO: Self = Self {
        p: 0.0,
        u: BlochVector::ZERO,
    };

    /// The single-outcome measurement `{I}`.
    pub const IDENTITY: Self = Self {
        p: 1.0,
        u: BlochVector::ZERO,
    };

    pub const fn new(p: f64, u: BlochVector) -> Self {
        Self { p, u }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.p <= tol
    }

    pub fn operator(&self) -> HermitianOperator2 {
        HermitianOperator2 {
            trace: 2.0 * self.p,
            bloch: self.u,
        }
    }
}

/// Dual variable pair `(r_i, ρ̃_i)` with `ρ̃_i = (I + w_i·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplementaryState {
    pub r: f64,
    pub w: BlochVector,
}

/// A 2×2 Hermitian operator stored as `(tr A, r_A)` with `A = (tr A / 2)(I + r_A·σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HermitianOperator2 {
    pub trace: f64,
    pub bloch: BlochVector,
}

impl HermitianOperator2 {
    /// From `tr A` and `tr[A σ] = tr A · r_A`.
    pub fn from_scaled(trace: f64, scaled: BlochVector) -> Self {
        let bloch = if trace == 0.0 {
            BlochVector::ZERO
        } else {
            scaled / trace
        };
        Self { trace, bloch }
    }

    /// `tr[A σ]`.
    pub fn scaled_bloch(&self) -> BlochVector {
        self.bloch * self.trace
    }

    /// Eigenvalues `(tr A / 2)(1 ± |r_A|)`, larger first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half = 0.5 * self.trace;
        let spread = 0.5 * self.scaled_bloch().norm();
        (half + spread, half - spread)
    }

    /// Smallest eigenvalue; the operator is PSD iff this is `≥ −tol`.
    pub fn min_eigenvalue(&self) -> f64 {
        0.5 * (self.trace - self.scaled_bloch().norm())
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    pub fn to_matrix(&self) -> Matrix2 {
        let h = 0.5 * self.trace;
        let r = self.bloch;
        [
            [
                Complex64::new(h * (1.0 + r.z), 0.0),
                Complex64::new(h * r.x, -h * r.y),
            ],
            [
                Complex64::new(h * r.x, h * r.y),
                Complex64::new(h * (1.0 - r.z), 0.0),
            ],
        ]
    }

    /// Reads `(tr A, r_A)` off an arbitrary matrix, keeping only its Hermitian part.
    pub(crate) fn from_matrix_unchecked(m: &Matrix2) -> Self {
        let trace = m[0][0].re + m[1][1].re;
        let scaled = BlochVector::new(
            (m[0][1] + m[1][0]).re,
            (m[1][0] - m[0][1]).im,
            m[0][0].re - m[1][1].re,
        );
        Self::from_scaled(trace, scaled)
    }
}

impl Sub for HermitianOperator2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_scaled(self.trace - o.trace, self.scaled_bloch() - o.scaled_bloch())
    }
}

impl Add for HermitianOperator2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_scaled(self.trace + o.trace, self.scaled_bloch() + o.scaled_bloch())
    }
}

/// Converts a 2×2 Hermitian matrix with positive trace into `(tr m, r_m)`.
pub fn from_density_matrix(m: &Matrix2, tol: f64) -> Result<HermitianOperator2, BlochError> {
    let asym = (m[0][1] - m[1][0].conj())
        .norm()
        .max(m[0][0].im.abs())
        .max(m[1][1].im.abs());
    if !(asym <= tol) {
        return Err(BlochError::NonHermitian(asym));
    }
    let op = HermitianOperator2::from_matrix_unchecked(m);
    if !(op.trace > 0.0) {
        return Err(BlochError::NonPositiveTrace(op.trace));
    }
    Ok(op)
}

/// Residuals of the POVM constraints `p_i ≥ 0`, `Σ p_i = 1`, `Σ p_i u_i = 0`, `|u_i| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PovmReport {
    pub ok: bool,
    /// `max(0, −min p_i)`.
    pub negative_weight: f64,
    /// `Σ p_i − 1`.
    pub completeness_weight: f64,
    /// `Σ p_i u_i`.
    pub completeness_vector: BlochVector,
    /// `max(0, max |u_i| − 1)`.
    pub direction_excess: f64,
}

impl PovmReport {
    /// Largest constraint violation.
    pub fn max_violation(&self) -> f64 {
        self.negative_weight
            .max(self.completeness_weight.abs())
            .max(self.completeness_vector.norm())
            .max(self.direction_excess)
    }
}

pub fn validate_povm(elements: &[PovmElement], tol: f64) -> PovmReport {
    let negative_weight = elements.iter().map(|e| -e.p).fold(0.0, f64::max);
    let completeness_weight = elements.iter().map(|e| e.p).sum::<f64>() - 1.0;
    let completeness_vector = elements.iter().map(|e| e.u * e.p).sum::<BlochVector>();
    let direction_excess = elements.iter().map(|e| e.u.norm() - 1.0).fold(0.0, f64::max);
    let ok = negative_weight <= tol
        && completeness_weight.abs() <= tol
        && completeness_vector.norm() <= tol
        && direction_excess <= tol;
    PovmReport {
        ok,
        negative_weight,
        completeness_weight,
        completeness_vector,
        direction_excess,
    }
}

/// `Σ_i q_i tr[ρ_i M_i] = Σ_i q_i p_i (1 + u_i·v_i)`.
pub fn success_probability(ensemble: &Ensemble, povm: &[PovmElement]) -> Result<f64, BlochError> {
    if povm.len() != ensemble.len() {
        return Err(BlochError::LengthMismatch {
            expected: ensemble.len(),
            got: povm.len(),
        });
    }
    Ok(ensemble
        .members()
        .iter()
        .zip(povm)
        .map(|(m, e)| m.weight * e.p * (1.0 + e.u.dot(m.bloch)))
        .sum())
}
