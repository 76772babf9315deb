//! Independent checks that share no code path with the closed-form solver.
//!
//! [`dual_socp`] minimises the dual objective `max_i (q_i + |m − q_i v_i|)` over `m ∈ R³`
//! numerically. [`helstrom_two`] is the trace-norm formula for two states and
//! [`primal_sampler`] evaluates random POVMs, whose success probabilities can never exceed
//! the optimum.

use alloc::vec::Vec;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::{
    success_probability, BlochVector, Ensemble, HermitianOperator2, Matrix2, PovmElement, WeightedState,
};
use crate::math::{ln, sqrt};

pub const DEFAULT_TOL_OPT: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    /// The iteration budget ran out; the best point found is attached.
    #[error("no convergence within the iteration budget (gap estimate {:.3e})", .0.gap_estimate)]
    MaxIterationsExceeded(DualPoint),
    #[error("expected {expected} states, got {got}")]
    WrongN { expected: usize, got: usize },
}

/// A dual point `m = tr[K σ]` with `value = max_i (q_i + |m − q_i v_i|)`, an upper bound on
/// the guessing probability within `gap_estimate` of the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualPoint {
    pub m: BlochVector,
    pub value: f64,
    pub iterations: usize,
    pub gap_estimate: f64,
}

/// Dual objective at `m`.
pub fn dual_value(ensemble: &Ensemble, m: BlochVector) -> f64 {
    ensemble
        .members()
        .iter()
        .map(|s| s.weight + m.distance(s.bloch * s.weight))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Starting point `Σ q_i² v_i / Σ q_i`.
pub fn default_start(ensemble: &Ensemble) -> BlochVector {
    let total = ensemble.weight_sum();
    if total <= 0.0 {
        return BlochVector::ZERO;
    }
    ensemble
        .members()
        .iter()
        .map(|s| s.bloch * (s.weight * s.weight))
        .sum::<BlochVector>()
        / total
}

pub fn dual_socp(ensemble: &Ensemble, tol_opt: f64, max_iter: usize) -> Result<DualPoint, OracleError> {
    dual_socp_from(ensemble, default_start(ensemble), tol_opt, max_iter)
}

/// Log-barrier interior-point method on `(m, T)`:
/// minimise `T` subject to `T − q_i ≥ |m − q_i v_i|`, barrier `−Σ log((T − q_i)² − |m − q_i v_i|²)`.
/// Each cone contributes 2 to the barrier parameter, so the gap after centring at `t` is
/// at most `2N/t`.
pub fn dual_socp_from(
    ensemble: &Ensemble,
    start: BlochVector,
    tol_opt: f64,
    max_iter: usize,
) -> Result<DualPoint, OracleError> {
    let members = ensemble.members();
    let nu = 2.0 * members.len() as f64;
    let scale = ensemble.weight_sum().max(ensemble.max_weight()).max(1e-300);
    let centers: Vec<(f64, BlochVector)> = members.iter().map(|s| (s.weight, s.bloch * s.weight)).collect();

    let mut x = Vector4::new(start.x, start.y, start.z, dual_value(ensemble, start) + scale);
    let mut t = nu / scale;
    let mut iterations = 0;
    let mut best = point(ensemble, &x, nu / t, 0);

    loop {
        // centring
        for _ in 0..100 {
            if iterations >= max_iter {
                best.iterations = iterations;
                return Err(OracleError::MaxIterationsExceeded(best));
            }
            iterations += 1;
            let (grad, hess) = barrier_derivatives(&centers, &x, t);
            let Some(chol) = hess.cholesky() else { break };
            let dx = -chol.solve(&grad);
            let decrement = -grad.dot(&dx);
            if decrement * 0.5 <= 1e-12 {
                break;
            }
            let f0 = barrier_value(&centers, &x, t);
            let mut step = 1.0;
            let mut moved = false;
            while step > 1e-20 {
                let trial = x + dx * step;
                let f1 = barrier_value(&centers, &trial, t);
                if f1.is_finite() && f1 <= f0 - 0.25 * step * decrement {
                    x = trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let candidate = point(ensemble, &x, nu / t, iterations);
        if candidate.value <= best.value {
            best = candidate;
        }
        best.iterations = iterations;
        best.gap_estimate = nu / t;
        if nu / t <= tol_opt * scale {
            return Ok(best);
        }
        t *= 8.0;
    }
}

fn point(ensemble: &Ensemble, x: &Vector4<f64>, gap: f64, iterations: usize) -> DualPoint {
    let m = BlochVector::new(x[0], x[1], x[2]);
    DualPoint {
        m,
        value: dual_value(ensemble, m),
        iterations,
        gap_estimate: gap,
    }
}

fn slacks(center: &(f64, BlochVector), x: &Vector4<f64>) -> (f64, BlochVector, f64) {
    let (q, a) = *center;
    let d = BlochVector::new(x[0], x[1], x[2]) - a;
    let h = x[3] - q;
    (h, d, h * h - d.norm_squared())
}

fn barrier_value(centers: &[(f64, BlochVector)], x: &Vector4<f64>, t: f64) -> f64 {
    let mut value = t * x[3];
    for c in centers {
        let (h, _, g) = slacks(c, x);
        if h <= 0.0 || g <= 0.0 {
            return f64::INFINITY;
        }
        value -= ln(g);
    }
    value
}

fn barrier_derivatives(
    centers: &[(f64, BlochVector)],
    x: &Vector4<f64>,
    t: f64,
) -> (Vector4<f64>, Matrix4<f64>) {
    let mut grad = Vector4::new(0.0, 0.0, 0.0, t);
    let mut hess = Matrix4::zeros();
    for c in centers {
        let (h, d, g) = slacks(c, x);
        let dg = Vector4::new(-2.0 * d.x, -2.0 * d.y, -2.0 * d.z, 2.0 * h);
        grad -= dg / g;
        hess += dg * dg.transpose() / (g * g);
        let curvature = Matrix4::from_diagonal(&Vector4::new(-2.0, -2.0, -2.0, 2.0));
        hess -= curvature / g;
    }
    (grad, hess)
}

/// `½ (q_1 + q_2 + ‖q_1 ρ_1 − q_2 ρ_2‖_1)`.
pub fn helstrom_two(ensemble: &Ensemble) -> Result<f64, OracleError> {
    let [a, b] = ensemble.members() else {
        return Err(OracleError::WrongN {
            expected: 2,
            got: ensemble.len(),
        });
    };
    let e = a.weight - b.weight;
    let l = (a.bloch * a.weight - b.bloch * b.weight).norm();
    Ok(0.5 * (a.weight + b.weight + e.abs().max(l)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    /// Largest success probability among the sampled POVMs.
    pub best: f64,
    /// `max(0, best − p_guess)`; positive values contradict optimality of `p_guess`.
    pub violation: f64,
    pub trials: usize,
}

/// Evaluates `trials` random POVMs `M_i = S^{-1/2} A_i S^{-1/2}` with `S = Σ A_i` and random
/// positive `A_i`.
pub fn primal_sampler(ensemble: &Ensemble, p_guess: f64, trials: usize, seed: u64) -> SampleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials {
        let raw: Vec<HermitianOperator2> = (0..ensemble.len())
            .map(|_| PovmElement::new(rng.random::<f64>(), ball_point(&mut rng)).operator())
            .collect();
        if let Some(povm) = normalize_povm(&raw) {
            if let Ok(p) = success_probability(ensemble, &povm) {
                best = best.max(p);
            }
        }
    }
    SampleReport {
        best,
        violation: (best - p_guess).max(0.0),
        trials,
    }
}

/// Rescales positive operators by `S^{-1/2}` on both sides so that they sum to the identity.
/// `None` when `S = Σ A_i` is singular.
pub fn normalize_povm(raw: &[HermitianOperator2]) -> Option<Vec<PovmElement>> {
    let total = raw
        .iter()
        .copied()
        .fold(HermitianOperator2::from_scaled(0.0, BlochVector::ZERO), |a, b| {
            a + b
        });
    let (hi, lo) = total.eigenvalues();
    if lo <= 1e-12 * hi.max(1e-300) {
        return None;
    }
    // S^{-1/2} = α I + β n·σ with eigenvalues hi^{-1/2}, lo^{-1/2}
    let (ih, il) = (1.0 / sqrt(hi), 1.0 / sqrt(lo));
    let n = total.scaled_bloch().normalized(1e-300).unwrap_or(BlochVector::Z);
    let root = HermitianOperator2::from_scaled(ih + il, n * (ih - il)).to_matrix();
    Some(
        raw.iter()
            .map(|a| {
                let m = HermitianOperator2::from_matrix_unchecked(&mul(&mul(&root, &a.to_matrix()), &root));
                PovmElement::new(0.5 * m.trace, m.bloch)
            })
            .collect(),
    )
}

fn mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// A random POVM near `povm`: each element is moved by at most `scale` in `(p, p·u)`,
/// projected back to a positive operator, and the set is renormalised.
pub fn perturb_povm<R: Rng + ?Sized>(
    povm: &[PovmElement],
    scale: f64,
    rng: &mut R,
) -> Option<Vec<PovmElement>> {
    let raw: Vec<HermitianOperator2> = povm
        .iter()
        .map(|e| {
            let p = (e.p + scale * (2.0 * rng.random::<f64>() - 1.0)).max(0.0);
            let mut scaled = e.u * e.p + ball_point(rng) * scale;
            if scaled.norm() > p {
                scaled = scaled * (p / scaled.norm());
            }
            HermitianOperator2::from_scaled(2.0 * p, scaled * 2.0)
        })
        .collect();
    normalize_povm(&raw)
}

/// Largest trace distance `½‖M_i − N_i‖_1` between corresponding elements.
pub fn povm_distance(a: &[PovmElement], b: &[PovmElement]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x.operator() - y.operator();
            let (hi, lo) = d.eigenvalues();
            0.5 * (hi.abs() + lo.abs())
        })
        .fold(0.0, f64::max)
}

/// Uniform point in the unit ball.
pub fn ball_point<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    loop {
        let v = BlochVector::new(
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        );
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

/// `n` states with flat-Dirichlet weights and Bloch vectors uniform in the ball.
pub fn random_ensemble<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Ensemble {
    let raw: Vec<f64> = (0..n).map(|_| -ln(1.0 - rng.random::<f64>())).collect();
    let total: f64 = raw.iter().sum();
    let members = raw
        .iter()
        .map(|w| WeightedState {
            weight: w / total,
            bloch: ball_point(rng),
        })
        .collect();
    Ensemble::new(members).expect("valid random ensemble")
}
