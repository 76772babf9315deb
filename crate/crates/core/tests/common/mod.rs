#![allow(dead_code)]

use qubit_md::oracle::ball_point;
use qubit_md::{solve, BlochVector, Branch, Ensemble, Solution, WeightedState};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Near-uniform priors and near-pure states, where every optimal element tends to be nonzero.
pub fn spread_ensemble(n: usize, rng: &mut ChaCha8Rng) -> Ensemble {
    let raw: Vec<f64> = (0..n).map(|_| 1.0 + 0.3 * (rng.random::<f64>() - 0.5)).collect();
    let total: f64 = raw.iter().sum();
    let members = raw
        .iter()
        .map(|w| {
            let dir = ball_point(rng).normalized(1e-9).unwrap_or(BlochVector::Z);
            WeightedState {
                weight: w / total,
                bloch: dir * (0.6 + 0.4 * rng.random::<f64>()),
            }
        })
        .collect();
    Ensemble::new(members).unwrap()
}

/// `count` ensembles of `n` states whose solution takes the all-nonzero branch.
pub fn interior_instances(n: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<(Ensemble, Solution)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let ens = spread_ensemble(n, rng);
        let s = solve(&ens).unwrap();
        if s.branch == Branch::Interior(n) {
            out.push((ens, s));
        }
    }
    out
}

/// Rotation by `angle` about the unit vector `axis` (Rodrigues).
pub fn rotate(v: BlochVector, axis: BlochVector, angle: f64) -> BlochVector {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}

pub fn random_axis(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        if let Some(a) = ball_point(rng).normalized(1e-3) {
            return a;
        }
    }
}
