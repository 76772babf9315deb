//! End-to-end acceptance checks; prints one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use qubit_md::families::{asymmetric_four, regular_tetrahedron, ASYMMETRIC_FOUR_H_MAX};
use qubit_md::oracle::{ball_point, perturb_povm, povm_distance, random_ensemble, DEFAULT_MAX_ITER};
use qubit_md::{
    dual_socp, helstrom_two, solve, success_probability, BlochVector, Branch, Ensemble, Solution, Tolerances,
    WeightedState,
};
use qubit_md_cli::sweep;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn dual(ens: &Ensemble) -> f64 {
    dual_socp(ens, 1e-12, DEFAULT_MAX_ITER)
        .expect("dual converges")
        .value
}

fn spread_ensemble(n: usize, rng: &mut ChaCha8Rng) -> Ensemble {
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

fn symmetric_example() -> Outcome {
    let ens = asymmetric_four(0.0).unwrap();
    let start = Instant::now();
    let s = solve(&ens).unwrap();
    let elapsed = start.elapsed();
    let expected = 0.25 + 1.0 / (4.0 * std::f64::consts::SQRT_2);
    let p_err = (s.p_guess - expected).abs();
    let elem_err = s.povm.iter().map(|e| (e.p - 0.25).abs()).fold(0.0, f64::max);
    outcome(
        p_err <= 1e-9 && s.nonzero_count() == 4 && elem_err <= 1e-9 && elapsed < Duration::from_millis(10),
        format!(
            "p_guess {:.12} (err {p_err:.1e}), max |p_i - 1/4| {elem_err:.1e}, {elapsed:?}",
            s.p_guess
        ),
    )
}

fn sweep_reproduction() -> Outcome {
    let start = Instant::now();
    let result = sweep::run(0.0, ASYMMETRIC_FOUR_H_MAX, 1000, &Tolerances::DEFAULT).unwrap();
    let mut csv = Vec::new();
    sweep::write_csv(&result, &mut csv).unwrap();
    let elapsed = start.elapsed();
    let rows = csv::Reader::from_reader(csv.as_slice())
        .records()
        .map(|r| r.unwrap())
        .collect::<Vec<_>>();
    let ordered = rows
        .windows(2)
        .all(|w| w[0][0].parse::<f64>().unwrap() < w[1][0].parse::<f64>().unwrap());
    let max_err = result.max_abs_error();
    let counts_monotone = result
        .rows
        .windows(2)
        .all(|w| w[0].nonzero_count >= w[1].nonzero_count);
    let h_star = result.transition.unwrap_or(f64::NAN);
    outcome(
        rows.len() == 1001
            && ordered
            && max_err <= 1e-8
            && counts_monotone
            && (0.143..=0.145).contains(&h_star)
            && elapsed < Duration::from_secs(2),
        format!(
            "{} rows, max error {max_err:.1e}, 4 -> 3 at h = {h_star:.6}, {elapsed:?}",
            rows.len()
        ),
    )
}

fn regular_tetrahedra() -> Outcome {
    let errors: Vec<f64> = [0.2, 0.5, 1.0]
        .iter()
        .map(|&f| (solve(&regular_tetrahedron(f).unwrap()).unwrap().p_guess - (0.25 + f / 4.0)).abs())
        .collect();
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("f in {{0.2, 0.5, 1.0}}, max error {worst:.1e}"),
    )
}

/// Criterion 4; also returns the interior-branch instances for criterion 5.
fn oracle_equivalence() -> (Outcome, Vec<(Ensemble, Solution)>) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut worst_helstrom, mut failures) = (0.0f64, 0.0f64, 0);
    let mut interior = Vec::new();
    for n in 2..=4 {
        for _ in 0..1000 {
            let ens = random_ensemble(n, &mut rng);
            let Ok(s) = solve(&ens) else {
                failures += 1;
                continue;
            };
            worst = worst.max((s.p_guess - dual(&ens)).abs());
            if n == 2 {
                worst_helstrom = worst_helstrom.max((s.p_guess - helstrom_two(&ens).unwrap()).abs());
            }
            if matches!(s.branch, Branch::Interior(_)) {
                interior.push((ens, s));
            }
        }
    }
    let elapsed = start.elapsed();
    (
        outcome(
            failures == 0 && worst <= 1e-6 && worst_helstrom <= 1e-9 && elapsed < Duration::from_secs(30),
            format!(
                "3000 instances, max |solve - dual| {worst:.1e}, max |solve - two-state| {worst_helstrom:.1e}, \
                 {failures} solver errors, {elapsed:?}"
            ),
        ),
        interior,
    )
}

fn certificates(interior: &[(Ensemble, Solution)]) -> Outcome {
    let worst = interior
        .iter()
        .map(|(_, s)| s.certificate.max())
        .fold(0.0, f64::max);
    let worst_psd = interior
        .iter()
        .map(|(ens, s)| {
            ens.members()
                .iter()
                .map(|m| -(s.dual_operator - m.operator()).min_eigenvalue())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    outcome(
        !interior.is_empty() && worst <= 1e-8 && worst_psd <= 1e-9,
        format!(
            "{} interior instances, max KKT residual {worst:.1e}, max PSD violation {worst_psd:.1e}",
            interior.len()
        ),
    )
}

fn rotate(v: BlochVector, axis: BlochVector, angle: f64) -> BlochVector {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let instances: Vec<Ensemble> = (0..100)
        .map(|k| {
            if k % 2 == 0 {
                random_ensemble(2 + k % 3, &mut rng)
            } else {
                spread_ensemble(2 + k % 3, &mut rng)
            }
        })
        .collect();
    let (mut rot, mut perm, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for ens in &instances {
        let base = solve(ens).unwrap();

        let axis = loop {
            if let Some(a) = ball_point(&mut rng).normalized(1e-3) {
                break a;
            }
        };
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let rotated = solve(&ens.map_bloch(|v| rotate(v, axis, angle))).unwrap();
        rot = rot.max((base.p_guess - rotated.p_guess).abs());

        let mut order: Vec<usize> = (0..ens.len()).collect();
        order.shuffle(&mut rng);
        let permuted = solve(&ens.permuted(&order).unwrap()).unwrap();
        perm = perm.max((base.p_guess - permuted.p_guess).abs());
        for (k, &i) in order.iter().enumerate() {
            let (a, b) = (base.povm[i], permuted.povm[k]);
            perm = perm.max((a.p - b.p).abs()).max((a.u - b.u).norm());
        }

        let lambda = 0.05 + 3.0 * rng.random::<f64>();
        let scaled = solve(&ens.scaled(lambda).unwrap()).unwrap();
        scale = scale.max((lambda * base.p_guess - scaled.p_guess).abs());
        for (a, b) in base.povm.iter().zip(&scaled.povm) {
            scale = scale.max((a.p - b.p).abs()).max((a.u - b.u).norm());
        }
    }
    outcome(
        rot <= 1e-8 && perm <= 1e-12 && scale <= 1e-9,
        format!("100 instances: rotation {rot:.1e}, permutation {perm:.1e}, scaling {scale:.1e}"),
    )
}

fn degeneracy() -> Outcome {
    let pairs: Vec<Vec<(f64, [f64; 3])>> = vec![
        vec![(0.7, [0.0, 0.0, 1.0]), (0.3, [0.0, 0.0, 1.0])],
        vec![(0.5, [0.2, 0.1, 0.0]), (0.5, [0.2, 0.1, 0.0])],
        vec![
            (0.4, [0.1, 0.0, 0.3]),
            (0.3, [0.1, 0.0, 0.3]),
            (0.3, [0.0, 0.5, 0.0]),
        ],
        vec![(0.25, [0.3, -0.3, 0.1]); 4],
        // collinear displacements
        vec![
            (0.4, [0.0, 0.0, 0.5]),
            (0.3, [0.0, 0.0, -0.5]),
            (0.3, [0.0, 0.0, 0.1]),
        ],
        vec![
            (0.25, [0.9, 0.0, 0.0]),
            (0.25, [-0.9, 0.0, 0.0]),
            (0.25, [0.3, 0.0, 0.0]),
            (0.25, [-0.3, 0.0, 0.0]),
        ],
        // coplanar four states
        vec![
            (0.25, [1.0, 0.0, 0.0]),
            (0.25, [0.0, 1.0, 0.0]),
            (0.25, [-1.0, 0.0, 0.0]),
            (0.25, [0.0, -1.0, 0.0]),
        ],
        // l_2 = e_2
        vec![(0.6, [0.0, 0.0, 0.0]), (0.4, [0.0, 0.0, 0.5])],
        vec![
            (0.5, [0.0, 0.0, 0.2]),
            (0.25, [0.0, 0.0, 0.0]),
            (0.25, [0.3, 0.3, 0.3]),
        ],
        vec![
            (0.4, [0.0, 0.0, 0.0]),
            (0.2, [0.0, 0.0, 1.0]),
            (0.2, [0.5, 0.5, 0.0]),
            (0.2, [-0.6, 0.0, -0.8]),
        ],
    ];
    let (mut worst, mut errors, mut subset) = (0.0f64, 0, 0);
    for p in &pairs {
        let ens = Ensemble::from_pairs(p).unwrap();
        match solve(&ens) {
            Ok(s) => {
                worst = worst.max((s.p_guess - dual(&ens)).abs());
                subset += matches!(s.branch, Branch::Subset { .. }) as usize;
            }
            Err(_) => errors += 1,
        }
    }
    outcome(
        errors == 0 && subset == pairs.len() && worst <= 1e-6,
        format!(
            "{} instances, {subset} via subset recursion, {errors} errors, max |solve - dual| {worst:.1e}",
            pairs.len()
        ),
    )
}

fn uniqueness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases = Vec::new();
    while cases.len() < 50 {
        let n = 2 + cases.len() % 3;
        let ens = spread_ensemble(n, &mut rng);
        let s = solve(&ens).unwrap();
        if s.branch == Branch::Interior(n) {
            cases.push((ens, s));
        }
    }
    let (mut violations, mut closest) = (0, f64::INFINITY);
    for (ens, s) in &cases {
        let mut accepted = 0;
        while accepted < 1000 {
            let scale = 0.01 + 0.2 * rng.random::<f64>();
            let Some(povm) = perturb_povm(&s.povm, scale, &mut rng) else {
                continue;
            };
            if povm_distance(&povm, &s.povm) < 1e-2 {
                continue;
            }
            accepted += 1;
            let gap = s.p_guess - success_probability(ens, &povm).unwrap();
            closest = closest.min(gap);
            violations += (gap <= 0.0) as usize;
        }
    }
    outcome(
        violations == 0,
        format!(
            "50 interior instances x 1000 perturbations, {violations} not worse, smallest loss {closest:.1e}"
        ),
    )
}

fn main() {
    let (oracle, interior) = oracle_equivalence();
    let results = [
        ("1 symmetric example", symmetric_example()),
        ("2 h sweep against closed form", sweep_reproduction()),
        ("3 regular tetrahedra", regular_tetrahedra()),
        ("4 oracle equivalence", oracle),
        ("5 certificates", certificates(&interior)),
        ("6 invariance", invariance()),
        ("7 degeneracy", degeneracy()),
        ("8 uniqueness probe", uniqueness()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        println!(
            "criterion {name}: {} ({})",
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
        failed += !r.pass as usize;
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
