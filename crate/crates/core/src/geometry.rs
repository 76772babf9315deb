//! The displaced simplex `{s_i}` and its metric data.
//!
//! Members are relabeled internally so that index 0 carries the largest weight; then
//! `e_i = q_0 − q_i ≥ 0`, `s_i = q_i v_i − q_0 v_0` (so `s_0 = 0`) and `l_i = |s_i|`.
//! Everything in [`crate::conditions`] is phrased in terms of these quantities.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::bloch::{BlochVector, Ensemble};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("simplex is degenerate")]
    DegenerateSimplex,
    #[error("angles are only defined for three or four members, got {0}")]
    Unsupported(usize),
}

/// Absolute floor (relative to the largest weight) below which singular values count as zero.
const ABSOLUTE_RANK_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DisplacedGeometry {
    /// `order[k]` is the original index of internal member `k`.
    pub order: Vec<usize>,
    /// Weights in internal order; `weights[0]` is maximal.
    pub weights: Vec<f64>,
    /// Bloch vectors in internal order.
    pub states: Vec<BlochVector>,
    pub e: Vec<f64>,
    pub s: Vec<BlochVector>,
    pub l: Vec<f64>,
    /// Affine dimension of `{s_i}`.
    pub dim: usize,
}

impl DisplacedGeometry {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Whether `{s_i}` spans a full `(N−1)`-simplex.
    pub fn is_full_dimensional(&self) -> bool {
        self.dim + 1 == self.len()
    }
}

/// Relabels the ensemble (largest weight first, ties to the lowest index) and computes
/// `e`, `s`, `l` and the affine dimension at relative singular-value threshold `tol_rank`.
pub fn displaced_geometry(ensemble: &Ensemble, tol_rank: f64) -> DisplacedGeometry {
    let members = ensemble.members();
    let mut lead = 0;
    for (i, m) in members.iter().enumerate() {
        if m.weight > members[lead].weight {
            lead = i;
        }
    }
    let order: Vec<usize> = core::iter::once(lead)
        .chain((0..members.len()).filter(|&i| i != lead))
        .collect();
    let weights: Vec<f64> = order.iter().map(|&i| members[i].weight).collect();
    let states: Vec<BlochVector> = order.iter().map(|&i| members[i].bloch).collect();

    let q0 = weights[0];
    let anchor = states[0] * q0;
    let e: Vec<f64> = weights.iter().map(|&q| q0 - q).collect();
    let s: Vec<BlochVector> = weights
        .iter()
        .zip(&states)
        .enumerate()
        .map(|(k, (&q, &v))| if k == 0 { BlochVector::ZERO } else { v * q - anchor })
        .collect();
    let l = s.iter().map(|v| v.norm()).collect();
    let dim = affine_rank(&s[1..], tol_rank, ABSOLUTE_RANK_FLOOR * q0);

    DisplacedGeometry {
        order,
        weights,
        states,
        e,
        s,
        l,
        dim,
    }
}

/// Numerical rank of the 3×k matrix with the given columns.
fn affine_rank(columns: &[BlochVector], rel: f64, abs_floor: f64) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(3, columns.len(), |r, c| columns[c][r]);
    let sv = m.singular_values();
    let largest = sv.max();
    if !(largest > abs_floor) {
        return 0;
    }
    sv.iter()
        .filter(|&&x| x >= rel * largest && x > abs_floor)
        .count()
}

/// Angles, face areas and volume of the displaced triangle or tetrahedron.
///
/// Indices refer to internal members; vertex 0 sits at the origin. Entries not defined for
/// the simplex size are `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimplexAngles {
    pub n: usize,
    /// `theta[x][y]`: angle at the origin between `s_x` and `s_y`.
    pub theta: [[f64; 4]; 4],
    /// `phi[z]`: dihedral angle along the edge `{0, s_z}` (tetrahedron only).
    pub phi: [f64; 4],
    /// `area[z]`: area of the face `{0, s_x, s_y}` with `{x, y}` the other two vertices
    /// (tetrahedron); for a triangle `area[0]` is its area.
    pub area: [f64; 4],
    /// Tetrahedron volume; 0 for a triangle.
    pub volume: f64,
}

impl SimplexAngles {
    pub fn theta(&self, x: usize, y: usize) -> f64 {
        self.theta[x][y]
    }
}

/// The two members of `{1, 2, 3}` other than `z`, ascending.
pub(crate) fn others(z: usize) -> (usize, usize) {
    match z {
        1 => (2, 3),
        2 => (1, 3),
        3 => (1, 2),
        _ => panic!("index {z} is not a tetrahedron face index"),
    }
}

pub fn simplex_angles(geom: &DisplacedGeometry, tol: f64) -> Result<SimplexAngles, GeometryError> {
    let n = geom.len();
    if !(3..=4).contains(&n) {
        return Err(GeometryError::Unsupported(n));
    }
    if !geom.is_full_dimensional() || geom.l[1..].iter().any(|&l| l <= tol) {
        return Err(GeometryError::DegenerateSimplex);
    }
    let s = &geom.s;
    let mut out = SimplexAngles {
        n,
        theta: [[f64::NAN; 4]; 4],
        phi: [f64::NAN; 4],
        area: [f64::NAN; 4],
        volume: 0.0,
    };
    for x in 1..n {
        for y in 1..n {
            if x != y {
                let t = s[x].angle(s[y]);
                if !(libm::sin(t) > tol) {
                    return Err(GeometryError::DegenerateSimplex);
                }
                out.theta[x][y] = t;
            }
        }
    }
    if n == 3 {
        out.area[0] = 0.5 * s[1].cross(s[2]).norm();
        return Ok(out);
    }
    for z in 1..4 {
        let (x, y) = others(z);
        let nx = s[z].cross(s[x]);
        let ny = s[z].cross(s[y]);
        let phi = nx.angle(ny);
        if !(libm::sin(phi) > tol) {
            return Err(GeometryError::DegenerateSimplex);
        }
        out.phi[z] = phi;
        out.area[z] = 0.5 * s[x].cross(s[y]).norm();
    }
    out.volume = s[1].dot(s[2].cross(s[3])).abs() / 6.0;
    Ok(out)
}

/// Affine coordinates `t` of `c` with respect to affinely independent `vertices`:
/// `Σ t_i = 1` and `Σ t_i vertices[i] = c` (least squares when `c` is off the affine hull).
pub fn barycentric(vertices: &[BlochVector], c: BlochVector) -> Result<Vec<f64>, GeometryError> {
    let k = vertices.len();
    if k == 0 || k > 4 {
        return Err(GeometryError::DegenerateSimplex);
    }
    if k == 1 {
        return Ok(alloc::vec![1.0]);
    }
    let base = vertices[0];
    let edges = DMatrix::from_fn(3, k - 1, |r, col| (vertices[col + 1] - base)[r]);
    let rhs = DVector::from_fn(3, |r, _| (c - base)[r]);
    let svd = edges.svd(true, true);
    let largest = svd.singular_values.max();
    let smallest = svd.singular_values.min();
    if !(largest > 0.0) || smallest <= 1e-12 * largest {
        return Err(GeometryError::DegenerateSimplex);
    }
    let tau = svd
        .solve(&rhs, 0.0)
        .map_err(|_| GeometryError::DegenerateSimplex)?;
    let mut t = Vec::with_capacity(k);
    t.push(1.0 - tau.sum());
    t.extend(tau.iter().copied());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{asymmetric_four, regular_tetrahedron};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn geometry_from_s(s: &[[f64; 3]]) -> DisplacedGeometry {
        // equal unit weights with v_0 = 0 make s_i = v_i directly
        let mut pairs = alloc::vec![(1.0, [0.0; 3])];
        pairs.extend(s.iter().map(|&v| (1.0, v)));
        displaced_geometry(&Ensemble::from_pairs(&pairs).unwrap(), 1e-8)
    }

    #[test]
    fn identical_pure_states() {
        let ens = Ensemble::from_pairs(&[(0.7, [0.0, 0.0, 1.0]), (0.3, [0.0, 0.0, 1.0])]).unwrap();
        let g = displaced_geometry(&ens, 1e-8);
        assert_abs_diff_eq!(g.e[1], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(g.s[1].z, -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(g.l[1], 0.4, epsilon = 1e-15);
        assert_eq!(g.dim, 1);
        assert_eq!((g.e[0], g.l[0], g.s[0]), (0.0, 0.0, BlochVector::ZERO));
    }

    #[test]
    fn orthogonal_pair() {
        let ens = Ensemble::from_pairs(&[(0.5, [0.0, 0.0, 1.0]), (0.5, [0.0, 0.0, -1.0])]).unwrap();
        let g = displaced_geometry(&ens, 1e-8);
        assert_eq!(g.e[1], 0.0);
        assert_eq!(g.s[1], BlochVector::new(0.0, 0.0, -1.0));
        assert_eq!((g.l[1], g.dim), (1.0, 1));
    }

    #[test]
    fn relabels_largest_weight_first_with_lowest_index_on_ties() {
        let ens =
            Ensemble::from_pairs(&[(0.2, [0.0; 3]), (0.4, [0.1, 0.0, 0.0]), (0.4, [0.0, 0.1, 0.0])]).unwrap();
        let g = displaced_geometry(&ens, 1e-8);
        assert_eq!(g.order, [1, 0, 2]);
        assert!(g.e.iter().all(|&e| e >= 0.0));
    }

    #[test]
    fn equal_weight_identical_states_have_dimension_zero() {
        let ens = Ensemble::from_pairs(&[(0.5, [0.3, 0.2, 0.1]), (0.5, [0.3, 0.2, 0.1])]).unwrap();
        assert_eq!(displaced_geometry(&ens, 1e-8).dim, 0);
    }

    #[test]
    fn symmetric_family_is_full_dimensional_with_equal_priors() {
        let g = displaced_geometry(&asymmetric_four(0.0), 1e-8);
        assert_eq!(g.dim, 3);
        assert!(g.e.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn right_angles() {
        let g = geometry_from_s(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let a = simplex_angles(&g, 1e-9).unwrap();
        assert_abs_diff_eq!(a.theta(1, 2), FRAC_PI_2, epsilon = 1e-15);

        let g = geometry_from_s(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let a = simplex_angles(&g, 1e-9).unwrap();
        for z in 1..4 {
            assert_abs_diff_eq!(a.phi[z], FRAC_PI_2, epsilon = 1e-15);
            assert_abs_diff_eq!(a.area[z], 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(a.volume, 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn regular_tetrahedron_angles() {
        let g = displaced_geometry(&regular_tetrahedron(0.9), 1e-8);
        let a = simplex_angles(&g, 1e-9).unwrap();
        // regular tetrahedron: face angles π/3, dihedral angles arccos(1/3)
        let dihedral = libm::acos(1.0 / 3.0);
        for x in 1..4 {
            for y in 1..4 {
                if x != y {
                    assert_abs_diff_eq!(a.theta(x, y), FRAC_PI_3, epsilon = 1e-12);
                }
            }
            assert_abs_diff_eq!(a.phi[x], dihedral, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        let g = geometry_from_s(&[[0.5, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        assert_eq!(g.dim, 1);
        assert_eq!(simplex_angles(&g, 1e-9), Err(GeometryError::DegenerateSimplex));
        let g = geometry_from_s(&[[1.0, 0.0, 0.0]]);
        assert_eq!(simplex_angles(&g, 1e-9), Err(GeometryError::Unsupported(2)));
    }

    #[test]
    fn barycentric_examples() {
        let tri = [
            BlochVector::ZERO,
            BlochVector::new(1.0, 0.0, 0.0),
            BlochVector::new(0.0, 1.0, 0.0),
        ];
        let t = barycentric(&tri, tri[2]).unwrap();
        assert_abs_diff_eq!(t[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t[2], 1.0, epsilon = 1e-15);

        let centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
        for ti in barycentric(&tri, centroid).unwrap() {
            assert_abs_diff_eq!(ti, 1.0 / 3.0, epsilon = 1e-15);
        }

        let seg = [BlochVector::ZERO, BlochVector::Z];
        let t = barycentric(&seg, BlochVector::new(0.0, 0.0, 1.5)).unwrap();
        assert!(t[1] > 1.0 && t[0] < 0.0);

        let collinear = [BlochVector::ZERO, BlochVector::Z, BlochVector::Z * 2.0];
        assert!(barycentric(&collinear, BlochVector::Z).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vec3() -> impl Strategy<Value = BlochVector> {
            (-0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64).prop_map(|(x, y, z)| BlochVector::new(x, y, z))
        }

        fn tetra() -> impl Strategy<Value = [BlochVector; 3]> {
            [vec3(), vec3(), vec3()]
                .prop_filter("well conditioned", |s| s[0].dot(s[1].cross(s[2])).abs() > 1e-3)
        }

        proptest! {
            #[test]
            fn volume_matches_face_times_height(s in tetra()) {
                let g = geometry_from_s(&[s[0].to_array(), s[1].to_array(), s[2].to_array()]);
                let a = simplex_angles(&g, 1e-9).unwrap();
                for z in 1..4 {
                    let (x, y) = others(z);
                    let normal = g.s[x].cross(g.s[y]);
                    let height = g.s[z].dot(normal).abs() / normal.norm();
                    prop_assert!((a.volume - a.area[z] * height / 3.0).abs() <= 1e-10);
                }
            }

            #[test]
            fn barycentric_reconstructs(s in tetra(), w in [0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64]) {
                let verts = [BlochVector::ZERO, s[0], s[1], s[2]];
                let total: f64 = w.iter().sum();
                prop_assume!(total > 1e-3);
                let c: BlochVector = verts.iter().zip(&w).map(|(&v, &wi)| v * (wi / total)).sum();
                let t = barycentric(&verts, c).unwrap();
                let back: BlochVector = verts.iter().zip(&t).map(|(&v, &ti)| v * ti).sum();
                prop_assert!((back - c).norm() <= 1e-10);
                prop_assert!((t.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
                for (ti, wi) in t.iter().zip(&w) {
                    prop_assert!((ti - wi / total).abs() <= 1e-8);
                }
            }
        }
    }
}
