//! Property tests for the invariants that hold over whole input families.

use helicoid_lab::asymptotics::{BarrierKind, BarrierSpec};
use helicoid_lab::geometry::{
    apply_screw, helicoid_point, leaf_parameter, HelicoidSpec, Point3, ScrewMotion,
};
use helicoid_lab::grid::{RadialSpacing, ScalarField, WedgeGrid};
use helicoid_lab::meshcheck::{euler_genus, synthetic, TriMesh};
use proptest::prelude::*;
use std::f64::consts::TAU;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// CSV serialization round-trips bit-exactly for any finite field.
    #[test]
    fn csv_round_trip(
        n_r in 3usize..8,
        half_k in 1usize..4,
        geometric in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let n_theta = 2 * half_k + 1;
        let spacing = if geometric { RadialSpacing::Geometric } else { RadialSpacing::Uniform };
        let grid = WedgeGrid::new(0.5, 16.0, 1.2, n_r, n_theta, spacing).unwrap();
        let mut state = seed | 1;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            f64::from_bits((state >> 12) | 0x3ff0000000000000) * 2.0 - 3.0
        };
        let values: Vec<f64> = (0..grid.node_count()).map(|_| rnd() * 1e3).collect();
        let field = ScalarField::from_values(grid, values).unwrap();
        let text = field.to_csv_string();
        let back = ScalarField::from_csv_str(&text).unwrap();
        prop_assert_eq!(back.values(), field.values());
        prop_assert_eq!(back.to_csv_string(), text);
    }

    /// The leaf label is constant along the helicoid's own screw family.
    #[test]
    fn leaf_parameter_screw_invariance(
        pitch in prop::sample::select(vec![-2.0, -0.5, 1.0, 1.7]),
        phase in 0.0..TAU,
        x in -5.0..5.0f64,
        y in -5.0..5.0f64,
        z in -5.0..5.0f64,
        alpha in -8.0..8.0f64,
    ) {
        prop_assume!(x * x + y * y > 1e-6);
        let spec = HelicoidSpec::new(pitch, phase).unwrap();
        let p = Point3::new(x, y, z);
        let m = ScrewMotion::new(alpha, alpha * pitch);
        let a = leaf_parameter(&p, &spec).unwrap();
        let b = leaf_parameter(&apply_screw(&m, &p), &spec).unwrap();
        let diff = (a - b).rem_euclid(TAU);
        prop_assert!(diff < 1e-9 || TAU - diff < 1e-9, "leaf moved by {diff}");
    }

    /// Surface points have leaf label 0 or pi, and screw composition adds.
    #[test]
    fn helicoid_points_sit_on_their_leaves(
        pitch in prop::sample::select(vec![-1.5, 0.7, 1.0]),
        phase in 0.0..TAU,
        r in 0.01..10.0f64,
        t in -12.0..12.0f64,
    ) {
        let spec = HelicoidSpec::new(pitch, phase).unwrap();
        let p = helicoid_point(&spec, r, t);
        let leaf = leaf_parameter(&p, &spec).unwrap();
        let near = leaf.min(TAU - leaf).min((leaf - std::f64::consts::PI).abs());
        prop_assert!(near < 1e-8, "leaf {leaf} of a surface point");
    }

    /// Euler characteristic is invariant under vertex relabeling.
    #[test]
    fn euler_invariant_under_permutation(rot in 1usize..97, swap in 0usize..96) {
        let base = synthetic::torus(2.0, 0.5, 8, 6);
        let n = base.vertices().len();
        // a permutation built from a rotation plus one transposition
        let mut perm: Vec<usize> = (0..n).map(|k| (k + rot) % n).collect();
        perm.swap(swap % n, (swap * 7 + 1) % n);
        let mut inv = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let verts: Vec<Point3> = inv.iter().map(|&k| base.vertices()[k]).collect();
        let tris: Vec<[usize; 3]> = base
            .triangles()
            .iter()
            .map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]])
            .collect();
        let permuted = TriMesh::new(verts, tris).unwrap();
        let a = euler_genus(&base).unwrap();
        let b = euler_genus(&permuted).unwrap();
        prop_assert_eq!(a.chi, b.chi);
        prop_assert_eq!(a.boundary_loops, b.boundary_loops);
        prop_assert_eq!(a.genus, b.genus);
    }

    /// Admissible barriers are strictly positive on the closed wedge.
    #[test]
    fn barriers_positive_on_closed_wedge(
        beta in 0.05..2.0f64,
        h_frac in 0.1..1.0f64,
        kind in any::<bool>(),
        r in 0.2..50.0f64,
        t_frac in -1.0..1.0f64,
    ) {
        let h = h_frac * std::f64::consts::FRAC_PI_2;
        prop_assume!(beta < std::f64::consts::FRAC_PI_2 / h);
        let kind = if kind { BarrierKind::Decaying } else { BarrierKind::Growing };
        let spec = BarrierSpec::new(kind, beta, h).unwrap();
        let v = spec.value(r, t_frac * h);
        prop_assert!(v > 0.0, "barrier value {v} at r={r}, t={}", t_frac * h);
    }

    /// Screw motions compose additively in both components.
    #[test]
    fn screw_composition(
        a1 in -4.0..4.0f64, l1 in -4.0..4.0f64,
        a2 in -4.0..4.0f64, l2 in -4.0..4.0f64,
        x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64,
    ) {
        let m1 = ScrewMotion::new(a1, l1);
        let m2 = ScrewMotion::new(a2, l2);
        let p = Point3::new(x, y, z);
        let seq = apply_screw(&m2, &apply_screw(&m1, &p));
        let composed = apply_screw(&m1.compose(&m2), &p);
        prop_assert!((seq - composed).norm() < 1e-12);
    }
}
