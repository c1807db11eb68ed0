//! Exact helicoid models, screw motions, and the half-helicoid foliation.
//!
//! The standard helicoid `H` has pitch 1 and phase 0; half of it is the image
//! of `(r, theta) -> (r cos theta, r sin theta, theta)` for `r >= 0`, the
//! other half is its 180-degree rotation about the axis. Angles are kept
//! unreduced (branch values) everywhere; reduction mod `2*pi` happens only
//! inside [`leaf_parameter`], which labels the half-helicoid leaves that
//! foliate space minus the axis.

use crate::grid::ScalarField;
use crate::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;

use std::f64::consts::{PI, TAU};

/// A vertical helicoid with axis Z: pitch is the rise per radian (nonzero,
/// sign = handedness), phase the angle of the `z = 0` ruling in `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicoidSpec {
    pitch: f64,
    phase: f64,
}

impl HelicoidSpec {
    /// The standard helicoid: pitch 1, phase 0.
    pub const STANDARD: HelicoidSpec = HelicoidSpec {
        pitch: 1.0,
        phase: 0.0,
    };

    pub fn new(pitch: f64, phase: f64) -> Result<Self> {
        if pitch == 0.0 || !pitch.is_finite() {
            return Err(Error::invalid("pitch", format!("must be finite and nonzero, got {pitch}")));
        }
        if !phase.is_finite() {
            return Err(Error::invalid("phase", "must be finite"));
        }
        Ok(HelicoidSpec {
            pitch,
            phase: phase.rem_euclid(TAU),
        })
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }
}

/// Rotation about Z by `angle` composed with a vertical translation by
/// `lift`. Composition adds both components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewMotion {
    pub angle: f64,
    pub lift: f64,
}

impl ScrewMotion {
    pub fn new(angle: f64, lift: f64) -> Self {
        ScrewMotion { angle, lift }
    }

    /// The screw with equal angle and lift `2h` that periodic helicoid-like
    /// surfaces are invariant under.
    pub fn symmetric(two_h: f64) -> Self {
        ScrewMotion {
            angle: two_h,
            lift: two_h,
        }
    }

    pub fn compose(&self, other: &ScrewMotion) -> ScrewMotion {
        ScrewMotion {
            angle: self.angle + other.angle,
            lift: self.lift + other.lift,
        }
    }
}

/// Cylindrical coordinates with an unreduced branch angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    pub r: f64,
    pub theta: f64,
    pub z: f64,
}

impl CylPoint {
    pub fn new(r: f64, theta: f64, z: f64) -> Self {
        CylPoint { r, theta, z }
    }

    pub fn to_cartesian(&self) -> Point3 {
        Point3::new(self.r * self.theta.cos(), self.r * self.theta.sin(), self.z)
    }
}

/// Point of the parametrized half-helicoid at polar parameters `(r, theta)`.
pub fn helicoid_point(spec: &HelicoidSpec, r: f64, theta: f64) -> Point3 {
    let a = theta + spec.phase;
    Point3::new(r * a.cos(), r * a.sin(), spec.pitch * theta)
}

pub fn apply_screw(m: &ScrewMotion, p: &Point3) -> Point3 {
    let (s, c) = m.angle.sin_cos();
    Point3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z + m.lift)
}

/// Label of the half-helicoid leaf through `p`, in `[0, 2*pi)`.
///
/// Two points off the axis lie on the same leaf of the foliation iff their
/// leaf parameters agree. Points of the helicoid itself sit on the leaves
/// `0` and `pi`.
pub fn leaf_parameter(p: &Point3, spec: &HelicoidSpec) -> Result<f64> {
    if p.x == 0.0 && p.y == 0.0 {
        return Err(Error::AxisPoint);
    }
    let angle = p.y.atan2(p.x);
    Ok((angle - p.z / spec.pitch - spec.phase).rem_euclid(TAU))
}

/// Rotate the helicoid about Z; pitch is unchanged, phase advances mod 2*pi.
pub fn rotate_helicoid(spec: &HelicoidSpec, alpha: f64) -> HelicoidSpec {
    HelicoidSpec {
        pitch: spec.pitch,
        phase: (spec.phase + alpha).rem_euclid(TAU),
    }
}

/// Leaf functional `F = theta - u` on the graph of `u` over a wedge grid.
///
/// On the graph, `z = u(r, theta)`, so this is the field whose level sets
/// are the intersections with rotated half-helicoids; it vanishes
/// identically when `u` is the helicoid multigraph `u = theta`.
pub fn angle_field_on_graph(u: &ScalarField) -> ScalarField {
    let grid = u.grid().clone();
    let values = grid
        .nodes()
        .map(|(i, j)| grid.theta(j) - u.value(i, j))
        .collect();
    ScalarField::from_values(grid, values).expect("same grid, same node count")
}

/// Euclidean distance from `p` to the full helicoid, with the nearest
/// surface point. Accuracy is certified to `tol` by a sampled 1-D reduction
/// over the ruling angle plus local refinement.
pub fn distance_to_helicoid(p: &Point3, spec: &HelicoidSpec, tol: f64) -> Result<f64> {
    closest_point(p, spec, tol).map(|(d, _)| d)
}

/// As [`distance_to_helicoid`] but also returns the nearest surface point.
pub fn closest_point(p: &Point3, spec: &HelicoidSpec, tol: f64) -> Result<(f64, Point3)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    // The full helicoid is the parametrized half together with its copy
    // shifted down by pitch*pi (the rotation by pi about Z).
    let shift = spec.pitch * PI;
    let a = closest_on_half(p, spec, 0.0, tol)?;
    let b = closest_on_half(p, spec, -shift, tol)?;
    Ok(if a.0 <= b.0 { a } else { b })
}

/// Distance from `p` to the surface `(r cos(t+phase), r sin(t+phase),
/// pitch*t + z_off)`, `r >= 0`.
///
/// For fixed ruling angle `t` the optimal radius is `max(0, u(t))` with
/// `u(t) = x cos(t+phase) + y sin(t+phase) = r_p cos(t - t*)`, so the
/// squared distance splits into 2-pi windows: where `u > 0` it equals
/// `r_p^2 sin^2(t - t*) + (z - pitch t)^2`, whose derivative has at most
/// three monotone pieces per window (the inflection angles have a closed
/// form), and in the dead zones it is `r_p^2 + (z - pitch t)^2`. Every
/// local minimum is therefore located by bisection on a monotone piece;
/// no sampling density is involved, and the result is exact to rounding.
fn closest_on_half(p: &Point3, spec: &HelicoidSpec, z_off: f64, tol: f64) -> Result<(f64, Point3)> {
    let rp2 = p.x * p.x + p.y * p.y;
    let rp = rp2.sqrt();
    let pitch = spec.pitch;
    let zc = p.z - z_off;
    let _ = tol; // accuracy is at rounding level by construction

    let surf = |t: f64| -> Point3 {
        let a = t + spec.phase;
        let (s, c) = a.sin_cos();
        let r = (p.x * c + p.y * s).max(0.0);
        Point3::new(r * c, r * s, pitch * t + z_off)
    };
    let dist2 = |t: f64| -> f64 { (p - surf(t)).norm_squared() };

    if rp == 0.0 {
        // the surface contains the axis; the height is free
        let t = zc / pitch;
        return Ok((0.0, surf(t)));
    }

    // u is maximal at t_star (mod 2 pi)
    let t_star = p.y.atan2(p.x) - spec.phase;
    // squared distance inside a live window and its t-derivative
    let f_live = |t: f64| rp2 * (t - t_star).sin().powi(2) + (zc - pitch * t).powi(2);
    let df_live =
        |t: f64| rp2 * (2.0 * (t - t_star)).sin() - 2.0 * pitch * (zc - pitch * t);

    let mut best_f = f64::INFINITY;
    let mut best_t = zc / pitch;

    let bisect = |mut a: f64, mut b: f64, fa: f64, _fb: f64| -> f64 {
        // sign change of df_live between a and b
        let low_is_neg = fa < 0.0;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let fm = df_live(m);
            if fm == 0.0 {
                return m;
            }
            if (fm < 0.0) == low_is_neg {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };

    let consider = |t: f64, f: f64, best_f: &mut f64, best_t: &mut f64| {
        if f < *best_f {
            *best_f = f;
            *best_t = t;
        }
    };

    // central window index near the point's own height
    let k0 = ((zc / pitch - t_star) / TAU).round() as i64;
    for dir in [0i64, 1, -1] {
        let mut k = k0 + dir;
        loop {
            let center = t_star + TAU * k as f64;
            // lower bound for the squared distance on this window
            let dist_c = (zc - pitch * center).abs() - pitch.abs() * PI;
            if dist_c > 0.0 && dist_c * dist_c > best_f {
                break;
            }

            // live half: u >= 0 on [center - pi/2, center + pi/2]
            let (lo, hi) = (center - 0.5 * PI, center + 0.5 * PI);
            let ratio = -(pitch * pitch) / rp2;
            let mut cuts = vec![lo];
            if ratio >= -1.0 {
                // inflections of the squared distance, in closed form
                let a = ratio.acos() / 2.0;
                cuts.push(center - a);
                cuts.push(center + a);
            }
            cuts.push(hi);
            for w in cuts.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (da, db) = (df_live(a), df_live(b));
                if da == 0.0 {
                    consider(a, f_live(a), &mut best_f, &mut best_t);
                }
                if (da < 0.0) != (db < 0.0) {
                    let root = bisect(a, b, da, db);
                    consider(root, f_live(root), &mut best_f, &mut best_t);
                }
            }
            consider(lo, f_live(lo), &mut best_f, &mut best_t);
            consider(hi, f_live(hi), &mut best_f, &mut best_t);

            // dead zone between this window and the next: f = rp^2 + C^2
            let (dlo, dhi) = (hi, center + TAU - 0.5 * PI);
            let t_dead = (zc / pitch).clamp(dlo.min(dhi), dhi.max(dlo));
            consider(
                t_dead,
                rp2 + (zc - pitch * t_dead).powi(2),
                &mut best_f,
                &mut best_t,
            );

            if dir == 0 {
                break;
            }
            k += dir;
        }
    }

    // one Newton polish on the smooth branch
    let d2 = |t: f64| 2.0 * rp2 * (2.0 * (t - t_star)).cos() + 2.0 * pitch * pitch;
    for _ in 0..3 {
        let g = df_live(best_t);
        let h = d2(best_t);
        if h.abs() > 1e-300 {
            let step = g / h;
            let t_new = best_t - step;
            let f_new = dist2(t_new);
            if f_new < best_f {
                best_f = f_new;
                best_t = t_new;
            }
        }
    }

    let q = surf(best_t);
    Ok(((p - q).norm(), q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{RadialSpacing, ScalarField, WedgeGrid};
    use approx::assert_abs_diff_eq;

    const H: HelicoidSpec = HelicoidSpec::STANDARD;

    #[test]
    fn helicoid_point_matches_parametrization() {
        assert_eq!(helicoid_point(&H, 1.0, 0.0), Point3::new(1.0, 0.0, 0.0));
        // r = 0 collapses to the axis regardless of the angle.
        assert_eq!(helicoid_point(&H, 0.0, 5.0), Point3::new(0.0, 0.0, 5.0));
        let p = helicoid_point(&H, 2.0, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn pitch_zero_rejected() {
        assert!(HelicoidSpec::new(0.0, 0.0).is_err());
        assert!(HelicoidSpec::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn screw_motion_basics() {
        let sigma = ScrewMotion::symmetric(PI);
        let q = apply_screw(&sigma, &Point3::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(q.x, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.z, PI, epsilon = 1e-15);

        let id = ScrewMotion::new(0.0, 0.0);
        let p = Point3::new(0.3, -0.7, 2.0);
        assert_eq!(apply_screw(&id, &p), p);
    }

    #[test]
    fn screw_composition_law() {
        let m = ScrewMotion::new(0.37, -1.2);
        let twice = m.compose(&m);
        let p = Point3::new(1.5, -0.25, 0.75);
        let via_two = apply_screw(&m, &apply_screw(&m, &p));
        let via_one = apply_screw(&twice, &p);
        assert_abs_diff_eq!((via_two - via_one).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn leaf_parameter_examples() {
        assert_abs_diff_eq!(leaf_parameter(&Point3::new(1.0, 0.0, 0.0), &H).unwrap(), 0.0);
        assert_abs_diff_eq!(
            leaf_parameter(&Point3::new(0.0, 1.0, 0.0), &H).unwrap(),
            std::f64::consts::FRAC_PI_2
        );
        assert_abs_diff_eq!(leaf_parameter(&Point3::new(1.0, 0.0, PI), &H).unwrap(), PI);
        assert!(matches!(
            leaf_parameter(&Point3::new(0.0, 0.0, 3.0), &H),
            Err(Error::AxisPoint)
        ));
    }

    #[test]
    fn leaf_parameter_invariant_under_own_screw_family() {
        let spec = HelicoidSpec::new(0.7, 1.1).unwrap();
        let p = Point3::new(1.3, -2.1, 0.4);
        let base = leaf_parameter(&p, &spec).unwrap();
        for k in 1..8 {
            let alpha = 0.45 * k as f64;
            let m = ScrewMotion::new(alpha, alpha * spec.pitch());
            let q = apply_screw(&m, &p);
            let moved = leaf_parameter(&q, &spec).unwrap();
            let diff = (moved - base).rem_euclid(TAU);
            assert!(
                diff < 1e-12 || (TAU - diff) < 1e-12,
                "leaf parameter drifted by {diff} at alpha = {alpha}"
            );
        }
    }

    #[test]
    fn rotation_shifts_leaf_parameter() {
        let p = helicoid_point(&H, 2.0, 1.3);
        let alpha = 0.9;
        let rotated = rotate_helicoid(&H, alpha);
        let before = leaf_parameter(&p, &H).unwrap();
        let after = leaf_parameter(&p, &rotated).unwrap();
        assert_abs_diff_eq!((after - (before - alpha)).rem_euclid(TAU), 0.0, epsilon = 1e-12);

        // Rotating by 2*pi is the identity, and rotation composes additively.
        assert_eq!(rotate_helicoid(&H, TAU), H);
        let twice = rotate_helicoid(&rotate_helicoid(&H, 0.4), 0.4);
        let once = rotate_helicoid(&H, 0.8);
        assert_abs_diff_eq!(twice.phase(), once.phase(), epsilon = 1e-15);
    }

    fn field_on(grid: &WedgeGrid, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        ScalarField::sample(grid.clone(), f)
    }

    #[test]
    fn angle_field_examples() {
        let grid = WedgeGrid::new(1.0, 10.0, std::f64::consts::FRAC_PI_2, 7, 9, RadialSpacing::Uniform).unwrap();

        let heli = field_on(&grid, |_, th| th);
        let f0 = angle_field_on_graph(&heli);
        assert!(f0.values().iter().all(|v| v.abs() < 1e-15), "F must vanish on the helicoid graph");

        let shifted = field_on(&grid, |_, th| th - 0.3);
        let fs = angle_field_on_graph(&shifted);
        assert!(fs.values().iter().all(|v| (v - 0.3).abs() < 1e-15));

        // u = theta + cos(theta)/r: F = -cos(theta)/r, sup on the r = 10
        // circle is 0.1 (attained at theta = 0, which is a grid line).
        let perturbed = field_on(&grid, |r, th| th + th.cos() / r);
        let fp = angle_field_on_graph(&perturbed);
        let i_out = grid.n_r() - 1;
        let sup = (0..grid.n_theta())
            .map(|j| fp.value(i_out, j).abs())
            .fold(0.0f64, f64::max);
        assert_abs_diff_eq!(sup, 0.1, epsilon = 1e-14);
    }

    #[test]
    fn distance_zero_on_surface_points() {
        for &(r, t) in &[(0.5, 0.0), (2.0, 3.7), (7.0, -11.0), (0.0, 2.0)] {
            let p = helicoid_point(&H, r, t);
            let d = distance_to_helicoid(&p, &H, 1e-9).unwrap();
            assert!(d <= 1e-9, "on-surface point at (r={r}, t={t}) reported distance {d}");
        }
        // Points of the reflected half (rotation by pi about Z).
        let q = apply_screw(&ScrewMotion::new(PI, 0.0), &helicoid_point(&H, 1.5, 0.8));
        let d = distance_to_helicoid(&q, &H, 1e-9).unwrap();
        assert!(d <= 1e-9, "reflected-half point reported distance {d}");
    }

    #[test]
    fn distance_matches_brute_force_oracle() {
        // Dense sampling over the parametrization, then local refinement on
        // the best sample; independent of the production search.
        let brute = |p: &Point3, spec: &HelicoidSpec| -> f64 {
            let mut best = f64::INFINITY;
            for half in 0..2 {
                let z_off = -spec.pitch() * PI * half as f64;
                for it in 0..60_000 {
                    let t = -30.0 + it as f64 * 1e-3;
                    for ir in 0..400 {
                        let r = ir as f64 * 0.01;
                        let a = t + spec.phase();
                        let q = Point3::new(r * a.cos(), r * a.sin(), spec.pitch() * t + z_off);
                        best = best.min((p - q).norm());
                    }
                }
            }
            best
        };
        let p = Point3::new(0.0, 1.0, 0.0);
        let expected = brute(&p, &H);
        let got = distance_to_helicoid(&p, &H, 1e-6).unwrap();
        assert!(
            (got - expected).abs() < 2e-3,
            "distance {got} vs brute-force {expected}"
        );
        assert!(got <= expected + 1e-6, "certified distance may not exceed the oracle");
    }

    #[test]
    fn distance_invariant_under_own_screw() {
        let spec = HelicoidSpec::new(0.8, 0.3).unwrap();
        let p = Point3::new(0.4, 1.9, -0.6);
        let d0 = distance_to_helicoid(&p, &spec, 1e-8).unwrap();
        let alpha = 1.7;
        let m = ScrewMotion::new(alpha, alpha * spec.pitch());
        let d1 = distance_to_helicoid(&apply_screw(&m, &p), &spec, 1e-8).unwrap();
        assert_abs_diff_eq!(d0, d1, epsilon = 1e-6);
    }

    #[test]
    fn distance_vanishes_exactly_on_leaves_zero_and_pi() {
        let spec = HelicoidSpec::new(1.3, 0.9).unwrap();
        for k in 0..24 {
            let t = -6.0 + 0.5 * k as f64;
            let r = 0.2 + 0.3 * k as f64;
            let p = helicoid_point(&spec, r, t);
            let leaf = leaf_parameter(&p, &spec).unwrap();
            let on_leaf = leaf.min(TAU - leaf) < 1e-10 || (leaf - PI).abs() < 1e-10;
            assert!(on_leaf, "surface point has leaf parameter {leaf}");
        }
        // Conversely a point on a different leaf has positive distance.
        let off = apply_screw(&ScrewMotion::new(1.0, 0.0), &helicoid_point(&spec, 2.0, 0.0));
        let d = distance_to_helicoid(&off, &spec, 1e-8).unwrap();
        assert!(d > 0.1, "off-leaf point too close: {d}");
    }
}
