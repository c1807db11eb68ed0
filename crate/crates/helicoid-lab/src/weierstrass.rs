//! Weierstrass data `(g, dh)`: evaluation, integration to immersed meshes,
//! and the end diagnostics (residues, pole orders, curvature formulas).
//!
//! `g` is the stereographic projection of the Gauss map and `dh` the height
//! differential. The immersion convention is the classical one,
//! `x = Re int (1/2 (1/g - g), i/2 (1/g + g), 1) dh`,
//! verified against the explicit helicoid parametrization rather than
//! assumed. Integration is accepted only after a period check: real parts
//! of closed-loop integrals must vanish to tolerance, otherwise the data
//! does not describe a single-valued surface and an error carries the worst
//! loop.

use crate::geometry::{Point3, Vec3};
use crate::meshcheck::{synthetic, TriMesh};
use crate::{Error, Result};
pub use num_complex::Complex64;
use serde::Serialize;

/// Relative period tolerance: real loop periods below this times the loop
/// length are treated as zero.
pub const PERIOD_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Expression trees: rational functions of zeta and exp(a zeta)
// ---------------------------------------------------------------------------

/// Closed expression language for the data this crate evaluates: rational
/// combinations of the coordinate and real-exponent exponentials.
#[derive(Debug, Clone)]
pub enum Expr {
    Const(Complex64),
    /// The coordinate `zeta`.
    Var,
    /// `exp(a * zeta)` with real `a`.
    Exp(f64),
    Neg(Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Prod(Box<Expr>, Box<Expr>),
    Quot(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn constant(c: impl Into<Complex64>) -> Expr {
        Expr::Const(c.into())
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn exp(a: f64) -> Expr {
        Expr::Exp(a)
    }

    pub fn pow(self, n: i32) -> Expr {
        Expr::Pow(Box::new(self), n)
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    pub fn add(self, other: Expr) -> Expr {
        Expr::Sum(Box::new(self), Box::new(other))
    }

    pub fn mul(self, other: Expr) -> Expr {
        Expr::Prod(Box::new(self), Box::new(other))
    }

    pub fn div(self, other: Expr) -> Expr {
        Expr::Quot(Box::new(self), Box::new(other))
    }

    pub fn scale(self, c: impl Into<Complex64>) -> Expr {
        Expr::Prod(Box::new(Expr::Const(c.into())), Box::new(self))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => z,
            Expr::Exp(a) => (z * *a).exp(),
            Expr::Neg(e) => -e.eval(z),
            Expr::Sum(a, b) => a.eval(z) + b.eval(z),
            Expr::Prod(a, b) => a.eval(z) * b.eval(z),
            Expr::Quot(a, b) => a.eval(z) / b.eval(z),
            Expr::Pow(e, n) => e.eval(z).powi(*n),
        }
    }

    /// Symbolic derivative with respect to `zeta`.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::constant(0.0),
            Expr::Var => Expr::constant(1.0),
            Expr::Exp(a) => Expr::Exp(*a).scale(*a),
            Expr::Neg(e) => e.derivative().neg(),
            Expr::Sum(a, b) => a.derivative().add(b.derivative()),
            Expr::Prod(a, b) => {
                let left = a.derivative().mul((**b).clone());
                let right = (**a).clone().mul(b.derivative());
                left.add(right)
            }
            Expr::Quot(a, b) => {
                let num = a
                    .derivative()
                    .mul((**b).clone())
                    .add((**a).clone().mul(b.derivative()).neg());
                num.div((**b).clone().pow(2))
            }
            Expr::Pow(e, n) => {
                let inner = e.derivative();
                (**e).clone().pow(n - 1).scale(*n as f64).mul(inner)
            }
        }
    }
}

/// The pair `(g, dh)`; `dh` is stored as its coefficient against `d zeta`.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub g: Expr,
    pub dh_coeff: Expr,
}

impl WeierstrassData {
    pub fn new(g: Expr, dh_coeff: Expr) -> Self {
        WeierstrassData { g, dh_coeff }
    }

    /// Helicoid data `g = exp(zeta)`, `dh = i d zeta`.
    pub fn helicoid() -> Self {
        WeierstrassData {
            g: Expr::exp(1.0),
            dh_coeff: Expr::constant(Complex64::new(0.0, 1.0)),
        }
    }

    /// Catenoid data `g = zeta`, `dh = d zeta / zeta` on an annulus.
    pub fn catenoid() -> Self {
        WeierstrassData {
            g: Expr::var(),
            dh_coeff: Expr::constant(1.0).div(Expr::var()),
        }
    }

    /// Constant Gauss map with `dh = d zeta`: a flat plane.
    pub fn plane() -> Self {
        WeierstrassData {
            g: Expr::constant(2.0),
            dh_coeff: Expr::constant(1.0),
        }
    }

    /// The three coordinate one-form coefficients at `zeta`.
    fn form_coeffs(&self, z: Complex64) -> Result<[Complex64; 3]> {
        let g = self.g.eval(z);
        let dh = self.dh_coeff.eval(z);
        let mag = g.norm();
        if !(1e-12..=1e12).contains(&mag) || !dh.is_finite() || !g.is_finite() {
            return Err(Error::GaussMapSingular(format!("{z}")));
        }
        let half = Complex64::new(0.5, 0.0);
        let ihalf = Complex64::new(0.0, 0.5);
        Ok([
            half * (1.0 / g - g) * dh,
            ihalf * (1.0 / g + g) * dh,
            dh,
        ])
    }

    /// Pointwise principal curvature `k = 4 |dg/g| / |dh| / (|g| + 1/|g|)^2`;
    /// along curves where `g` is unitary this reduces to `|dg/g| / |dh|`.
    pub fn principal_curvature(&self, z: Complex64) -> Result<f64> {
        let g = self.g.eval(z);
        let mag = g.norm();
        if !(1e-12..=1e12).contains(&mag) || !g.is_finite() {
            return Err(Error::GaussMapSingular(format!("{z}")));
        }
        let dg = self.g.derivative().eval(z);
        let dh = self.dh_coeff.eval(z);
        if dh.norm() == 0.0 {
            return Err(Error::invalid("dh", "curvature formula needs dh != 0"));
        }
        let dgg = (dg / g).norm();
        Ok(4.0 * dgg / dh.norm() / (mag + 1.0 / mag).powi(2))
    }
}

// ---------------------------------------------------------------------------
// Parameter grids
// ---------------------------------------------------------------------------

/// Discretized parameter domain for integration.
#[derive(Debug, Clone, Copy)]
pub enum ParamGrid {
    /// Cartesian rectangle in `zeta = u + iv`.
    Rectangle {
        re: (f64, f64),
        im: (f64, f64),
        nu: usize,
        nv: usize,
    },
    /// Annulus `r0 <= |zeta| <= r1`, radii log-spaced, the angular seam
    /// duplicated at `0` and `2 pi`.
    Annulus { r: (f64, f64), nr: usize, nt: usize },
}

impl ParamGrid {
    fn dims(&self) -> (usize, usize) {
        match *self {
            ParamGrid::Rectangle { nu, nv, .. } => (nu, nv),
            ParamGrid::Annulus { nr, nt, .. } => (nr, nt),
        }
    }

    fn node(&self, i: usize, j: usize) -> Complex64 {
        match *self {
            ParamGrid::Rectangle { re, im, nu, nv } => {
                let u = re.0 + (re.1 - re.0) * i as f64 / (nu - 1) as f64;
                let v = im.0 + (im.1 - im.0) * j as f64 / (nv - 1) as f64;
                Complex64::new(u, v)
            }
            ParamGrid::Annulus { r, nr, nt } => {
                let rho = r.0 * (r.1 / r.0).powf(i as f64 / (nr - 1) as f64);
                let t = std::f64::consts::TAU * j as f64 / (nt - 1) as f64;
                Complex64::from_polar(rho, t)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (n, m) = self.dims();
        if n < 2 || m < 2 {
            return Err(Error::invalid("grid", "need at least 2 nodes per direction"));
        }
        if let ParamGrid::Annulus { r, .. } = *self {
            if !(r.0 > 0.0 && r.1 > r.0) {
                return Err(Error::invalid("grid", format!("bad annulus radii {r:?}")));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Immersion
// ---------------------------------------------------------------------------

/// An integrated minimal immersion: the triangulated image mesh, the source
/// parameter per vertex, and the base point of the integration.
pub struct Immersion {
    pub mesh: TriMesh,
    pub params: Vec<Complex64>,
    pub base: Complex64,
    /// Sup of the discrete mean curvature over interior vertices, computed
    /// at construction (minimality is checked, not assumed).
    pub mean_curvature_sup: f64,
}

/// Integrate the Weierstrass forms over the grid from the node nearest
/// `base`. Cell circulations (and for annuli, full angular loops) must have
/// real parts below `PERIOD_TOL` times the loop length, otherwise the
/// worst loop is reported as an error.
pub fn immerse(data: &WeierstrassData, grid: &ParamGrid, base: Complex64) -> Result<Immersion> {
    grid.validate()?;
    let (nu, nv) = grid.dims();

    // Edge integrals by 4-point Gauss-Legendre along the parameter paths.
    let gauss_t = [
        0.5 - 0.430_568_155_797_026_3,
        0.5 - 0.169_990_521_792_428_13,
        0.5 + 0.169_990_521_792_428_13,
        0.5 + 0.430_568_155_797_026_3,
    ];
    let gauss_w = [
        0.173_927_422_568_726_9,
        0.326_072_577_431_273_1,
        0.326_072_577_431_273_1,
        0.173_927_422_568_726_9,
    ];
    let edge_integral = |a: Complex64, b: Complex64| -> Result<[Complex64; 3]> {
        let mut acc = [Complex64::default(); 3];
        let d = b - a;
        for (t, w) in gauss_t.iter().zip(gauss_w) {
            let z = a + d * *t;
            let forms = data.form_coeffs(z)?;
            for (slot, f) in acc.iter_mut().zip(forms) {
                *slot += f * d * w;
            }
        }
        Ok(acc)
    };

    let idx = |i: usize, j: usize| i * nv + j;
    let mut horiz = vec![[Complex64::default(); 3]; nu.saturating_sub(1) * nv];
    let mut vert = vec![[Complex64::default(); 3]; nu * (nv - 1)];
    for i in 0..nu - 1 {
        for j in 0..nv {
            horiz[i * nv + j] = edge_integral(grid.node(i, j), grid.node(i + 1, j))?;
        }
    }
    for i in 0..nu {
        for j in 0..nv - 1 {
            vert[i * (nv - 1) + j] = edge_integral(grid.node(i, j), grid.node(i, j + 1))?;
        }
    }

    // Period check: per-cell circulation of every coordinate form.
    let mut worst = (0.0f64, String::new());
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let mut circ = [Complex64::default(); 3];
            for (k, slot) in circ.iter_mut().enumerate() {
                *slot = horiz[i * nv + j][k] + vert[(i + 1) * (nv - 1) + j][k]
                    - horiz[i * nv + j + 1][k]
                    - vert[i * (nv - 1) + j][k];
            }
            let len = (grid.node(i + 1, j) - grid.node(i, j)).norm() * 2.0
                + (grid.node(i, j + 1) - grid.node(i, j)).norm() * 2.0;
            for (k, c) in circ.iter().enumerate() {
                let re = c.re.abs();
                if re > worst.0 {
                    worst = (re, format!("cell ({i}, {j}), coordinate {k}, loop length {len:.3e}"));
                }
                if re > PERIOD_TOL * len.max(1e-300) {
                    return Err(Error::PeriodCheck {
                        location: format!("cell ({i}, {j}), coordinate {k}"),
                        period: re,
                        tol: PERIOD_TOL * len,
                    });
                }
            }
        }
    }

    // For annuli, the homology class around the puncture: integrate the
    // closed angular loop at each radius.
    if let ParamGrid::Annulus { .. } = grid {
        for i in 0..nu {
            let mut loop_int = [Complex64::default(); 3];
            let mut len = 0.0;
            for j in 0..nv - 1 {
                for (slot, v) in loop_int.iter_mut().zip(vert[i * (nv - 1) + j]) {
                    *slot += v;
                }
                len += (grid.node(i, j + 1) - grid.node(i, j)).norm();
            }
            for (k, c) in loop_int.iter().enumerate() {
                if c.re.abs() > PERIOD_TOL * len {
                    return Err(Error::PeriodCheck {
                        location: format!("angular loop at radial level {i}, coordinate {k}"),
                        period: c.re.abs(),
                        tol: PERIOD_TOL * len,
                    });
                }
            }
        }
    }

    // Accumulate positions from the node nearest the requested base.
    let mut best = (0usize, 0usize, f64::INFINITY);
    for i in 0..nu {
        for j in 0..nv {
            let d = (grid.node(i, j) - base).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    let mut integral = vec![[Complex64::default(); 3]; nu * nv];
    let mut have = vec![false; nu * nv];
    have[idx(best.0, best.1)] = true;
    // walk the base row, then each column
    for j in (0..best.1).rev() {
        for k in 0..3 {
            integral[idx(best.0, j)][k] =
                integral[idx(best.0, j + 1)][k] - vert[best.0 * (nv - 1) + j][k];
        }
        have[idx(best.0, j)] = true;
    }
    for j in best.1 + 1..nv {
        for k in 0..3 {
            integral[idx(best.0, j)][k] =
                integral[idx(best.0, j - 1)][k] + vert[best.0 * (nv - 1) + j - 1][k];
        }
        have[idx(best.0, j)] = true;
    }
    for j in 0..nv {
        for i in (0..best.0).rev() {
            for k in 0..3 {
                integral[idx(i, j)][k] = integral[idx(i + 1, j)][k] - horiz[i * nv + j][k];
            }
            have[idx(i, j)] = true;
        }
        for i in best.0 + 1..nu {
            for k in 0..3 {
                integral[idx(i, j)][k] = integral[idx(i - 1, j)][k] + horiz[(i - 1) * nv + j][k];
            }
            have[idx(i, j)] = true;
        }
    }
    debug_assert!(have.iter().all(|&h| h));

    let mesh = synthetic::parametric(nu, nv, |i, j| {
        let v = &integral[idx(i, j)];
        Point3::new(v[0].re, v[1].re, v[2].re)
    });
    let params: Vec<Complex64> = (0..nu)
        .flat_map(|i| (0..nv).map(move |j| (i, j)))
        .map(|(i, j)| grid.node(i, j))
        .collect();

    let mean_curvature_sup = mean_curvature(&mesh)?
        .into_iter()
        .flatten()
        .fold(0.0f64, f64::max);

    Ok(Immersion {
        mesh,
        params,
        base,
        mean_curvature_sup,
    })
}

// ---------------------------------------------------------------------------
// Contour diagnostics
// ---------------------------------------------------------------------------

/// A circular integration contour.
#[derive(Debug, Clone, Copy)]
pub struct CircleLoop {
    pub center: Complex64,
    pub radius: f64,
}

/// `(1 / 2 pi i) * contour integral` of `coeff(zeta) d zeta` around the
/// loop, by the periodic trapezoid rule with node doubling until two
/// consecutive refinements agree to `tol`.
pub fn residue(coeff: &Expr, loop_spec: &CircleLoop, tol: f64) -> Result<Complex64> {
    if !(loop_spec.radius > 0.0) {
        return Err(Error::invalid("loop", "radius must be positive"));
    }
    let eval_n = |n: usize| -> Complex64 {
        let mut acc = Complex64::default();
        for k in 0..n {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            let z = loop_spec.center + Complex64::from_polar(loop_spec.radius, t);
            let dz = Complex64::new(0.0, 1.0) * (z - loop_spec.center);
            acc += coeff.eval(z) * dz;
        }
        acc * std::f64::consts::TAU / n as f64
    };
    let mut n = 32usize;
    let mut prev = eval_n(n);
    for _ in 0..16 {
        n *= 2;
        let next = eval_n(n);
        if (next - prev).norm() <= tol * (1.0 + next.norm()) {
            return Ok(next / Complex64::new(0.0, std::f64::consts::TAU));
        }
        prev = next;
    }
    Err(Error::QuadratureNoConvergence(format!(
        "contour integral did not stabilize by n = {n}"
    )))
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleOrderEstimate {
    pub order: i64,
    pub slope: f64,
    pub fit_residual: f64,
}

/// Estimate the pole order of `coeff(zeta) d zeta` at `puncture` from the
/// growth of circle maxima: the slope of `log max |coeff|` against
/// `log radius`, rounded; order 0 means the form is regular there.
/// An ambiguous fit (large residual or slope far from an integer) is an
/// error rather than a guess.
pub fn pole_order(coeff: &Expr, puncture: Complex64, radii: &[f64]) -> Result<PoleOrderEstimate> {
    if radii.len() < 4 {
        return Err(Error::invalid("radii", "need at least 4 radii"));
    }
    let (lo, hi) = radii
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    if !(lo > 0.0 && hi / lo >= 10.0) {
        return Err(Error::invalid("radii", format!("must span a decade, got [{lo}, {hi}]")));
    }
    let samples = 64usize;
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &rho in radii {
        let mut m = 0.0f64;
        for k in 0..samples {
            let t = std::f64::consts::TAU * k as f64 / samples as f64;
            let z = puncture + Complex64::from_polar(rho, t);
            m = m.max(coeff.eval(z).norm());
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::invalid("form", format!("circle maximum at radius {rho} is {m}")));
        }
        xs.push(rho.ln());
        ys.push(m.ln());
    }
    let (slope, _, residual) = crate::asymptotics::least_squares_line(&xs, &ys);
    let order_f = -slope;
    let order = order_f.round();
    if residual > 0.1 || (order_f - order).abs() > 0.25 {
        return Err(Error::PoleOrderIndeterminate {
            residual: residual.max((order_f - order).abs()),
            threshold: 0.25,
        });
    }
    Ok(PoleOrderEstimate {
        order: (order as i64).max(0),
        slope: order_f,
        fit_residual: residual,
    })
}

// ---------------------------------------------------------------------------
// Discrete mean curvature
// ---------------------------------------------------------------------------

/// Cotangent-weight discrete mean curvature magnitude per vertex,
/// `|sum (cot a + cot b)(x_i - x_j)| / (4 A_i)` with barycentric vertex
/// areas; boundary vertices are excluded (`None`). Degenerate triangles are
/// collected and reported as an error.
pub fn mean_curvature(mesh: &TriMesh) -> Result<Vec<Option<f64>>> {
    let verts = mesh.vertices();
    let tris = mesh.triangles();
    let scale = mesh.diameter().max(1e-300);

    let mut degenerate = Vec::new();
    let mut areas = vec![0.0f64; tris.len()];
    for (t, tri) in tris.iter().enumerate() {
        let (a, b, c) = (verts[tri[0]], verts[tri[1]], verts[tri[2]]);
        let area = 0.5 * (b - a).cross(&(c - a)).norm();
        if area < 1e-14 * scale * scale {
            degenerate.push(t);
        }
        areas[t] = area;
    }
    if !degenerate.is_empty() {
        return Err(Error::DegenerateTriangles(degenerate));
    }

    // boundary vertices: endpoints of edges with a single incident triangle
    let mut edge_count: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    for tri in tris {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut boundary = vec![false; verts.len()];
    for (&(a, b), &n) in &edge_count {
        if n == 1 {
            boundary[a] = true;
            boundary[b] = true;
        }
    }

    let mut lap = vec![Vec3::zeros(); verts.len()];
    let mut vertex_area = vec![0.0f64; verts.len()];
    for (t, tri) in tris.iter().enumerate() {
        let mut cots = [0.0f64; 3];
        for k in 0..3 {
            let (i, j, o) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            // cotangent at the vertex opposite edge (i, j)
            let u = verts[i] - verts[o];
            let v = verts[j] - verts[o];
            let cot = u.dot(&v) / u.cross(&v).norm().max(1e-300);
            cots[k] = cot;
            lap[i] += cot * (verts[i] - verts[j]);
            lap[j] += cot * (verts[j] - verts[i]);
        }
        // mixed (Voronoi) vertex areas: the cotangent formula pairs with
        // these, not with the barycentric thirds
        let obtuse = cots.iter().position(|&c| c < 0.0);
        for k in 0..3 {
            let corner = tri[(k + 2) % 3];
            let contribution = match obtuse {
                None => {
                    // each edge incident to the corner pairs with the
                    // cotangent of the angle opposite that edge
                    let e1 = (verts[tri[(k + 1) % 3]] - verts[corner]).norm_squared();
                    let e2 = (verts[tri[k]] - verts[corner]).norm_squared();
                    0.125 * (e1 * cots[(k + 1) % 3] + e2 * cots[(k + 2) % 3])
                }
                Some(ob) => {
                    // angle at tri[(ob+2)%3] is obtuse
                    if (ob + 2) % 3 == (k + 2) % 3 {
                        areas[t] / 2.0
                    } else {
                        areas[t] / 4.0
                    }
                }
            };
            vertex_area[corner] += contribution;
        }
    }

    Ok((0..verts.len())
        .map(|v| {
            if boundary[v] || vertex_area[v] == 0.0 {
                None
            } else {
                Some(lap[v].norm() / (4.0 * vertex_area[v]))
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Alignment against the exact helicoid
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct AlignmentReport {
    /// Sup over vertices of the distance to the target surface.
    pub sup_distance: f64,
    pub rms_distance: f64,
    /// The registration is over the orthogonal group: a mirror image is
    /// admitted and flagged here (a comparison convention, not geometry).
    pub reflected: bool,
}

/// Register the mesh against the helicoid of `spec` by iterated
/// closest-point Procrustes (centroid + orthogonal factor, reflections
/// allowed), then report residual distances.
///
/// ICP is local, so the search starts from the identity and from the three
/// axis mirrors; chirality cannot be fixed by rotations alone, and the
/// best of the four runs wins.
pub fn align_mesh_to_helicoid(
    mesh: &TriMesh,
    spec: &crate::geometry::HelicoidSpec,
    iterations: usize,
) -> Result<AlignmentReport> {
    use nalgebra::Matrix3;

    let inits = [
        Matrix3::identity(),
        Matrix3::from_diagonal(&Vec3::new(-1.0, 1.0, 1.0)),
        Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0)),
        Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0)),
    ];
    let coarse_tol = 1e-4 * mesh.diameter().max(1.0);
    // correspondences during the search run on a vertex subsample; the
    // final residual pass uses every vertex
    let stride = (mesh.vertices().len() / 600).max(1);
    let sample: Vec<Point3> = mesh.vertices().iter().step_by(stride).copied().collect();

    let mut best: Option<(f64, Matrix3<f64>, Vec3)> = None;
    for init in inits {
        let mut points: Vec<Point3> = sample
            .iter()
            .map(|p| Point3::from(init * p.coords))
            .collect();
        let mut total = init;
        let mut shift_total = Vec3::zeros();
        for _ in 0..iterations.max(1) {
            // correspondences: the closest helicoid point to each vertex
            let mut targets = Vec::with_capacity(points.len());
            for p in &points {
                let (_, q) = crate::geometry::closest_point(p, spec, coarse_tol)?;
                targets.push(q);
            }
            // orthogonal Procrustes on the pairs
            let pc = centroid(&points);
            let tc = centroid(&targets);
            let mut h = Matrix3::zeros();
            for (p, q) in points.iter().zip(&targets) {
                h += (p - pc) * (q - tc).transpose();
            }
            let svd = h.svd(true, true);
            let (u, v_t) = (svd.u.expect("svd"), svd.v_t.expect("svd"));
            let r: Matrix3<f64> = (u * v_t).transpose();
            let shift = tc.coords - r * pc.coords;
            for p in points.iter_mut() {
                *p = Point3::from(r * p.coords + shift);
            }
            total = r * total;
            shift_total = r * shift_total + shift;
        }
        let mut sum_sq = 0.0f64;
        for p in &points {
            let d = crate::geometry::distance_to_helicoid(p, spec, coarse_tol)?;
            sum_sq += d * d;
        }
        if best.as_ref().map_or(true, |(s, _, _)| sum_sq < *s) {
            best = Some((sum_sq, total, shift_total));
        }
    }

    let (_, total, shift) = best.expect("at least one initialization ran");
    let mut sup = 0.0f64;
    let mut sum_sq = 0.0f64;
    let fine_tol = 1e-9 * mesh.diameter().max(1.0);
    for v in mesh.vertices() {
        let p = Point3::from(total * v.coords + shift);
        let d = crate::geometry::distance_to_helicoid(&p, spec, fine_tol)?;
        sup = sup.max(d);
        sum_sq += d * d;
    }
    Ok(AlignmentReport {
        sup_distance: sup,
        rms_distance: (sum_sq / mesh.vertices().len() as f64).sqrt(),
        reflected: total.determinant() < 0.0,
    })
}

fn centroid(points: &[Point3]) -> Point3 {
    let mut acc = Vec3::zeros();
    for p in points {
        acc += p.coords;
    }
    Point3::from(acc / points.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn helicoid_grid(n: usize) -> ParamGrid {
        ParamGrid::Rectangle {
            re: (-2.0, 2.0),
            im: (-PI, PI),
            nu: n,
            nv: n,
        }
    }

    #[test]
    fn expression_evaluation_and_derivative() {
        // f = zeta^2 / (1 + zeta), f' = (zeta^2 + 2 zeta) / (1 + zeta)^2
        let f = Expr::var().pow(2).div(Expr::constant(1.0).add(Expr::var()));
        let z = Complex64::new(0.3, -0.7);
        let expect = z * z / (1.0 + z);
        assert!((f.eval(z) - expect).norm() < 1e-14);
        let d = f.derivative().eval(z);
        let expect_d = (z * z + 2.0 * z) / ((1.0 + z) * (1.0 + z));
        assert!((d - expect_d).norm() < 1e-13);

        // exp factors differentiate to scaled exponentials
        let e = Expr::exp(2.5);
        assert!((e.derivative().eval(z) - 2.5 * (2.5 * z).exp()).norm() < 1e-13);
    }

    #[test]
    fn helicoid_immersion_matches_closed_form() {
        // integration of (g = e^zeta, dh = i d zeta) has the closed form
        // (sinh u sin v, -sinh u cos v, -v) up to the base-point offset
        let data = WeierstrassData::helicoid();
        let grid = helicoid_grid(41);
        let imm = immerse(&data, &grid, Complex64::new(0.0, 0.0)).unwrap();
        let mut worst = 0.0f64;
        for (p, z) in imm.mesh.vertices().iter().zip(&imm.params) {
            let (u, v) = (z.re, z.im);
            let expect = Point3::new(u.sinh() * v.sin(), -u.sinh() * v.cos(), -v);
            worst = worst.max((p - expect).norm());
        }
        assert!(worst < 1e-9, "closed-form deviation {worst:.3e}");
    }

    #[test]
    fn catenoid_height_is_log_radius() {
        let data = WeierstrassData::catenoid();
        let grid = ParamGrid::Annulus {
            r: (0.5, 2.0),
            nr: 17,
            nt: 65,
        };
        let imm = immerse(&data, &grid, Complex64::new(0.5, 0.0)).unwrap();
        let mut worst = 0.0f64;
        for (p, z) in imm.mesh.vertices().iter().zip(&imm.params) {
            // base at |zeta| = 0.5: x3 = ln|zeta| - ln 0.5
            worst = worst.max((p.z - (z.norm().ln() - 0.5f64.ln())).abs());
        }
        assert!(worst < 1e-9, "catenoid height deviation {worst:.3e}");
    }

    #[test]
    fn plane_immersion_is_flat() {
        let data = WeierstrassData::plane();
        let grid = ParamGrid::Rectangle {
            re: (-1.0, 1.0),
            im: (-1.0, 1.0),
            nu: 17,
            nv: 17,
        };
        let imm = immerse(&data, &grid, Complex64::default()).unwrap();
        assert!(imm.mean_curvature_sup < 1e-10, "plane H sup {:.3e}", imm.mean_curvature_sup);
        // constant Gauss map: all triangle normals agree
        let verts = imm.mesh.vertices();
        let tris = imm.mesh.triangles();
        let normal = |t: &[usize; 3]| {
            (verts[t[1]] - verts[t[0]])
                .cross(&(verts[t[2]] - verts[t[0]]))
                .normalize()
        };
        let n0 = normal(&tris[0]);
        for t in tris {
            assert!((normal(t) - n0).norm() < 1e-9, "normal varies on the plane");
        }
    }

    #[test]
    fn immersion_is_conformal() {
        let data = WeierstrassData::helicoid();
        let grid = helicoid_grid(33);
        let imm = immerse(&data, &grid, Complex64::default()).unwrap();
        let (nu, nv) = (33usize, 33usize);
        // parameter steps differ per direction, so compare the velocity
        // vectors dx/du and dx/dv rather than the raw differences
        let (step_u, step_v) = (4.0 / 32.0, 2.0 * PI / 32.0);
        let at = |i: usize, j: usize| imm.mesh.vertices()[i * nv + j];
        let mut worst_dot = 0.0f64;
        let mut worst_ratio = 0.0f64;
        for i in 1..nu - 1 {
            for j in 1..nv - 1 {
                let du = (at(i + 1, j) - at(i - 1, j)) / (2.0 * step_u);
                let dv = (at(i, j + 1) - at(i, j - 1)) / (2.0 * step_v);
                let dot = du.normalize().dot(&dv.normalize()).abs();
                let ratio = (du.norm() / dv.norm() - 1.0).abs();
                worst_dot = worst_dot.max(dot);
                worst_ratio = worst_ratio.max(ratio);
            }
        }
        assert!(worst_dot < 5e-3, "tangents not orthogonal: {worst_dot:.3e}");
        assert!(worst_ratio < 2e-2, "tangent speeds differ: {worst_ratio:.3e}");
    }

    #[test]
    fn height_consistent_along_independent_path() {
        // x3 from the immersion equals Re of a trapezoid integral of dh
        // along a different (diagonal-ish) path computed here directly.
        let data = WeierstrassData::helicoid();
        let grid = helicoid_grid(21);
        let imm = immerse(&data, &grid, Complex64::default()).unwrap();
        let target = imm.params[(20 * 21) + 13];
        let expect_x3 = imm.mesh.vertices()[(20 * 21) + 13].z;
        // straight segment from the base node to the target parameter
        let base = imm.params[0..21]
            .iter()
            .chain(imm.params.iter())
            .copied()
            .find(|z| z.norm() < 1e-12)
            .unwrap_or(Complex64::default());
        let n = 4000;
        let mut acc = Complex64::default();
        for k in 0..n {
            let t0 = k as f64 / n as f64;
            let t1 = (k + 1) as f64 / n as f64;
            let z0 = base + (target - base) * t0;
            let z1 = base + (target - base) * t1;
            let f0 = data.dh_coeff.eval(z0);
            let f1 = data.dh_coeff.eval(z1);
            acc += (f0 + f1) * 0.5 * (z1 - z0);
        }
        assert_abs_diff_eq!(acc.re, expect_x3, epsilon = 1e-6);
    }

    #[test]
    fn real_periods_are_rejected() {
        // dh = i dzeta / zeta has loop integral i * 2 pi i = -2 pi: a real
        // period, so the data cannot close up to a surface.
        let data = WeierstrassData::new(
            Expr::var(),
            Expr::constant(Complex64::new(0.0, 1.0)).div(Expr::var()),
        );
        let grid = ParamGrid::Annulus {
            r: (0.5, 2.0),
            nr: 9,
            nt: 33,
        };
        match immerse(&data, &grid, Complex64::new(1.0, 0.0)) {
            Err(Error::PeriodCheck { period, .. }) => {
                assert!(period > 0.1, "period magnitude {period}");
            }
            other => panic!("expected period error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn residue_reference_values() {
        let unit = CircleLoop {
            center: Complex64::default(),
            radius: 1.0,
        };
        let one_over_z = Expr::constant(1.0).div(Expr::var());
        let res = residue(&one_over_z, &unit, 1e-12).unwrap();
        assert!((res - Complex64::new(1.0, 0.0)).norm() < 1e-10);

        let constant = Expr::constant(3.5);
        assert!(residue(&constant, &unit, 1e-12).unwrap().norm() < 1e-12);

        // double pole, no residue: the helicoidal-end signature
        let double = Expr::constant(1.0).div(Expr::var().pow(2));
        assert!(residue(&double, &unit, 1e-12).unwrap().norm() < 1e-10);
    }

    #[test]
    fn residue_is_linear() {
        let unit = CircleLoop {
            center: Complex64::default(),
            radius: 0.7,
        };
        let w1 = Expr::constant(1.0).div(Expr::var());
        let w2 = Expr::constant(1.0).div(Expr::var().pow(2));
        let combo = w1.clone().scale(Complex64::new(2.0, 1.0)).add(w2.clone().scale(-3.0));
        let r1 = residue(&w1, &unit, 1e-12).unwrap();
        let r2 = residue(&w2, &unit, 1e-12).unwrap();
        let rc = residue(&combo, &unit, 1e-12).unwrap();
        assert!((rc - (Complex64::new(2.0, 1.0) * r1 - 3.0 * r2)).norm() < 1e-10);
    }

    #[test]
    fn pole_orders_at_the_end() {
        let radii = [0.5, 0.25, 0.1, 0.05, 0.025];
        let double = Expr::constant(1.0).div(Expr::var().pow(2));
        let est = pole_order(&double, Complex64::default(), &radii).unwrap();
        assert_eq!(est.order, 2);
        assert!(est.fit_residual < 1e-10);

        let regular = Expr::constant(1.0);
        assert_eq!(pole_order(&regular, Complex64::default(), &radii).unwrap().order, 0);

        // helicoid end in the coordinate eta = 1/zeta: dh = i d zeta pulls
        // back to -i d eta / eta^2, dg/g = d zeta to -d eta / eta^2
        let dh_end = Expr::constant(Complex64::new(0.0, -1.0)).div(Expr::var().pow(2));
        let dgg_end = Expr::constant(-1.0).div(Expr::var().pow(2));
        assert_eq!(pole_order(&dh_end, Complex64::default(), &radii).unwrap().order, 2);
        assert_eq!(pole_order(&dgg_end, Complex64::default(), &radii).unwrap().order, 2);
    }

    #[test]
    fn pole_order_rejects_thin_or_ambiguous_data() {
        let double = Expr::constant(1.0).div(Expr::var().pow(2));
        assert!(pole_order(&double, Complex64::default(), &[0.5, 0.4, 0.3]).is_err());
        // an essential-singularity-flavored expression has no meaningful fit
        let wild = Expr::exp(1.0).div(Expr::var().pow(8));
        let est = pole_order(
            &wild,
            Complex64::default(),
            &[2.0, 1.0, 0.5, 0.25, 0.125, 0.0625],
        );
        assert!(est.is_err(), "expected indeterminate order, got {est:?}");
    }

    /// Principal curvature of the explicit helicoid parametrization from
    /// its fundamental forms: E = 1, F = 0, G = 1 + r^2, L = N = 0,
    /// M = -1 / sqrt(1 + r^2), so k = sqrt(-K) = 1 / (1 + r^2).
    fn fundamental_forms_curvature(r: f64) -> f64 {
        let e = 1.0;
        let g = 1.0 + r * r;
        let m = -1.0 / (1.0 + r * r).sqrt();
        let k_gauss = -(m * m) / (e * g);
        (-k_gauss).sqrt()
    }

    #[test]
    fn principal_curvature_matches_fundamental_forms() {
        let data = WeierstrassData::helicoid();
        for r in [0.0f64, 1.0, 3.0] {
            let u = r.asinh();
            let k = data.principal_curvature(Complex64::new(u, 0.4)).unwrap();
            let oracle = fundamental_forms_curvature(r);
            assert_abs_diff_eq!(k, oracle, epsilon = 1e-12);
        }

        // catenoid data on the unit circle: g unitary, k = |dg/g| / |dh| = 1
        let cat = WeierstrassData::catenoid();
        let z = Complex64::from_polar(1.0, 0.9);
        assert_abs_diff_eq!(cat.principal_curvature(z).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mean_curvature_reference_surfaces() {
        // flat sheet
        let flat = synthetic::parametric(12, 12, |i, j| {
            Point3::new(i as f64 * 0.1, j as f64 * 0.1, 0.0)
        });
        let h = mean_curvature(&flat).unwrap();
        for v in h.into_iter().flatten() {
            assert!(v < 1e-10, "flat mesh has curvature {v}");
        }

        // icosphere: H = 1 / rho within 2 percent at refinement level 4
        for rho in [1.0, 2.5] {
            let sphere = synthetic::icosphere(rho, 4);
            let h = mean_curvature(&sphere).unwrap();
            for v in h.into_iter().flatten() {
                assert!(
                    (v - 1.0 / rho).abs() < 0.02 / rho,
                    "sphere rho = {rho}: H = {v}, expected {}",
                    1.0 / rho
                );
            }
        }
    }

    #[test]
    fn degenerate_triangles_are_listed() {
        let verts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0), // collinear
            Point3::new(0.0, 1.0, 0.0),
        ];
        let mesh = TriMesh::new(verts, vec![[0, 1, 2], [0, 1, 3]]).unwrap();
        match mean_curvature(&mesh) {
            Err(Error::DegenerateTriangles(list)) => assert_eq!(list, vec![0]),
            other => panic!("expected degenerate-triangle error, got {other:?}"),
        }
    }

    #[test]
    fn helicoid_immersion_aligns_to_the_exact_surface() {
        let data = WeierstrassData::helicoid();
        let grid = helicoid_grid(33);
        let imm = immerse(&data, &grid, Complex64::default()).unwrap();
        let report =
            align_mesh_to_helicoid(&imm.mesh, &crate::geometry::HelicoidSpec::STANDARD, 12)
                .unwrap();
        let tol = 1e-3 * imm.mesh.diameter();
        assert!(
            report.sup_distance < tol,
            "sup distance {:.3e} vs allowance {:.3e}",
            report.sup_distance,
            tol
        );
        assert!(report.reflected, "the classical convention yields the mirror helicoid");
    }

    #[test]
    fn level_curves_near_the_end_have_two_ends() {
        // with dh double-poled at the puncture, a height level set near the
        // end is a single arc: two ends on the mesh boundary
        let data = WeierstrassData::helicoid();
        let imm = immerse(&data, &helicoid_grid(41), Complex64::default()).unwrap();
        let x3: Vec<f64> = imm.mesh.vertices().iter().map(|p| p.z).collect();
        let comps =
            crate::meshcheck::scalar_level_set(&imm.mesh, &x3, 0.37).unwrap();
        assert_eq!(comps.len(), 1, "one level component near the end");
        assert!(!comps[0].closed);
        let ends = comps[0].endpoints.unwrap();
        assert_eq!(ends.0, crate::meshcheck::EndpointClass::Boundary);
        assert_eq!(ends.1, crate::meshcheck::EndpointClass::Boundary);
    }
}
