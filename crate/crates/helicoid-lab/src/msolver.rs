//! The minimal surface operator, its linearization, and a Newton solver for
//! helicoidal Dirichlet problems on wedge grids.
//!
//! A graph `z = u(x1, x2)` is minimal iff
//! `Q(u) = (1 + u2^2) u11 + (1 + u1^2) u22 - 2 u1 u2 u12 = 0`.
//! For two minimal graphs `u` and `v`, the difference `w = u - v` satisfies
//! the linear elliptic equation `L w = a_ij w_ij + b_k w_k = 0` whose
//! coefficients depend on `u` and `v` only; [`assemble_linearization`]
//! produces them verbatim, including the asymmetry that `b` involves `v`'s
//! second derivatives and not `u`'s.

use crate::asymptotics::rescale_field;
use crate::grid::{fd_gradient, fd_hessian, ScalarField, WedgeGrid};
use crate::{Error, Result};
use serde::Serialize;

/// Coefficients of the linear operator `L w = a_ij w_ij + b_k w_k`
/// annihilating differences of minimal graphs.
///
/// `a12` is stored as `u1*u2`; when the operator is applied, the mixed term
/// enters as `-2 a12 w12`, the sign carried by the operator `Q` it
/// linearizes.
pub struct LinearOpCoeffs {
    grid: WedgeGrid,
    pub a11: Vec<f64>,
    pub a22: Vec<f64>,
    pub a12: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
}

impl LinearOpCoeffs {
    pub fn grid(&self) -> &WedgeGrid {
        &self.grid
    }

    /// Apply `L` to a field with the same finite differences used by
    /// [`q_residual`], so that `Q(u) - Q(v) = L(u - v)` holds to rounding.
    pub fn apply(&self, w: &ScalarField) -> Result<ScalarField> {
        if *w.grid() != self.grid {
            return Err(Error::GridMismatch("operator and field grids differ".into()));
        }
        let (w1, w2) = fd_gradient(w);
        let (w11, w12, w22) = fd_hessian(w);
        let values = (0..self.grid.node_count())
            .map(|k| {
                self.a11[k] * w11.values()[k] + self.a22[k] * w22.values()[k]
                    - 2.0 * self.a12[k] * w12.values()[k]
                    + self.b1[k] * w1.values()[k]
                    + self.b2[k] * w2.values()[k]
            })
            .collect();
        ScalarField::from_values(self.grid.clone(), values)
    }

    /// Sup over nodes of `|a - identity|` plus sup of `|b|`; zero exactly
    /// when the operator is the Laplacian.
    pub fn deviation_from_laplacian(&self) -> f64 {
        let mut dev_a = 0.0f64;
        let mut dev_b = 0.0f64;
        for k in 0..self.grid.node_count() {
            dev_a = dev_a
                .max((self.a11[k] - 1.0).abs())
                .max((self.a22[k] - 1.0).abs())
                .max(self.a12[k].abs());
            dev_b = dev_b.max(self.b1[k].abs()).max(self.b2[k].abs());
        }
        dev_a + dev_b
    }
}

/// Pointwise residual of the minimal surface operator.
pub fn q_residual(u: &ScalarField) -> ScalarField {
    let (u1, u2) = fd_gradient(u);
    let (u11, u12, u22) = fd_hessian(u);
    let values = (0..u.grid().node_count())
        .map(|k| {
            let (p1, p2) = (u1.values()[k], u2.values()[k]);
            (1.0 + p2 * p2) * u11.values()[k] + (1.0 + p1 * p1) * u22.values()[k]
                - 2.0 * p1 * p2 * u12.values()[k]
        })
        .collect();
    ScalarField::from_values(u.grid().clone(), values).expect("finite residual values")
}

/// Coefficients of the operator annihilating `u - v`:
/// `a11 = 1 + u2^2`, `a22 = 1 + u1^2`, `a12 = u1 u2`,
/// `b1 = v22 (u1 + v1) - v12 (u2 + v2)`, `b2 = v11 (u2 + v2) - v12 (u1 + v1)`.
pub fn assemble_linearization(u: &ScalarField, v: &ScalarField) -> Result<LinearOpCoeffs> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch("linearization needs u and v on one grid".into()));
    }
    let (u1, u2) = fd_gradient(u);
    let (v1, v2) = fd_gradient(v);
    let (v11, v12, v22) = fd_hessian(v);
    let n = u.grid().node_count();
    let mut coeffs = LinearOpCoeffs {
        grid: u.grid().clone(),
        a11: Vec::with_capacity(n),
        a22: Vec::with_capacity(n),
        a12: Vec::with_capacity(n),
        b1: Vec::with_capacity(n),
        b2: Vec::with_capacity(n),
    };
    for k in 0..n {
        let (p1, p2) = (u1.values()[k], u2.values()[k]);
        let (q1, q2) = (v1.values()[k], v2.values()[k]);
        let a11 = 1.0 + p2 * p2;
        let a22 = 1.0 + p1 * p1;
        let a12 = p1 * p2;
        // Ellipticity certificate: det(a) = 1 + |Du|^2 >= 1 identically.
        let det = a11 * a22 - a12 * a12;
        assert!(
            det >= 1.0 - 1e-12,
            "ellipticity lost at node {k}: det(a) = {det}"
        );
        coeffs.a11.push(a11);
        coeffs.a22.push(a22);
        coeffs.a12.push(a12);
        coeffs.b1.push(v22.values()[k] * (p1 + q1) - v12.values()[k] * (p2 + q2));
        coeffs.b2.push(v11.values()[k] * (p2 + q2) - v12.values()[k] * (p1 + q1));
    }
    Ok(coeffs)
}

// ---------------------------------------------------------------------------
// Boundary data
// ---------------------------------------------------------------------------

/// Named boundary-profile families; evaluated as `u(r, theta)` traces on the
/// wedge boundary. `h` is the wedge half-angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BcProfile {
    /// Trace of the half-helicoid multigraph `u = theta`.
    Theta,
    /// `theta + amp * cos(pi * theta / (2h))`; the bump vanishes on the rays
    /// so corner continuity with helicoidal ray data is automatic.
    ThetaBump { amp: f64 },
    /// Trace of the plane `u = a x + b y`.
    Plane { a: f64, b: f64 },
    Const { value: f64 },
}

impl BcProfile {
    pub fn eval(&self, r: f64, theta: f64, h: f64) -> f64 {
        match *self {
            BcProfile::Theta => theta,
            BcProfile::ThetaBump { amp } => {
                theta + amp * (std::f64::consts::FRAC_PI_2 * theta / h).cos()
            }
            BcProfile::Plane { a, b } => a * r * theta.cos() + b * r * theta.sin(),
            BcProfile::Const { value } => value,
        }
    }
}

/// Dirichlet data on all four sides of the wedge. The ray profile is
/// evaluated at `theta = +-h`; the classical problem uses [`BcProfile::Theta`]
/// everywhere, which pins the rays to the constants `+-h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeBc {
    pub inner: BcProfile,
    pub outer: BcProfile,
    pub rays: BcProfile,
}

impl WedgeBc {
    /// Boundary data of the half-helicoid itself.
    pub fn helicoidal() -> Self {
        WedgeBc {
            inner: BcProfile::Theta,
            outer: BcProfile::Theta,
            rays: BcProfile::Theta,
        }
    }

    /// Helicoidal data with a cosine bump of amplitude `amp` on the inner
    /// circle.
    pub fn perturbed(amp: f64) -> Self {
        WedgeBc {
            inner: BcProfile::ThetaBump { amp },
            outer: BcProfile::Theta,
            rays: BcProfile::Theta,
        }
    }

    fn check_corners(&self, grid: &WedgeGrid) -> Result<()> {
        let h = grid.h();
        let corners: [(&'static str, f64, f64, BcProfile); 4] = [
            ("inner, theta = -h", grid.a(), -h, self.inner),
            ("inner, theta = +h", grid.a(), h, self.inner),
            ("outer, theta = -h", grid.r_out(), -h, self.outer),
            ("outer, theta = +h", grid.r_out(), h, self.outer),
        ];
        for (name, r, th, arc) in corners {
            let gap = (arc.eval(r, th, h) - self.rays.eval(r, th, h)).abs();
            if gap > 1e-9 * (1.0 + h + grid.r_out()) {
                return Err(Error::CornerMismatch { corner: name, gap });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Newton solver
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Convergence threshold on the interior sup norm of `Q(u)`.
    pub tol: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
    /// Initial iterate; defaults to the half-helicoid multigraph `u = theta`.
    pub init: Option<ScalarField>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-8,
            max_iters: 20,
            max_halvings: 30,
            init: None,
        }
    }
}

/// Outcome of a Newton solve. The residual history holds the interior sup
/// norm of `Q` before iteration and after each accepted step.
pub struct SolveReport {
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub field: ScalarField,
}

#[derive(Serialize)]
struct SolveReportJson<'a> {
    iterations: usize,
    residuals: &'a [f64],
    converged: bool,
}

impl SolveReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SolveReportJson {
            iterations: self.iterations,
            residuals: &self.residuals,
            converged: self.converged,
        })
        .expect("report serialization cannot fail")
    }
}

fn interior_sup(f: &ScalarField) -> f64 {
    f.interior_sup(1)
}

/// Interior-node derivative fields from compact centered 3-point polar
/// stencils. This is the discretization the Newton system is built on; it
/// matches the assembled Jacobian exactly, which keeps the iteration a true
/// Newton method on the discrete system.
struct CompactFields {
    u1: Vec<f64>,
    u2: Vec<f64>,
    u11: Vec<f64>,
    u12: Vec<f64>,
    u22: Vec<f64>,
}

fn compact_fields(u: &ScalarField) -> CompactFields {
    let g = u.grid();
    let (nr, nt) = (g.n_r(), g.n_theta());
    let n = g.node_count();
    let dt = 2.0 * g.h() / (nt - 1) as f64;
    let mut out = CompactFields {
        u1: vec![0.0; n],
        u2: vec![0.0; n],
        u11: vec![0.0; n],
        u12: vec![0.0; n],
        u22: vec![0.0; n],
    };
    for i in 1..nr - 1 {
        let (r0, r1, r2) = (g.r(i - 1), g.r(i), g.r(i + 1));
        let (hm, hp) = (r1 - r0, r2 - r1);
        let wr1 = [
            -hp / (hm * (hm + hp)),
            (hp - hm) / (hm * hp),
            hm / (hp * (hm + hp)),
        ];
        let wr2 = [
            2.0 / (hm * (hm + hp)),
            -2.0 / (hm * hp),
            2.0 / (hp * (hm + hp)),
        ];
        for j in 1..nt - 1 {
            let mut f_r = 0.0;
            let mut f_rr = 0.0;
            let mut f_rt = 0.0;
            for (p, w1) in wr1.iter().enumerate() {
                let row = i + p - 1;
                f_r += w1 * u.value(row, j);
                f_rr += wr2[p] * u.value(row, j);
                f_rt += w1 * (u.value(row, j + 1) - u.value(row, j - 1)) / (2.0 * dt);
            }
            let f_t = (u.value(i, j + 1) - u.value(i, j - 1)) / (2.0 * dt);
            let f_tt = (u.value(i, j + 1) - 2.0 * u.value(i, j) + u.value(i, j - 1)) / (dt * dt);

            let r = r1;
            let (s, c) = g.theta(j).sin_cos();
            let k = g.idx(i, j);
            out.u1[k] = c * f_r - s * f_t / r;
            out.u2[k] = s * f_r + c * f_t / r;
            out.u11[k] = c * c * f_rr - 2.0 * s * c * f_rt / r + s * s * f_tt / (r * r)
                + s * s * f_r / r
                + 2.0 * s * c * f_t / (r * r);
            out.u22[k] = s * s * f_rr + 2.0 * s * c * f_rt / r + c * c * f_tt / (r * r)
                + c * c * f_r / r
                - 2.0 * s * c * f_t / (r * r);
            out.u12[k] = s * c * f_rr + (c * c - s * s) * f_rt / r - s * c * f_tt / (r * r)
                - s * c * f_r / r
                - (c * c - s * s) * f_t / (r * r);
        }
    }
    out
}

/// `Q(u)` on interior nodes from the compact fields; boundary slots are 0.
fn compact_q(u: &ScalarField, f: &CompactFields) -> ScalarField {
    let g = u.grid();
    let mut values = vec![0.0; g.node_count()];
    for i in 1..g.n_r() - 1 {
        for j in 1..g.n_theta() - 1 {
            let k = g.idx(i, j);
            let (p1, p2) = (f.u1[k], f.u2[k]);
            values[k] = (1.0 + p2 * p2) * f.u11[k] + (1.0 + p1 * p1) * f.u22[k]
                - 2.0 * p1 * p2 * f.u12[k];
        }
    }
    ScalarField::from_values(g.clone(), values).expect("finite compact residual")
}

/// Damped Newton iteration for `Q(u) = 0` with Dirichlet data from `bc`.
///
/// Steps solve the compact 9-point discretization of the operator
/// linearized at the current iterate (banded LU, so the linear residual is
/// at rounding level); step halving keeps the residual history strictly
/// decreasing. Non-convergence within the iteration budget is reported, not
/// raised; a NaN residual is an error.
pub fn newton_solve(grid: &WedgeGrid, bc: &WedgeBc, cfg: &SolveConfig) -> Result<SolveReport> {
    if !(cfg.tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    bc.check_corners(grid)?;

    let h = grid.h();
    let nt = grid.n_theta();
    let nr = grid.n_r();

    let mut u = match &cfg.init {
        Some(f) => {
            if f.grid() != grid {
                return Err(Error::GridMismatch("initial iterate on a different grid".into()));
            }
            f.clone()
        }
        None => ScalarField::sample(grid.clone(), |_, th| th),
    };
    // Impose the Dirichlet data exactly on the boundary nodes.
    {
        let mut vals = u.values().to_vec();
        for (i, j) in grid.nodes() {
            let (r, th) = (grid.r(i), grid.theta(j));
            if j == 0 || j == nt - 1 {
                vals[grid.idx(i, j)] = bc.rays.eval(r, th, h);
            } else if i == 0 {
                vals[grid.idx(i, j)] = bc.inner.eval(r, th, h);
            } else if i == nr - 1 {
                vals[grid.idx(i, j)] = bc.outer.eval(r, th, h);
            }
        }
        u = ScalarField::from_values(grid.clone(), vals)?;
    }

    let mut fields = compact_fields(&u);
    let mut residual = compact_q(&u, &fields);
    let mut res = interior_sup(&residual);
    if !res.is_finite() {
        return Err(Error::NanProduced { context: "initial residual" });
    }
    let mut history = vec![res];
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        let delta = solve_linear_correction(grid, &fields, &residual)?;

        let mut lambda = 1.0;
        let mut halvings = 0;
        let accepted = loop {
            let trial = u
                .zip_with(&delta, |a, d| a + lambda * d)
                .expect("same grid");
            let trial_fields = compact_fields(&trial);
            let trial_residual = compact_q(&trial, &trial_fields);
            let trial_res = interior_sup(&trial_residual);
            if trial_res.is_nan() {
                return Err(Error::NanProduced { context: "newton residual" });
            }
            if trial_res < res || trial_res <= cfg.tol {
                u = trial;
                fields = trial_fields;
                residual = trial_residual;
                res = trial_res;
                break true;
            }
            halvings += 1;
            if halvings > cfg.max_halvings {
                break false;
            }
            lambda *= 0.5;
        };

        if !accepted {
            return Ok(SolveReport {
                iterations,
                residuals: history,
                converged: false,
                field: u,
            });
        }
        iterations += 1;
        history.push(res);
        if res <= cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        iterations,
        residuals: history,
        converged,
        field: u,
    })
}

/// Assemble and solve the banded linear system `J delta = -Q(u)` with
/// homogeneous Dirichlet data. `J` is the exact Jacobian of the compact
/// residual: its coefficients are the linearization formulas evaluated on
/// the compact derivative fields, and the stencils are the same 3-point
/// ones, so the iteration is a true Newton method on the discrete system.
fn solve_linear_correction(
    grid: &WedgeGrid,
    fields: &CompactFields,
    residual: &ScalarField,
) -> Result<ScalarField> {
    let nr = grid.n_r();
    let nt = grid.n_theta();
    let (mr, mt) = (nr - 2, nt - 2);
    let n = mr * mt;
    let band = mt + 1;
    let mut mat = band::BandMatrix::new(n, band, band);
    let mut rhs = vec![0.0; n];

    let dtheta = 2.0 * grid.h() / (nt - 1) as f64;
    let wt1 = [-0.5 / dtheta, 0.0, 0.5 / dtheta];
    let wt2 = [
        1.0 / (dtheta * dtheta),
        -2.0 / (dtheta * dtheta),
        1.0 / (dtheta * dtheta),
    ];

    let unknown = |i: usize, j: usize| -> Option<usize> {
        if i >= 1 && i <= nr - 2 && j >= 1 && j <= nt - 2 {
            Some((i - 1) * mt + (j - 1))
        } else {
            None
        }
    };

    for i in 1..nr - 1 {
        // Non-uniform radial stencil weights at level i.
        let (r0, r1, r2) = (grid.r(i - 1), grid.r(i), grid.r(i + 1));
        let (hm, hp) = (r1 - r0, r2 - r1);
        let wr1 = [
            -hp / (hm * (hm + hp)),
            (hp - hm) / (hm * hp),
            hm / (hp * (hm + hp)),
        ];
        let wr2 = [
            2.0 / (hm * (hm + hp)),
            -2.0 / (hm * hp),
            2.0 / (hp * (hm + hp)),
        ];
        for j in 1..nt - 1 {
            let row = unknown(i, j).expect("interior");
            let k = grid.idx(i, j);
            let r = grid.r(i);
            let (s, c) = grid.theta(j).sin_cos();
            let (p1, p2) = (fields.u1[k], fields.u2[k]);
            let (a11, a22, a12) = (1.0 + p2 * p2, 1.0 + p1 * p1, p1 * p2);
            let b1 = 2.0 * (fields.u22[k] * p1 - fields.u12[k] * p2);
            let b2 = 2.0 * (fields.u11[k] * p2 - fields.u12[k] * p1);

            // Polar-coordinate coefficients of the Cartesian operator.
            let p_rr = a11 * c * c + a22 * s * s - 2.0 * a12 * s * c;
            let p_rt = (2.0 * s * c * (a22 - a11) - 2.0 * a12 * (c * c - s * s)) / r;
            let p_tt = (a11 * s * s + a22 * c * c + 2.0 * a12 * s * c) / (r * r);
            let p_r = (a11 * s * s + a22 * c * c + 2.0 * a12 * s * c) / r + b1 * c + b2 * s;
            let p_t = (2.0 * s * c * (a11 - a22) + 2.0 * a12 * (c * c - s * s)) / (r * r)
                + (-b1 * s + b2 * c) / r;

            for (p, dr) in [(0usize, -1isize), (1, 0), (2, 1)] {
                let ii = (i as isize + dr) as usize;
                if let Some(col) = unknown(ii, j) {
                    mat.add(row, col, p_rr * wr2[p] + p_r * wr1[p]);
                }
                for (q, dt) in [(0usize, -1isize), (1, 0), (2, 1)] {
                    let jj = (j as isize + dt) as usize;
                    if let Some(col) = unknown(ii, jj) {
                        mat.add(row, col, p_rt * wr1[p] * wt1[q]);
                    }
                }
            }
            for (q, dt) in [(0usize, -1isize), (1, 0), (2, 1)] {
                let jj = (j as isize + dt) as usize;
                if let Some(col) = unknown(i, jj) {
                    mat.add(row, col, p_tt * wt2[q] + p_t * wt1[q]);
                }
            }
            rhs[row] = -residual.value(i, j);
        }
    }

    let lu = mat.factor().map_err(|_| Error::NanProduced {
        context: "singular newton system",
    })?;
    lu.solve(&mut rhs);

    let mut delta = vec![0.0; grid.node_count()];
    for i in 1..nr - 1 {
        for j in 1..nt - 1 {
            delta[grid.idx(i, j)] = rhs[(i - 1) * mt + (j - 1)];
        }
    }
    ScalarField::from_values(grid.clone(), delta)
}

/// For each scale `R`, rescale `u` and `v` onto the reference annulus,
/// assemble the linearization there, and report the sup deviation of the
/// coefficients from the Laplacian.
pub fn laplacian_limit_check(
    u: &ScalarField,
    v: &ScalarField,
    scales: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(scales.len());
    for &big_r in scales {
        let u_r = rescale_field(u, big_r)?;
        let v_r = rescale_field(v, big_r)?;
        let coeffs = assemble_linearization(&u_r, &v_r)?;
        out.push((big_r, coeffs.deviation_from_laplacian()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Banded LU with partial pivoting
// ---------------------------------------------------------------------------

pub(crate) mod band {
    /// General band matrix in LAPACK band storage: entry `(i, j)` lives at
    /// band row `kl + ku + i - j`; the top `kl` rows hold pivoting fill.
    pub struct BandMatrix {
        n: usize,
        kl: usize,
        ku: usize,
        ab: Vec<f64>,
    }

    pub struct BandLu {
        n: usize,
        kl: usize,
        kv: usize,
        ab: Vec<f64>,
        ipiv: Vec<usize>,
    }

    impl BandMatrix {
        pub fn new(n: usize, kl: usize, ku: usize) -> Self {
            BandMatrix {
                n,
                kl,
                ku,
                ab: vec![0.0; (2 * kl + ku + 1) * n],
            }
        }

        #[inline]
        fn slot(&self, i: usize, j: usize) -> usize {
            let row = self.kl + self.ku + i - j;
            row * self.n + j
        }

        pub fn add(&mut self, i: usize, j: usize, v: f64) {
            debug_assert!(i < self.n && j < self.n);
            debug_assert!(j as isize - (i as isize) <= self.ku as isize);
            debug_assert!(i as isize - (j as isize) <= self.kl as isize);
            let s = self.slot(i, j);
            self.ab[s] += v;
        }

        /// LU factorization with partial pivoting (row swaps stay inside the
        /// widened band). Fails on an exactly singular pivot.
        pub fn factor(mut self) -> Result<BandLu, ()> {
            let n = self.n;
            let kl = self.kl;
            let kv = self.kl + self.ku;
            let mut ipiv = vec![0usize; n];
            for j in 0..n {
                let km = kl.min(n - 1 - j);
                // pivot search over rows j..=j+km of column j
                let mut jp = 0usize;
                let mut amax = self.ab[kv * n + j].abs();
                for p in 1..=km {
                    let v = self.ab[(kv + p) * n + j].abs();
                    if v > amax {
                        amax = v;
                        jp = p;
                    }
                }
                ipiv[j] = j + jp;
                if amax == 0.0 {
                    return Err(());
                }
                if jp != 0 {
                    let hi = (j + kv).min(n - 1);
                    for col in j..=hi {
                        let r1 = (kv + j - col) * n + col;
                        let r2 = (kv + j + jp - col) * n + col;
                        self.ab.swap(r1, r2);
                    }
                }
                if km > 0 {
                    let pivot = self.ab[kv * n + j];
                    for p in 1..=km {
                        self.ab[(kv + p) * n + j] /= pivot;
                    }
                    let hi = (j + kv).min(n - 1);
                    for col in j + 1..=hi {
                        let t = self.ab[(kv + j - col) * n + col];
                        if t != 0.0 {
                            for p in 1..=km {
                                self.ab[(kv + j + p - col) * n + col] -=
                                    self.ab[(kv + p) * n + j] * t;
                            }
                        }
                    }
                }
            }
            Ok(BandLu {
                n,
                kl,
                kv,
                ab: self.ab,
                ipiv,
            })
        }
    }

    impl BandLu {
        pub fn solve(&self, b: &mut [f64]) {
            let n = self.n;
            let kv = self.kv;
            // forward: apply pivots and the unit lower factor
            for j in 0..n {
                let jp = self.ipiv[j];
                if jp != j {
                    b.swap(j, jp);
                }
                let km = self.kl.min(n - 1 - j);
                for p in 1..=km {
                    b[j + p] -= self.ab[(kv + p) * n + j] * b[j];
                }
            }
            // backward: banded upper-triangular solve
            for j in (0..n).rev() {
                b[j] /= self.ab[kv * n + j];
                let lo = j.saturating_sub(kv);
                for i in lo..j {
                    b[i] -= self.ab[(kv + i - j) * n + j] * b[j];
                }
            }
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialSpacing;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn grid(n: usize) -> WedgeGrid {
        WedgeGrid::new(1.0, 2.0, 1.0, n, n, RadialSpacing::Uniform).unwrap()
    }

    #[test]
    fn planes_are_discretely_minimal() {
        let g = grid(65);
        let plane = ScalarField::sample(g, |r, t| 0.3 * r * t.cos() - 0.2 * r * t.sin() + 0.7);
        let q = q_residual(&plane);
        assert!(
            q.interior_sup(2) < 2e-4,
            "plane residual {:.3e}",
            q.interior_sup(2)
        );
    }

    #[test]
    fn residual_of_x_squared_is_two() {
        let g = grid(65);
        let f = ScalarField::sample(g.clone(), |r, t| (r * t.cos()).powi(2));
        let q = q_residual(&f);
        for i in 2..g.n_r() - 2 {
            for j in 2..g.n_theta() - 2 {
                assert_abs_diff_eq!(q.value(i, j), 2.0, epsilon = 3e-2);
            }
        }
    }

    #[test]
    fn helicoid_multigraph_is_minimal() {
        let g = WedgeGrid::new(1.0, 8.0, FRAC_PI_2, 65, 65, RadialSpacing::Geometric).unwrap();
        let heli = ScalarField::sample(g, |_, t| t);
        let q = q_residual(&heli);
        assert!(q.sup_norm() < 2e-3, "helicoid residual {:.3e}", q.sup_norm());
    }

    #[test]
    fn linearization_at_zero_is_laplacian() {
        let g = grid(17);
        let zero = ScalarField::sample(g, |_, _| 0.0);
        let coeffs = assemble_linearization(&zero, &zero).unwrap();
        assert_eq!(coeffs.deviation_from_laplacian(), 0.0);
    }

    #[test]
    fn linearization_at_unit_slope() {
        // Du = (1, 0) constant: a11 = 1, a22 = 2, a12 = 0, b = 0.
        let g = grid(65);
        let u = ScalarField::sample(g.clone(), |r, t| r * t.cos());
        let zero = ScalarField::sample(g.clone(), |_, _| 0.0);
        let coeffs = assemble_linearization(&u, &zero).unwrap();
        for i in 2..g.n_r() - 2 {
            for j in 2..g.n_theta() - 2 {
                let k = g.idx(i, j);
                assert_abs_diff_eq!(coeffs.a11[k], 1.0, epsilon = 1e-3);
                assert_abs_diff_eq!(coeffs.a22[k], 2.0, epsilon = 1e-3);
                assert_abs_diff_eq!(coeffs.a12[k], 0.0, epsilon = 1e-3);
                assert_abs_diff_eq!(coeffs.b1[k], 0.0, epsilon = 1e-3);
                assert_abs_diff_eq!(coeffs.b2[k], 0.0, epsilon = 1e-3);
            }
        }
    }

    #[test]
    fn discrete_linearization_identity_is_exact() {
        // Q(u) - Q(v) = L(u - v) is an algebraic identity in the discrete
        // derivative fields, so it must hold to rounding on any grid.
        let g = grid(21);
        let u = ScalarField::sample(g.clone(), |r, t| (1.1 * r * t.cos()).sin() + 0.3 * t);
        let v = ScalarField::sample(g.clone(), |r, t| 0.5 * (r * t.sin()).cos() - 0.1 * r);
        let w = u.zip_with(&v, |a, b| a - b).unwrap();
        let q_diff = q_residual(&u)
            .zip_with(&q_residual(&v), |a, b| a - b)
            .unwrap();
        let lw = assemble_linearization(&u, &v).unwrap().apply(&w).unwrap();
        let err = q_diff.zip_with(&lw, |a, b| a - b).unwrap();
        assert!(err.sup_norm() < 1e-10, "identity residual {:.3e}", err.sup_norm());
    }

    fn angle_deviation(u: &ScalarField) -> ScalarField {
        let g = u.grid().clone();
        let theta = ScalarField::sample(g, |_, t| t);
        u.zip_with(&theta, |a, b| a - b).unwrap()
    }

    #[test]
    fn newton_accepts_exact_helicoidal_data() {
        let g = WedgeGrid::new(1.0, 4.0, FRAC_PI_2, 17, 17, RadialSpacing::Uniform).unwrap();
        let report = newton_solve(&g, &WedgeBc::helicoidal(), &SolveConfig::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1, "exact data should converge in one step");
        let w = angle_deviation(&report.field);
        assert!(w.sup_norm() < 1e-9, "w = u - theta sup {:.3e}", w.sup_norm());
    }

    #[test]
    fn newton_recovers_plane_from_planar_data() {
        let g = WedgeGrid::new(1.0, 3.0, 1.0, 21, 21, RadialSpacing::Uniform).unwrap();
        let bc = WedgeBc {
            inner: BcProfile::Plane { a: 0.4, b: -0.3 },
            outer: BcProfile::Plane { a: 0.4, b: -0.3 },
            rays: BcProfile::Plane { a: 0.4, b: -0.3 },
        };
        let report = newton_solve(
            &g,
            &bc,
            &SolveConfig {
                tol: 1e-7,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.converged, "residuals: {:?}", report.residuals);
        let plane = ScalarField::sample(g.clone(), |r, t| 0.4 * r * t.cos() - 0.3 * r * t.sin());
        // the discrete solution differs from the plane by its truncation error
        let err = report.field.zip_with(&plane, |a, b| a - b).unwrap();
        assert!(err.sup_norm() < 5e-4, "plane recovery error {:.3e}", err.sup_norm());
    }

    #[test]
    fn newton_converges_on_perturbed_problem() {
        let g = WedgeGrid::new(1.0, 16.0, FRAC_PI_2, 49, 33, RadialSpacing::Geometric).unwrap();
        let report = newton_solve(&g, &WedgeBc::perturbed(0.5), &SolveConfig::default()).unwrap();
        assert!(report.converged, "residuals: {:?}", report.residuals);
        // history strictly decreasing after the first accepted step
        for k in 1..report.residuals.len() {
            assert!(
                report.residuals[k] < report.residuals[k - 1],
                "residual history not decreasing: {:?}",
                report.residuals
            );
        }
        // discrete maximum principle witness: with zero ray data for w, the
        // largest deviation from the helicoid sits on the inner circle.
        let w = angle_deviation(&report.field);
        let profile = crate::grid::sup_profile(&w);
        let inner = profile[0].1;
        for &(r, s) in &profile {
            assert!(
                s <= inner + 1e-12,
                "sup |w| at r = {r} is {s}, exceeding inner-circle value {inner}"
            );
        }
    }

    #[test]
    fn schwarz_reflection_preserves_minimality() {
        // Solve with helicoidal ray data (constant on the rays), extend the
        // graph across both rays by Schwarz reflection, and verify the
        // extension still satisfies the minimal surface equation away from
        // the fold lines, where the discrete error field kinks.
        let g = WedgeGrid::new(1.0, 8.0, FRAC_PI_2, 33, 33, RadialSpacing::Geometric).unwrap();
        let report = newton_solve(&g, &WedgeBc::perturbed(0.5), &SolveConfig::default()).unwrap();
        assert!(report.converged);
        let ext = crate::grid::schwarz_extend_graph(&report.field).unwrap();
        assert_abs_diff_eq!(ext.grid().h(), std::f64::consts::PI, epsilon = 1e-12);

        let q = q_residual(&ext);
        let eg = ext.grid();
        let h = FRAC_PI_2;
        let dt = 2.0 * eg.h() / (eg.n_theta() - 1) as f64;
        let mut sup_reflected = 0.0f64;
        let mut sup_original = 0.0f64;
        for i in 2..eg.n_r() - 2 {
            for j in 2..eg.n_theta() - 2 {
                let t = eg.theta(j);
                let v = q.value(i, j).abs();
                if t.abs() < h - 2.5 * dt {
                    sup_original = sup_original.max(v);
                } else if t.abs() > h + 2.5 * dt {
                    sup_reflected = sup_reflected.max(v);
                }
            }
        }
        assert!(
            sup_reflected < 10.0 * sup_original + 1e-6,
            "reflected region residual {sup_reflected:.3e} vs original {sup_original:.3e}"
        );

        // the deviation from the extended helicoid is odd across each ray:
        // zero ray data is what makes the reflected graph match up
        let theta_ext = ScalarField::sample(eg.clone(), |_, t| t);
        let w = ext.zip_with(&theta_ext, |a, b| a - b).unwrap();
        let nt_orig = 33usize;
        let off = (nt_orig - 1) / 2;
        let j_top = off + nt_orig - 1;
        for i in 0..eg.n_r() {
            for m in 1..=off {
                assert_abs_diff_eq!(w.value(i, j_top + m), -w.value(i, j_top - m), epsilon = 1e-12);
                assert_abs_diff_eq!(w.value(i, off + m), -w.value(i, off - m), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn corner_mismatch_is_rejected() {
        let g = grid(9);
        let bc = WedgeBc {
            inner: BcProfile::Const { value: 5.0 },
            outer: BcProfile::Theta,
            rays: BcProfile::Theta,
        };
        assert!(matches!(
            newton_solve(&g, &bc, &SolveConfig::default()),
            Err(Error::CornerMismatch { .. })
        ));
    }

    #[test]
    fn laplacian_limit_for_flat_data_is_zero() {
        let g = WedgeGrid::new(1.0, 64.0, 1.0, 65, 17, RadialSpacing::Geometric).unwrap();
        let zero = ScalarField::sample(g, |_, _| 0.0);
        let devs = laplacian_limit_check(&zero, &zero, &[4.0, 8.0]).unwrap();
        for (r, d) in devs {
            assert_eq!(d, 0.0, "flat data must give exactly the Laplacian at R = {r}");
        }
    }

    #[test]
    fn laplacian_limit_rejects_uncovered_scales() {
        let g = WedgeGrid::new(1.0, 8.0, 1.0, 17, 9, RadialSpacing::Geometric).unwrap();
        let zero = ScalarField::sample(g, |_, _| 0.0);
        match laplacian_limit_check(&zero, &zero, &[32.0]) {
            Err(Error::RescaleCoverage { r_lo, r_hi }) => {
                assert!(r_lo <= r_hi, "admissible range [{r_lo}, {r_hi}]");
            }
            other => panic!("expected coverage error, got {:?}", other.map(|_| ())),
        }
    }
}
