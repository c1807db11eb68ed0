//! The self-verification suite: every quantitative claim the toolkit makes
//! about its own numerics, runnable as one batch.
//!
//! Each check produces a deterministic payload (numbers and pass bits
//! only); wall-clock timings are kept in a separate metadata block so the
//! payload bytes are reproducible run to run.

use crate::asymptotics::{
    barrier_laplacian_check, derivative_decay_check, fit_decay_exponent, BarrierKind, BarrierSpec,
};
use crate::curvature::{boundary_gate, curvature_margin_scan, helix_total_curvature, total_curvature};
use crate::geometry::HelicoidSpec;
use crate::grid::{sup_profile, RadialSpacing, ScalarField, WedgeGrid};
use crate::meshcheck::{euler_genus, level_set, synthetic, EndpointClass};
use crate::msolver::{
    assemble_linearization, laplacian_limit_check, newton_solve, q_residual, SolveConfig, WedgeBc,
};
use crate::weierstrass::{
    align_mesh_to_helicoid, immerse, pole_order, residue, CircleLoop, Expr, ParamGrid,
    WeierstrassData,
};
use crate::Result;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::time::Instant;

#[derive(Debug, Clone, Serialize)]
pub struct CheckValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub values: Vec<CheckValue>,
}

impl CheckResult {
    fn new(id: &'static str, name: &'static str) -> Self {
        CheckResult {
            id,
            name,
            pass: true,
            values: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, value: f64) {
        self.values.push(CheckValue {
            name: name.into(),
            value,
        });
    }

    fn require(&mut self, name: impl Into<String>, value: f64, ok: bool) {
        self.pass &= ok;
        self.record(name, value);
    }
}

/// One executed check: the deterministic payload part plus timing metadata.
pub struct CheckOutcome {
    pub result: CheckResult,
    pub seconds: f64,
    pub runtime_limit: Option<f64>,
}

impl CheckOutcome {
    pub fn runtime_ok(&self) -> bool {
        self.runtime_limit.map_or(true, |lim| self.seconds < lim)
    }
}

#[derive(Serialize)]
struct SuitePayload<'a> {
    checks: Vec<&'a CheckResult>,
}

pub struct SuiteOutcome {
    pub outcomes: Vec<CheckOutcome>,
}

impl SuiteOutcome {
    /// The comparison payload: deterministic bytes, no timings.
    pub fn payload_json(&self) -> String {
        let payload = SuitePayload {
            checks: self.outcomes.iter().map(|o| &o.result).collect(),
        };
        serde_json::to_string_pretty(&payload).expect("payload serialization")
    }

    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.pass && o.runtime_ok())
    }

    /// Human-readable pass/fail table.
    pub fn table(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for o in &self.outcomes {
            let status = if o.result.pass && o.runtime_ok() {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = writeln!(
                out,
                "{status}  {:<34} {:>8.2}s  {}",
                o.result.id, o.seconds, o.result.name
            );
        }
        let _ = writeln!(
            out,
            "{}  {} checks",
            if self.all_pass() { "PASS" } else { "FAIL" },
            self.outcomes.len()
        );
        out
    }
}

fn timed(
    id: &'static str,
    name: &'static str,
    limit: Option<f64>,
    body: impl FnOnce(&mut CheckResult) -> Result<()>,
) -> Result<CheckOutcome> {
    let mut result = CheckResult::new(id, name);
    let start = Instant::now();
    body(&mut result)?;
    Ok(CheckOutcome {
        result,
        seconds: start.elapsed().as_secs_f64(),
        runtime_limit: limit,
    })
}

fn ls_order(errors: &[f64]) -> f64 {
    // least-squares slope of log2 error against refinement level
    let xs: Vec<f64> = (0..errors.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    -sxy / sxx
}

// ---------------------------------------------------------------------------
// Individual checks
// ---------------------------------------------------------------------------

/// sup |Q(theta)| on the wedge (A = 1, R_out = 8, h = pi/2) under dyadic
/// refinement 33 -> 257: second-order decrease, finest below 1e-4.
pub fn check_helicoid_minimality() -> Result<CheckOutcome> {
    timed(
        "helicoid-minimality-refinement",
        "residual of the helicoid multigraph under refinement",
        Some(5.0),
        |out| {
            let mut sups = Vec::new();
            for n in [33usize, 65, 129, 257] {
                let g = WedgeGrid::new(1.0, 8.0, FRAC_PI_2, n, n, RadialSpacing::Geometric)?;
                let u = ScalarField::sample(g, |_, t| t);
                let sup = q_residual(&u).sup_norm();
                out.record(format!("sup_q_n{n}"), sup);
                sups.push(sup);
            }
            let order = ls_order(&sups);
            out.require("order", order, (order - 2.0).abs() <= 0.3);
            let finest = *sups.last().expect("nonempty");
            out.require("finest_sup", finest, finest < 1e-4);
            Ok(())
        },
    )
}

/// Deterministic "random" smooth field with analytic derivatives: a small
/// sum of plane waves with seeded coefficients.
struct WaveField {
    terms: Vec<(f64, f64, f64, f64)>, // (amp, kx, ky, phase)
}

impl WaveField {
    fn seeded(seed: &mut u64, terms: usize) -> Self {
        let mut rnd = move || {
            *seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        WaveField {
            terms: (0..terms)
                .map(|_| {
                    (
                        0.4 * rnd(),
                        1.0 + rnd(),
                        1.0 + rnd(),
                        PI * rnd(),
                    )
                })
                .collect(),
        }
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a, b, p)| c * (a * x + b * y + p).sin())
            .sum()
    }

    /// (u1, u2, u11, u12, u22)
    fn jet(&self, x: f64, y: f64) -> (f64, f64, f64, f64, f64) {
        let mut j = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(c, a, b, p) in &self.terms {
            let xi = a * x + b * y + p;
            let (s, co) = xi.sin_cos();
            j.0 += c * a * co;
            j.1 += c * b * co;
            j.2 -= c * a * a * s;
            j.3 -= c * a * b * s;
            j.4 -= c * b * b * s;
        }
        j
    }
}

fn q_of_jet(j: (f64, f64, f64, f64, f64)) -> f64 {
    (1.0 + j.1 * j.1) * j.2 + (1.0 + j.0 * j.0) * j.4 - 2.0 * j.0 * j.1 * j.3
}

/// The algebraic identity `Q(u) - Q(v) = L(u - v)`: the discrete left side
/// matches to rounding, and the discrete operator applied to the sampled
/// difference converges at second order to the analytic identity value.
pub fn check_linearization_identity() -> Result<CheckOutcome> {
    timed(
        "linearization-identity-order",
        "difference of residuals equals the linear operator on the difference",
        Some(5.0),
        |out| {
            let mut seed = 0x5eed_cafe_f00d_1234u64;
            let u_field = WaveField::seeded(&mut seed, 3);
            let v_field = WaveField::seeded(&mut seed, 3);

            // machine-level exactness of the all-discrete identity
            {
                let g = WedgeGrid::new(1.0, 2.0, 1.0, 33, 33, RadialSpacing::Uniform)?;
                let u = ScalarField::sample(g.clone(), |r, t| u_field.value(r * t.cos(), r * t.sin()));
                let v = ScalarField::sample(g.clone(), |r, t| v_field.value(r * t.cos(), r * t.sin()));
                let w = u.zip_with(&v, |a, b| a - b)?;
                let q_diff = q_residual(&u).zip_with(&q_residual(&v), |a, b| a - b)?;
                let lw = assemble_linearization(&u, &v)?.apply(&w)?;
                let exact = q_diff.zip_with(&lw, |a, b| a - b)?.sup_norm();
                out.require("discrete_identity_sup", exact, exact < 1e-9);
            }

            // order-2 convergence of the discrete operator to the analytic
            // identity value, on a fixed physical subregion
            let mut errs = Vec::new();
            for n in [17usize, 33, 65, 129] {
                let g = WedgeGrid::new(1.0, 2.0, 1.0, n, n, RadialSpacing::Uniform)?;
                let u = ScalarField::sample(g.clone(), |r, t| u_field.value(r * t.cos(), r * t.sin()));
                let v = ScalarField::sample(g.clone(), |r, t| v_field.value(r * t.cos(), r * t.sin()));
                let w = u.zip_with(&v, |a, b| a - b)?;
                let lw = assemble_linearization(&u, &v)?.apply(&w)?;
                let mut worst = 0.0f64;
                for (i, j) in g.nodes() {
                    let (r, t) = (g.r(i), g.theta(j));
                    if !(1.1..=1.9).contains(&r) || t.abs() > 0.85 * g.h() {
                        continue;
                    }
                    let (x, y) = (r * t.cos(), r * t.sin());
                    let exact = q_of_jet(u_field.jet(x, y)) - q_of_jet(v_field.jet(x, y));
                    worst = worst.max((lw.value(i, j) - exact).abs());
                }
                out.record(format!("identity_err_n{n}"), worst);
                errs.push(worst);
            }
            let order = ls_order(&errs);
            out.require("order", order, (order - 2.0).abs() <= 0.3);
            Ok(())
        },
    )
}

/// Solve the perturbed wedge problem and fit the decay exponent of
/// `w = u - theta` on `[R_out/16, R_out/2]`; the law is `pi / 2h`.
pub fn decay_case(h: f64) -> Result<(f64, crate::asymptotics::DerivativeDecayReport)> {
    let g = WedgeGrid::new(1.0, 64.0, h, 193, 65, RadialSpacing::Geometric)?;
    let report = newton_solve(&g, &WedgeBc::perturbed(0.5), &SolveConfig::default())?;
    if !report.converged {
        return Err(crate::Error::QuadratureNoConvergence(format!(
            "wedge solve at h = {h} did not converge"
        )));
    }
    let theta = ScalarField::sample(g.clone(), |_, t| t);
    let w = report.field.zip_with(&theta, |a, b| a - b)?;
    let fit = fit_decay_exponent(&sup_profile(&w), (4.0, 32.0))?;
    let deriv = derivative_decay_check(&w, 0.9, (4.0, 32.0))?;
    Ok((fit.beta_hat, deriv))
}

/// Decay exponents at h = pi/2, pi/3, pi/4 against the `pi/2h` law, with
/// the weighted derivative sups trending to zero.
pub fn check_decay_law() -> Result<CheckOutcome> {
    timed(
        "decay-law-pi-over-2h",
        "radial decay of solved wedge perturbations",
        Some(180.0),
        |out| {
            let (beta_half, deriv_half) = decay_case(FRAC_PI_2)?;
            out.require("beta_hat_h_pi_2", beta_half, (0.85..=1.15).contains(&beta_half));
            out.require(
                "derivative_decay_pass_h_pi_2",
                if deriv_half.pass { 1.0 } else { 0.0 },
                deriv_half.pass,
            );
            for row in &deriv_half.rows {
                out.record(format!("grad_weighted_r{}", row.radius), row.first_weighted);
                out.record(format!("hess_weighted_r{}", row.radius), row.second_weighted);
            }

            let (beta_third, _) = decay_case(FRAC_PI_3)?;
            out.record("beta_hat_h_pi_3", beta_third);

            let (beta_quarter, _) = decay_case(FRAC_PI_4)?;
            out.require(
                "beta_hat_h_pi_4",
                beta_quarter,
                (1.7..=2.3).contains(&beta_quarter),
            );

            // the law is monotone: smaller half-angle decays faster
            out.require(
                "monotone_in_h",
                if beta_half < beta_third && beta_third < beta_quarter {
                    1.0
                } else {
                    0.0
                },
                beta_half < beta_third && beta_third < beta_quarter,
            );
            Ok(())
        },
    )
}

/// `Delta f = (beta^2 - alpha^2) r^{-2} f` for the decaying barrier at
/// `(beta, alpha) = (0.5, 0.9)`, `h = pi/2`: the discrete deviation falls
/// at second order, and the identity value is negative where `f > 0`
/// (asserted inside the check itself).
pub fn check_barrier_identity() -> Result<CheckOutcome> {
    timed(
        "barrier-laplacian-identity",
        "comparison functions satisfy their Laplacian identity",
        Some(30.0),
        |out| {
            let spec = BarrierSpec::with_alpha(BarrierKind::Decaying, 0.5, 0.9, FRAC_PI_2)?;
            let mut errs = Vec::new();
            for n in [33usize, 65, 129, 257] {
                let g = WedgeGrid::new(1.0, 4.0, FRAC_PI_2, n, n, RadialSpacing::Uniform)?;
                let dev = barrier_laplacian_check(&spec, &g)?;
                out.record(format!("deviation_n{n}"), dev);
                errs.push(dev);
            }
            let order = ls_order(&errs);
            out.require("order", order, (order - 2.0).abs() <= 0.3);
            Ok(())
        },
    )
}

/// Rescaling helicoid data onto the reference annulus drives the operator
/// coefficients to the Laplacian like `R^{-2}`.
pub fn check_laplacian_limit() -> Result<CheckOutcome> {
    timed(
        "rescaled-coefficients-slope",
        "operator coefficients approach the Laplacian under rescaling",
        Some(30.0),
        |out| {
            let g = WedgeGrid::new(1.0, 64.0, FRAC_PI_2, 257, 65, RadialSpacing::Geometric)?;
            let theta = ScalarField::sample(g, |_, t| t);
            let devs = laplacian_limit_check(&theta, &theta, &[4.0, 8.0, 16.0, 32.0])?;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &(r, d) in &devs {
                out.record(format!("deviation_r{r}"), d);
                xs.push(r.ln());
                ys.push(d.ln());
            }
            let (slope, _, _) = crate::asymptotics::least_squares_line(&xs, &ys);
            out.require("slope", -slope, (-slope - 2.0).abs() <= 0.2);
            Ok(())
        },
    )
}

/// Helix total curvature against the closed form, and the strict margin
/// for the decaying perturbation family at moderate radii.
pub fn check_total_curvature() -> Result<CheckOutcome> {
    timed(
        "total-curvature-helix",
        "helix quadrature matches the closed form; margins stay positive",
        Some(30.0),
        |out| {
            use crate::curvature::{almost_helical_curve, NoPerturbation, PowerCos};
            for (r, span) in [(1.0, PI), (10.0, 2.0 * PI)] {
                let curve = almost_helical_curve(r, &NoPerturbation, (0.0, span))?;
                let total = total_curvature(&curve, 1e-10)?;
                let exact = helix_total_curvature(r, span);
                let rel = (total - exact).abs() / exact;
                out.require(format!("rel_err_r{r}"), rel, rel < 1e-6);
            }

            static SOFT: PowerCos = PowerCos {
                amp: 1.0,
                power: -0.5,
            };
            let rows = curvature_margin_scan(&SOFT, 2.0 * PI, &[10.0, 20.0, 40.0, 80.0], 1e-9)?;
            for row in rows {
                out.require(format!("margin_r{}", row.r), row.margin, row.pass && row.margin > 0.0);
            }
            Ok(())
        },
    )
}

/// Boundary totals of the exact helicoid slab piece: match the closed form,
/// stay strictly under 4 pi, and grow with the cylinder radius.
pub fn check_boundary_gate() -> Result<CheckOutcome> {
    timed(
        "boundary-gate-four-pi",
        "slab boundary curvature stays under the disk-uniqueness threshold",
        Some(30.0),
        |out| {
            use crate::curvature::NoPerturbation;
            let mut last = 0.0;
            for radius in [1.0, 10.0, 100.0, 1000.0] {
                let rep = boundary_gate(FRAC_PI_2, radius, &NoPerturbation, 1e-9)?;
                let closed_form = 2.0 * PI * radius / (radius * radius + 1.0).sqrt() + 2.0 * PI;
                let err = (rep.total - closed_form).abs();
                out.require(format!("closed_form_err_r{radius}"), err, err < 1e-6);
                out.require(
                    format!("under_four_pi_r{radius}"),
                    4.0 * PI - rep.total,
                    rep.pass && rep.total < 4.0 * PI,
                );
                out.require(
                    format!("monotone_r{radius}"),
                    rep.total - last,
                    rep.total > last,
                );
                last = rep.total;
            }
            Ok(())
        },
    )
}

/// Principal curvature of the explicit helicoid from its fundamental
/// forms; the oracle the Weierstrass formula is checked against.
pub fn fundamental_forms_curvature(r: f64) -> f64 {
    let e = 1.0;
    let g = 1.0 + r * r;
    let m = -1.0 / (1.0 + r * r).sqrt();
    (-(-(m * m) / (e * g))).sqrt()
}

/// The helicoid end through the Weierstrass lens: immersion matches the
/// exact surface after registration, the mesh is discretely minimal, `dh`
/// has a residue-free double pole, `dg/g` a double pole, and the curvature
/// formula agrees with the fundamental-forms oracle.
pub fn check_weierstrass_end() -> Result<CheckOutcome> {
    timed(
        "weierstrass-helicoid-end",
        "helicoid data integrates, aligns, and classifies its end",
        Some(60.0),
        |out| {
            let data = WeierstrassData::helicoid();
            let grid = ParamGrid::Rectangle {
                re: (-2.0, 2.0),
                im: (-PI, PI),
                nu: 65,
                nv: 65,
            };
            let imm = immerse(&data, &grid, Complex64::default())?;
            out.require(
                "mean_curvature_sup",
                imm.mean_curvature_sup,
                imm.mean_curvature_sup < 1e-2,
            );

            let align = align_mesh_to_helicoid(&imm.mesh, &HelicoidSpec::STANDARD, 60)?;
            let allowance = 1e-3 * imm.mesh.diameter();
            out.require("alignment_sup", align.sup_distance, align.sup_distance < allowance);
            out.record("alignment_allowance", allowance);

            // end diagnostics in the puncture coordinate eta = 1/zeta
            let dh_end = Expr::constant(Complex64::new(0.0, -1.0)).div(Expr::var().pow(2));
            let dgg_end = Expr::constant(-1.0).div(Expr::var().pow(2));
            let res = residue(
                &dh_end,
                &CircleLoop {
                    center: Complex64::default(),
                    radius: 0.5,
                },
                1e-12,
            )?;
            out.require("dh_residue", res.norm(), res.norm() < 1e-8);
            let radii = [0.5, 0.25, 0.1, 0.05, 0.025];
            let p_dh = pole_order(&dh_end, Complex64::default(), &radii)?;
            let p_dgg = pole_order(&dgg_end, Complex64::default(), &radii)?;
            out.require("dh_pole_order", p_dh.order as f64, p_dh.order == 2);
            out.require("dgg_pole_order", p_dgg.order as f64, p_dgg.order == 2);

            for r in [0.0f64, 1.0, 3.0] {
                let k = data.principal_curvature(Complex64::new(r.asinh(), 0.3))?;
                let oracle = fundamental_forms_curvature(r);
                let err = (k - oracle).abs();
                out.require(format!("curvature_err_r{r}"), err, err < 1e-6);
            }
            Ok(())
        },
    )
}

/// Mesh structure: reference topology, empty off-axis level sets for
/// same-pitch rotated helicoids, and the axis-to-axis level arc on a
/// synthetic perturbed graph.
pub fn check_mesh_structure() -> Result<CheckOutcome> {
    timed(
        "mesh-structure",
        "topology counts and level-set structure on reference meshes",
        Some(30.0),
        |out| {
            let torus = euler_genus(&synthetic::torus(2.0, 0.5, 24, 12))?;
            out.require("torus_chi", torus.chi as f64, torus.chi == 0);
            out.require(
                "torus_genus",
                torus.genus.unwrap_or(-1) as f64,
                torus.genus == Some(1),
            );

            let annulus = euler_genus(&synthetic::annulus(1.0, 2.0, 20, 4))?;
            out.require("annulus_chi", annulus.chi as f64, annulus.chi == 0);
            out.require(
                "annulus_boundary_loops",
                annulus.boundary_loops as f64,
                annulus.boundary_loops == 2,
            );

            // same-pitch rotated helicoids: F is identically zero on the
            // helicoid graph, so every off-zero level is empty
            let heli = synthetic::helicoid_patch(1.0, 0.3, 3.0, -2.0, 2.0, 24, 36);
            for alpha in [0.5, 2.0] {
                let n = level_set(&heli, alpha)?.len();
                out.require(format!("helicoid_level_{alpha}_components"), n as f64, n == 0);
            }

            // synthetic perturbed graph: one arc per admissible level,
            // endpoints on the axis collar above and below the origin
            let r0 = 0.04;
            let w = move |r: f64, t: f64| ((3.0 - r) / (3.0 - r0)) * (FRAC_PI_2 * t / 2.0).cos();
            let mesh = synthetic::perturbed_graph(w, r0, 3.0, -2.0, 2.0, 60, 81);
            for alpha in [0.1, 0.25, 0.4] {
                let comps = level_set(&mesh, alpha)?;
                let single_arc = comps.len() == 1 && !comps[0].closed;
                let ends_ok = comps.len() == 1
                    && matches!(
                        comps[0].endpoints,
                        Some((EndpointClass::ZPlus, EndpointClass::ZMinus))
                            | Some((EndpointClass::ZMinus, EndpointClass::ZPlus))
                    );
                out.require(
                    format!("graph_level_{alpha}_components"),
                    comps.len() as f64,
                    single_arc,
                );
                out.require(
                    format!("graph_level_{alpha}_axis_to_axis"),
                    if ends_ok { 1.0 } else { 0.0 },
                    ends_ok,
                );
            }
            Ok(())
        },
    )
}

/// Re-run a cheap slice of the suite and require byte-identical payloads,
/// witnessing that the computations and their serialization are
/// deterministic in-process. (The command-line determinism check re-runs
/// the whole batch in a fresh process.)
pub fn check_determinism() -> Result<CheckOutcome> {
    timed(
        "deterministic-payload",
        "repeated runs serialize to identical bytes",
        None,
        |out| {
            let once = [
                check_barrier_identity()?,
                check_total_curvature()?,
                check_boundary_gate()?,
            ];
            let twice = [
                check_barrier_identity()?,
                check_total_curvature()?,
                check_boundary_gate()?,
            ];
            let a = serde_json::to_string(&once.iter().map(|o| &o.result).collect::<Vec<_>>())
                .expect("serialize");
            let b = serde_json::to_string(&twice.iter().map(|o| &o.result).collect::<Vec<_>>())
                .expect("serialize");
            out.require("identical_bytes", if a == b { 1.0 } else { 0.0 }, a == b);
            out.record("payload_bytes", a.len() as f64);
            Ok(())
        },
    )
}

/// Run the full suite in its fixed order.
pub fn run_all() -> Result<SuiteOutcome> {
    Ok(SuiteOutcome {
        outcomes: vec![
            check_helicoid_minimality()?,
            check_linearization_identity()?,
            check_decay_law()?,
            check_barrier_identity()?,
            check_laplacian_limit()?,
            check_total_curvature()?,
            check_boundary_gate()?,
            check_weierstrass_end()?,
            check_mesh_structure()?,
            check_determinism()?,
        ],
    })
}
