//! Barriers, decay-exponent fitting, rescaling, and asymptotic-helicoid fits.
//!
//! The comparison functions `r^{-beta} cos(alpha theta)` and
//! `r^{+beta} cos(alpha theta)` with `beta < alpha < pi/(2h)` are positive on
//! the closed wedge and satisfy `Delta f = (beta^2 - alpha^2) r^{-2} f < 0`
//! where they are positive, which is what makes them usable as super- and
//! subsolutions. The decay they force on a bounded difference `w` of minimal
//! multigraphs is `o(r^{-beta})` for every `beta < pi/2h`; numerically the
//! leading separated mode has exponent exactly `pi/2h`, so a log-log fit of
//! the sup profile recovers it.

use crate::geometry::CylPoint;
use crate::grid::{
    self, fd_gradient, fd_hessian, laplacian, polar_gradient, polar_second_theta, ScalarField,
    WedgeGrid,
};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Sign of the radial power in a barrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierKind {
    /// `r^{-beta} cos(alpha theta)`, the decaying comparison function.
    Decaying,
    /// `r^{+beta} cos(alpha theta)`, the growing one.
    Growing,
}

/// A comparison function `r^{-+beta} cos(alpha theta)` on the wedge of
/// half-angle `h`, with `0 < beta < alpha < pi/(2h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    pub kind: BarrierKind,
    pub beta: f64,
    pub alpha: f64,
    pub h: f64,
}

impl BarrierSpec {
    /// Builds a barrier with `alpha` at the midpoint of `(beta, pi/2h)`.
    pub fn new(kind: BarrierKind, beta: f64, h: f64) -> Result<Self> {
        let limit = FRAC_PI_2 / h;
        BarrierSpec::with_alpha(kind, beta, 0.5 * (beta + limit), h)
    }

    pub fn with_alpha(kind: BarrierKind, beta: f64, alpha: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= std::f64::consts::PI) {
            return Err(Error::invalid("h", format!("half-angle must lie in (0, pi], got {h}")));
        }
        let limit = FRAC_PI_2 / h;
        if !(beta > 0.0) {
            return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
        }
        if !(beta < alpha && alpha < limit) {
            return Err(Error::invalid(
                "alpha",
                format!("need beta < alpha < pi/(2h) = {limit}, got beta = {beta}, alpha = {alpha}"),
            ));
        }
        Ok(BarrierSpec { kind, beta, alpha, h })
    }

    pub fn value(&self, r: f64, theta: f64) -> f64 {
        let power = match self.kind {
            BarrierKind::Decaying => -self.beta,
            BarrierKind::Growing => self.beta,
        };
        r.powf(power) * (self.alpha * theta).cos()
    }
}

pub fn barrier_value(spec: &BarrierSpec, r: f64, theta: f64) -> f64 {
    spec.value(r, theta)
}

/// Evaluates the discrete Laplacian of the barrier on `grid` and returns the
/// sup over interior nodes of `|Delta_h f - (beta^2 - alpha^2) r^{-2} f|`.
///
/// The exact identity value is negative wherever `f` is positive (and the
/// admissibility bounds make `f` positive on the whole closed wedge), which
/// is asserted along the way.
pub fn barrier_laplacian_check(spec: &BarrierSpec, grid: &WedgeGrid) -> Result<f64> {
    if grid.h() > spec.h + 1e-12 {
        return Err(Error::invalid(
            "grid",
            format!("grid half-angle {} exceeds barrier half-angle {}", grid.h(), spec.h),
        ));
    }
    let f = ScalarField::sample(grid.clone(), |r, t| spec.value(r, t));
    let lap = laplacian(&f);
    let factor = spec.beta * spec.beta - spec.alpha * spec.alpha;
    let mut sup = 0.0f64;
    for i in 1..grid.n_r() - 1 {
        for j in 1..grid.n_theta() - 1 {
            let r = grid.r(i);
            let fv = f.value(i, j);
            let identity = factor / (r * r) * fv;
            if fv > 0.0 {
                assert!(identity < 0.0, "identity value must be negative where f > 0");
            }
            sup = sup.max((lap.value(i, j) - identity).abs());
        }
    }
    Ok(sup)
}

/// Result of a log-log least-squares fit of a decay profile.
#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub beta_hat: f64,
    pub intercept: f64,
    pub window: [f64; 2],
    pub residual: f64,
    pub pass: bool,
}

impl DecayFit {
    /// Judge the fit against an expected exponent at a relative tolerance.
    pub fn judge(mut self, expected: f64, rel_tol: f64) -> Self {
        self.pass = (self.beta_hat - expected).abs() <= rel_tol * expected.abs();
        self
    }
}

/// Least-squares line through `(ln r, ln sup)` over the window;
/// `beta_hat = -slope`. Requires at least five levels with positive values.
pub fn fit_decay_exponent(profile: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .filter(|&&(r, _)| r >= window.0 && r <= window.1)
        .copied()
        .collect();
    if pts.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "need at least 5 radial levels in [{}, {}], found {}",
            window.0,
            window.1,
            pts.len()
        )));
    }
    for &(r, v) in &pts {
        if !(v > 0.0) {
            return Err(Error::NonpositiveProfile { r });
        }
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, residual) = least_squares_line(&xs, &ys);
    Ok(DecayFit {
        beta_hat: -slope,
        intercept,
        window: [window.0, window.1],
        residual,
        pass: true,
    })
}

pub(crate) fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Reference-annulus image of `w` under `w_R(p) = w(Rp) / R`, resampled by
/// bilinear interpolation in `(ln r, theta)` onto the fixed annulus
/// `1/2 <= r <= 2` with the source's angular range.
pub fn rescale_field(w: &ScalarField, scale: f64) -> Result<ScalarField> {
    rescale_field_clipped(w, scale, w.grid().h())
}

/// As [`rescale_field`] but clipped to `|theta| <= theta_half`. Feeding a
/// Schwarz-extended field (half-angle `2h`) and clipping at `3h/2` yields the
/// collar on which the interior estimates are applied.
pub fn rescale_field_clipped(w: &ScalarField, scale: f64, theta_half: f64) -> Result<ScalarField> {
    let g = w.grid();
    let r_lo = 2.0 * g.a();
    let r_hi = g.r_out() / 2.0;
    if !(scale >= r_lo && scale <= r_hi) {
        return Err(Error::RescaleCoverage { r_lo, r_hi });
    }
    if !(theta_half > 0.0 && theta_half <= g.h() + 1e-12) {
        return Err(Error::invalid(
            "theta_half",
            format!("must lie in (0, {}], got {theta_half}", g.h()),
        ));
    }
    let n_ref = 33;
    let target = WedgeGrid::new(
        0.5,
        2.0,
        theta_half.min(g.h()),
        n_ref,
        n_ref,
        grid::RadialSpacing::Geometric,
    )?;
    let mut values = Vec::with_capacity(target.node_count());
    for (i, j) in target.nodes() {
        let r = target.r(i);
        let t = target.theta(j);
        let v = w
            .interp_log_bilinear(scale * r, t)
            .ok_or(Error::RescaleCoverage { r_lo, r_hi })?;
        values.push(v / scale);
    }
    ScalarField::from_values(target, values)
}

/// One dyadic-band row of a weighted derivative-decay report.
#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub radius: f64,
    pub first_weighted: f64,
    pub second_weighted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeDecayReport {
    pub beta: f64,
    pub rows: Vec<DecayRow>,
    pub pass: bool,
}

const DECAY_FLOOR: f64 = 1e-12;

fn trending_to_zero(vals: &[f64]) -> bool {
    if vals.iter().all(|&v| v <= DECAY_FLOOR) {
        return true;
    }
    if vals.iter().any(|&v| !v.is_finite()) {
        return false;
    }
    let first = vals[0];
    let last = *vals.last().expect("nonempty");
    let xs: Vec<f64> = (0..vals.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = vals.iter().map(|&v| v.max(DECAY_FLOOR).ln()).collect();
    let (slope, _, _) = least_squares_line(&xs, &ys);
    slope < 0.0 && last < first
}

/// Per dyadic radius in the window, the sups of `r^{1+beta} |Dw|` and
/// `r^{2+beta} |D^2 w|` over the band `r in [R/sqrt2, R*sqrt2)`; passes iff
/// both sequences are bounded and trend to zero.
pub fn derivative_decay_check(
    w: &ScalarField,
    beta: f64,
    window: (f64, f64),
) -> Result<DerivativeDecayReport> {
    if !(beta > 0.0) {
        return Err(Error::invalid("beta", "must be positive"));
    }
    let (w1, w2) = fd_gradient(w);
    let (w11, w12, w22) = fd_hessian(w);
    let grad = w1.zip_with(&w2, |a, b| (a * a + b * b).sqrt())?;
    let hess = w11
        .zip_with(&w12, |a, b| a.abs().max(b.abs()))?
        .zip_with(&w22, |m, c| m.max(c.abs()))?;
    weighted_band_report(w.grid(), &grad, &hess, 1.0 + beta, 2.0 + beta, beta, window)
}

/// As [`derivative_decay_check`] but for the polar angular derivatives with
/// the weaker weight `r^beta` on both.
pub fn angular_derivative_decay(
    w: &ScalarField,
    beta: f64,
    window: (f64, f64),
) -> Result<DerivativeDecayReport> {
    if !(beta > 0.0) {
        return Err(Error::invalid("beta", "must be positive"));
    }
    let (_, wt) = polar_gradient(w);
    let wtt = polar_second_theta(w);
    let first = wt.map(f64::abs);
    let second = wtt.map(f64::abs);
    weighted_band_report(w.grid(), &first, &second, beta, beta, beta, window)
}

fn weighted_band_report(
    g: &WedgeGrid,
    first: &ScalarField,
    second: &ScalarField,
    pow1: f64,
    pow2: f64,
    beta: f64,
    window: (f64, f64),
) -> Result<DerivativeDecayReport> {
    let mut rows = Vec::new();
    let mut radius = window.0;
    let sqrt2 = std::f64::consts::SQRT_2;
    while radius <= window.1 * (1.0 + 1e-12) {
        // bands stay inside the window; past its top the data is dominated
        // by whatever truncation the caller is trying to exclude
        let (lo, hi) = (radius / sqrt2, (radius * sqrt2).min(window.1 * (1.0 + 1e-12)));
        let mut s1 = 0.0f64;
        let mut s2 = 0.0f64;
        let mut hit = false;
        for (i, j) in g.nodes() {
            let r = g.r(i);
            if r >= lo && r < hi {
                hit = true;
                s1 = s1.max(r.powf(pow1) * first.value(i, j).abs());
                s2 = s2.max(r.powf(pow2) * second.value(i, j).abs());
            }
        }
        if hit {
            rows.push(DecayRow {
                radius,
                first_weighted: s1,
                second_weighted: s2,
            });
        }
        radius *= 2.0;
    }
    if rows.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "window [{}, {}] holds {} dyadic bands, need at least 2",
            window.0,
            window.1,
            rows.len()
        )));
    }
    let firsts: Vec<f64> = rows.iter().map(|r| r.first_weighted).collect();
    let seconds: Vec<f64> = rows.iter().map(|r| r.second_weighted).collect();
    let pass = trending_to_zero(&firsts) && trending_to_zero(&seconds);
    Ok(DerivativeDecayReport { beta, rows, pass })
}

/// Result of fitting an asymptotic helicoid to multigraph samples.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoteFit {
    /// Fitted pitch of the asymptotic helicoid.
    pub pitch: f64,
    /// Intercept `c` of `z ~ pitch * theta + c`.
    pub intercept: f64,
    /// Angle where the fitted ruling crosses `z = 0`, reduced mod `2 pi`.
    pub phase: f64,
    /// Decay threshold `|pitch / t| * pi` for the screw lift `t`.
    pub beta_max: f64,
    /// Sup of `|z - (pitch theta + c)|` over all samples.
    pub residual_sup: f64,
    /// Log-log decay fit of the residual against `r`; absent when the
    /// residual is at rounding level.
    pub decay: Option<DecayFit>,
    /// Sup of `|f(r, -theta) + f(r, theta)|` over matched sample pairs;
    /// absent when the samples contain no reflected pairs.
    pub antisymmetry: Option<f64>,
}

/// Fit `z ~ pitch * theta + c` on the large-radius half of the samples,
/// report the decay exponent of the residual and the threshold
/// `beta_max = |pitch/t| * pi`, and check Schwarz antisymmetry of the
/// residual on reflected sample pairs when present.
pub fn helicoid_asymptote_fit(samples: &[CylPoint], t: f64) -> Result<AsymptoteFit> {
    if t == 0.0 {
        return Err(Error::invalid("t", "screw lift must be nonzero"));
    }
    if samples.len() < 8 {
        return Err(Error::DegenerateFit(format!(
            "need at least 8 samples, got {}",
            samples.len()
        )));
    }
    let r_min = samples.iter().map(|p| p.r).fold(f64::INFINITY, f64::min);
    let r_max = samples.iter().map(|p| p.r).fold(0.0f64, f64::max);
    if !(r_min > 0.0 && r_max / r_min >= 100.0) {
        return Err(Error::DegenerateFit(format!(
            "samples must span two decades in r, got [{r_min}, {r_max}]"
        )));
    }
    let th_min = samples.iter().map(|p| p.theta).fold(f64::INFINITY, f64::min);
    let th_max = samples.iter().map(|p| p.theta).fold(f64::NEG_INFINITY, f64::max);
    if th_max - th_min < 0.1 {
        return Err(Error::DegenerateFit(format!(
            "theta range {} too small for a pitch fit",
            th_max - th_min
        )));
    }

    // Pitch and intercept from the outer (large-r) half, where the surface
    // is closest to its asymptote; weighting by r suppresses the bias a
    // decaying perturbation would otherwise leave in the slope.
    let r_split = (r_min * r_max).sqrt();
    let outer: Vec<&CylPoint> = samples.iter().filter(|p| p.r >= r_split).collect();
    let (pitch, intercept) = {
        let wsum: f64 = outer.iter().map(|p| p.r).sum();
        let mx: f64 = outer.iter().map(|p| p.r * p.theta).sum::<f64>() / wsum;
        let my: f64 = outer.iter().map(|p| p.r * p.z).sum::<f64>() / wsum;
        let sxx: f64 = outer.iter().map(|p| p.r * (p.theta - mx) * (p.theta - mx)).sum();
        let sxy: f64 = outer
            .iter()
            .map(|p| p.r * (p.theta - mx) * (p.z - my))
            .sum();
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    };
    if pitch == 0.0 || !pitch.is_finite() {
        return Err(Error::DegenerateFit(format!("fitted pitch {pitch} is degenerate")));
    }

    let resid = |p: &CylPoint| p.z - (pitch * p.theta + intercept);
    let residual_sup = samples.iter().map(|p| resid(p).abs()).fold(0.0, f64::max);
    let z_scale = samples.iter().map(|p| p.z.abs()).fold(1.0, f64::max);

    // Residual decay profile over logarithmic radial bins.
    let decay = if residual_sup > 1e-12 * z_scale {
        let bins = 10usize;
        let log_lo = r_min.ln();
        let log_hi = r_max.ln();
        let mut profile: Vec<(f64, f64)> = Vec::new();
        for b in 0..bins {
            let lo = (log_lo + (log_hi - log_lo) * b as f64 / bins as f64).exp();
            let hi = (log_lo + (log_hi - log_lo) * (b + 1) as f64 / bins as f64).exp();
            let sup = samples
                .iter()
                .filter(|p| p.r >= lo && (p.r < hi || b == bins - 1))
                .map(|p| resid(p).abs())
                .fold(0.0f64, f64::max);
            if sup > 0.0 {
                profile.push(((lo * hi).sqrt(), sup));
            }
        }
        Some(fit_decay_exponent(&profile, (r_min, r_max))?)
    } else {
        None
    };

    // Schwarz antisymmetry on reflected pairs (r, theta) vs (r, -theta).
    let mut anti: Option<f64> = None;
    for p in samples.iter() {
        if p.theta <= 0.0 {
            continue;
        }
        let mirror = samples
            .iter()
            .find(|q| (q.r - p.r).abs() <= 1e-9 * (1.0 + p.r) && (q.theta + p.theta).abs() <= 1e-9);
        if let Some(q) = mirror {
            let dev = (resid(p) + resid(q)).abs();
            anti = Some(anti.unwrap_or(0.0).max(dev));
        }
    }

    Ok(AsymptoteFit {
        pitch,
        intercept,
        phase: (-intercept / pitch).rem_euclid(std::f64::consts::TAU),
        beta_max: (pitch / t).abs() * std::f64::consts::PI,
        residual_sup,
        decay,
        antisymmetry: anti,
    })
}
