//! Polar wedge grids, scalar fields, and finite-difference calculus.
//!
//! A [`WedgeGrid`] discretizes `{A <= r <= R_out, |theta| <= h}` with exact
//! boundary rows at `theta = +-h` and columns at `r = A, R_out`. The angular
//! node count is odd so `theta = 0` is a grid line, which the symmetry
//! checks rely on. Radial levels are either uniform or geometric; geometric
//! spacing buys decades of radius at bounded node count, which the decay
//! fitting needs.
//!
//! Derivatives are exposed in Cartesian components (`d/dx1`, `d/dx2`) with
//! polar internals: stencil weights come from local polynomial fits on the
//! actual node positions, centered in the interior and one-sided at the
//! boundary. Hessians are nested first derivatives; the discrete Laplacian
//! used by the barrier checks differentiates twice in polar coordinates
//! directly.

use crate::{Error, Result};
use std::fmt::Write as _;

/// Radial node placement rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialSpacing {
    Uniform,
    /// Constant ratio between consecutive levels.
    Geometric,
}

/// Discretization of the wedge `{A <= r <= R_out, |theta| <= h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeGrid {
    a: f64,
    r_out: f64,
    h: f64,
    n_r: usize,
    n_theta: usize,
    spacing: RadialSpacing,
    r_levels: Vec<f64>,
    thetas: Vec<f64>,
}

impl WedgeGrid {
    pub fn new(
        a: f64,
        r_out: f64,
        h: f64,
        n_r: usize,
        n_theta: usize,
        spacing: RadialSpacing,
    ) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid("A", format!("inner radius must be positive, got {a}")));
        }
        if !(r_out > a) || !r_out.is_finite() {
            return Err(Error::invalid("R_out", format!("outer radius must exceed A = {a}, got {r_out}")));
        }
        if !(h > 0.0 && h <= std::f64::consts::PI) {
            return Err(Error::invalid("h", format!("half-angle must lie in (0, pi], got {h}")));
        }
        if n_r < 3 {
            return Err(Error::invalid("n_r", format!("need at least 3 radial nodes, got {n_r}")));
        }
        if n_theta < 3 {
            return Err(Error::invalid("n_theta", format!("need at least 3 angular nodes, got {n_theta}")));
        }
        if n_theta % 2 == 0 {
            return Err(Error::invalid(
                "n_theta",
                format!("angular node count must be odd so theta = 0 is a grid line, got {n_theta}"),
            ));
        }

        let r_levels = match spacing {
            RadialSpacing::Uniform => {
                let dr = (r_out - a) / (n_r - 1) as f64;
                (0..n_r)
                    .map(|i| if i == n_r - 1 { r_out } else { a + dr * i as f64 })
                    .collect()
            }
            RadialSpacing::Geometric => {
                let q = (r_out / a).powf(1.0 / (n_r - 1) as f64);
                (0..n_r)
                    .map(|i| if i == n_r - 1 { r_out } else { a * q.powi(i as i32) })
                    .collect()
            }
        };

        Ok(WedgeGrid::from_axes(a, r_out, h, spacing, r_levels, symmetric_thetas(h, n_theta)))
    }

    fn from_axes(
        a: f64,
        r_out: f64,
        h: f64,
        spacing: RadialSpacing,
        r_levels: Vec<f64>,
        thetas: Vec<f64>,
    ) -> Self {
        WedgeGrid {
            a,
            r_out,
            h,
            n_r: r_levels.len(),
            n_theta: thetas.len(),
            spacing,
            r_levels,
            thetas,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r_out(&self) -> f64 {
        self.r_out
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn spacing(&self) -> RadialSpacing {
        self.spacing
    }

    pub fn node_count(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_levels[i]
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.thetas[j]
    }

    pub fn r_levels(&self) -> &[f64] {
        &self.r_levels
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    /// Iterate node indices `(i_r, i_theta)` in storage order (theta fastest).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nt = self.n_theta;
        (0..self.n_r).flat_map(move |i| (0..nt).map(move |j| (i, j)))
    }
}

fn symmetric_thetas(h: f64, n_theta: usize) -> Vec<f64> {
    let mid = (n_theta - 1) / 2;
    let dt = 2.0 * h / (n_theta - 1) as f64;
    (0..n_theta)
        .map(|j| {
            if j == mid {
                0.0
            } else if j < mid {
                -h + dt * j as f64
            } else {
                h - dt * (n_theta - 1 - j) as f64
            }
        })
        .collect()
}

/// Real-valued field on a [`WedgeGrid`], one finite value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: WedgeGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: WedgeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::invalid(
                "values",
                format!("expected {} node values, got {}", grid.node_count(), values.len()),
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid("values", format!("non-finite value at node {k}")));
        }
        Ok(ScalarField { grid, values })
    }

    /// Sample `f(r, theta)` at every node.
    pub fn sample(grid: WedgeGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.nodes().map(|(i, j)| f(grid.r(i), grid.theta(j))).collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &WedgeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("zip_with over different grids".into()));
        }
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sup norm over nodes at least `margin` layers away from every boundary.
    pub fn interior_sup(&self, margin: usize) -> f64 {
        let g = &self.grid;
        let mut m = 0.0f64;
        for i in margin..g.n_r.saturating_sub(margin) {
            for j in margin..g.n_theta.saturating_sub(margin) {
                m = m.max(self.value(i, j).abs());
            }
        }
        m
    }

    /// Bilinear interpolation in `(ln r, theta)`; `None` outside the grid.
    pub fn interp_log_bilinear(&self, r: f64, theta: f64) -> Option<f64> {
        let g = &self.grid;
        let eps_r = 1e-12 * g.r_out;
        let eps_t = 1e-12 * (1.0 + g.h);
        if r < g.a - eps_r || r > g.r_out + eps_r || theta < g.thetas[0] - eps_t || theta > g.thetas[g.n_theta - 1] + eps_t {
            return None;
        }
        let r = r.clamp(g.a, g.r_out);
        let theta = theta.clamp(g.thetas[0], g.thetas[g.n_theta - 1]);
        let i = match g.r_levels.partition_point(|&x| x <= r) {
            0 => 0,
            k => (k - 1).min(g.n_r - 2),
        };
        let t_r = (r.ln() - g.r_levels[i].ln()) / (g.r_levels[i + 1].ln() - g.r_levels[i].ln());
        let dt = (g.thetas[g.n_theta - 1] - g.thetas[0]) / (g.n_theta - 1) as f64;
        let jf = (theta - g.thetas[0]) / dt;
        let j = (jf.floor() as usize).min(g.n_theta - 2);
        let t_t = jf - j as f64;
        let v00 = self.value(i, j);
        let v01 = self.value(i, j + 1);
        let v10 = self.value(i + 1, j);
        let v11 = self.value(i + 1, j + 1);
        Some(v00 * (1.0 - t_r) * (1.0 - t_t) + v01 * (1.0 - t_r) * t_t + v10 * t_r * (1.0 - t_t) + v11 * t_r * t_t)
    }

    /// Serialize as CSV with header `r,theta,value`, rows in storage order
    /// (theta fastest), 17 significant digits so values round-trip exactly.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 64 + 16);
        out.push_str("r,theta,value\n");
        for (i, j) in self.grid.nodes() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.grid.r(i),
                self.grid.theta(j),
                self.value(i, j)
            );
        }
        out
    }

    /// Parse the CSV form written by [`ScalarField::to_csv_string`],
    /// reconstructing the grid from the node coordinates.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end_matches('\r').trim() == "r,theta,value" => {}
            Some((_, header)) => {
                return Err(Error::Parse {
                    line: 1,
                    reason: format!("expected header `r,theta,value`, got `{}`", header.trim()),
                })
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    reason: "empty input".into(),
                })
            }
        }

        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (k, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next_f64 = |name: &str| -> Result<f64> {
                let tok = parts.next().ok_or_else(|| Error::Parse {
                    line: k + 1,
                    reason: format!("missing column `{name}`"),
                })?;
                let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
                    line: k + 1,
                    reason: format!("cannot parse `{}` as a number", tok.trim()),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: k + 1,
                        reason: format!("non-finite value in column `{name}`"),
                    });
                }
                Ok(v)
            };
            let r = next_f64("r")?;
            let theta = next_f64("theta")?;
            let value = next_f64("value")?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: k + 1,
                    reason: "too many columns".into(),
                });
            }
            rows.push((r, theta, value));
        }

        grid_from_rows(&rows)
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }
}

fn grid_from_rows(rows: &[(f64, f64, f64)]) -> Result<ScalarField> {
    if rows.len() < 9 {
        return Err(Error::Parse {
            line: rows.len() + 1,
            reason: format!("need at least a 3x3 grid (9 rows), got {}", rows.len()),
        });
    }
    // Angular block length: rows until r changes.
    let r0 = rows[0].0;
    let n_theta = rows.iter().take_while(|row| row.0 == r0).count();
    if n_theta < 3 || n_theta % 2 == 0 {
        return Err(Error::Parse {
            line: 2,
            reason: format!("angular block must be odd and >= 3, got {n_theta}"),
        });
    }
    if rows.len() % n_theta != 0 {
        return Err(Error::Parse {
            line: rows.len() + 1,
            reason: format!("row count {} is not a multiple of the angular block {n_theta}", rows.len()),
        });
    }
    let n_r = rows.len() / n_theta;
    if n_r < 3 {
        return Err(Error::Parse {
            line: rows.len() + 1,
            reason: format!("need at least 3 radial levels, got {n_r}"),
        });
    }

    let thetas: Vec<f64> = rows[..n_theta].iter().map(|row| row.1).collect();
    let h = thetas[n_theta - 1];
    if !(h > 0.0) || (thetas[0] + h).abs() > 1e-9 * (1.0 + h) {
        return Err(Error::Parse {
            line: 2,
            reason: format!("angular range must be symmetric [-h, h], got [{}, {}]", thetas[0], h),
        });
    }
    let dt = 2.0 * h / (n_theta - 1) as f64;
    for (j, &t) in thetas.iter().enumerate() {
        if j > 0 && t <= thetas[j - 1] {
            return Err(Error::Parse {
                line: j + 2,
                reason: "theta must be strictly increasing within a radial block".into(),
            });
        }
        if (t - (-h + dt * j as f64)).abs() > 1e-9 * (1.0 + h) {
            return Err(Error::Parse {
                line: j + 2,
                reason: format!("theta levels are not uniform at index {j}"),
            });
        }
    }

    let mut r_levels = Vec::with_capacity(n_r);
    let mut values = Vec::with_capacity(rows.len());
    for bi in 0..n_r {
        let block = &rows[bi * n_theta..(bi + 1) * n_theta];
        let r = block[0].0;
        if bi > 0 && r <= r_levels[bi - 1] {
            return Err(Error::Parse {
                line: bi * n_theta + 2,
                reason: "r must be strictly increasing across blocks".into(),
            });
        }
        for (j, row) in block.iter().enumerate() {
            if row.0 != r {
                return Err(Error::Parse {
                    line: bi * n_theta + j + 2,
                    reason: "r must be constant within an angular block".into(),
                });
            }
            if (row.1 - thetas[j]).abs() > 1e-9 * (1.0 + h) {
                return Err(Error::Parse {
                    line: bi * n_theta + j + 2,
                    reason: "theta levels differ between radial blocks".into(),
                });
            }
            values.push(row.2);
        }
        r_levels.push(r);
    }
    let a = r_levels[0];
    if !(a > 0.0) {
        return Err(Error::Parse {
            line: 2,
            reason: format!("inner radius must be positive, got {a}"),
        });
    }
    let r_out = r_levels[n_r - 1];

    // Classify the radial rule from the parsed levels.
    let mut dev_uniform = 0.0f64;
    let mut dev_geometric = 0.0f64;
    let d0 = r_levels[1] - r_levels[0];
    let q0 = r_levels[1] / r_levels[0];
    for w in r_levels.windows(2) {
        dev_uniform = dev_uniform.max(((w[1] - w[0]) - d0).abs() / d0);
        dev_geometric = dev_geometric.max((w[1] / w[0] - q0).abs() / q0);
    }
    let spacing = if dev_uniform <= 1e-6 {
        RadialSpacing::Uniform
    } else if dev_geometric <= 1e-6 {
        RadialSpacing::Geometric
    } else {
        return Err(Error::Parse {
            line: 2,
            reason: "radial levels are neither uniform nor geometric".into(),
        });
    };

    let grid = WedgeGrid::from_axes(a, r_out, h, spacing, r_levels, thetas);
    ScalarField::from_values(grid, values)
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Weights of the `m`-th derivative at `x0` from the nodes `xs`, by local
/// polynomial interpolation (Fornberg's recursion).
pub(crate) fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    debug_assert!(n > m);
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Per-node 1-D stencil: start index plus weights.
struct Stencils {
    start: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

/// Stencils of derivative order `m` on the node axis `xs`: symmetric
/// 3-point in the interior, 4-point one-sided at the two endpoints (order 3
/// for first derivatives, order 2 for second ones, so the boundary never
/// degrades the interior rate).
fn build_stencils(xs: &[f64], m: usize) -> Stencils {
    let n = xs.len();
    let edge = 4.min(n);
    let mut start = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let (s, w) = if i == 0 {
            (0, edge)
        } else if i == n - 1 {
            (n - edge, edge)
        } else {
            (i - 1, 3)
        };
        start.push(s);
        weights.push(fd_weights(xs[i], &xs[s..s + w], m));
    }
    Stencils { start, weights }
}

fn apply_radial(field: &ScalarField, st: &Stencils) -> ScalarField {
    let g = field.grid();
    let mut out = vec![0.0; g.node_count()];
    for i in 0..g.n_r() {
        let s = st.start[i];
        let w = &st.weights[i];
        for j in 0..g.n_theta() {
            let mut acc = 0.0;
            for (k, &wk) in w.iter().enumerate() {
                acc += wk * field.value(s + k, j);
            }
            out[g.idx(i, j)] = acc;
        }
    }
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

fn apply_angular(field: &ScalarField, st: &Stencils) -> ScalarField {
    let g = field.grid();
    let mut out = vec![0.0; g.node_count()];
    for j in 0..g.n_theta() {
        let s = st.start[j];
        let w = &st.weights[j];
        for i in 0..g.n_r() {
            let mut acc = 0.0;
            for (k, &wk) in w.iter().enumerate() {
                acc += wk * field.value(i, s + k);
            }
            out[g.idx(i, j)] = acc;
        }
    }
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

/// Polar first derivatives `(df/dr, df/dtheta)`, order 2 everywhere.
pub fn polar_gradient(f: &ScalarField) -> (ScalarField, ScalarField) {
    let g = f.grid();
    let sr = build_stencils(g.r_levels(), 1);
    let thetas: Vec<f64> = (0..g.n_theta()).map(|j| g.theta(j)).collect();
    let st = build_stencils(&thetas, 1);
    (apply_radial(f, &sr), apply_angular(f, &st))
}

/// Polar second angular derivative `d2f/dtheta2`, order 2 everywhere
/// (4-point one-sided stencils at the rays).
pub fn polar_second_theta(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let thetas: Vec<f64> = (0..g.n_theta()).map(|j| g.theta(j)).collect();
    let st = build_stencils(&thetas, 2);
    apply_angular(f, &st)
}

/// Cartesian gradient `(df/dx1, df/dx2)` by the chain rule
/// `d/dx = cos t d/dr - sin t / r d/dt`, `d/dy = sin t d/dr + cos t / r d/dt`.
pub fn fd_gradient(f: &ScalarField) -> (ScalarField, ScalarField) {
    let (fr, ft) = polar_gradient(f);
    let g = f.grid();
    let mut gx = vec![0.0; g.node_count()];
    let mut gy = vec![0.0; g.node_count()];
    for (i, j) in g.nodes() {
        let (s, c) = g.theta(j).sin_cos();
        let r = g.r(i);
        let k = g.idx(i, j);
        gx[k] = c * fr.values[k] - s * ft.values[k] / r;
        gy[k] = s * fr.values[k] + c * ft.values[k] / r;
    }
    (
        ScalarField {
            grid: g.clone(),
            values: gx,
        },
        ScalarField {
            grid: g.clone(),
            values: gy,
        },
    )
}

/// Cartesian Hessian `(f11, f12, f22)` as nested first derivatives; the
/// mixed entry is the `x2`-derivative of the `x1`-derivative.
pub fn fd_hessian(f: &ScalarField) -> (ScalarField, ScalarField, ScalarField) {
    let (gx, gy) = fd_gradient(f);
    let (gxx, gxy) = fd_gradient(&gx);
    let (_, gyy) = fd_gradient(&gy);
    (gxx, gxy, gyy)
}

/// Discrete Laplacian `f_rr + f_r / r + f_tt / r^2` with direct
/// second-derivative stencils (order 2 at the boundary via 4-point
/// one-sided stencils).
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let sr1 = build_stencils(g.r_levels(), 1);
    let sr2 = build_stencils(g.r_levels(), 2);
    let thetas: Vec<f64> = (0..g.n_theta()).map(|j| g.theta(j)).collect();
    let st2 = build_stencils(&thetas, 2);
    let fr = apply_radial(f, &sr1);
    let frr = apply_radial(f, &sr2);
    let ftt = apply_angular(f, &st2);
    let mut out = vec![0.0; g.node_count()];
    for (i, j) in g.nodes() {
        let r = g.r(i);
        let k = g.idx(i, j);
        out[k] = frr.values[k] + fr.values[k] / r + ftt.values[k] / (r * r);
    }
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

/// Per radial level, the sup over theta of `|f|`.
pub fn sup_profile(f: &ScalarField) -> Vec<(f64, f64)> {
    let g = f.grid();
    (0..g.n_r())
        .map(|i| {
            let sup = (0..g.n_theta()).map(|j| f.value(i, j).abs()).fold(0.0, f64::max);
            (g.r(i), sup)
        })
        .collect()
}

/// Extend the graph of `u` across both rays by Schwarz reflection
/// (180-degree rotation about the boundary ruling), doubling the wedge to
/// `|theta| <= 2h`. Requires constant ray data, which is what makes the
/// boundary rulings straight lines.
pub fn schwarz_extend_graph(u: &ScalarField) -> Result<ScalarField> {
    let g = u.grid();
    let n = g.n_theta();
    let top = u.value(0, n - 1);
    let bot = u.value(0, 0);
    for i in 0..g.n_r() {
        let scale = 1.0 + top.abs() + bot.abs();
        if (u.value(i, n - 1) - top).abs() > 1e-10 * scale || (u.value(i, 0) - bot).abs() > 1e-10 * scale {
            return Err(Error::invalid(
                "ray data",
                "Schwarz extension requires constant values on both rays",
            ));
        }
    }

    let n_ext = 2 * n - 1;
    let ext_grid = WedgeGrid::from_axes(
        g.a(),
        g.r_out(),
        2.0 * g.h(),
        g.spacing(),
        g.r_levels().to_vec(),
        symmetric_thetas(2.0 * g.h(), n_ext),
    );
    let off = (n - 1) / 2;
    let mut values = vec![0.0; ext_grid.node_count()];
    for i in 0..g.n_r() {
        for jp in 0..n_ext {
            let v = if jp < off {
                // below the bottom ray: reflect through (theta=-h, z=bot)
                2.0 * bot - u.value(i, off - jp)
            } else if jp >= off + n {
                // above the top ray: reflect through (theta=h, z=top)
                2.0 * top - u.value(i, off + 2 * (n - 1) - jp)
            } else {
                u.value(i, jp - off)
            };
            values[ext_grid.idx(i, jp)] = v;
        }
    }
    ScalarField::from_values(ext_grid, values)
}
