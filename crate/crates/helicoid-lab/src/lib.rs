//! Numerical toolkit for helicoidal minimal surfaces.
//!
//! The crate is organized around the objects that show up when studying
//! surfaces asymptotic to a helicoid:
//!
//! - [`geometry`] — exact helicoid models, screw motions, the half-helicoid
//!   foliation of space, and the leaf functional `F = theta - z`.
//! - [`grid`] — polar wedge grids `{A <= r <= R_out, |theta| <= h}`, scalar
//!   fields on them, and finite-difference calculus in Cartesian components.
//! - [`msolver`] — the minimal surface operator `Q`, its linearization `L`,
//!   and a damped Newton solver for helicoidal Dirichlet problems.
//! - [`asymptotics`] — power-law barriers, decay-exponent fitting against the
//!   `pi/2h` law, rescaling machinery, and asymptotic-helicoid fits.
//! - [`curvature`] — total curvature of space curves by adaptive quadrature
//!   and the `4*pi` boundary-curvature gate for slab pieces.
//! - [`weierstrass`] — evaluation of `(g, dh)` data, integration to immersed
//!   meshes, residue/pole-order diagnostics, and curvature formulas.
//! - [`meshcheck`] — triangle-mesh topology, symmetry, and level-set
//!   structure checks, with OBJ import/export.
//! - [`config`] — key-value solver configuration and boundary-profile specs.
//! - [`checks`] — the self-verification suite behind `helicoid all-checks`.

pub mod asymptotics;
pub mod checks;
pub mod config;
pub mod curvature;
pub mod geometry;
pub mod grid;
pub mod meshcheck;
pub mod msolver;
pub mod weierstrass;

use thiserror::Error;

/// Crate-wide error type. Variants carry enough data to act on the failure
/// (admissible ranges, offending ids) rather than just a message.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("foliation undefined on Z (point lies on the axis)")]
    AxisPoint,

    #[error("distance minimization did not converge within budget; best bound {best_bound}")]
    DistanceNoConvergence { best_bound: f64 },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("NaN encountered in {context}")]
    NanProduced { context: &'static str },

    #[error("nonpositive value at radial level r = {r} (log fit undefined)")]
    NonpositiveProfile { r: f64 },

    #[error("field does not cover the rescaled annulus; admissible R range is [{r_lo}, {r_hi}]")]
    RescaleCoverage { r_lo: f64, r_hi: f64 },

    #[error("curve is irregular (|c'| = {speed:.3e} at parameter {at})")]
    IrregularCurve { at: f64, speed: f64 },

    #[error("half-angle h = {h} exceeds pi/2: corner budget would exceed 4*pi")]
    GateHalfAngle { h: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNoConvergence(String),

    #[error("period check failed: worst loop at {location} has real period {period:.3e} (tolerance {tol:.3e})")]
    PeriodCheck { location: String, period: f64, tol: f64 },

    #[error("evaluation hit a zero or pole of g at {0}")]
    GaussMapSingular(String),

    #[error("pole order indeterminate: fit residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    PoleOrderIndeterminate { residual: f64, threshold: f64 },

    #[error("non-manifold edge ({0}, {1}) shared by more than two triangles")]
    NonManifoldEdge(usize, usize),

    #[error("mesh is not consistently oriented across edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),

    #[error("degenerate triangles at indices {0:?}")]
    DegenerateTriangles(Vec<usize>),

    #[error("mesh has no per-vertex angle field")]
    MissingThetaField,

    #[error("angle field jumps by {jump:.3} (>= pi) across edge ({v0}, {v1})")]
    ThetaJump { v0: usize, v1: usize, jump: f64 },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("fit window is degenerate: {0}")]
    DegenerateFit(String),

    #[error("boundary data discontinuous at corner ({corner}): gap {gap:.3e}")]
    CornerMismatch { corner: &'static str, gap: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
