//! Key-value configuration for the wedge solver and the boundary-profile
//! mini-language shared by the config file and the CLI flags.
//!
//! The file format is one `key = value` pair per line, `#` comments, blank
//! lines ignored. Unknown keys are rejected rather than skipped.

use crate::grid::{RadialSpacing, WedgeGrid};
use crate::msolver::{BcProfile, SolveConfig, WedgeBc};
use crate::{Error, Result};

/// Everything a solver run needs: domain, resolution, boundary data, and
/// iteration limits.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverRunConfig {
    pub a: f64,
    pub r_out: f64,
    pub h: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub spacing: RadialSpacing,
    pub inner_bc: BcProfile,
    pub outer_bc: BcProfile,
    pub tol: f64,
    pub max_iters: usize,
    pub damping_max_halvings: usize,
}

impl Default for SolverRunConfig {
    fn default() -> Self {
        SolverRunConfig {
            a: 1.0,
            r_out: 64.0,
            h: std::f64::consts::FRAC_PI_2,
            n_r: 193,
            n_theta: 65,
            spacing: RadialSpacing::Geometric,
            inner_bc: BcProfile::Theta,
            outer_bc: BcProfile::Theta,
            tol: 1e-8,
            max_iters: 20,
            damping_max_halvings: 30,
        }
    }
}

impl SolverRunConfig {
    /// Parse a config file body, overriding the defaults key by key.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = SolverRunConfig::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: k + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Parse {
                line: k + 1,
                reason: format!("cannot parse `{value}` as {what} for key `{key}`"),
            };
            match key {
                "A" => cfg.a = value.parse().map_err(|_| bad("a number"))?,
                "R_out" => cfg.r_out = value.parse().map_err(|_| bad("a number"))?,
                "h" => cfg.h = value.parse().map_err(|_| bad("a number"))?,
                "n_r" => cfg.n_r = value.parse().map_err(|_| bad("an integer"))?,
                "n_theta" => cfg.n_theta = value.parse().map_err(|_| bad("an integer"))?,
                "tol" => cfg.tol = value.parse().map_err(|_| bad("a number"))?,
                "max_iters" => cfg.max_iters = value.parse().map_err(|_| bad("an integer"))?,
                "damping_max_halvings" => {
                    cfg.damping_max_halvings = value.parse().map_err(|_| bad("an integer"))?
                }
                "spacing" => cfg.spacing = parse_spacing(value).ok_or_else(|| bad("a spacing rule"))?,
                "inner_bc" => cfg.inner_bc = parse_bc(value).map_err(|_| bad("a boundary profile"))?,
                "outer_bc" => cfg.outer_bc = parse_bc(value).map_err(|_| bad("a boundary profile"))?,
                other => return Err(Error::UnknownKey(other.to_string())),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    pub fn grid(&self) -> Result<WedgeGrid> {
        WedgeGrid::new(self.a, self.r_out, self.h, self.n_r, self.n_theta, self.spacing)
    }

    pub fn bc(&self) -> WedgeBc {
        WedgeBc {
            inner: self.inner_bc,
            outer: self.outer_bc,
            rays: BcProfile::Theta,
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            max_halvings: self.damping_max_halvings,
            init: None,
        }
    }
}

pub fn parse_spacing(s: &str) -> Option<RadialSpacing> {
    match s.trim() {
        "uniform" => Some(RadialSpacing::Uniform),
        "geometric" => Some(RadialSpacing::Geometric),
        _ => None,
    }
}

/// Boundary-profile mini-language:
/// `theta` | `bump:<amp>` | `plane:<a>:<b>` | `const:<value>`.
pub fn parse_bc(s: &str) -> Result<BcProfile> {
    let s = s.trim();
    let mut parts = s.split(':');
    let head = parts.next().unwrap_or("");
    let mut num = |name: &str| -> Result<f64> {
        let tok = parts
            .next()
            .ok_or_else(|| Error::invalid("bc", format!("`{s}` is missing its {name}")))?;
        let v: f64 = tok
            .trim()
            .parse()
            .map_err(|_| Error::invalid("bc", format!("`{tok}` is not a number in `{s}`")))?;
        if !v.is_finite() {
            return Err(Error::invalid("bc", format!("non-finite {name} in `{s}`")));
        }
        Ok(v)
    };
    let profile = match head {
        "theta" => BcProfile::Theta,
        "bump" => BcProfile::ThetaBump { amp: num("amplitude")? },
        "plane" => BcProfile::Plane {
            a: num("first slope")?,
            b: num("second slope")?,
        },
        "const" => BcProfile::Const { value: num("value")? },
        other => {
            return Err(Error::invalid(
                "bc",
                format!("unknown profile `{other}` (expected theta, bump, plane, or const)"),
            ))
        }
    };
    if parts.next().is_some() {
        return Err(Error::invalid("bc", format!("trailing fields in `{s}`")));
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = "\
# solver setup
A = 1.0
R_out = 32
h = 0.7853981633974483
n_r = 97
n_theta = 33
spacing = uniform
inner_bc = bump:0.5
outer_bc = theta
tol = 1e-9
max_iters = 15
damping_max_halvings = 10
";
        let cfg = SolverRunConfig::parse_str(text).unwrap();
        assert_eq!(cfg.r_out, 32.0);
        assert_eq!(cfg.n_r, 97);
        assert_eq!(cfg.spacing, RadialSpacing::Uniform);
        assert_eq!(cfg.inner_bc, BcProfile::ThetaBump { amp: 0.5 });
        assert_eq!(cfg.max_iters, 15);
        assert!(cfg.grid().is_ok());
    }

    #[test]
    fn defaults_survive_an_empty_config() {
        let cfg = SolverRunConfig::parse_str("\n# nothing here\n").unwrap();
        assert_eq!(cfg, SolverRunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        match SolverRunConfig::parse_str("warp_factor = 9\n") {
            Err(Error::UnknownKey(k)) => assert_eq!(k, "warp_factor"),
            other => panic!("expected unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_are_rejected_with_line_numbers() {
        match SolverRunConfig::parse_str("A = 1.0\nnot a pair\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(SolverRunConfig::parse_str("A = banana\n").is_err());
        assert!(SolverRunConfig::parse_str("spacing = hyperbolic\n").is_err());
    }

    #[test]
    fn bc_profiles_parse() {
        assert_eq!(parse_bc("theta").unwrap(), BcProfile::Theta);
        assert_eq!(parse_bc("bump:0.5").unwrap(), BcProfile::ThetaBump { amp: 0.5 });
        assert_eq!(
            parse_bc("plane:0.4:-0.3").unwrap(),
            BcProfile::Plane { a: 0.4, b: -0.3 }
        );
        assert_eq!(parse_bc("const:2.0").unwrap(), BcProfile::Const { value: 2.0 });
        assert!(parse_bc("bump").is_err());
        assert!(parse_bc("bump:x").is_err());
        assert!(parse_bc("bump:1:2").is_err());
        assert!(parse_bc("sine:1").is_err());
        assert!(parse_bc("const:inf").is_err());
    }
}
