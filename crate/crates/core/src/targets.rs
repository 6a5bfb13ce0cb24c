//! Target wavefunctions / measurement operators.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::basis::hermite_function;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, PositionGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    /// `u_n(x)`, the n-th oscillator eigenfunction.
    Fock { n: usize },
    /// `exp(-x^2 s^2 / 4)`.
    Gaussian { s: f64 },
    /// `exp(-(x - d)^2 / 2) + exp(i phi) exp(-(x + d)^2 / 2)`.
    Cat { separation: f64, relative_phase: f64 },
    /// `exp(i k x)` on `[x_lo, x_hi]`, zero elsewhere.
    TruncatedPlaneWave { k: f64, x_lo: f64, x_hi: f64 },
    /// Two equal Gaussian lobes of standard deviation `width` at `+-separation/2`.
    TwoLobed { separation: f64, width: f64 },
    /// `exp(-(x_bar^2 - x^2)^2)`.
    Quadratic { x_bar: f64 },
}

impl TargetSpec {
    pub fn cat_default() -> Self {
        Self::Cat { separation: 2.0, relative_phase: FRAC_PI_2 }
    }

    pub fn plane_wave_default() -> Self {
        Self::TruncatedPlaneWave { k: 2.0, x_lo: -3.0, x_hi: 3.0 }
    }

    pub fn two_lobed_default() -> Self {
        Self::TwoLobed { separation: 3.0, width: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let ok = match *self {
            Self::Fock { .. } => true,
            Self::Gaussian { s } => s.is_finite() && s > 0.0,
            Self::Cat { separation, relative_phase } => finite(&[separation, relative_phase]),
            Self::TruncatedPlaneWave { k, x_lo, x_hi } => finite(&[k, x_lo, x_hi]) && x_hi > x_lo,
            Self::TwoLobed { separation, width } => finite(&[separation]) && width > 0.0 && width.is_finite(),
            Self::Quadratic { x_bar } => x_bar.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid target parameters: {self}")))
        }
    }

    pub fn value(&self, x: f64) -> C64 {
        let gauss = |c: f64, w: f64| (-(x - c).powi(2) / (2.0 * w * w)).exp();
        match *self {
            Self::Fock { n } => C64::new(hermite_function(n, x), 0.0),
            Self::Gaussian { s } => C64::new((-x * x * s * s / 4.0).exp(), 0.0),
            Self::Cat { separation: d, relative_phase } => {
                C64::new(gauss(d, 1.0), 0.0) + C64::from_polar(gauss(-d, 1.0), relative_phase)
            }
            Self::TruncatedPlaneWave { k, x_lo, x_hi } => {
                if x >= x_lo && x <= x_hi {
                    C64::from_polar(1.0, k * x)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            Self::TwoLobed { separation, width } => {
                C64::new(gauss(separation / 2.0, width) + gauss(-separation / 2.0, width), 0.0)
            }
            Self::Quadratic { x_bar } => C64::new((-(x_bar * x_bar - x * x).powi(2)).exp(), 0.0),
        }
    }
}

/// Sample `spec` on `grid` and normalize to unit L2 norm.
pub fn render_target(spec: &TargetSpec, grid: &PositionGrid) -> Result<GridFunction> {
    spec.validate()?;
    GridFunction::from_fn(*grid, |x| spec.value(x))?.normalized()
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Fock { n } => write!(f, "fock:{n}"),
            Self::Gaussian { s } => write!(f, "gaussian:s={s}"),
            Self::Cat { separation, relative_phase } => write!(f, "cat:d={separation},phi={relative_phase}"),
            Self::TruncatedPlaneWave { k, x_lo, x_hi } => write!(f, "plane:k={k},lo={x_lo},hi={x_hi}"),
            Self::TwoLobed { separation, width } => write!(f, "twolobe:sep={separation},width={width}"),
            Self::Quadratic { x_bar } => write!(f, "quadratic:xbar={x_bar}"),
        }
    }
}

/// Parses `kind[:args]`, e.g. `fock:3`, `gaussian:s=4`, `cat:d=2,phi=1.5708`,
/// `plane:k=2,lo=-3,hi=3`, `twolobe:sep=3,width=0.5`, `quadratic:xbar=1.5`.
/// Omitted keyword arguments take their defaults.
impl FromStr for TargetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = Vec::new();
        for part in args.split(',').filter(|p| !p.trim().is_empty()) {
            kv.push(part.split_once('=').map(|(k, v)| (k.trim(), v.trim())).unwrap_or(("", part.trim())));
        }
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match kv.iter().find(|(k, _)| *k == key) {
                Some((_, v)) => v
                    .parse::<f64>()
                    .map_err(|_| Error::UnsupportedTarget(format!("bad value for {key} in '{s}'"))),
                None => default.ok_or_else(|| Error::UnsupportedTarget(format!("missing {key} in '{s}'"))),
            }
        };
        let known = |keys: &[&str]| -> Result<()> {
            match kv.iter().find(|(k, _)| !keys.contains(k)) {
                Some((k, _)) => Err(Error::UnsupportedTarget(format!("unknown argument '{k}' in '{s}'"))),
                None => Ok(()),
            }
        };
        let spec = match kind.trim() {
            "fock" => {
                let raw = kv.iter().find(|(k, _)| k.is_empty() || *k == "n").map(|(_, v)| *v);
                let n = raw
                    .ok_or_else(|| Error::UnsupportedTarget(format!("missing Fock number in '{s}'")))?
                    .parse::<usize>()
                    .map_err(|_| Error::UnsupportedTarget(format!("bad Fock number in '{s}'")))?;
                Self::Fock { n }
            }
            "gaussian" => {
                known(&["s"])?;
                Self::Gaussian { s: num("s", None)? }
            }
            "cat" => {
                known(&["d", "phi"])?;
                Self::Cat { separation: num("d", Some(2.0))?, relative_phase: num("phi", Some(FRAC_PI_2))? }
            }
            "plane" => {
                known(&["k", "lo", "hi"])?;
                Self::TruncatedPlaneWave {
                    k: num("k", Some(2.0))?,
                    x_lo: num("lo", Some(-3.0))?,
                    x_hi: num("hi", Some(3.0))?,
                }
            }
            "twolobe" => {
                known(&["sep", "width"])?;
                Self::TwoLobed { separation: num("sep", Some(3.0))?, width: num("width", Some(0.5))? }
            }
            "quadratic" => {
                known(&["xbar"])?;
                Self::Quadratic { x_bar: num("xbar", None)? }
            }
            other => return Err(Error::UnsupportedTarget(format!("unknown target kind '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_changes(f: &GridFunction) -> usize {
        let v: Vec<f64> = f.values().iter().map(|c| c.re).filter(|r| r.abs() > 1e-9).collect();
        v.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    }

    #[test]
    fn fock_node_counts() {
        let grid = PositionGrid::default();
        for n in 0..6 {
            let f = render_target(&TargetSpec::Fock { n }, &grid).unwrap();
            assert_eq!(sign_changes(&f), n);
            assert!((f.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_flat_inside_window() {
        let grid = PositionGrid::default();
        let f = render_target(&TargetSpec::plane_wave_default(), &grid).unwrap();
        let inside: Vec<f64> = (0..grid.n_points())
            .filter(|&j| grid.x(j).abs() <= 3.0)
            .map(|j| f.values()[j].norm())
            .collect();
        let first = inside[0];
        assert!(inside.iter().all(|v| (v - first).abs() < 1e-12));
        assert!((0..grid.n_points())
            .filter(|&j| grid.x(j).abs() > 3.0)
            .all(|j| f.values()[j].norm() == 0.0));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["fock:3", "gaussian:s=4", "cat:d=2,phi=1.5708", "plane:k=2,lo=-3,hi=3", "quadratic:xbar=1.5", "twolobe:sep=3,width=0.5"] {
            let spec: TargetSpec = s.parse().unwrap();
            let again: TargetSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again);
        }
        assert_eq!("cat".parse::<TargetSpec>().unwrap(), TargetSpec::cat_default());
    }

    #[test]
    fn parse_errors() {
        assert!("banana:1".parse::<TargetSpec>().is_err());
        assert!("gaussian".parse::<TargetSpec>().is_err());
        assert!("gaussian:s=-1".parse::<TargetSpec>().is_err());
        assert!("plane:k=1,lo=2,hi=1".parse::<TargetSpec>().is_err());
        assert!("gaussian:s=1,q=2".parse::<TargetSpec>().is_err());
        assert!("fock:x".parse::<TargetSpec>().is_err());
    }
}
