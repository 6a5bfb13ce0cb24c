//! Uniform position grids and complex functions sampled on them.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid over dimensionless position `X` (ground-state variance 1/2).
///
/// Grids are always symmetric about zero and include both endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct PositionGrid {
    x_max: f64,
    n_points: usize,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl TryFrom<RawGrid> for PositionGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        if (raw.x_min + raw.x_max).abs() > 1e-12 * raw.x_max.abs().max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "grid must be symmetric about 0, got [{}, {}]",
                raw.x_min, raw.x_max
            )));
        }
        PositionGrid::new(raw.x_max, raw.n_points)
    }
}

impl From<PositionGrid> for RawGrid {
    fn from(g: PositionGrid) -> Self {
        RawGrid { x_min: g.x_min(), x_max: g.x_max, n_points: g.n_points }
    }
}

impl Default for PositionGrid {
    /// `[-8, 8]` with 1024 points: the grid used for targets and pulse synthesis.
    fn default() -> Self {
        Self { x_max: 8.0, n_points: 1024 }
    }
}

impl PositionGrid {
    pub fn new(x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidGrid(format!("x_max must be positive, got {x_max}")));
        }
        if n_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
        }
        Ok(Self { x_max, n_points })
    }

    /// Grid used for Fock-basis state algebra: `[-20, 20]` with 2048 points.
    ///
    /// Wide enough that every Hermite function up to `n = 80` decays below
    /// 1e-8 at the boundary.
    pub fn state_default() -> Self {
        Self { x_max: 20.0, n_points: 2048 }
    }

    /// Grid used for Wigner maps: `[-8, 8]` with 161 points, so `0` is a node.
    pub fn phase_space_default() -> Self {
        Self { x_max: 8.0, n_points: 161 }
    }

    pub fn x_min(&self) -> f64 {
        -self.x_max
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / (self.n_points - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        // symmetric construction keeps x(j) == -x(n-1-j) exactly
        let half = (self.n_points - 1) as f64 / 2.0;
        (j as f64 - half) * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Largest wavenumber the grid resolves, `pi / dx`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }
}

/// Complex samples of a function of position on a [`PositionGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGridFunction")]
pub struct GridFunction {
    grid: PositionGrid,
    values: Vec<C64>,
}

#[derive(Deserialize)]
struct RawGridFunction {
    grid: PositionGrid,
    values: Vec<C64>,
}

impl TryFrom<RawGridFunction> for GridFunction {
    type Error = Error;

    fn try_from(raw: RawGridFunction) -> Result<Self> {
        GridFunction::new(raw.grid, raw.values)
    }
}

impl GridFunction {
    pub fn new(grid: PositionGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("grid function".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: PositionGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Self::new(grid, values)
    }

    pub fn from_real(grid: PositionGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Copy scaled to unit L2 norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { grid: self.grid, values: self.values.iter().map(|v| v / n).collect() })
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `sum_j a_j * conj(b_j) * dx`.
    pub fn inner(&self, other: &GridFunction) -> Result<C64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("inner product of functions on different grids".into()));
        }
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.dx())
    }

    /// Mean and variance of `|f|^2` treated as a (normalized) density.
    pub fn density_moments(&self) -> (f64, f64) {
        let dx = self.grid.dx();
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
        let mean = (0..self.values.len())
            .map(|j| self.grid.x(j) * self.values[j].norm_sqr())
            .sum::<f64>()
            * dx
            / total;
        let var = (0..self.values.len())
            .map(|j| (self.grid.x(j) - mean).powi(2) * self.values[j].norm_sqr())
            .sum::<f64>()
            * dx
            / total;
        (mean, var)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_symmetric() {
        let g = PositionGrid::default();
        assert_eq!(g.x(0), -8.0);
        assert_eq!(g.x(g.n_points() - 1), 8.0);
        for j in 0..g.n_points() {
            assert_eq!(g.x(j), -g.x(g.n_points() - 1 - j));
        }
        let odd = PositionGrid::phase_space_default();
        assert_eq!(odd.x(80), 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(PositionGrid::new(0.0, 10).is_err());
        assert!(PositionGrid::new(1.0, 1).is_err());
        assert!(PositionGrid::new(f64::NAN, 10).is_err());
        let raw = r#"{"x_min":-1.0,"x_max":2.0,"n_points":8}"#;
        assert!(serde_json::from_str::<PositionGrid>(raw).is_err());
    }

    #[test]
    fn function_length_must_match() {
        let g = PositionGrid::new(1.0, 4).unwrap();
        assert!(GridFunction::new(g, vec![C64::new(1.0, 0.0); 3]).is_err());
        assert!(GridFunction::new(g, vec![C64::new(f64::INFINITY, 0.0); 4]).is_err());
    }

    #[test]
    fn zero_function_cannot_be_normalized() {
        let g = PositionGrid::new(1.0, 4).unwrap();
        let f = GridFunction::new(g, vec![C64::new(0.0, 0.0); 4]).unwrap();
        assert!(matches!(f.normalized(), Err(Error::ZeroNorm)));
    }
}
