//! Fock-basis state algebra: thermal states, position-diagonal measurements,
//! free rotation, marginals, Wigner maps and overlaps.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{hermite_functions, BasisTransform};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, PositionGrid};
use crate::state::QuantumState;

/// Outcomes rarer than this are refused rather than renormalized.
pub const MIN_PROBABILITY: f64 = 1e-12;

/// Thermal population left beyond `n_max` that is still accepted.
pub const MAX_THERMAL_TAIL: f64 = 1e-3;

/// Default Fock truncation. At `nbar = 5` the thermal population above
/// `n = 80` is `(5/6)^81 ~ 3.8e-7`.
pub const DEFAULT_N_MAX: usize = 80;

/// Geometric populations `p_n = nbar^n / (nbar + 1)^(n+1)`, truncated at
/// `n_max` and renormalized.
pub fn thermal_state(nbar: f64, n_max: usize) -> Result<QuantumState> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::InvalidParameter(format!("nbar must be >= 0, got {nbar}")));
    }
    let ratio = nbar / (nbar + 1.0);
    let tail = ratio.powi(n_max as i32 + 1);
    if tail > MAX_THERMAL_TAIL {
        return Err(Error::TruncationTooSmall { tail, n_max });
    }
    let pops: Vec<f64> = (0..=n_max).map(|n| ratio.powi(n as i32) / (nbar + 1.0)).collect();
    QuantumState::diagonal(&pops)
}

/// Apply the position-diagonal operator `ups` and post-select on it.
///
/// Returns the conditional state `U rho U^dag / p` and `p = Tr[U^dag U rho]`.
pub fn apply_measurement(
    rho: &QuantumState,
    ups: &GridFunction,
    basis: &BasisTransform,
) -> Result<(QuantumState, f64)> {
    check_dims(rho, basis)?;
    let u = basis.diagonal_operator(ups)?;
    let out = &u * rho.rho() * u.adjoint();
    let p = out.trace().re;
    if !(p >= MIN_PROBABILITY) {
        return Err(Error::VanishingProbability(p));
    }
    Ok((QuantumState::from_unnormalized(out)?, p))
}

/// Born-rule probability of `ups` without forming the conditional state.
pub fn outcome_probability(
    rho: &QuantumState,
    ups: &GridFunction,
    basis: &BasisTransform,
) -> Result<f64> {
    check_dims(rho, basis)?;
    let u = basis.diagonal_operator(ups)?;
    Ok((u.adjoint() * &u * rho.rho()).trace().re)
}

/// Free evolution by phase-space angle `theta`:
/// `rho_mn -> rho_mn exp(-i theta (m - n))`. A quarter mechanical period is
/// `theta = pi/2` and maps `X -> P`.
pub fn rotate(rho: &QuantumState, theta: f64) -> QuantumState {
    let m = rho.rho();
    let out = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        m[(i, j)] * C64::from_polar(1.0, -theta * (i as f64 - j as f64))
    });
    QuantumState::new(out).expect("rotation preserves state invariants")
}

/// `P(x_j) = sum_mn u_m(x_j) rho_mn u_n(x_j)`.
pub fn position_marginal(rho: &QuantumState, basis: &BasisTransform) -> Result<GridFunction> {
    check_dims(rho, basis)?;
    let u = basis.matrix();
    let re = rho.rho().map(|v| v.re);
    let ru = &re * u;
    let p: Vec<f64> = (0..u.ncols()).map(|j| u.column(j).dot(&ru.column(j))).collect();
    GridFunction::from_real(*basis.grid(), &p)
}

/// Momentum distribution, read off as the position marginal after a quarter
/// period.
pub fn momentum_marginal(rho: &QuantumState, basis: &BasisTransform) -> Result<GridFunction> {
    position_marginal(&rotate(rho, FRAC_PI_2), basis)
}

/// `(Var X, Var P)` from ladder-operator moments in the Fock basis.
pub fn quadrature_variances(rho: &QuantumState) -> (f64, f64) {
    let m = rho.rho();
    let dim = rho.dim();
    let mut a = C64::new(0.0, 0.0);
    let mut a2 = C64::new(0.0, 0.0);
    let mut n = 0.0;
    for k in 0..dim {
        n += k as f64 * m[(k, k)].re;
        if k >= 1 {
            a += m[(k, k - 1)] * (k as f64).sqrt();
        }
        if k >= 2 {
            a2 += m[(k, k - 2)] * ((k * (k - 1)) as f64).sqrt();
        }
    }
    let x2 = a2.re + n + 0.5;
    let p2 = -a2.re + n + 0.5;
    let xm = std::f64::consts::SQRT_2 * a.re;
    let pm = std::f64::consts::SQRT_2 * a.im;
    (x2 - xm * xm, p2 - pm * pm)
}

/// `Tr rho^2`.
pub fn purity(rho: &QuantumState) -> f64 {
    rho.rho().iter().map(|v| v.norm_sqr()).sum()
}

/// `F = sqrt(<psi|rho|psi>)` with `psi` normalized on its grid and projected
/// onto the Fock basis.
pub fn state_fidelity(
    rho: &QuantumState,
    target_psi: &GridFunction,
    basis: &BasisTransform,
) -> Result<f64> {
    check_dims(rho, basis)?;
    let c = basis.to_fock(&target_psi.normalized()?)?;
    let f2 = (c.adjoint() * rho.rho() * &c)[(0, 0)].re;
    Ok(f2.clamp(0.0, 1.0).sqrt())
}

fn check_dims(rho: &QuantumState, basis: &BasisTransform) -> Result<()> {
    if rho.dim() != basis.dim() {
        return Err(Error::GridMismatch(format!(
            "state has {} Fock levels, basis has {}",
            rho.dim(),
            basis.dim()
        )));
    }
    Ok(())
}

/// Wigner quasi-probability sampled on a rectangular phase-space grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerMap {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// `values[i][k] = W(x_i, p_k)`.
    pub values: Vec<Vec<f64>>,
}

impl WignerMap {
    fn dx(&self) -> f64 {
        self.x_axis[1] - self.x_axis[0]
    }

    fn dp(&self) -> f64 {
        self.p_axis[1] - self.p_axis[0]
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().flatten().sum::<f64>() * self.dx() * self.dp()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// `int W dp` at each `x`.
    pub fn x_marginal(&self) -> Vec<f64> {
        self.values.iter().map(|row| row.iter().sum::<f64>() * self.dp()).collect()
    }

    /// `int W dx` at each `p`.
    pub fn p_marginal(&self) -> Vec<f64> {
        (0..self.p_axis.len())
            .map(|k| self.values.iter().map(|row| row[k]).sum::<f64>() * self.dx())
            .collect()
    }

    /// Value at the grid node nearest `(x, p)`.
    pub fn at(&self, x: f64, p: f64) -> f64 {
        let near = |axis: &[f64], v: f64| {
            (0..axis.len())
                .min_by(|&a, &b| (axis[a] - v).abs().total_cmp(&(axis[b] - v).abs()))
                .unwrap_or(0)
        };
        self.values[near(&self.x_axis, x)][near(&self.p_axis, p)]
    }
}

/// `W(x, p) = (1/pi) int dy exp(-2 i p y) rho(x + y, x - y)`.
///
/// The position kernel is evaluated on a lattice finer than `x_axis` by an
/// integer factor so that every `x +- y` is a lattice node, and the `y`
/// integral is a direct sum out to the radius where Hermite functions up to
/// `n_max` have decayed.
pub fn wigner(rho: &QuantumState, x_axis: &PositionGrid, p_axis: &PositionGrid) -> Result<WignerMap> {
    let n_max = rho.n_max();
    let radius = (2.0 * n_max as f64 + 1.0).sqrt() + 6.0;
    let p_reach = p_axis.x_max().max(radius);
    // y spacing must keep exp(-2 i p y) unaliased across the p range
    let h_target = PI / (4.0 * p_reach);
    let refine = (x_axis.dx() / h_target).ceil().max(1.0) as usize;
    let h = x_axis.dx() / refine as f64;
    let k_max = (radius / h).ceil() as usize;
    let nx = x_axis.n_points();
    let lattice_len = (nx - 1) * refine + 1 + 2 * k_max;
    let origin = x_axis.x_min() - k_max as f64 * h;

    let dim = n_max + 1;
    let mut phi = DMatrix::<f64>::zeros(dim, lattice_len);
    let mut col = vec![0.0; dim];
    for m in 0..lattice_len {
        hermite_functions(n_max, origin + m as f64 * h, &mut col);
        phi.column_mut(m).copy_from_slice(&col);
    }
    let rho_re = rho.rho().map(|v| v.re);
    let rho_im = rho.rho().map(|v| v.im);
    let r_re = &rho_re * &phi;
    let r_im = &rho_im * &phi;

    let p_vals = x_points(p_axis);
    let values: Vec<Vec<f64>> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let centre = k_max + i * refine;
            // kernel[k] = rho(x_i + y_k, x_i - y_k) for k = 0..=k_max
            let kernel: Vec<C64> = (0..=k_max)
                .map(|k| {
                    let (a, b) = (centre + k, centre - k);
                    let pa = phi.column(a);
                    C64::new(pa.dot(&r_re.column(b)), pa.dot(&r_im.column(b)))
                })
                .collect();
            p_vals
                .iter()
                .map(|&p| {
                    let mut acc = kernel[0].re;
                    for (k, kv) in kernel.iter().enumerate().skip(1) {
                        acc += 2.0 * (C64::from_polar(1.0, -2.0 * p * k as f64 * h) * kv).re;
                    }
                    acc * h / PI
                })
                .collect()
        })
        .collect();
    Ok(WignerMap { x_axis: x_points(x_axis), p_axis: p_vals, values })
}

fn x_points(g: &PositionGrid) -> Vec<f64> {
    g.points()
}
