//! Qubit amplitudes under a shaped drive, one resonator position at a time.
//!
//! For a fixed position `x` the qubit sees the two-level Hamiltonian
//!
//! ```text
//! H(t) = [[ lambda0 x,  conj(alpha(t)) ],
//!         [ alpha(t),  -lambda0 x      ]]     in the (e, g) basis,
//! ```
//!
//! so `dc_e/dt = -i lambda0 x c_e - i conj(alpha) c_g` and
//! `dc_g/dt = i lambda0 x c_g - i alpha c_e`. With `alpha` held constant over
//! each sample interval the propagator over one step is the exact rotation
//! `cos(W dt) - i sin(W dt)/W * H`, `W^2 = (lambda0 x)^2 + |alpha|^2`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, PositionGrid};
use crate::operator::MeasurementOperator;
use crate::pulse::Pulse;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelAmplitudes {
    pub c_g: C64,
    pub c_e: C64,
}

impl TwoLevelAmplitudes {
    pub fn ground() -> Self {
        Self { c_g: C64::new(1.0, 0.0), c_e: C64::new(0.0, 0.0) }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_g.norm_sqr() + self.c_e.norm_sqr()
    }

    /// Advance by `dt` under constant drive `alpha` and splitting `delta = lambda0 x`.
    #[inline]
    pub fn step(self, delta: f64, alpha: C64, dt: f64) -> Self {
        let w = (delta * delta + alpha.norm_sqr()).sqrt();
        let phase = w * dt;
        let (sin, cos) = phase.sin_cos();
        // sin(W dt)/W, continuous through W -> 0
        let sinc_dt = if phase.abs() < 1e-8 { dt } else { sin / w };
        let he = delta * self.c_e + alpha.conj() * self.c_g;
        let hg = alpha * self.c_e - delta * self.c_g;
        Self { c_e: cos * self.c_e - I * sinc_dt * he, c_g: cos * self.c_g - I * sinc_dt * hg }
    }
}

/// Amplitudes at the end of `pulse` for a resonator held at position `x`,
/// starting from the qubit ground state.
pub fn propagate_point(x: f64, pulse: &Pulse, lambda0_scaled: f64) -> Result<TwoLevelAmplitudes> {
    if !x.is_finite() || !lambda0_scaled.is_finite() {
        return Err(Error::NonFinite("position or coupling".into()));
    }
    let delta = lambda0_scaled * x;
    let dt = pulse.dt();
    Ok(pulse
        .samples()
        .iter()
        .fold(TwoLevelAmplitudes::ground(), |amp, &alpha| amp.step(delta, alpha, dt)))
}

/// Measurement operator realized by `pulse`: `Ue(x) = c_e(x, tau)`,
/// `Ug(x) = c_g(x, tau)` at every grid point.
pub fn realize_operator(
    pulse: &Pulse,
    grid: &PositionGrid,
    lambda0_scaled: f64,
) -> Result<MeasurementOperator> {
    let amps: Vec<TwoLevelAmplitudes> = (0..grid.n_points())
        .into_par_iter()
        .map(|j| propagate_point(grid.x(j), pulse, lambda0_scaled))
        .collect::<Result<_>>()?;
    let e = GridFunction::new(*grid, amps.iter().map(|a| a.c_e).collect())?;
    let g = GridFunction::new(*grid, amps.iter().map(|a| a.c_g).collect())?;
    MeasurementOperator::new(e, g)
}

/// Closed-form excited amplitude after a constant drive `alpha0` lasting
/// `tau = pi / (2 alpha0)`:
///
/// `c_e = -i alpha0 sin(W tau) / W`, `W^2 = alpha0^2 + (lambda0 x)^2`,
///
/// whose magnitude is `(pi/2) sinc[(pi/2) sqrt(1 + lambda0^2 x^2 / alpha0^2)]`.
pub fn analytic_tophat(x: f64, alpha0: f64, lambda0: f64) -> Result<C64> {
    if !(alpha0.is_finite() && alpha0 > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha0 must be positive, got {alpha0}")));
    }
    let tau = std::f64::consts::FRAC_PI_2 / alpha0;
    let w = (alpha0 * alpha0 + (lambda0 * x).powi(2)).sqrt();
    Ok(-I * alpha0 * (w * tau).sin() / w)
}

/// `(pi/2) sinc[(pi/2) sqrt(1 + r^2)]` with `r = lambda0 x / alpha0`, written
/// directly from the Rabi formula. Used to cross-check [`analytic_tophat`].
pub fn tophat_magnitude(ratio: f64) -> f64 {
    let arg = std::f64::consts::FRAC_PI_2 * (1.0 + ratio * ratio).sqrt();
    std::f64::consts::FRAC_PI_2 * arg.sin() / arg
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn no_drive_no_transfer() {
        let p = Pulse::new(0.0, 0.01, vec![C64::new(0.0, 0.0); 500], 1.0).unwrap();
        for &x in &[-3.0, 0.0, 0.7, 5.0] {
            let a = propagate_point(x, &p, 1.0).unwrap();
            assert_eq!(a.c_e, C64::new(0.0, 0.0));
            assert!((a.c_g.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_pi_pulse_flips_qubit() {
        let p = Pulse::top_hat(0.8, 1000).unwrap();
        let a = propagate_point(0.0, &p, 1.0).unwrap();
        assert!((a.c_e.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detuning_root_three_gives_full_return() {
        let alpha0 = 0.8;
        let x = 3f64.sqrt() * alpha0;
        let p = Pulse::top_hat(alpha0, 1000).unwrap();
        let a = propagate_point(x, &p, 1.0).unwrap();
        assert!(a.c_e.norm() < 1e-12);
    }

    #[test]
    fn empty_pulse_returns_initial_condition() {
        let p = Pulse::new(0.0, 0.1, vec![], 1.0).unwrap();
        assert_eq!(propagate_point(1.0, &p, 1.0).unwrap(), TwoLevelAmplitudes::ground());
    }

    #[test]
    fn analytic_magnitudes() {
        assert!((analytic_tophat(0.0, 1.0, 1.0).unwrap().norm() - 1.0).abs() < 1e-15);
        // direct evaluation of (pi/2) sinc(pi/sqrt 2)
        let arg = PI / 2f64.sqrt();
        let expected = FRAC_PI_2 * arg.sin() / arg;
        assert!((analytic_tophat(1.0, 1.0, 1.0).unwrap().norm() - expected).abs() < 1e-14);
        assert!((expected - 0.5626).abs() < 1e-4);
        assert!(analytic_tophat(1e6, 1.0, 1.0).unwrap().norm() < 1e-5);
        assert!(analytic_tophat(0.0, 0.0, 1.0).is_err());
        for k in 0..50 {
            let r = 0.1 * k as f64;
            assert!((analytic_tophat(r, 1.0, 1.0).unwrap().norm() - tophat_magnitude(r).abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pulse_realizes_identity_on_ground() {
        let p = Pulse::new(0.0, 0.05, vec![C64::new(0.0, 0.0); 20], 1.0).unwrap();
        let op = realize_operator(&p, &PositionGrid::default(), 1.0).unwrap();
        assert!(op.upsilon_e().values().iter().all(|v| v.norm() == 0.0));
        assert!(op.upsilon_g().values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));
    }
}
