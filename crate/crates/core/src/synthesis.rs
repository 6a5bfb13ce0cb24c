//! Drive pulses from target measurement operators.
//!
//! A target `U(x)` is turned into a drive by its Fourier transform along the
//! coupling axis,
//!
//! ```text
//! alpha(t) = c * G(chi lambda0 t),   G(k) = sum_j U(x_j) exp(-i k x_j) dx,
//! ```
//!
//! with `c > 0` fixed by the pi-like unsigned-area rule `sum |alpha| dt = pi/2`.
//! The single free scale `chi` stretches the pulse in time and is tuned by
//! maximizing the overlap between the realized operator and the target.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::realize_operator;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::operator::MeasurementOperator;
use crate::pulse::{Pulse, PULSE_AREA};

/// Largest rotation angle `max(|alpha|, lambda0 x_max) dt` allowed per step.
pub const MAX_STEP_PHASE: f64 = 0.05;

/// Fraction of the grid's Nyquist wavenumber a pulse spectrum may occupy.
const USABLE_BAND: f64 = 0.9;

/// Fidelity below which the transform heuristic is considered to have failed.
pub const WARN_FIDELITY: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub chi_min: f64,
    pub chi_max: f64,
    pub n_scan: usize,
    pub refine_tol: f64,
    pub truncation_eps: f64,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self { chi_min: 0.2, chi_max: 5.0, n_scan: 50, refine_tol: 1e-3, truncation_eps: 1e-4 }
    }
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.chi_min > 0.0 && self.chi_min < self.chi_max && self.chi_max.is_finite()) {
            return bad(format!("need 0 < chi_min < chi_max, got [{}, {}]", self.chi_min, self.chi_max));
        }
        if self.n_scan < 8 {
            return bad(format!("n_scan must be >= 8, got {}", self.n_scan));
        }
        if !(self.refine_tol > 0.0) {
            return bad(format!("refine_tol must be positive, got {}", self.refine_tol));
        }
        if !(self.truncation_eps > 0.0 && self.truncation_eps < 1.0) {
            return bad(format!("truncation_eps must lie in (0, 1), got {}", self.truncation_eps));
        }
        Ok(())
    }

    /// Raise `truncation_eps` (to 1e-3, then 1e-2) until the target's spectrum
    /// fits inside the grid's band.
    ///
    /// Targets with jumps, such as a plane wave cut off at `[-3, 3]` or a
    /// Gaussian wider than the grid, have spectra decaying only as `1/k`; at
    /// the default threshold their pulses would be unbounded in duration.
    pub fn fit_truncation(&self, target: &GridFunction) -> Result<Self> {
        let spectrum = Spectrum::new(target)?;
        let mut cfg = *self;
        for eps in [self.truncation_eps, 1e-3, 1e-2] {
            if eps < self.truncation_eps {
                continue;
            }
            cfg.truncation_eps = eps;
            if spectrum.support(eps) <= spectrum.usable() {
                return Ok(cfg);
            }
        }
        Ok(cfg)
    }
}

/// Magnitude of `G(k)` on a zero-padded FFT grid; used to bound the pulse.
struct Spectrum {
    k: Vec<f64>,
    mag: Vec<f64>,
    nyquist: f64,
}

impl Spectrum {
    fn new(target: &GridFunction) -> Result<Self> {
        if target.norm() == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let grid = target.grid();
        let n = grid.n_points();
        let n_pad = (4 * n).next_power_of_two();
        let mut buf: Vec<C64> = target.values().to_vec();
        buf.resize(n_pad, C64::new(0.0, 0.0));
        FftPlanner::new().plan_fft_forward(n_pad).process(&mut buf);
        let dk = 2.0 * PI / (n_pad as f64 * grid.dx());
        let k = (0..n_pad)
            .map(|m| if m < n_pad / 2 { m as f64 } else { m as f64 - n_pad as f64 } * dk)
            .collect();
        let mag = buf.iter().map(|v| v.norm() * grid.dx()).collect();
        Ok(Self { k, mag, nyquist: grid.nyquist() })
    }

    fn max(&self) -> f64 {
        self.mag.iter().copied().fold(0.0, f64::max)
    }

    fn dk(&self) -> f64 {
        self.k[1] - self.k[0]
    }

    fn usable(&self) -> f64 {
        USABLE_BAND * self.nyquist
    }

    /// Largest `|k|` where `|G| >= eps * max |G|`.
    fn support(&self, eps: f64) -> f64 {
        let cut = eps * self.max();
        self.k
            .iter()
            .zip(&self.mag)
            .filter(|(_, &m)| m >= cut)
            .map(|(k, _)| k.abs())
            .fold(0.0, f64::max)
    }

    fn l1(&self, k_max: f64) -> f64 {
        self.k.iter().zip(&self.mag).filter(|(k, _)| k.abs() <= k_max).map(|(_, m)| m).sum::<f64>()
            * self.dk()
    }
}

/// `G(kappa) = sum_j U(x_j) exp(-i kappa x_j) dx`, phase advanced by recurrence.
fn transform_at(target: &GridFunction, kappa: f64) -> C64 {
    let grid = target.grid();
    let step = C64::from_polar(1.0, -kappa * grid.dx());
    let mut phase = C64::from_polar(1.0, -kappa * grid.x(0));
    let mut acc = C64::new(0.0, 0.0);
    for &v in target.values() {
        acc += v * phase;
        phase *= step;
    }
    acc * grid.dx()
}

/// Sample the drive `alpha(t) = c G(chi lambda0 t)` for a target, trim its
/// negligible edges and normalize it to a pi-like pulse.
///
/// The time window is symmetric about `t = 0` so the pulse stays centred on
/// the transform origin; a shifted window would imprint a linear phase
/// `exp(i lambda0 x t_shift)` on the realized operator.
pub fn synthesize_pulse(
    target: &GridFunction,
    chi: f64,
    lambda0_scaled: f64,
    cfg: &SynthesisConfig,
) -> Result<Pulse> {
    if !(chi.is_finite() && chi > 0.0) {
        return Err(Error::InvalidParameter(format!("chi must be positive, got {chi}")));
    }
    if !(lambda0_scaled.is_finite() && lambda0_scaled > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda0 must be positive, got {lambda0_scaled}")));
    }
    let spectrum = Spectrum::new(target)?;
    let rate = chi * lambda0_scaled;
    let k_supp = spectrum.support(cfg.truncation_eps) + spectrum.dk();
    if k_supp > spectrum.usable() {
        return Err(Error::WindowExceeded {
            required: k_supp,
            available: spectrum.usable(),
            window: k_supp / rate,
        });
    }
    let half_window = k_supp / rate;
    let detuning_rate = lambda0_scaled * target.grid().x_max();
    // amplitude after normalization is roughly (pi/2) rate max|G| / int |G| dk
    let mut amp_est = PULSE_AREA * rate * spectrum.max() / spectrum.l1(k_supp);

    loop {
        let dt_target = MAX_STEP_PHASE / amp_est.max(detuning_rate);
        let n = ((2.0 * half_window / dt_target).ceil() as usize).max(1);
        let dt = 2.0 * half_window / n as f64;
        let t0 = -half_window;
        let samples: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|i| transform_at(target, rate * (t0 + (i as f64 + 0.5) * dt)))
            .collect();
        let raw = Pulse::new(t0, dt, samples, chi)?;
        let pulse = trim_symmetric(&raw, cfg.truncation_eps)?.normalized()?;
        if pulse.max_amplitude() * pulse.dt() <= MAX_STEP_PHASE * (1.0 + 1e-9) {
            return Ok(pulse);
        }
        amp_est = pulse.max_amplitude() * 1.01;
    }
}

/// Drop the same number of samples from both ends while both ends stay
/// below `eps * max |alpha|`.
fn trim_symmetric(pulse: &Pulse, eps: f64) -> Result<Pulse> {
    let s = pulse.samples();
    let cut = eps * pulse.max_amplitude();
    let lead = s.iter().position(|a| a.norm() >= cut).unwrap_or(0);
    let trail = s.iter().rev().position(|a| a.norm() >= cut).unwrap_or(0);
    let k = lead.min(trail);
    let kept = s[k..s.len() - k].to_vec();
    Pulse::new(pulse.t_start() + k as f64 * pulse.dt(), pulse.dt(), kept, pulse.chi())
}

/// `|sum_j a(x_j) conj(b(x_j)) dx|` after normalizing both to unit L2 norm.
pub fn operator_fidelity(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    Ok(a.normalized()?.inner(&b.normalized()?)?.norm())
}

#[derive(Clone, Debug)]
pub struct ChiOptimum {
    pub chi: f64,
    pub fidelity: f64,
    pub pulse: Pulse,
    pub realized: MeasurementOperator,
    /// Every `(chi, fidelity)` evaluated, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
    /// Set when the best fidelity stays below [`WARN_FIDELITY`].
    pub low_fidelity: bool,
    pub truncation_eps: f64,
}

struct Trial {
    fidelity: f64,
    pulse: Pulse,
    realized: MeasurementOperator,
}

fn evaluate(target: &GridFunction, chi: f64, lambda0: f64, cfg: &SynthesisConfig) -> Result<Trial> {
    let pulse = synthesize_pulse(target, chi, lambda0, cfg)?;
    let realized = realize_operator(&pulse, target.grid(), lambda0)?;
    let fidelity = operator_fidelity(target, realized.upsilon_e())?;
    Ok(Trial { fidelity, pulse, realized })
}

/// Maximize `f` on `[lo, hi]` by golden-section search, recording every
/// evaluation.
fn golden_section_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    record: &mut Vec<(f64, f64)>,
) -> Result<()> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    record.push((c, fc));
    record.push((d, fd));
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            (d, fd) = (c, fc);
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
            record.push((c, fc));
        } else {
            lo = c;
            (c, fc) = (d, fd);
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
            record.push((d, fd));
        }
    }
    Ok(())
}

/// Coarse log-spaced scan of `chi` followed by golden-section refinement
/// around the best scan point. Ties resolve to the smallest `chi`.
pub fn optimize_chi(
    target: &GridFunction,
    lambda0_scaled: f64,
    cfg: &SynthesisConfig,
) -> Result<ChiOptimum> {
    cfg.validate()?;
    let ratio = (cfg.chi_max / cfg.chi_min).ln();
    let chis: Vec<f64> = (0..cfg.n_scan)
        .map(|i| cfg.chi_min * (ratio * i as f64 / (cfg.n_scan - 1) as f64).exp())
        .collect();
    let mut evaluations: Vec<(f64, f64)> = chis
        .par_iter()
        .map(|&chi| evaluate(target, chi, lambda0_scaled, cfg).map(|t| (chi, t.fidelity)))
        .collect::<Result<_>>()?;

    let i_best = (0..chis.len())
        .reduce(|b, i| if evaluations[i].1 > evaluations[b].1 { i } else { b })
        .expect("n_scan >= 8");
    let lo = chis[i_best.saturating_sub(1)];
    let hi = chis[(i_best + 1).min(chis.len() - 1)];
    golden_section_max(
        |chi| evaluate(target, chi, lambda0_scaled, cfg).map(|t| t.fidelity),
        lo,
        hi,
        cfg.refine_tol,
        &mut evaluations,
    )?;

    let (chi, _) = evaluations
        .iter()
        .copied()
        .reduce(|b, e| if e.1 > b.1 || (e.1 == b.1 && e.0 < b.0) { e } else { b })
        .expect("non-empty");
    let best = evaluate(target, chi, lambda0_scaled, cfg)?;
    Ok(ChiOptimum {
        chi,
        fidelity: best.fidelity,
        low_fidelity: best.fidelity < WARN_FIDELITY,
        pulse: best.pulse,
        realized: best.realized,
        evaluations,
        truncation_eps: cfg.truncation_eps,
    })
}
