use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target unsigned area of a pi-like pulse, `sum |alpha| dt`.
pub const PULSE_AREA: f64 = FRAC_PI_2;

/// Piecewise-constant complex drive `alpha(t)`.
///
/// Sample `k` holds the drive on `[t_start + k dt, t_start + (k+1) dt)`. Time
/// is dimensionless, in units of the inverse coupling rate used when the pulse
/// was synthesized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PulseRecord", into = "PulseRecord")]
pub struct Pulse {
    t_start: f64,
    dt: f64,
    samples: Vec<C64>,
    chi: f64,
}

#[derive(Serialize, Deserialize)]
struct PulseRecord {
    t_start: f64,
    dt: f64,
    chi: f64,
    samples: Vec<C64>,
    #[serde(default, skip_deserializing)]
    unsigned_area: f64,
    #[serde(default, skip_deserializing)]
    duration: f64,
}

impl TryFrom<PulseRecord> for Pulse {
    type Error = Error;

    fn try_from(r: PulseRecord) -> Result<Self> {
        Pulse::new(r.t_start, r.dt, r.samples, r.chi)
    }
}

impl From<Pulse> for PulseRecord {
    fn from(p: Pulse) -> Self {
        PulseRecord {
            unsigned_area: p.unsigned_area(),
            duration: p.duration(),
            t_start: p.t_start,
            dt: p.dt,
            chi: p.chi,
            samples: p.samples,
        }
    }
}

impl Pulse {
    pub fn new(t_start: f64, dt: f64, samples: Vec<C64>, chi: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("pulse dt must be positive, got {dt}")));
        }
        if !t_start.is_finite() || !chi.is_finite() {
            return Err(Error::NonFinite("pulse metadata".into()));
        }
        if let Some(k) = samples.iter().position(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite(format!("pulse sample {k}")));
        }
        Ok(Self { t_start, dt, samples, chi })
    }

    /// Constant drive `alpha0` for the duration `pi / (2 alpha0)` of a resonant
    /// pi-pulse, split into `n_samples` steps and centred on `t = 0`.
    pub fn top_hat(alpha0: f64, n_samples: usize) -> Result<Self> {
        if !(alpha0.is_finite() && alpha0 > 0.0) || n_samples == 0 {
            return Err(Error::InvalidParameter("top-hat needs alpha0 > 0 and samples".into()));
        }
        let tau = FRAC_PI_2 / alpha0;
        Self::new(-tau / 2.0, tau / n_samples as f64, vec![C64::new(alpha0, 0.0); n_samples], 1.0)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }

    /// Midpoint of sample interval `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.t_start + (k as f64 + 0.5) * self.dt
    }

    pub fn unsigned_area(&self) -> f64 {
        self.samples.iter().map(|a| a.norm()).sum::<f64>() * self.dt
    }

    pub fn max_amplitude(&self) -> f64 {
        self.samples.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_normalized(&self) -> bool {
        (self.unsigned_area() - PULSE_AREA).abs() <= 1e-10
    }

    /// Rescale so the unsigned area is exactly `pi/2`.
    pub fn normalized(&self) -> Result<Self> {
        let area = self.unsigned_area();
        if area == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = PULSE_AREA / area;
        Self::new(self.t_start, self.dt, self.samples.iter().map(|a| a * scale).collect(), self.chi)
    }

    /// Resample onto a grid `factor` times finer, holding each value constant.
    pub fn refined(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        let samples = self
            .samples
            .iter()
            .flat_map(|&a| std::iter::repeat_n(a, factor))
            .collect();
        Self { t_start: self.t_start, dt: self.dt / factor as f64, samples, chi: self.chi }
    }
}
