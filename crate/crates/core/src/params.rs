use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the qubit-resonator device.
///
/// Frequencies are angular (rad/s), times in seconds. Dynamics elsewhere in
/// the crate are dimensionless with time measured in units of `1/lambda0`;
/// these values only enter the coherence budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SystemParams {
    lambda0: f64,
    omega_m: f64,
    t2_qubit: f64,
    q_mech: f64,
    nbar: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    lambda0: f64,
    omega_m: f64,
    #[serde(default)]
    coupling_ratio: Option<f64>,
    t2_qubit: f64,
    q_mech: f64,
    nbar: f64,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        let p = SystemParams::new(r.lambda0, r.omega_m, r.t2_qubit, r.q_mech, r.nbar)?;
        if let Some(ratio) = r.coupling_ratio {
            if (ratio - p.coupling_ratio()).abs() > 1e-12 * p.coupling_ratio() {
                return Err(Error::InvalidParameter(format!(
                    "coupling_ratio {ratio} disagrees with lambda0/omega_m = {}",
                    p.coupling_ratio()
                )));
            }
        }
        Ok(p)
    }
}

impl From<SystemParams> for RawParams {
    fn from(p: SystemParams) -> Self {
        RawParams {
            lambda0: p.lambda0,
            omega_m: p.omega_m,
            coupling_ratio: Some(p.coupling_ratio()),
            t2_qubit: p.t2_qubit,
            q_mech: p.q_mech,
            nbar: p.nbar,
        }
    }
}

impl Default for SystemParams {
    /// Displacemon-style device: lambda0/2pi = 8.5 MHz, omega_m/2pi = 125 MHz,
    /// T2 = 2 us, Q = 1e5, nbar = 5.
    fn default() -> Self {
        Self::from_lab_units(8.5, 125.0, 2.0, 1e5, 5.0).expect("default parameters are valid")
    }
}

impl SystemParams {
    pub fn new(lambda0: f64, omega_m: f64, t2_qubit: f64, q_mech: f64, nbar: f64) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("lambda0", lambda0)?;
        positive("omega_m", omega_m)?;
        positive("t2_qubit", t2_qubit)?;
        positive("q_mech", q_mech)?;
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!("nbar must be >= 0, got {nbar}")));
        }
        Ok(Self { lambda0, omega_m, t2_qubit, q_mech, nbar })
    }

    /// Build from `lambda0/2pi` and `omega_m/2pi` in MHz and `T2` in microseconds.
    pub fn from_lab_units(
        lambda0_mhz: f64,
        omega_m_mhz: f64,
        t2_us: f64,
        q_mech: f64,
        nbar: f64,
    ) -> Result<Self> {
        Self::new(
            2.0 * PI * lambda0_mhz * 1e6,
            2.0 * PI * omega_m_mhz * 1e6,
            t2_us * 1e-6,
            q_mech,
            nbar,
        )
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }

    pub fn coupling_ratio(&self) -> f64 {
        self.lambda0 / self.omega_m
    }

    pub fn t2_qubit(&self) -> f64 {
        self.t2_qubit
    }

    pub fn q_mech(&self) -> f64 {
        self.q_mech
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Convert a duration in dimensionless pulse units (`1/lambda0`) to seconds.
    pub fn to_seconds(&self, t: f64) -> f64 {
        t / self.lambda0
    }
}
