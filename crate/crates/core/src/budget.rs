//! Coherence budget: pulse durations in lab units against the qubit and
//! mechanical coherence times.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::params::SystemParams;
use crate::pulse::Pulse;

/// Mechanical coherence time quoted alongside the lab parameters, seconds.
pub const QUOTED_MECH_COHERENCE: f64 = 100e-6;
/// Characteristic pulse width quoted alongside the lab parameters, seconds.
pub const QUOTED_PULSE_WIDTH: f64 = 11e-9;
/// Durations below this are treated as unitary.
pub const UNITARY_DURATION_LIMIT: f64 = 200e-9;
/// `a >> b` is taken to mean `a >= STRONG_FACTOR * b`.
pub const STRONG_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceBudget {
    pub params: SystemParams,
    /// Each pulse duration, seconds.
    pub pulse_durations: Vec<f64>,
    pub total_duration: f64,
    /// `total_duration / T2`.
    pub t2_fraction: f64,
    /// `Q / (nbar omega_m)`, seconds.
    pub mech_coherence: f64,
    pub mech_coherence_quoted: f64,
    /// `2 pi / lambda0`, seconds.
    pub pulse_width: f64,
    pub pulse_width_quoted: f64,
    /// Every pulse shorter than [`UNITARY_DURATION_LIMIT`].
    pub unitary_ok: bool,
    /// Total duration below `T2 / 10`.
    pub t2_ok: bool,
    /// `lambda0 >> 2 pi / T2`.
    pub strong_vs_qubit: bool,
    /// `lambda0 >> nbar omega_m / Q`.
    pub strong_vs_mech: bool,
}

impl CoherenceBudget {
    pub fn passed(&self) -> bool {
        self.unitary_ok && self.t2_ok && self.strong_vs_qubit && self.strong_vs_mech
    }
}

/// Pure arithmetic on pulse durations given in units of `1/lambda0`.
pub fn coherence_budget(params: &SystemParams, pulses: &[Pulse]) -> CoherenceBudget {
    let durations: Vec<f64> = pulses.iter().map(|p| params.to_seconds(p.duration())).collect();
    budget_from_durations(params, durations)
}

/// As [`coherence_budget`] for durations already in seconds.
pub fn budget_from_durations(params: &SystemParams, pulse_durations: Vec<f64>) -> CoherenceBudget {
    let total: f64 = pulse_durations.iter().sum();
    let l0 = params.lambda0();
    let mech_rate = params.nbar() * params.omega_m() / params.q_mech();
    CoherenceBudget {
        params: *params,
        unitary_ok: pulse_durations.iter().all(|&d| d < UNITARY_DURATION_LIMIT),
        t2_ok: total < params.t2_qubit() / 10.0,
        t2_fraction: total / params.t2_qubit(),
        total_duration: total,
        pulse_durations,
        mech_coherence: 1.0 / mech_rate,
        mech_coherence_quoted: QUOTED_MECH_COHERENCE,
        pulse_width: 2.0 * PI / l0,
        pulse_width_quoted: QUOTED_PULSE_WIDTH,
        strong_vs_qubit: l0 >= STRONG_FACTOR * 2.0 * PI / params.t2_qubit(),
        strong_vs_mech: l0 >= STRONG_FACTOR * mech_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lab_parameters() {
        let p = SystemParams::default();
        let b = budget_from_durations(&p, vec![150e-9]);
        assert!(b.unitary_ok && b.t2_ok);
        // Q / (nbar omega_m) = 1e5 / (5 * 2 pi * 125 MHz)
        assert!((b.mech_coherence - 1e5 / (5.0 * 2.0 * PI * 125e6)).abs() < 1e-12);
        assert!((b.mech_coherence - 25.46e-6).abs() < 0.01e-6);
        // 2 pi / (2 pi * 8.5 MHz)
        assert!((b.pulse_width - 117.647e-9).abs() < 0.001e-9);
        assert!(b.strong_vs_qubit && b.strong_vs_mech);
    }

    #[test]
    fn long_pulse_fails_unitarity() {
        let b = budget_from_durations(&SystemParams::default(), vec![250e-9]);
        assert!(!b.unitary_ok);
    }

    #[test]
    fn weak_coupling_fails() {
        let p = SystemParams::new(1e-3, SystemParams::default().omega_m(), 2e-6, 1e5, 5.0).unwrap();
        let b = budget_from_durations(&p, vec![]);
        assert!(!b.strong_vs_qubit && !b.strong_vs_mech && !b.passed());
    }
}
