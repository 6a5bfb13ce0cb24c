//! Independent oracles for the dynamics, the preparation protocol and the
//! measurement statistics.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::BasisTransform;
use crate::dynamics::{analytic_tophat, realize_operator};
use crate::engine::{outcome_probability, position_marginal};
use crate::error::{Error, Result};
use crate::grid::PositionGrid;
use crate::protocol::{check_ascending, prepare_operator, run_with_operators, ProtocolConfig, Steps};
use crate::pulse::Pulse;
use crate::state::QuantumState;
use crate::synthesis::operator_fidelity;
use crate::targets::{render_target, TargetSpec};

pub const TOPHAT_TOL: f64 = 1e-10;
pub const PLATEAU_TOL: f64 = 0.02;
pub const POVM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub seed: Option<u64>,
    pub cases: usize,
}

impl OracleReport {
    pub fn new(name: &str, max_error: f64, tolerance: f64, cases: usize) -> Self {
        Self { name: name.into(), max_error, tolerance, passed: max_error <= tolerance, seed: None, cases }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Realize a top-hat drive on `grid` and compare `|Ue|` with the closed form.
pub fn oracle_tophat(grid: &PositionGrid, alpha0: f64, lambda0: f64) -> Result<OracleReport> {
    oracle_tophat_pulse(grid, &Pulse::top_hat(alpha0, 64)?, alpha0, lambda0, TOPHAT_TOL)
}

/// As [`oracle_tophat`] for an arbitrary `pulse` checked against the top-hat
/// formula for `alpha0`.
pub fn oracle_tophat_pulse(
    grid: &PositionGrid,
    pulse: &Pulse,
    alpha0: f64,
    lambda0: f64,
    tolerance: f64,
) -> Result<OracleReport> {
    let op = realize_operator(pulse, grid, lambda0)?;
    let mut worst: f64 = 0.0;
    for (j, v) in op.upsilon_e().values().iter().enumerate() {
        let exact = analytic_tophat(grid.x(j), alpha0, lambda0)?;
        worst = worst.max((v.norm() - exact.norm()).abs());
    }
    Ok(OracleReport::new("tophat", worst, tolerance, grid.n_points()))
}

/// Squeezing sweep with an ideal Gaussian first measurement.
///
/// The fidelity must not decrease along `s_values` and its last value must
/// come within [`PLATEAU_TOL`] of the target operator's own overlap with the
/// target. With `realized_target` unset the target measurement is ideal too
/// and that ceiling is 1.
pub fn oracle_fidelity_limit(
    nbar: f64,
    target: &TargetSpec,
    s_values: &[f64],
    realized_target: bool,
) -> Result<(OracleReport, Vec<f64>)> {
    check_ascending(s_values)?;
    let base = ProtocolConfig::new(nbar, s_values[0], Steps::TwoStep, *target);
    let ideal = ProtocolConfig { ideal_operators: true, ..base.clone() };
    let shape = prepare_operator(target, if realized_target { &base } else { &ideal })?;
    let psi = render_target(target, &base.state_grid)?;
    let ceiling = operator_fidelity(&psi, &shape.upsilon)?;

    let fidelities: Vec<f64> = s_values
        .par_iter()
        .map(|&s| {
            let cfg = ProtocolConfig { squeeze_s: s, ..ideal.clone() };
            let squeeze = prepare_operator(&TargetSpec::Gaussian { s }, &cfg)?;
            Ok(run_with_operators(&cfg, &squeeze, &shape)?.fidelity)
        })
        .collect::<Result<_>>()?;

    let drop = fidelities.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max);
    let gap = (ceiling - fidelities[fidelities.len() - 1]).max(0.0);
    Ok((OracleReport::new("fidelity_limit", gap + drop, PLATEAU_TOL, s_values.len()), fidelities))
}

/// One random measurement scenario.
#[derive(Clone, Debug)]
pub struct PovmCase {
    pub pulse: Pulse,
    pub state: QuantumState,
}

/// Pulses are sums of up to three Gaussians with random complex weights,
/// normalized to a pi-like pulse; states are random mixtures of up to five
/// Fock projectors with `n <= max_fock`.
pub fn random_cases(n_cases: usize, seed: u64, n_max: usize, max_fock: usize) -> Result<Vec<PovmCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_window = 3.2;
    let dt = 0.02;
    let n_samples = (2.0 * half_window / dt) as usize;
    (0..n_cases)
        .map(|_| {
            let lobes: Vec<(C64, f64, f64)> = (0..rng.random_range(1..=3))
                .map(|_| {
                    let w = C64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..std::f64::consts::TAU));
                    (w, rng.random_range(-0.8..0.8), rng.random_range(0.2..0.6))
                })
                .collect();
            let samples = (0..n_samples)
                .map(|k| {
                    let t = -half_window + (k as f64 + 0.5) * dt;
                    lobes.iter().map(|&(w, c, s)| w * (-(t - c).powi(2) / (2.0 * s * s)).exp()).sum()
                })
                .collect();
            let pulse = Pulse::new(-half_window, dt, samples, 1.0)?.normalized()?;

            let mut pops = vec![0.0; n_max + 1];
            for _ in 0..rng.random_range(1..=5) {
                pops[rng.random_range(0..=max_fock.min(n_max))] += rng.random_range(0.05..1.0);
            }
            let total: f64 = pops.iter().sum();
            pops.iter_mut().for_each(|p| *p /= total);
            Ok(PovmCase { pulse, state: QuantumState::diagonal(&pops)? })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmReports {
    /// `|p(e) + p(g) - 1|` from the Fock-basis trace formula.
    pub completeness: OracleReport,
    /// Relative gap between the trace formula and `int |Ue|^2 P(x) dx`.
    pub born_rule: OracleReport,
    /// Every probability lay in `[0, 1]` (within the tolerance).
    pub probabilities_in_range: bool,
}

pub fn oracle_povm(cases: &[PovmCase], basis: &BasisTransform, seed: u64) -> Result<PovmReports> {
    if cases.is_empty() {
        return Err(Error::InvalidParameter("no POVM cases".into()));
    }
    let grid = basis.grid();
    let errs: Vec<(f64, f64, bool)> = cases
        .par_iter()
        .map(|case| {
            let op = realize_operator(&case.pulse, grid, 1.0)?;
            let pe = outcome_probability(&case.state, op.upsilon_e(), basis)?;
            let pg = outcome_probability(&case.state, op.upsilon_g(), basis)?;
            let marginal = position_marginal(&case.state, basis)?;
            let overlap: f64 = op
                .upsilon_e()
                .values()
                .iter()
                .zip(marginal.values())
                .map(|(u, p)| u.norm_sqr() * p.re)
                .sum::<f64>()
                * grid.dx();
            let in_range = [pe, pg].iter().all(|p| (-POVM_TOL..=1.0 + POVM_TOL).contains(p));
            let rel = (pe - overlap).abs() / overlap.abs().max(f64::MIN_POSITIVE);
            let rel = if overlap.abs() < 1e-300 && pe.abs() < 1e-300 { 0.0 } else { rel };
            Ok(((pe + pg - 1.0).abs(), rel, in_range))
        })
        .collect::<Result<_>>()?;
    let completeness = errs.iter().map(|e| e.0).fold(0.0, f64::max);
    let born = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    Ok(PovmReports {
        completeness: OracleReport::new("povm_completeness", completeness, POVM_TOL, cases.len()).seeded(seed),
        born_rule: OracleReport::new("born_rule", born, POVM_TOL, cases.len()).seeded(seed),
        probabilities_in_range: errs.iter().all(|e| e.2),
    })
}
