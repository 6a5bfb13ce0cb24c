//! Conditional state preparation from a thermal state: squeeze with a
//! Gaussian measurement, rotate a quarter period, then shape with the target
//! measurement.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::BasisTransform;
use crate::dynamics::realize_operator;
use crate::engine::{apply_measurement, purity, quadrature_variances, rotate, state_fidelity, thermal_state, DEFAULT_N_MAX};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, PositionGrid};
use crate::params::SystemParams;
use crate::pulse::Pulse;
use crate::state::QuantumState;
use crate::synthesis::{optimize_chi, SynthesisConfig};
use crate::targets::{render_target, TargetSpec};

/// Dynamics run in units where `lambda0 = 1`.
const LAMBDA0_SCALED: f64 = 1.0;

/// Fock levels counted by [`StageSummary::top_population`].
pub const TOP_LEVELS: usize = 10;
/// A stage with more population than this in its top levels is flagged.
pub const TRUNCATION_WARN: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Steps {
    TwoStep,
    ThreeStep,
}

impl Steps {
    pub fn label(self) -> &'static str {
        match self {
            Self::TwoStep => "two_step",
            Self::ThreeStep => "three_step",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub nbar: f64,
    pub squeeze_s: f64,
    pub steps: Steps,
    pub target: TargetSpec,
    pub params: SystemParams,
    pub synthesis: SynthesisConfig,
    pub n_max: usize,
    /// Grid on which targets are rendered and pulses synthesized.
    pub synth_grid: PositionGrid,
    /// Grid hosting the Fock basis; realized operators are evaluated here.
    pub state_grid: PositionGrid,
    /// Free rotation between measurements; `pi/2` is a quarter period.
    pub rotation_angle: f64,
    /// Use the target functions themselves as measurement operators instead
    /// of synthesizing and realizing pulses.
    pub ideal_operators: bool,
}

impl ProtocolConfig {
    pub fn new(nbar: f64, squeeze_s: f64, steps: Steps, target: TargetSpec) -> Self {
        Self {
            nbar,
            squeeze_s,
            steps,
            target,
            params: SystemParams::default(),
            synthesis: SynthesisConfig::default(),
            n_max: DEFAULT_N_MAX,
            synth_grid: PositionGrid::default(),
            state_grid: PositionGrid::state_default(),
            rotation_angle: FRAC_PI_2,
            ideal_operators: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nbar.is_finite() && self.nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!("nbar must be >= 0, got {}", self.nbar)));
        }
        if !(self.squeeze_s.is_finite() && self.squeeze_s > 0.0) {
            return Err(Error::InvalidParameter(format!("squeeze_s must be > 0, got {}", self.squeeze_s)));
        }
        if !self.rotation_angle.is_finite() {
            return Err(Error::NonFinite("rotation_angle".into()));
        }
        self.target.validate()?;
        self.synthesis.validate()
    }

    fn squeeze_target(&self, s: f64) -> TargetSpec {
        TargetSpec::Gaussian { s }
    }
}

/// A measurement operator ready to apply on the state grid.
#[derive(Clone, Debug, Serialize)]
pub struct PreparedOperator {
    pub target: TargetSpec,
    /// `None` for ideal operators.
    pub chi: Option<f64>,
    /// Overlap of the realized operator with its target on the synthesis grid.
    pub operator_fidelity: f64,
    pub truncation_eps: Option<f64>,
    pub low_fidelity: bool,
    #[serde(skip)]
    pub pulse: Option<Pulse>,
    pub upsilon: GridFunction,
}

/// Synthesize and realize `spec`, or take it verbatim (scaled to peak 1) when
/// `cfg.ideal_operators` is set.
pub fn prepare_operator(spec: &TargetSpec, cfg: &ProtocolConfig) -> Result<PreparedOperator> {
    if cfg.ideal_operators {
        let f = render_target(spec, &cfg.state_grid)?;
        let peak = f.max_abs();
        return Ok(PreparedOperator {
            target: *spec,
            chi: None,
            operator_fidelity: 1.0,
            truncation_eps: None,
            low_fidelity: false,
            pulse: None,
            upsilon: f.map(|v| v / peak)?,
        });
    }
    let target = render_target(spec, &cfg.synth_grid)?;
    let scfg = cfg.synthesis.fit_truncation(&target)?;
    let opt = optimize_chi(&target, LAMBDA0_SCALED, &scfg)?;
    let realized = realize_operator(&opt.pulse, &cfg.state_grid, LAMBDA0_SCALED)?;
    Ok(PreparedOperator {
        target: *spec,
        chi: Some(opt.chi),
        operator_fidelity: opt.fidelity,
        truncation_eps: Some(opt.truncation_eps),
        low_fidelity: opt.low_fidelity,
        pulse: Some(opt.pulse),
        upsilon: realized.upsilon_e().clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub label: String,
    pub purity: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub mean_n: f64,
    /// Population of the top [`TOP_LEVELS`] Fock levels.
    pub top_population: f64,
}

impl StageSummary {
    fn of(label: &str, rho: &QuantumState) -> Self {
        let (var_x, var_p) = quadrature_variances(rho);
        Self {
            label: label.into(),
            purity: purity(rho),
            var_x,
            var_p,
            mean_n: rho.mean_phonons(),
            top_population: rho.tail_population(TOP_LEVELS),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolResult {
    pub config: ProtocolConfig,
    pub fidelity: f64,
    pub joint_probability: f64,
    pub step_probabilities: Vec<f64>,
    pub stages: Vec<StageSummary>,
    /// Each operator in the order applied.
    pub realized_operators: Vec<PreparedOperator>,
    pub warnings: Vec<String>,
    pub final_state: QuantumState,
    /// States matching `stages`, kept for plotting.
    #[serde(skip)]
    pub stage_states: Vec<QuantumState>,
}

impl ProtocolResult {
    pub fn final_basis(&self) -> Result<BasisTransform> {
        BasisTransform::new(self.config.state_grid, self.config.n_max)
    }
}

/// Run the configured preparation sequence.
pub fn run_protocol(cfg: &ProtocolConfig) -> Result<ProtocolResult> {
    cfg.validate()?;
    let squeeze = prepare_operator(&cfg.squeeze_target(cfg.squeeze_s), cfg)?;
    let shape = prepare_operator(&cfg.target, cfg)?;
    run_with_operators(cfg, &squeeze, &shape)
}

/// Run the sequence with operators prepared beforehand.
pub fn run_with_operators(
    cfg: &ProtocolConfig,
    squeeze: &PreparedOperator,
    shape: &PreparedOperator,
) -> Result<ProtocolResult> {
    cfg.validate()?;
    let basis = BasisTransform::new(cfg.state_grid, cfg.n_max)?;
    let mut rho = thermal_state(cfg.nbar, cfg.n_max)?;
    let mut stages = vec![StageSummary::of("thermal", &rho)];
    let mut states = vec![rho.clone()];
    let mut probabilities = Vec::new();
    let mut applied = Vec::new();

    let mut record = |label: &str, rho: &QuantumState| {
        stages.push(StageSummary::of(label, rho));
        states.push(rho.clone());
    };

    let squeezes = match cfg.steps {
        Steps::TwoStep => 1,
        Steps::ThreeStep => 2,
    };
    for i in 1..=squeezes {
        let (next, p) = apply_measurement(&rho, &squeeze.upsilon, &basis)?;
        probabilities.push(p);
        applied.push(squeeze.clone());
        record(&format!("squeeze_{i}"), &next);
        rho = rotate(&next, cfg.rotation_angle);
        record(&format!("rotate_{i}"), &rho);
    }
    let (last, p) = apply_measurement(&rho, &shape.upsilon, &basis)?;
    probabilities.push(p);
    applied.push(shape.clone());
    record("target", &last);

    let target_psi = render_target(&cfg.target, &cfg.state_grid)?;
    let fidelity = state_fidelity(&last, &target_psi, &basis)?;
    let mut warnings: Vec<String> = applied
        .iter()
        .filter(|op| op.low_fidelity)
        .map(|op| format!("low operator fidelity {:.4} for target {}", op.operator_fidelity, op.target))
        .collect();
    warnings.extend(stages.iter().filter(|st| st.top_population > TRUNCATION_WARN).map(|st| {
        format!(
            "stage {} holds {:.1e} of its population in the top {TOP_LEVELS} of {} Fock levels",
            st.label,
            st.top_population,
            cfg.n_max + 1
        )
    }));

    Ok(ProtocolResult {
        config: cfg.clone(),
        fidelity,
        joint_probability: probabilities.iter().product(),
        step_probabilities: probabilities,
        stages,
        realized_operators: applied,
        warnings,
        final_state: last,
        stage_states: states,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: f64,
    pub mode: Steps,
    pub fidelity: Option<f64>,
    pub probability: Option<f64>,
    pub error: Option<String>,
}

/// Run two- and three-step preparation at every `s`, sharing the target
/// operator across rows. Failing rows carry their error and the sweep goes on.
pub fn sweep_squeezing(cfg: &ProtocolConfig, s_values: &[f64]) -> Result<Vec<SweepRow>> {
    check_ascending(s_values)?;
    cfg.validate()?;
    let shape = prepare_operator(&cfg.target, cfg)?;
    let rows: Vec<Vec<SweepRow>> = s_values
        .par_iter()
        .map(|&s| {
            let squeeze = prepare_operator(&cfg.squeeze_target(s), cfg);
            [Steps::TwoStep, Steps::ThreeStep]
                .into_iter()
                .map(|mode| {
                    let run_cfg = ProtocolConfig { squeeze_s: s, steps: mode, ..cfg.clone() };
                    let outcome = match &squeeze {
                        Ok(sq) => run_with_operators(&run_cfg, sq, &shape).map_err(|e| e.to_string()),
                        Err(e) => Err(e.to_string()),
                    };
                    match outcome {
                        Ok(r) => SweepRow {
                            s,
                            mode,
                            fidelity: Some(r.fidelity),
                            probability: Some(r.joint_probability),
                            error: None,
                        },
                        Err(e) => SweepRow { s, mode, fidelity: None, probability: None, error: Some(e) },
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub(crate) fn check_ascending(s_values: &[f64]) -> Result<()> {
    if s_values.is_empty() {
        return Err(Error::InvalidParameter("no squeezing values given".into()));
    }
    if s_values.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::InvalidParameter("squeezing values must be positive".into()));
    }
    if s_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("squeezing values must be strictly ascending".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockFidelity {
    pub n: usize,
    pub chi: f64,
    pub fidelity: f64,
}

/// Best realized-operator fidelity for the Fock wavefunction targets `u_n`.
pub fn fock_fidelity_curve(
    n_values: &[usize],
    grid: &PositionGrid,
    cfg: &SynthesisConfig,
) -> Result<Vec<FockFidelity>> {
    n_values
        .iter()
        .map(|&n| {
            let target = render_target(&TargetSpec::Fock { n }, grid)?;
            let opt = optimize_chi(&target, LAMBDA0_SCALED, &cfg.fit_truncation(&target)?)?;
            Ok(FockFidelity { n, chi: opt.chi, fidelity: opt.fidelity })
        })
        .collect()
}

/// L1 distance between two position densities sampled on the same grid.
pub fn marginal_l1(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch("marginals live on different grids".into()));
    }
    let dx = a.grid().dx();
    Ok(a.values().iter().zip(b.values()).map(|(p, q)| (p.re - q.re).abs() * dx).sum())
}

/// `|psi(x)|^2` for a target on `grid`.
pub fn target_density(spec: &TargetSpec, grid: &PositionGrid) -> Result<GridFunction> {
    render_target(spec, grid)?.map(|v| C64::new(v.norm_sqr(), 0.0))
}
