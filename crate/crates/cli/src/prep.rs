use std::f64::consts::FRAC_PI_2;

use anyhow::{ensure, Result};
use clap::Args;
use mechprep::protocol::{run_protocol, sweep_squeezing, ProtocolResult, SweepRow};
use mechprep::targets::render_target;
use mechprep::{momentum_marginal, position_marginal, wigner, PositionGrid, ProtocolConfig, QuantumState, Steps, TargetSpec};
use serde_json::json;

use crate::output::{num, OutDir};
use crate::{parse_grid, parse_list, parse_target, plots, FloatList, Global, StepsArg};

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct ProtocolArgs {
    /// Mean thermal occupation of the initial state.
    #[arg(long, default_value_t = 5.0)]
    pub nbar: f64,
    /// Squeezing parameter `s` of the Gaussian measurement.
    #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
    pub squeeze: Option<f64>,
    /// Comma-separated ascending `s` values; runs both step modes at each.
    #[arg(long, value_parser = parse_list)]
    pub sweep: Option<FloatList>,
    #[arg(long, default_value = "fock:3", value_parser = parse_target)]
    pub target: TargetSpec,
    #[arg(long, value_enum, default_value = "2")]
    pub steps: StepsArg,
    /// Apply the target functions directly instead of synthesized pulses.
    #[arg(long)]
    pub ideal: bool,
    /// Free rotation angle between measurements (quarter period = pi/2).
    #[arg(long, default_value_t = FRAC_PI_2)]
    pub rotation: f64,
    /// Grid hosting the Fock basis, as `xmax,n`.
    #[arg(long, value_parser = parse_grid)]
    pub state_grid: Option<PositionGrid>,
}

pub fn config(g: &Global, a: &ProtocolArgs, s: f64) -> ProtocolConfig {
    let steps = match a.steps {
        StepsArg::Two => Steps::TwoStep,
        StepsArg::Three => Steps::ThreeStep,
    };
    let mut cfg = ProtocolConfig::new(a.nbar, s, steps, a.target);
    cfg.n_max = g.nmax;
    cfg.synth_grid = g.synth_grid();
    cfg.state_grid = a.state_grid.unwrap_or(cfg.state_grid);
    cfg.rotation_angle = a.rotation;
    cfg.ideal_operators = a.ideal;
    cfg
}

pub fn wigner_rows(rho: &QuantumState) -> Result<Vec<Vec<String>>> {
    let axis = PositionGrid::phase_space_default();
    let w = wigner(rho, &axis, &axis)?;
    let mut rows = Vec::with_capacity(w.x_axis.len() * w.p_axis.len());
    for (i, &x) in w.x_axis.iter().enumerate() {
        for (k, &p) in w.p_axis.iter().enumerate() {
            rows.push(vec![num(x), num(p), num(w.values[i][k])]);
        }
    }
    Ok(rows)
}

pub const MARGINAL_HEADER: [&str; 5] = ["x", "position", "momentum", "ideal_position", "ideal_momentum"];

/// Final-state quadrature marginals next to those of the ideal target state.
pub fn marginal_rows(r: &ProtocolResult) -> Result<Vec<Vec<String>>> {
    let basis = r.final_basis()?;
    let px = position_marginal(&r.final_state, &basis)?;
    let pp = momentum_marginal(&r.final_state, &basis)?;
    let c = basis.to_fock(&render_target(&r.config.target, basis.grid())?)?;
    let ideal = QuantumState::pure(c.as_slice())?;
    let ix = position_marginal(&ideal, &basis)?;
    let ip = momentum_marginal(&ideal, &basis)?;
    let grid = basis.grid();
    Ok((0..grid.n_points())
        .map(|j| {
            vec![num(grid.x(j)), num(px.values()[j].re), num(pp.values()[j].re), num(ix.values()[j].re), num(ip.values()[j].re)]
        })
        .collect())
}

pub fn check_result(r: &ProtocolResult) -> Result<()> {
    ensure!((0.0..=1.0).contains(&r.fidelity), "fidelity {} out of range", r.fidelity);
    ensure!(
        r.joint_probability > 0.0 && r.joint_probability <= 1.0,
        "joint probability {} out of range",
        r.joint_probability
    );
    Ok(())
}

pub fn write_run(out: &mut OutDir, r: &ProtocolResult) -> Result<()> {
    out.json("result.json", r)?;
    for (k, (state, stage)) in r.stage_states.iter().zip(&r.stages).enumerate() {
        let name = format!("wigner_stage{}.csv", k + 1);
        out.csv(&name, &["x", "p", "w"], wigner_rows(state)?)?;
        out.text(&format!("wigner_stage{}.gp", k + 1), &plots::wigner(&stage.label, &name))?;
    }
    out.csv("marginals.csv", &MARGINAL_HEADER, marginal_rows(r)?)?;
    out.text("marginals.gp", &plots::columns("final marginals", "marginals.csv", 5, "density"))
}

pub fn sweep_rows(rows: &[SweepRow]) -> Vec<Vec<String>> {
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    rows.iter()
        .map(|r| vec![num(r.s), r.mode.label().to_string(), opt(r.fidelity), opt(r.probability)])
        .collect()
}

pub const SWEEP_HEADER: [&str; 4] = ["s", "mode", "fidelity", "probability"];

pub fn protocol(g: &Global, a: &ProtocolArgs) -> Result<()> {
    let mut out;
    if let Some(s_values) = &a.sweep {
        let rows = sweep_squeezing(&config(g, a, s_values[0]), s_values)?;
        out = OutDir::create(&g.out)?;
        out.json("result.json", &json!({ "rows": rows }))?;
        out.csv("sweep.csv", &SWEEP_HEADER, sweep_rows(&rows))?;
        out.text("sweep.gp", &plots::sweep("sweep.csv"))?;
    } else {
        let s = a.squeeze.expect("clap requires --squeeze without --sweep");
        let r = run_protocol(&config(g, a, s))?;
        check_result(&r)?;
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        out = OutDir::create(&g.out)?;
        write_run(&mut out, &r)?;
    }
    out.finish("protocol", json!({ "global": g, "args": a }))
}
