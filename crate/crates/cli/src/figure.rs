use anyhow::{ensure, Result};
use clap::{Args, ValueEnum};
use mechprep::dynamics::analytic_tophat;
use mechprep::protocol::{fock_fidelity_curve, run_protocol, sweep_squeezing, SweepRow};
use mechprep::synthesis::optimize_chi;
use mechprep::targets::render_target;
use mechprep::validation::oracle_tophat;
use mechprep::{realize_operator, synthesize_pulse, thermal_state, wigner, PositionGrid, Pulse, Steps, SynthesisConfig, TargetSpec};
use serde_json::json;

use crate::output::{num, OutDir};
use crate::prep::{self, ProtocolArgs, SWEEP_HEADER};
use crate::synth::{aligned, operator_rows, run_synthesis, OPERATOR_HEADER};
use crate::{parse_list, parse_target, plots, FloatList, Global, StepsArg};

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Panel {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig2e,
    Fig2f,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig3e,
    Fig3f,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: Panel,
    /// Thermal occupation for the preparation panels.
    #[arg(long, default_value_t = 5.0)]
    pub nbar: f64,
    /// Squeezing parameter for fig3b-d.
    #[arg(long, default_value_t = 8.0)]
    pub squeeze: f64,
    /// Prepared state for fig3b-e.
    #[arg(long, default_value = "fock:3", value_parser = parse_target)]
    pub target: TargetSpec,
    /// Squeezing values for fig3e.
    #[arg(long, value_parser = parse_list, default_value = "1,2,3,4,6,8,10")]
    pub sweep: FloatList,
    /// Bandwidth scales shown in fig2f.
    #[arg(long, value_parser = parse_list, default_value = "1,1.5,2,3")]
    pub chis: FloatList,
    /// Apply target functions directly in the preparation panels.
    #[arg(long)]
    pub ideal: bool,
}

pub fn figure(g: &Global, a: &FigureArgs) -> Result<()> {
    let mut out = OutDir::create(&g.out)?;
    let summary = match a.name {
        Panel::Fig2a => operator_panel(g, &mut out, TargetSpec::Fock { n: 0 })?,
        Panel::Fig2b => operator_panel(g, &mut out, TargetSpec::cat_default())?,
        Panel::Fig2c => operator_panel(g, &mut out, TargetSpec::plane_wave_default())?,
        Panel::Fig2d => operator_panel(g, &mut out, TargetSpec::Fock { n: 3 })?,
        Panel::Fig2e => tophat_panel(g, &mut out)?,
        Panel::Fig2f => chi_panel(g, a, &mut out)?,
        Panel::Fig3a => thermal_panel(a, &mut out)?,
        Panel::Fig3b => stage_panel(g, a, &mut out, 1)?,
        Panel::Fig3c => stage_panel(g, a, &mut out, 2)?,
        Panel::Fig3d => stage_panel(g, a, &mut out, 3)?,
        Panel::Fig3e => sweep_panel(g, a, &mut out)?,
        Panel::Fig3f => fock_panel(g, &mut out)?,
    };
    out.json("summary.json", &summary)?;
    out.finish("figure", json!({ "global": g, "args": a }))
}

fn operator_panel(g: &Global, out: &mut OutDir, spec: TargetSpec) -> Result<serde_json::Value> {
    let s = run_synthesis(&spec, g, None)?;
    out.csv("operator.csv", &OPERATOR_HEADER, operator_rows(&s.target, s.realized.upsilon_e())?)?;
    out.text("operator.gp", &plots::operator(&spec.to_string(), "operator.csv"))?;
    Ok(json!({ "target": spec, "chi": s.pulse.chi(), "fidelity": s.fidelity, "truncation_eps": s.truncation_eps }))
}

fn tophat_panel(g: &Global, out: &mut OutDir) -> Result<serde_json::Value> {
    let (alpha0, lambda0) = (1.0, 1.0);
    let grid = g.synth_grid();
    let op = realize_operator(&Pulse::top_hat(alpha0, 64)?, &grid, lambda0)?;
    let mut rows = Vec::with_capacity(grid.n_points());
    let mut max_err: f64 = 0.0;
    for j in 0..grid.n_points() {
        let numeric = op.upsilon_e().values()[j].norm();
        let exact = analytic_tophat(grid.x(j), alpha0, lambda0)?.norm();
        max_err = max_err.max((numeric - exact).abs());
        rows.push(vec![num(grid.x(j)), num(numeric), num(exact), num((numeric - exact).abs())]);
    }
    out.csv("tophat.csv", &["x", "numeric", "analytic", "abs_error"], rows)?;
    out.text("tophat.gp", &plots::columns("top-hat drive", "tophat.csv", 3, "|Upsilon_e|"))?;
    ensure!(max_err <= 1e-9, "top-hat mismatch {max_err:e} exceeds 1e-9");
    let report = oracle_tophat(&grid, alpha0, lambda0)?;
    Ok(json!({ "alpha0": alpha0, "lambda0": lambda0, "max_abs_error": max_err, "oracle": report }))
}

fn chi_panel(g: &Global, a: &FigureArgs, out: &mut OutDir) -> Result<serde_json::Value> {
    let spec = TargetSpec::two_lobed_default();
    let grid = g.synth_grid();
    let target = render_target(&spec, &grid)?;
    let cfg = SynthesisConfig::default().fit_truncation(&target)?;
    let mut curves = Vec::new();
    let mut fidelities = Vec::new();
    for &chi in &a.chis {
        let op = realize_operator(&synthesize_pulse(&target, chi, 1.0, &cfg)?, &grid, 1.0)?;
        let (t, r) = aligned(&target, op.upsilon_e())?;
        fidelities.push(json!({ "chi": chi, "fidelity": t.inner(&r)?.norm() }));
        curves.push((t, r));
    }
    let mut header = vec!["x".to_string(), "target".to_string()];
    header.extend(a.chis.iter().map(|c| format!("chi_{c}")));
    let rows = (0..grid.n_points()).map(|j| {
        let mut row = vec![num(grid.x(j)), num(curves.first().map_or(0.0, |c| c.0.values()[j].re))];
        row.extend(curves.iter().map(|(_, r)| num(r.values()[j].re)));
        row
    });
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.csv("chi_effect.csv", &header, rows)?;
    out.text("chi_effect.gp", &plots::columns("bandwidth scale", "chi_effect.csv", header.len(), "Re Upsilon"))?;

    let opt = optimize_chi(&target, 1.0, &cfg)?;
    let mut scan = opt.evaluations.clone();
    scan.sort_by(|x, y| x.0.total_cmp(&y.0));
    out.csv("chi_scan.csv", &["chi", "fidelity"], scan.iter().map(|(c, f)| vec![num(*c), num(*f)]))?;
    out.text("chi_scan.gp", &plots::points("fidelity vs chi", "chi_scan.csv", "chi", "fidelity"))?;
    Ok(json!({ "target": spec, "curves": fidelities, "best_chi": opt.chi, "best_fidelity": opt.fidelity }))
}

fn wigner_summary(out: &mut OutDir, rho: &mechprep::QuantumState, label: &str) -> Result<serde_json::Value> {
    let axis = PositionGrid::phase_space_default();
    let w = wigner(rho, &axis, &axis)?;
    out.csv("wigner.csv", &["x", "p", "w"], prep::wigner_rows(rho)?)?;
    out.text("wigner.gp", &plots::wigner(label, "wigner.csv"))?;
    Ok(json!({ "stage": label, "wigner_min": w.min(), "wigner_integral": w.integral() }))
}

fn thermal_panel(a: &FigureArgs, out: &mut OutDir) -> Result<serde_json::Value> {
    let rho = thermal_state(a.nbar, mechprep::engine::DEFAULT_N_MAX)?;
    let summary = wigner_summary(out, &rho, "thermal")?;
    Ok(json!({ "nbar": a.nbar, "wigner": summary }))
}

fn protocol_args(a: &FigureArgs, steps: StepsArg) -> ProtocolArgs {
    ProtocolArgs {
        nbar: a.nbar,
        squeeze: Some(a.squeeze),
        sweep: None,
        target: a.target,
        steps,
        ideal: a.ideal,
        rotation: std::f64::consts::FRAC_PI_2,
        state_grid: None,
    }
}

fn stage_panel(g: &Global, a: &FigureArgs, out: &mut OutDir, stage: usize) -> Result<serde_json::Value> {
    let r = run_protocol(&prep::config(g, &protocol_args(a, StepsArg::Two), a.squeeze))?;
    prep::check_result(&r)?;
    let summary = wigner_summary(out, &r.stage_states[stage], &r.stages[stage].label)?;
    if stage == r.stages.len() - 1 {
        out.csv("marginals.csv", &prep::MARGINAL_HEADER, prep::marginal_rows(&r)?)?;
        out.text("marginals.gp", &plots::columns("final marginals", "marginals.csv", 5, "density"))?;
    }
    Ok(json!({
        "stage": r.stages[stage],
        "wigner": summary,
        "fidelity": r.fidelity,
        "joint_probability": r.joint_probability,
    }))
}

fn sweep_panel(g: &Global, a: &FigureArgs, out: &mut OutDir) -> Result<serde_json::Value> {
    let cfg = prep::config(g, &protocol_args(a, StepsArg::Two), a.sweep[0]);
    let rows = sweep_squeezing(&cfg, &a.sweep)?;
    out.csv("sweep.csv", &SWEEP_HEADER, prep::sweep_rows(&rows))?;
    out.text("sweep.gp", &plots::sweep("sweep.csv"))?;
    let pick = |mode: Steps, f: fn(&SweepRow) -> Option<f64>| -> Vec<Option<f64>> {
        rows.iter().filter(|r| r.mode == mode).map(f).collect()
    };
    let curves = json!({
        "fidelity_two_step": pick(Steps::TwoStep, |r| r.fidelity),
        "fidelity_three_step": pick(Steps::ThreeStep, |r| r.fidelity),
        "probability_two_step": pick(Steps::TwoStep, |r| r.probability),
        "probability_three_step": pick(Steps::ThreeStep, |r| r.probability),
    });
    let errors: Vec<_> = rows.iter().filter_map(|r| r.error.as_ref().map(|e| json!({ "s": r.s, "mode": r.mode, "error": e }))).collect();
    Ok(json!({ "s": a.sweep, "curves": curves, "errors": errors }))
}

fn fock_panel(g: &Global, out: &mut OutDir) -> Result<serde_json::Value> {
    let curve = fock_fidelity_curve(&[0, 1, 2, 3, 4, 5], &g.synth_grid(), &SynthesisConfig::default())?;
    ensure!(curve.iter().all(|c| c.fidelity.is_finite()), "non-finite Fock fidelity");
    out.csv("fock_fidelity.csv", &["n", "chi", "fidelity"], curve.iter().map(|c| vec![c.n.to_string(), num(c.chi), num(c.fidelity)]))?;
    out.text("fock_fidelity.gp", &plots::points("Fock targets", "fock_fidelity.csv", "n", "fidelity"))?;
    Ok(json!({ "curve": curve }))
}
