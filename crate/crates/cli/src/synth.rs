use std::fs;
use std::path::PathBuf;

use anyhow::{ensure, Context, Result};
use clap::Args;
use mechprep::synthesis::optimize_chi;
use mechprep::targets::render_target;
use mechprep::{
    operator_fidelity, realize_operator, synthesize_pulse, GridFunction, MeasurementOperator, Pulse,
    SynthesisConfig, TargetSpec, C64,
};
use serde_json::json;

use crate::output::{num, OutDir};
use crate::{parse_target, plots, Global};

#[derive(Args, Debug)]
pub struct SynthesizeArgs {
    /// Target, e.g. `fock:3`, `gaussian:s=4`, `cat:d=2,phi=1.5708`, `plane:k=2,lo=-3,hi=3`.
    #[arg(long, value_parser = parse_target)]
    pub target: TargetSpec,
    /// Bandwidth scale, or `auto` to optimize it.
    #[arg(long, default_value = "auto", value_parser = parse_chi)]
    pub chi: ChiArg,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChiArg {
    Auto,
    Fixed(f64),
}

impl ChiArg {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Auto => None,
            Self::Fixed(v) => Some(v),
        }
    }
}

fn parse_chi(s: &str) -> Result<ChiArg, String> {
    if s == "auto" {
        return Ok(ChiArg::Auto);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(ChiArg::Fixed(v)),
        _ => Err(format!("expected a positive number or 'auto', got '{s}'")),
    }
}

#[derive(Args, Debug)]
pub struct RealizeArgs {
    /// Pulse file as written by `synthesize`.
    #[arg(long, conflicts_with = "tophat", required_unless_present = "tophat")]
    pub pulse: Option<PathBuf>,
    /// Use a constant drive of this amplitude instead of a pulse file.
    #[arg(long)]
    pub tophat: Option<f64>,
    /// Steps of the top-hat drive.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Coupling in the pulse's time units.
    #[arg(long, default_value_t = 1.0)]
    pub lambda0: f64,
}

pub struct Synthesized {
    pub target: GridFunction,
    pub pulse: Pulse,
    pub realized: MeasurementOperator,
    pub fidelity: f64,
    pub scan: Vec<(f64, f64)>,
    pub truncation_eps: f64,
}

pub fn run_synthesis(spec: &TargetSpec, g: &Global, chi: Option<f64>) -> Result<Synthesized> {
    let grid = g.synth_grid();
    let target = render_target(spec, &grid)?;
    let cfg = SynthesisConfig::default().fit_truncation(&target)?;
    let out = match chi {
        None => {
            let opt = optimize_chi(&target, 1.0, &cfg)?;
            Synthesized {
                fidelity: opt.fidelity,
                pulse: opt.pulse,
                realized: opt.realized,
                scan: opt.evaluations,
                truncation_eps: opt.truncation_eps,
                target,
            }
        }
        Some(chi) => {
            let pulse = synthesize_pulse(&target, chi, 1.0, &cfg)?;
            let realized = realize_operator(&pulse, &grid, 1.0)?;
            let fidelity = operator_fidelity(&target, realized.upsilon_e())?;
            Synthesized { fidelity, pulse, realized, scan: vec![(chi, fidelity)], truncation_eps: cfg.truncation_eps, target }
        }
    };
    ensure!(out.pulse.is_normalized(), "pulse area {} is not pi/2", out.pulse.unsigned_area());
    ensure!((0.0..=1.0 + 1e-12).contains(&out.fidelity), "fidelity {} out of range", out.fidelity);
    Ok(out)
}

/// Both normalized, with the realized operator's global phase turned to
/// maximize its real overlap with the target.
pub fn aligned(target: &GridFunction, realized: &GridFunction) -> Result<(GridFunction, GridFunction)> {
    let t = target.normalized()?;
    let r = realized.normalized()?;
    let c = t.inner(&r)?;
    let phase = if c.norm() > 0.0 { c / c.norm() } else { C64::new(1.0, 0.0) };
    Ok((t, r.map(|v| v * phase)?))
}

pub fn operator_rows(target: &GridFunction, realized: &GridFunction) -> Result<Vec<Vec<String>>> {
    let (t, r) = aligned(target, realized)?;
    let grid = t.grid();
    Ok((0..grid.n_points())
        .map(|j| {
            let (a, b) = (t.values()[j], r.values()[j]);
            vec![num(grid.x(j)), num(a.re), num(a.im), num(b.re), num(b.im)]
        })
        .collect())
}

pub const OPERATOR_HEADER: [&str; 5] = ["x", "target_re", "target_im", "realized_re", "realized_im"];

pub fn synthesize(g: &Global, a: &SynthesizeArgs) -> Result<()> {
    let s = run_synthesis(&a.target, g, a.chi.value())?;
    let mut out = OutDir::create(&g.out)?;
    out.json("pulse.json", &s.pulse)?;
    out.json("realized_upsilon.json", &s.realized)?;
    out.text("fidelity.txt", &format!("{}\n", s.fidelity))?;
    out.csv("upsilon.csv", &OPERATOR_HEADER, operator_rows(&s.target, s.realized.upsilon_e())?)?;
    out.text("upsilon.gp", &plots::operator(&a.target.to_string(), "upsilon.csv"))?;
    let mut scan = s.scan.clone();
    scan.sort_by(|x, y| x.0.total_cmp(&y.0));
    out.csv("chi_scan.csv", &["chi", "fidelity"], scan.iter().map(|(c, f)| vec![num(*c), num(*f)]))?;
    out.finish(
        "synthesize",
        json!({
            "global": g,
            "target": a.target,
            "chi": a.chi.value().map_or(json!("auto"), |c| json!(c)),
            "chosen_chi": s.pulse.chi(),
            "truncation_eps": s.truncation_eps,
        }),
    )
}

pub fn realize(g: &Global, a: &RealizeArgs) -> Result<()> {
    let pulse = match (&a.pulse, a.tophat) {
        (Some(path), _) => {
            let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<Pulse>(&body).with_context(|| format!("parsing {}", path.display()))?
        }
        (None, Some(alpha0)) => Pulse::top_hat(alpha0, a.samples)?,
        (None, None) => unreachable!("clap requires one pulse source"),
    };
    let grid = g.synth_grid();
    let op = realize_operator(&pulse, &grid, a.lambda0)?;
    let mut out = OutDir::create(&g.out)?;
    out.json("realized_upsilon.json", &op)?;
    let rows = (0..grid.n_points()).map(|j| {
        let (e, gr) = (op.upsilon_e().values()[j], op.upsilon_g().values()[j]);
        vec![num(grid.x(j)), num(e.re), num(e.im), num(gr.re), num(gr.im), num(e.norm())]
    });
    out.csv("upsilon.csv", &["x", "e_re", "e_im", "g_re", "g_im", "e_abs"], rows)?;
    out.text("upsilon.gp", &plots::columns("realized operator", "upsilon.csv", 6, "amplitude"))?;
    out.finish(
        "realize",
        json!({
            "global": g,
            "pulse": a.pulse.as_ref().map(|p| p.display().to_string()),
            "tophat": a.tophat,
            "samples": a.samples,
            "lambda0": a.lambda0,
            "completeness_error": op.completeness_error(),
        }),
    )
}
