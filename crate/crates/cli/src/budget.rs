use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use mechprep::budget::{budget_from_durations, coherence_budget};
use mechprep::engine::DEFAULT_N_MAX;
use mechprep::validation::{oracle_fidelity_limit, oracle_povm, oracle_tophat, random_cases, OracleReport};
use mechprep::{BasisTransform, PositionGrid, Pulse, SystemParams, TargetSpec};
use serde_json::json;

use crate::output::OutDir;
use crate::Global;

/// Seed of the random measurement suite when `--seed` is not given.
pub const DEFAULT_ORACLE_SEED: u64 = 20240917;

#[derive(Args, Debug, serde::Serialize)]
pub struct BudgetArgs {
    /// Coupling lambda0/2pi in MHz.
    #[arg(long, default_value_t = 8.5)]
    pub lambda0_mhz: f64,
    /// Mechanical frequency omega_m/2pi in MHz.
    #[arg(long, default_value_t = 125.0)]
    pub omegam_mhz: f64,
    /// Qubit coherence time in microseconds.
    #[arg(long, default_value_t = 2.0)]
    pub t2_us: f64,
    /// Mechanical quality factor.
    #[arg(long, default_value_t = 1e5)]
    pub q: f64,
    #[arg(long, default_value_t = 5.0)]
    pub nbar: f64,
    /// Pulse files (durations in units of 1/lambda0).
    #[arg(long)]
    pub pulse: Vec<PathBuf>,
    /// Extra pulse durations in nanoseconds.
    #[arg(long)]
    pub duration_ns: Vec<f64>,
    /// Also run the validation oracles.
    #[arg(long)]
    pub selfcheck: bool,
}

pub fn budget(g: &Global, a: &BudgetArgs) -> Result<()> {
    let params = SystemParams::from_lab_units(a.lambda0_mhz, a.omegam_mhz, a.t2_us, a.q, a.nbar)?;
    let pulses: Vec<Pulse> = a
        .pulse
        .iter()
        .map(|path| {
            let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&body).with_context(|| format!("parsing {}", path.display()))
        })
        .collect::<Result<_>>()?;
    let mut durations = coherence_budget(&params, &pulses).pulse_durations;
    durations.extend(a.duration_ns.iter().map(|d| d * 1e-9));
    let report = budget_from_durations(&params, durations);

    let mut out = OutDir::create(&g.out)?;
    out.json("budget.json", &json!({ "budget": report, "passed": report.passed() }))?;
    let failed = if a.selfcheck { write_selfcheck(g, &mut out)? } else { 0 };
    out.finish("budget", json!({ "global": g, "args": a }))?;
    if failed > 0 {
        bail!("{failed} oracle checks failed; see selfcheck.json");
    }
    Ok(())
}

pub fn selfcheck(g: &Global) -> Result<()> {
    let mut out = OutDir::create(&g.out)?;
    let failed = write_selfcheck(g, &mut out)?;
    out.finish("selfcheck", json!({ "global": g }))?;
    if failed > 0 {
        bail!("{failed} oracle checks failed; see selfcheck.json");
    }
    Ok(())
}

fn write_selfcheck(g: &Global, out: &mut OutDir) -> Result<usize> {
    let seed = g.seed.unwrap_or(DEFAULT_ORACLE_SEED);
    let grid = g.synth_grid();
    let mut reports: Vec<OracleReport> = vec![oracle_tophat(&grid, 1.0, 1.0)?, {
        let mut r = oracle_tophat(&grid, 1.0, 0.0)?;
        r.name = "tophat_uncoupled".into();
        r
    }];
    let (limit, _) = oracle_fidelity_limit(5.0, &TargetSpec::Fock { n: 3 }, &[2.0, 4.0, 8.0, 16.0], false)?;
    reports.push(limit);
    let basis = BasisTransform::new(PositionGrid::state_default(), DEFAULT_N_MAX)?;
    let povm = oracle_povm(&random_cases(100, seed, DEFAULT_N_MAX, 10)?, &basis, seed)?;
    reports.push(povm.completeness);
    reports.push(povm.born_rule);
    out.json("selfcheck.json", &reports)?;
    Ok(reports.iter().filter(|r| !r.passed).count() + usize::from(!povm.probabilities_in_range))
}
