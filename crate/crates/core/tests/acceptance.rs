//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use mechprep::budget::{coherence_budget, UNITARY_DURATION_LIMIT};
use mechprep::engine::{rotate, thermal_state, DEFAULT_N_MAX};
use mechprep::protocol::*;
use mechprep::validation::*;
use mechprep::*;

const DEFAULT_SWEEP: [f64; 7] = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Prepared operators shared between criteria, with the wall time of the
/// run that produced each.
struct Operators {
    cfg: ProtocolConfig,
    cache: BTreeMap<String, (PreparedOperator, Duration)>,
}

impl Operators {
    fn new() -> Self {
        Self { cfg: ProtocolConfig::new(5.0, 1.0, Steps::TwoStep, TargetSpec::Fock { n: 3 }), cache: BTreeMap::new() }
    }

    fn get(&mut self, spec: TargetSpec) -> Result<(PreparedOperator, Duration)> {
        let key = spec.to_string();
        if !self.cache.contains_key(&key) {
            let start = Instant::now();
            let op = prepare_operator(&spec, &self.cfg)?;
            self.cache.insert(key.clone(), (op, start.elapsed()));
        }
        Ok(self.cache[&key].clone())
    }

    fn run(&mut self, nbar: f64, s: f64, steps: Steps, target: TargetSpec) -> Result<ProtocolResult> {
        let (squeeze, _) = self.get(TargetSpec::Gaussian { s })?;
        let (shape, _) = self.get(target)?;
        let cfg = ProtocolConfig { nbar, squeeze_s: s, steps, target, ..self.cfg.clone() };
        run_with_operators(&cfg, &squeeze, &shape)
    }
}

fn analytic_oracle() -> Result<Outcome> {
    let start = Instant::now();
    let r = oracle_tophat(&PositionGrid::default(), 1.0, 1.0)?;
    let elapsed = start.elapsed();
    Ok(outcome(
        r.passed && elapsed < Duration::from_secs(1),
        format!("max_err={:.3e} (tol 1e-10) runtime={:.3}s (limit 1s)", r.max_error, elapsed.as_secs_f64()),
    ))
}

fn synthesis_fidelity(ops: &mut Operators) -> Result<Outcome> {
    let checks: [(TargetSpec, f64); 7] = [
        (TargetSpec::Fock { n: 0 }, 0.98),
        (TargetSpec::Gaussian { s: 2.0 }, 0.98),
        (TargetSpec::Gaussian { s: 4.0 }, 0.98),
        (TargetSpec::Gaussian { s: 8.0 }, 0.98),
        (TargetSpec::Fock { n: 3 }, 0.97),
        (TargetSpec::cat_default(), 0.95),
        (TargetSpec::plane_wave_default(), 0.95),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (spec, floor) in checks {
        let (op, t) = ops.get(spec)?;
        passed &= op.operator_fidelity >= floor && t < Duration::from_secs(60);
        parts.push(format!("{spec}={:.4}(>={floor},{:.1}s)", op.operator_fidelity, t.as_secs_f64()));
    }
    let curve = fock_fidelity_curve(&[0, 1, 2, 3, 4, 5], &PositionGrid::default(), &SynthesisConfig::default())?;
    passed &= curve.len() == 6 && curve.iter().all(|c| c.fidelity.is_finite());
    let curve: Vec<String> = curve.iter().map(|c| format!("{}:{:.4}", c.n, c.fidelity)).collect();
    parts.push(format!("fock curve [{}]", curve.join(" ")));
    Ok(outcome(passed, parts.join(" ")))
}

fn state_preparation(ops: &mut Operators) -> Result<Outcome> {
    let fock3 = TargetSpec::Fock { n: 3 };
    let r8 = ops.run(5.0, 8.0, Steps::TwoStep, fock3)?;
    let probs: Vec<f64> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&s| ops.run(5.0, s, Steps::TwoStep, fock3).map(|r| r.joint_probability))
        .collect::<Result<_>>()?;
    let in_range = probs.iter().all(|&p| p > 0.0 && p < 0.5);
    let decreasing = probs.windows(2).all(|w| w[1] < w[0]);
    Ok(outcome(
        r8.fidelity >= 0.95 && in_range && decreasing,
        format!(
            "fidelity(s=8)={:.4} (>=0.95) P(s=2,4,8)=[{:.4e}, {:.4e}, {:.4e}] in (0,0.5) and decreasing",
            r8.fidelity, probs[0], probs[1], probs[2]
        ),
    ))
}

fn three_step_advantage(ops: &mut Operators) -> Result<Outcome> {
    let fock3 = TargetSpec::Fock { n: 3 };
    let mut passed = true;
    let mut parts = Vec::new();
    for s in DEFAULT_SWEEP {
        let two = ops.run(5.0, s, Steps::TwoStep, fock3)?;
        let three = ops.run(5.0, s, Steps::ThreeStep, fock3)?;
        let ok = three.fidelity >= two.fidelity && three.joint_probability <= two.joint_probability;
        passed &= ok;
        parts.push(format!(
            "s={s}: F {:.4}/{:.4} P {:.3e}/{:.3e}{}",
            two.fidelity,
            three.fidelity,
            two.joint_probability,
            three.joint_probability,
            if ok { "" } else { " <-" }
        ));
    }
    Ok(outcome(passed, format!("(two/three) {}", parts.join("; "))))
}

fn fidelity_limit() -> Result<Outcome> {
    let cfg = ProtocolConfig {
        ideal_operators: true,
        ..ProtocolConfig::new(5.0, 16.0, Steps::TwoStep, TargetSpec::Fock { n: 3 })
    };
    let r = run_protocol(&cfg)?;
    Ok(outcome(r.fidelity >= 0.99, format!("ideal operators, s=16, nbar=5: fidelity={:.5} (>=0.99)", r.fidelity)))
}

fn povm(seed: u64) -> Result<PovmReports> {
    let basis = BasisTransform::new(PositionGrid::state_default(), DEFAULT_N_MAX)?;
    oracle_povm(&random_cases(100, seed, DEFAULT_N_MAX, 10)?, &basis, seed)
}

fn marginal_match(ops: &mut Operators) -> Result<Outcome> {
    let fock3 = TargetSpec::Fock { n: 3 };
    let r = ops.run(5.0, 8.0, Steps::TwoStep, fock3)?;
    let basis = r.final_basis()?;
    let got = position_marginal(&r.final_state, &basis)?;
    let l1 = marginal_l1(&got, &target_density(&fock3, basis.grid())?)?;
    Ok(outcome(l1 <= 0.05, format!("L1 distance at s=8: {l1:.4} (<=0.05)")))
}

fn structural() -> Result<Outcome> {
    let nbar = 5.0;
    let thermal = thermal_state(nbar, DEFAULT_N_MAX)?;
    let ratio: f64 = nbar / (nbar + 1.0);
    let tail = ratio.powi(DEFAULT_N_MAX as i32 + 1);
    let purity_err = (purity(&thermal) - 1.0 / (2.0 * nbar + 1.0)).abs();
    let purity_ok = purity_err <= 2.0 * tail;

    let mixed = thermal_state(1.0, 40)?;
    let shifted = QuantumState::from_unnormalized(mixed.rho() + mixed.rho().map(|v| v * 0.0) + {
        let mut c = nalgebra::DMatrix::zeros(41, 41);
        c[(0, 1)] = C64::new(0.1, 0.05);
        c[(1, 0)] = C64::new(0.1, -0.05);
        c
    })?;
    let (a, b) = (0.7, -2.3);
    let rot_err = (rotate(&rotate(&shifted, a), b).rho() - rotate(&shifted, a + b).rho())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);

    let axis = PositionGrid::phase_space_default();
    let mut norm_err: f64 = 0.0;
    for rho in [QuantumState::fock(0, 20)?, QuantumState::fock(3, 20)?, thermal_state(1.0, 40)?] {
        norm_err = norm_err.max((wigner(&rho, &axis, &axis)?.integral() - 1.0).abs());
    }
    let peak_err = (wigner(&QuantumState::fock(0, 20)?, &axis, &axis)?.at(0.0, 0.0) - 1.0 / std::f64::consts::PI).abs();
    Ok(outcome(
        purity_ok && rot_err <= 1e-12 && norm_err <= 1e-4 && peak_err <= 1e-4,
        format!(
            "purity err={purity_err:.2e} (<=2*tail {:.1e}) rotation err={rot_err:.1e} (<=1e-12) wigner norm err={norm_err:.1e} (<=1e-4) vacuum peak err={peak_err:.1e} (<=1e-4)",
            2.0 * tail
        ),
    ))
}

fn coherence(ops: &mut Operators) -> Result<Outcome> {
    let params = SystemParams::default();
    let pulses: Vec<Pulse> = [TargetSpec::Gaussian { s: 8.0 }, TargetSpec::Fock { n: 3 }]
        .into_iter()
        .map(|spec| ops.get(spec).map(|(op, _)| op.pulse.expect("synthesized operator has a pulse")))
        .collect::<Result<_>>()?;
    let b = coherence_budget(&params, &pulses);
    let flag_consistent = b.unitary_ok == b.pulse_durations.iter().all(|&d| d < UNITARY_DURATION_LIMIT);
    let short = mechprep::budget::budget_from_durations(&params, vec![150e-9]);
    let reported = b.mech_coherence > 0.0 && b.pulse_width > 0.0 && b.mech_coherence_quoted == 100e-6;
    let durations: Vec<String> = b.pulse_durations.iter().map(|d| format!("{:.1}ns", d * 1e9)).collect();
    Ok(outcome(
        flag_consistent && short.unitary_ok && reported,
        format!(
            "durations [{}] unitary_ok={} (150ns pulse -> {}) T_mech={:.2}us (quoted {:.0}us) width={:.1}ns (quoted {:.0}ns)",
            durations.join(", "),
            b.unitary_ok,
            short.unitary_ok,
            b.mech_coherence * 1e6,
            b.mech_coherence_quoted * 1e6,
            b.pulse_width * 1e9,
            b.pulse_width_quoted * 1e9
        ),
    ))
}

fn main() {
    let seed = 20240917;
    let mut ops = Operators::new();
    let povm_reports = povm(seed);
    let results: Vec<(&str, Result<Outcome>)> = vec![
        ("1 analytic oracle", analytic_oracle()),
        ("2 synthesis fidelity", synthesis_fidelity(&mut ops)),
        ("3 state preparation", state_preparation(&mut ops)),
        ("4 three-step advantage", three_step_advantage(&mut ops)),
        ("5 fidelity limit", fidelity_limit()),
        (
            "6 povm completeness",
            povm_reports.as_ref().map_err(|e| Error::InvalidState(e.to_string())).map(|r| {
                outcome(
                    r.completeness.passed && r.probabilities_in_range,
                    format!("max |p_e+p_g-1|={:.2e} (tol 1e-8) over {} cases, seed {seed}", r.completeness.max_error, r.completeness.cases),
                )
            }),
        ),
        (
            "7 born rule",
            povm_reports.as_ref().map_err(|e| Error::InvalidState(e.to_string())).map(|r| {
                outcome(r.born_rule.passed, format!("max relative gap={:.2e} (tol 1e-8)", r.born_rule.max_error))
            }),
        ),
        ("8 marginal match", marginal_match(&mut ops)),
        ("9 structural", structural()),
        ("10 coherence budget", coherence(&mut ops)),
    ];
    let mut failures = 0;
    for (name, r) in results {
        let (passed, detail) = match r {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!passed);
        println!("criterion {name}: {} {detail}", if passed { "PASS" } else { "FAIL" });
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
