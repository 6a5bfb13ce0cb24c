use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mechprep"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) {
    let o = run(out, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    check_manifest(out);
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn check_manifest(dir: &Path) {
    let m = json(&dir.join("manifest.json"));
    let outputs = m["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for name in outputs {
        assert!(dir.join(name.as_str().unwrap()).is_file(), "{name} missing");
    }
    assert!(m["versions"].as_str().unwrap().starts_with("mechprep "));
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn synthesize_ground_state() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synthesize", "--target", "fock:0", "--chi", "auto"]);
    let f: f64 = fs::read_to_string(tmp.path().join("fidelity.txt")).unwrap().trim().parse().unwrap();
    assert!(f >= 0.98, "{f}");
    for name in ["pulse.json", "realized_upsilon.json", "fidelity.txt", "manifest.json"] {
        assert!(tmp.path().join(name).is_file());
    }
}

#[test]
fn synthesized_pulse_is_pi_like() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synthesize", "--target", "gaussian:s=1", "--chi", "1.0"]);
    let p = json(&tmp.path().join("pulse.json"));
    let dt = p["dt"].as_f64().unwrap();
    let area: f64 = p["samples"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c[0].as_f64().unwrap().hypot(c[1].as_f64().unwrap()))
        .sum::<f64>()
        * dt;
    assert!((area - FRAC_PI_2).abs() <= 1e-10, "{area}");
    assert_eq!(p["chi"].as_f64(), Some(1.0));
}

#[test]
fn synthesis_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(a.path(), &["synthesize", "--target", "fock:3", "--chi", "auto"]);
    ok(b.path(), &["synthesize", "--target", "fock:3", "--chi", "auto"]);
    assert_eq!(files(a.path()), files(b.path()));
}

#[test]
fn realize_reproduces_synthesized_operator() {
    let tmp = tempfile::tempdir().unwrap();
    let synth = tmp.path().join("synth");
    ok(&synth, &["synthesize", "--target", "cat", "--chi", "2"]);
    let pulse = synth.join("pulse.json");
    let real = tmp.path().join("real");
    ok(&real, &["realize", "--pulse", pulse.to_str().unwrap()]);
    assert_eq!(
        fs::read(synth.join("realized_upsilon.json")).unwrap(),
        fs::read(real.join("realized_upsilon.json")).unwrap()
    );
}

#[test]
fn protocol_prepares_fock_three() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["protocol", "--nbar", "5", "--squeeze", "8", "--target", "fock:3", "--steps", "2"]);
    let r = json(&tmp.path().join("result.json"));
    let f = r["fidelity"].as_f64().unwrap();
    assert!(f >= 0.95, "{f}");
    for k in 1..=4 {
        assert!(tmp.path().join(format!("wigner_stage{k}.csv")).is_file());
    }
    let (header, rows) = read_csv(&tmp.path().join("marginals.csv"));
    assert_eq!(header, ["x", "position", "momentum", "ideal_position", "ideal_momentum"]);
    assert_eq!(rows.len(), 2048);
}

#[test]
fn protocol_from_vacuum_matches_closed_form() {
    // With a negligible squeeze the target measurement itself narrows the
    // vacuum; the overlap of exp(-x^2) with exp(-x^2/2) is 2^(1/4) sqrt(2/3).
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["protocol", "--nbar", "0", "--squeeze", "0.01", "--target", "fock:0", "--ideal"]);
    let f = json(&tmp.path().join("result.json"))["fidelity"].as_f64().unwrap();
    let expected = 2f64.powf(0.25) * (2.0f64 / 3.0).sqrt();
    assert!((f - expected).abs() < 1e-4, "{f} vs {expected}");
}

#[test]
fn sweep_probabilities_fall_with_squeezing() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["protocol", "--sweep", "1,2,4,8", "--target", "fock:3", "--nbar", "5", "--ideal"]);
    let (header, rows) = read_csv(&tmp.path().join("sweep.csv"));
    assert_eq!(header, ["s", "mode", "fidelity", "probability"]);
    assert_eq!(rows.len(), 8);
    for mode in ["two_step", "three_step"] {
        let p: Vec<f64> = rows.iter().filter(|r| r[1] == mode).map(|r| r[3].parse().unwrap()).collect();
        assert!(p.windows(2).all(|w| w[1] < w[0]), "{mode}: {p:?}");
    }
}

#[test]
fn figure_tophat_matches_analytic() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["figure", "fig2e"]);
    let err = json(&tmp.path().join("summary.json"))["max_abs_error"].as_f64().unwrap();
    assert!(err <= 1e-9, "{err}");
    assert!(tmp.path().join("tophat.gp").is_file());
}

#[test]
fn figure_thermal_wigner_is_nonnegative() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["figure", "fig3a"]);
    let (header, rows) = read_csv(&tmp.path().join("wigner.csv"));
    assert_eq!(header, ["x", "p", "w"]);
    assert_eq!(rows.len(), 161 * 161);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn figure_sweep_has_four_curves() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["figure", "fig3e", "--ideal", "--sweep", "2,4"]);
    let curves = json(&tmp.path().join("summary.json"))["curves"].clone();
    let curves = curves.as_object().unwrap();
    assert_eq!(curves.len(), 4);
    for values in curves.values() {
        let v = values.as_array().unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|x| x.as_f64().unwrap().is_finite()));
    }
}

#[test]
fn budget_reports_both_coherence_figures() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["budget", "--duration-ns", "150"]);
    let b = json(&tmp.path().join("budget.json"));
    let b = &b["budget"];
    assert!((b["mech_coherence"].as_f64().unwrap() - 25.46e-6).abs() < 0.01e-6);
    assert_eq!(b["mech_coherence_quoted"].as_f64(), Some(100e-6));
    assert!((b["pulse_width"].as_f64().unwrap() - 117.65e-9).abs() < 0.01e-9);
    assert_eq!(b["pulse_width_quoted"].as_f64(), Some(11e-9));
    assert_eq!(b["unitary_ok"].as_bool(), Some(true));
}

#[test]
fn selfcheck_reports_pass() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["selfcheck"]);
    let reports = json(&tmp.path().join("selfcheck.json"));
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.iter().all(|r| r["passed"].as_bool() == Some(true)));
    assert!(reports.iter().any(|r| r["seed"].as_u64().is_some()));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["synthesize", "--target", "banana"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), &["protocol", "--target", "fock:3"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), &["figure", "fig9z"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), &["--grid", "8", "selfcheck"]).status.code(), Some(2));
    let o = run(tmp.path(), &["budget", "--lambda0-mhz", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda0"));
}
