use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn pvsym(args: &[&str]) -> (Value, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_pvsym")).args(args).output().expect("binary runs");
    let json: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    assert_eq!(json["schema_version"], 1);
    (json, out.status.success())
}

fn ok(args: &[&str]) -> Value {
    let (v, success) = pvsym(args);
    assert!(success, "{args:?}: {v:#}");
    v
}

#[test]
fn bracket_examples() {
    assert_eq!(ok(&["bracket", "vt", "D"])["element"], "vt");
    assert_eq!(ok(&["bracket", "vx", "vy"])["element"], "0");
    let v = ok(&["bracket", "vy", "vr"]);
    assert_eq!(v["element"], "-vx");
    assert_eq!(v["coordinates"], serde_json::json!([0.0, 0.0, 0.0, -1.0, 0.0, 0.0]));
    assert_eq!(ok(&["bracket", "0,0,1,0,0,0", "1,0,0,0,0,0"])["element"], "vt");
}

#[test]
fn bad_spec_fails_with_json_error() {
    let (v, success) = pvsym(&["bracket", "vq", "D"]);
    assert!(!success);
    assert_eq!(v["ok"], false);
    assert!(v["error"].as_str().unwrap().contains("vq"));
}

#[test]
fn classify_examples() {
    let v = ok(&["classify", "--dim", "1", "0,0,0,1,0,2"]);
    assert_eq!(v["form"]["class_id"], 6);
    assert_eq!(v["form"]["params"]["c"], 1);
    assert_eq!(ok(&["classify", "--dim", "1", "0,0,0,0,0,1"])["form"]["class_id"], 7);
    let (v, success) = pvsym(&["classify", "--dim", "2", "vx", "vr"]);
    assert!(!success);
    assert!(v["error"].as_str().unwrap().contains("not closed"));
    let v = ok(&["classify", "--dim", "2", "vt", "vpsi"]);
    assert_eq!(v["form"]["class_id"], 10);
    let (_, success) = pvsym(&["classify", "--dim", "2", "vt"]);
    assert!(!success);
}

#[test]
fn reduce_examples() {
    let v = ok(&["reduce", "--case", "5"]);
    assert_eq!(v["p"], "x - a*t");
    assert_eq!(v["q"], "y");
    assert_eq!(v["v"], "v = psi - c*t");
    assert!(v["reduced_residual"].as_str().unwrap().contains("w_p"));
    let v = ok(&["reduce", "--case", "7"]);
    assert_eq!(v["reducible"], false);
    assert_eq!(v["notice"], "no reduction can be achieved");
    let v = ok(&["reduce", "--case", "4"]);
    assert!(v["v"].as_str().unwrap().contains("arctan"));
    assert_eq!(v["laplacian"], "radial");
    let v = ok(&["reduce", "--case", "2", "--a", "0.5", "--F", "2"]);
    assert_eq!(v["mu"], "-t^-2");
    let (_, success) = pvsym(&["reduce", "--case", "9"]);
    assert!(!success);
}

#[test]
fn adjoint_methods_agree() {
    let v = ok(&["adjoint", "vt", "D", "--eps", "0.5"]);
    assert_eq!(v["result"], "D - 0.5*vt");
    let v = ok(&["adjoint", "1,0.3,-0.2,0.5,0.1,0.7", "0,1,0,0,-1,2", "--eps", "-1.5"]);
    assert!(v["max_method_difference"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_suites() {
    for suite in ["algebra", "optimal-system", "reductions", "solutions"] {
        let v = ok(&["verify", "--suite", suite, "--seed", "3"]);
        assert_eq!(v["failures"], serde_json::json!([]), "{suite}");
    }
    ok(&["verify", "--suite", "symmetries", "--F", "2", "--beta", "-1"]);
    let (v, success) = pvsym(&["verify", "--suite", "nonsense"]);
    assert!(!success);
    assert!(v["error"].as_str().unwrap().contains("unknown suite"));
}

#[test]
fn verify_is_deterministic() {
    let a = Command::new(env!("CARGO_BIN_EXE_pvsym")).args(["verify", "--suite", "reductions", "--seed", "9"]).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_pvsym")).args(["verify", "--suite", "reductions", "--seed", "9"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

fn simulate(dir: &Path, config: &str) -> Value {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    ok(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn simulate_stationary_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let v = simulate(dir.path(), "initial = stationary\nn = 32\nt_end = 0.1\n");
    assert_eq!(v["steps"], 100);
    assert!(v["max_diff_from_initial"].as_f64().unwrap() < 1e-10);
    for f in ["initial.csv", "final.csv", "final.bin", "final.bin.json", "diagnostics.csv", "report.json"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let text = std::fs::read_to_string(dir.path().join("out/final.csv")).unwrap();
    assert!(text.starts_with("Nx,Ny,Lx,Ly,t\n32,32,"));
}

#[test]
fn simulate_rossby_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let v = simulate(dir.path(), r#"{"initial": "rossby", "F": 1, "beta": 1, "n": 64, "dt": 0.001, "t_end": 1}"#);
    assert!(v["reference_error"].as_f64().unwrap() < 1e-6, "{v:#}");
}

#[test]
fn simulate_beta_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let v = simulate(dir.path(), "mode = beta-equivalence\ninitial = random\nn = 32\nbeta = 0.8\nseed = 2\n");
    assert!(v["report"]["rel_diff"].as_f64().unwrap() < 1e-6);
}

#[test]
fn simulate_is_byte_reproducible() {
    let cfg = "initial = random\nseed = 4\nn = 16\nt_end = 0.05\nbeta = 0.5\noutput_every = 10\n";
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    simulate(d1.path(), cfg);
    simulate(d2.path(), cfg);
    for f in ["final.csv", "final.bin", "diagnostics.csv"] {
        assert_eq!(std::fs::read(d1.path().join("out").join(f)).unwrap(), std::fs::read(d2.path().join("out").join(f)).unwrap(), "{f}");
    }
}

#[test]
fn simulate_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 12\n").unwrap();
    let (v, success) = pvsym(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(!success);
    assert!(v["error"].as_str().unwrap().contains("power of two"));
}

#[test]
fn transform_solutions() {
    let v = ok(&["transform", "--psi", "sin(x)*sin(y)", "--F", "1", "--beta", "1"]);
    assert_eq!(v["image"], "y + sin(y)*sin(t + x)");
    let back = ok(&["transform", "--psi", "y + sin(y)*sin(t + x)", "--beta", "1", "--inverse"]);
    assert_eq!(back["image"], "sin(x)*sin(y)");
    let v = ok(&["transform", "--psi", "2 + 3*exp(x - t) - exp(t - x)", "--generator", "vr", "--eps", "0.4"]);
    assert_eq!(v["image_residual"]["points"], 100);
    let (_, success) = pvsym(&["transform", "--psi", "sin(x)", "--F", "0", "--beta", "1"]);
    assert!(!success);
}

#[test]
fn report_written_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bracket.json");
    let v = ok(&["bracket", "vx", "vr", "--out", path.to_str().unwrap()]);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved, v);
}

#[test]
fn negative_values_and_hyphenated_specs() {
    let v = ok(&["bracket", "-1,0,0,0,0,0", "vt"]);
    assert_eq!(v["element"], "vt");
    let v = ok(&["reduce", "--case", "3", "--a", "-0.5", "--sign", "-1"]);
    assert_eq!(v["class_id"], 3);
}
