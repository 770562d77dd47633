use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circle-stab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn analyze_single_sine() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "f.json", r#"{"degree": 1, "sin": [0.3]}"#);
    let out = run(tmp.path(), &["--command", "analyze", "--input", &input]);
    assert!(out.status.success());
    let report = json(&out.stdout);
    assert_eq!(report["n"], 2);
    assert_eq!(report["k"], 1);
    assert_eq!(report["morse"], true);
    assert_eq!(report["critical_points"].as_array().unwrap().len(), 2);
    let t = report["critical_points"][0]["t"].as_f64().unwrap();
    // L′(t) = 1 + 0.6π cos 2πt vanishes at t = arccos(−1/(0.6π))/2π
    let expected = (-1.0 / (0.6 * std::f64::consts::PI)).acos() / std::f64::consts::TAU;
    assert!((t - expected).abs() < 1e-12);
}

#[test]
fn analyze_covering_and_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "c.json", r#"{"degree": 2}"#);
    let out = run(tmp.path(), &["--command", "analyze", "--input", &input]);
    assert!(out.status.success());
    let report = json(&out.stdout);
    assert_eq!(report["n"], 0);
    assert_eq!(report["structure"]["product_form"], "Orb_M = Orb_MS");

    let bad = write(tmp.path(), "bad.json", "{degree: ");
    let out = run(tmp.path(), &["--command", "analyze", "--input", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(
        tmp.path(),
        &["--command", "analyze", "--input", "missing.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    let out = run(tmp.path(), &["--command", "analyze", "--resolution", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lift_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(
        tmp.path(),
        "lift.json",
        r#"{"map": {"degree": 1, "sin": [0.3]}, "target": {"knots": [0.1, 0.5, 0.8]}, "contract": 0.25}"#,
    );
    let out = run(
        tmp.path(),
        &[
            "--command",
            "lift",
            "--input",
            &input,
            "--output",
            "out",
            "--resolution",
            "256",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&fs::read(tmp.path().join("out/lift.json")).unwrap());
    assert!(report["residual"].as_f64().unwrap() <= 1e-7);
    let csv = fs::read_to_string(tmp.path().join("out/lift.csv")).unwrap();
    assert_eq!(csv.lines().count(), 257);
    assert_eq!(csv.lines().next(), Some("t,lift,derivative"));
    assert!(tmp.path().join("out/target.csv").exists());

    // a rotation does not fix the exceptional values
    let bad = write(
        tmp.path(),
        "bad.json",
        r#"{"map": {"degree": 1, "sin": [0.3]}, "target": {"rotation": 0.2}}"#,
    );
    let out = run(
        tmp.path(),
        &["--command", "lift", "--input", &bad, "--output", "o"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lift_on_covering_halves_rotation() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(
        tmp.path(),
        "lift.json",
        r#"{"map": {"degree": 2}, "target": {"rotation": 0.2}}"#,
    );
    let out = run(
        tmp.path(),
        &[
            "--command",
            "lift",
            "--input",
            &input,
            "--output",
            "out",
            "--resolution",
            "64",
        ],
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(tmp.path().join("out/lift.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[1] - cells[0] - 0.1).abs() < 1e-12);
    }
}

#[test]
fn section_and_field_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let sec = write(
        tmp.path(),
        "s.json",
        r#"{"configuration": [0.1, 0.3, 0.7]}"#,
    );
    let out = run(
        tmp.path(),
        &["--command", "section", "--input", &sec, "--output", "s"],
    );
    assert!(out.status.success());
    let report = json(&fs::read(tmp.path().join("s/section.json")).unwrap());
    assert!(report["max_error"].as_f64().unwrap() <= 1e-10);

    let f = write(tmp.path(), "f.json", r#"{"degree": 1, "sin": [0.3]}"#);
    let out = run(
        tmp.path(),
        &["--command", "field", "--input", &f, "--output", "fd"],
    );
    assert!(out.status.success());
    let report = json(&fs::read(tmp.path().join("fd/field.json")).unwrap());
    assert_eq!(report["level_classes"][0], "Reflective");
    assert_eq!(report["level_classes"][1], "Attractive");

    let odd = write(
        tmp.path(),
        "odd.json",
        r#"{"degree": 0, "cos": [0.2, 0.15]}"#,
    );
    let out = run(
        tmp.path(),
        &["--command", "field", "--input", &odd, "--output", "fo"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn orbit_of_symmetric_map() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(
        tmp.path(),
        "o.json",
        r#"{"map": {"degree": 1, "sin": [0, 0.1]}, "h": {"rotation": 0.1}, "target": {"rotation": 0.3, "knots": [0.4]}}"#,
    );
    let out = run(tmp.path(), &["--command", "orbit", "--input", &input]);
    assert!(out.status.success());
    let report = json(&out.stdout);
    assert_eq!(report["structure"]["k"], 2);
    assert_eq!(report["fiber"].as_array().unwrap().len(), 2);
    assert!(report["quotient_distance"].as_f64().unwrap() < 1e-9);
}

#[test]
fn selfcheck_with_tight_tolerance_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        tmp.path(),
        &[
            "--command",
            "selfcheck",
            "--tol",
            "1e-15",
            "--output",
            "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(
        stderr
            .lines()
            .filter(|l| l.starts_with("FAIL") || l.starts_with("PASS"))
            .count(),
        13
    );
    let report = json(&fs::read(tmp.path().join("r.json")).unwrap());
    assert_eq!(report["passed"], false);
}

#[test]
fn reports_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(
        tmp.path(),
        "f.json",
        r#"{"degree": 1, "sin": [0.3], "cos": [0.05]}"#,
    );
    let a = run(tmp.path(), &["--command", "analyze", "--input", &input]);
    let b = run(tmp.path(), &["--command", "analyze", "--input", &input]);
    assert_eq!(a.stdout, b.stdout);
}
