use std::path::Path;
use std::process::{Command, Output};

fn finsler(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn with_config(body: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), body).unwrap();
    dir
}

#[test]
fn euclidean_n_parallel_is_a_straight_line() {
    let dir = with_config(
        r#"{"surface": "euclidean", "integrate": {"flow": "n_parallel", "x0": [0, 0], "t0": [2, 0], "length": 0.5, "step": 0.01}}"#,
    );
    let out = finsler(dir.path(), &["integrate", "--config", "run.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<&str>> = lines
        .clone()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 51);
    for r in &rows {
        let v = |name: &str| r[col(name)].parse::<f64>().unwrap();
        assert!((v("x1") - v("t")).abs() < 1e-12);
        assert!(v("x2").abs() < 1e-12);
        assert!((v("T1") - 1.0).abs() < 1e-12);
        assert!(v("k").abs() < 1e-10);
        assert!(v("el_residual").abs() < 1e-10);
    }
    assert_eq!(text.lines().last().unwrap(), "# status: completed");
}

#[test]
fn output_flag_writes_the_file() {
    let dir = with_config(r#"{"surface": "euclidean", "invariants": {"grid": [2, 3], "directions": 4}}"#);
    let out = finsler(dir.path(), &["invariants", "--config", "run.json", "--out", "inv.csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("inv.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 4);
    assert!(csv.starts_with("x1,x2,y1,y2,I,J,K,"));
}

#[test]
fn verify_report_lists_identities() {
    let dir = with_config(r#"{"surface": "sphere", "verify": {"points": 10, "mean_points": 2}}"#);
    let out = finsler(dir.path(), &["verify", "--config", "run.json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = report["identities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    for want in [
        "structure_d_omega1",
        "bianchi_J_eq_I2",
        "bracket_e1_e2",
        "indicatrix_mean_I",
    ] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    assert!(report["identities"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["pass"] == true));
}

#[test]
fn exit_codes() {
    let cases = [
        (
            r#"{"surface": "euclidean", "verify": {"points": 5, "mean_points": 1}}"#,
            "verify",
            0,
        ),
        (
            r#"{"surface": "euclidean", "integrate": {"flow": "geodesic", "x0": [1.5, 0], "t0": [1, 0], "length": 1}}"#,
            "integrate",
            1,
        ),
        (r#"{"surface": "sphere", "unknown": true}"#, "verify", 2),
        (r#"{"surface": "klein_bottle"}"#, "verify", 2),
        (r#"{"surface": "sphere"}"#, "compare", 2),
        (
            r#"{"surface": {"family": "randers", "chart": {"rect": {"x1": [-1, 1], "x2": [-1, 1]}}, "b": [1.1, 0]}}"#,
            "invariants",
            2,
        ),
    ];
    for (body, cmd, want) in cases {
        let dir = with_config(body);
        let out = finsler(dir.path(), &[cmd, "--config", "run.json"]);
        assert_eq!(
            out.status.code(),
            Some(want),
            "{body}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        if want != 0 {
            assert!(!out.stderr.is_empty());
        }
    }
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        finsler(dir.path(), &["verify", "--config", "missing.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(finsler(dir.path(), &["verify"]).status.code(), Some(2));
}

#[test]
fn compare_is_deterministic_across_thread_counts() {
    let dir = with_config(
        r#"{"surface": "poincare_disk", "compare": {"x0": [0.1, -0.2], "n0": [0, 1], "length": 0.4, "step": 0.004}}"#,
    );
    let one = finsler(dir.path(), &["compare", "--config", "run.json"]);
    let four = finsler(dir.path(), &["compare", "--config", "run.json", "--jobs", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let report: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert!(report["distances"]["n_parallel_vs_geodesic"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["flows"].as_array().unwrap().len(), 3);
}
