use std::path::Path;
use std::process::{Command, Output};

fn qsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(args)
        .env("QSL_THREADS", "1")
        .output()
        .expect("run qsl")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_system(dir: &Path, text: &str) -> String {
    let path = dir.join("system.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SATURATING: &str = r#"{"hamiltonian": [[[0, 0], [0, 0]], [[0, 0], [2, 0]]], "state": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}"#;

#[test]
fn bounds_at_right_angle() {
    let out = qsl(&[
        "bounds",
        "--theta",
        "1.5707963",
        "--mean",
        "1",
        "--spread",
        "1",
        "--emin",
        "0",
        "--emax",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("glm_beta = 1.5707963\n"), "{text}");
    assert!(text.contains("mean_min_e = 1.5707962"), "{text}");
}

#[test]
fn bounds_units_and_csv() {
    let out = qsl(&[
        "bounds",
        "--theta",
        "1.5707963267948966",
        "--mean",
        "1",
        "--spread",
        "1",
        "--emin",
        "0",
        "--units",
        "h",
        "--format",
        "csv",
        "--actual-time",
        "1.5707963267948966",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta,glm_beta,mean_min_e,max_mean_e,max_min,delta_e_variant,bc,tightest_label,tightest_value,saturation_ratio"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[1], "0.25");
    assert_eq!(row[3], "");
    assert_eq!(row[9], "1");
}

#[test]
fn theta_out_of_range() {
    let out = qsl(&[
        "bounds", "--theta", "4.0", "--mean", "1", "--spread", "1", "--emin", "0", "--emax", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("theta must lie in [0, pi/2]"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qsl(&["bounds", "--theta", "1"]).status.code(), Some(2));
    assert_eq!(qsl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        qsl(&["case", "cnot", "--epsilon", "1", "--variant", "C"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qsl(&["case", "hadamard", "--epsilon", "1", "--delta", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn file_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = qsl(&[
        "bounds",
        "--theta",
        "1",
        "--system",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let bad = write_system(dir.path(), "{\"hamiltonian\": 1}");
    assert_eq!(
        qsl(&["bounds", "--theta", "1", "--system", &bad])
            .status
            .code(),
        Some(3)
    );
    let unwritable = dir.path().join("no/such/dir/curve.csv");
    assert_eq!(
        qsl(&[
            "curve",
            "--points",
            "3",
            "--out",
            unwritable.to_str().unwrap()
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn bounds_from_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let system = write_system(dir.path(), SATURATING);
    let out = qsl(&[
        "bounds", "--theta", "0.5", "--system", &system, "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((report["glm_beta"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(report["tightest"]["label"], "glm_beta");
}

#[test]
fn unnormalized_state_warns() {
    let dir = tempfile::tempdir().unwrap();
    let system = write_system(
        dir.path(),
        r#"{"hamiltonian": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]], "state": [[2, 0], [0, 0]]}"#,
    );
    let out = qsl(&["bounds", "--theta", "0.5", "--system", &system]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("not normalized"));
}

#[test]
fn evolve_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let system = write_system(dir.path(), SATURATING);
    let out_path = dir.path().join("trace.csv");
    let out = qsl(&[
        "evolve",
        "--system",
        &system,
        "--t-max",
        "3",
        "--samples",
        "31",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time,s_real,s_imag,theta,saturation_glm_beta,saturation_mean_min_e,saturation_max_mean_e,\
         saturation_max_min,saturation_delta_e_variant,saturation_bc"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 31);
    assert!(rows[0][4].is_infinite());
    for row in &rows {
        assert!(row[1] * row[1] + row[2] * row[2] <= 1.0 + 1e-12);
        assert!(row[4..].iter().all(|&r| r >= 1.0 - 1e-9), "{row:?}");
    }
    // theta(t) = t until orthogonality for this state.
    assert!((rows[10][3] - 1.0).abs() < 1e-9);
    assert!((rows[10][4] - 1.0).abs() < 1e-9);
}

#[test]
fn curve_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = qsl(&["curve", "--points", "101", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "cos_theta,theta,glm_beta_dimensionless,mean_e_dimensionless,bc_dimensionless,bc_poly"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    assert!((rows[0][4] - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
    assert_eq!(rows[0][5], 1.57);
    assert_eq!(&rows[100][2..], &[0.0, 0.0, 0.0, 0.0]);
    let worst = rows.iter().map(|r| (r[4] - r[5]).abs()).fold(0.0, f64::max);
    assert!(worst <= 1e-3);
}

#[test]
fn verify_is_clean_and_deterministic() {
    let args = [
        "verify",
        "--trials",
        "100",
        "--dim-max",
        "8",
        "--seed",
        "42",
    ];
    let first = qsl(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let second = Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(args)
        .env("QSL_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
    assert_eq!(report["trials"], 100);
    assert!(report.get("elapsed").is_none());
    assert!(stderr(&first).contains("0 violations"));
}

#[test]
fn verify_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qsl(&["verify", "--trials", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
    assert!(report["worst_saturation"].is_null());
}

#[test]
fn bad_thread_count() {
    let out = Command::new(env!("CARGO_BIN_EXE_qsl"))
        .args(["curve", "--points", "3", "--out", "/dev/null"])
        .env("QSL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn case_studies() {
    let out = qsl(&["case", "hadamard", "--epsilon", "0.001", "--delta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("spread_time_product_h = 0.125"));
    let out = qsl(&[
        "case",
        "cnot",
        "--epsilon",
        "1",
        "--variant",
        "A",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json[0]["gate_distance"].as_f64().unwrap() < 1e-10);
    let out = qsl(&["case", "grover", "--n", "1000000"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("per_iteration_min_time = 0.002\n"));
}

#[test]
fn frozen_state_cannot_rotate() {
    let dir = tempfile::tempdir().unwrap();
    let system = write_system(
        dir.path(),
        r#"{"hamiltonian": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]], "state": [[1, 0], [1, 0]]}"#,
    );
    let out = qsl(&["bounds", "--theta", "0.5", "--system", &system]);
    assert_eq!(out.status.code(), Some(2));
    let out = qsl(&["bounds", "--theta", "0", "--system", &system]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("frozen = true"));
}
