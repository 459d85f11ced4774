use std::path::Path;
use std::process::{Command, Output};

fn fracsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_spec(dir: &Path, alpha: f64) -> String {
    let path = dir.join("problem.txt");
    let text = format!(
        "interval.a = 0\ninterval.b = {}\nalpha = {alpha}\np.kind = constant\np.value = 1\nq.kind = constant\nq.value = 0\nw.kind = constant\nw.value = 1\n",
        std::f64::consts::PI
    );
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn spectrum(dir: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join("spectrum.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn solve_recovers_the_classical_oscillator() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 1.0);
    let out = dir.path().join("out");
    let o = fracsl(&[
        "solve",
        "--spec",
        &spec,
        "--grid-n",
        "512",
        "--m-max",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let json = spectrum(&out);
    let values: Vec<f64> = json["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (k, v) in values.iter().enumerate() {
        let exact = ((k + 1) * (k + 1)) as f64;
        assert!((v - exact).abs() < 1e-6, "lambda_{} = {v}", k + 1);
    }
    for n in 1..=3 {
        let csv = std::fs::read_to_string(out.join(format!("eigenfunctions/y_{n}.csv"))).unwrap();
        assert!(csv.starts_with("x,y,caputo_y\n"));
        assert_eq!(csv.lines().count(), 514);
    }
    let residuals = std::fs::read_to_string(out.join("residuals.csv")).unwrap();
    assert_eq!(residuals.lines().count(), 4);
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("n=")).count(),
        3
    );
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 0.75);
    let mut files = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = fracsl(&[
            "solve",
            "--spec",
            &spec,
            "--grid-n",
            "256",
            "--m-max",
            "12",
            "--out",
            out.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert!(o.status.success());
        assert!(!out.join("eigenfunctions").exists());
        files.push(std::fs::read(out.join("spectrum.json")).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let json = spectrum(&dir.path().join("a"));
    assert_eq!(json["alpha"].as_f64(), Some(0.75));
    assert_eq!(
        json["traces"]["1"].as_array().unwrap().len(),
        json["m_values"].as_array().unwrap().len()
    );
}

#[test]
fn inadmissible_order_exits_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 0.4);
    let out = dir.path().join("out");
    let o = fracsl(&[
        "solve",
        "--spec",
        &spec,
        "--grid-n",
        "256",
        "--m-max",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("diagnostic:"));
    assert!(!out.exists());
}

#[test]
fn malformed_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "interval.a = 0\nalpha = nope\n").unwrap();
    let o = fracsl(&[
        "solve",
        "--spec",
        path.to_str().unwrap(),
        "--grid-n",
        "256",
        "--m-max",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn oscillator_suite_rows_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fracsl(&[
        "oscillator-suite",
        "--orders",
        "0.75",
        "--jmax",
        "2",
        "--grid-n",
        "512",
        "--m-max",
        "12",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("bounds.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha1,alpha2,j,K,lhs,rhs,margin,pass"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("bounds.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
}

#[test]
fn validate_ops_reports_every_identity() {
    let o = fracsl(&["validate-ops", "--grid-n", "256"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 11);
}

#[test]
fn rayleigh_check_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 0.8);
    let out = dir.path().join("out");
    let o = fracsl(&[
        "rayleigh-check",
        "--spec",
        &spec,
        "--grid-n",
        "256",
        "--m-max",
        "12",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("smallest quotient at n = 1"));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("rayleigh.json")).unwrap()).unwrap();
    assert_eq!(json["argmin"].as_u64(), Some(1));
    assert!(json["min_perturbation_gain"].as_f64().unwrap() > -1e-8);
}
