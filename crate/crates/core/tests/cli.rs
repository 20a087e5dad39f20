use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quasiblade"));
    c.env("BLADE_LOG", "quiet");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn run(c: &mut Command) -> Output {
    c.output().expect("run quasiblade")
}

fn write_csv(dir: &Path, name: &str, pts: &[(f64, f64)], v: Option<&[f64]>) -> PathBuf {
    let mut s = String::from(if v.is_some() {
        "index,x,y,v\n"
    } else {
        "index,x,y\n"
    });
    for (i, (x, y)) in pts.iter().enumerate() {
        match v {
            Some(v) => s.push_str(&format!("{i},{x},{y},{}\n", v[i])),
            None => s.push_str(&format!("{i},{x},{y}\n")),
        }
    }
    let p = dir.join(name);
    std::fs::write(&p, s).unwrap();
    p
}

#[test]
fn solve_writes_artifacts_and_exits_zero() {
    let out = tempfile::tempdir().unwrap();
    let o = run(bin()
        .args(["solve", "--config"])
        .arg(data("linear.json"))
        .arg("--out")
        .arg(out.path()));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().last().unwrap().contains("overall: PASS"));
    for f in [
        "report.json",
        "cylinder_lower.csv",
        "airfoil_upper.csv",
        "airfoil_shift.json",
        "cylinder.svg",
    ] {
        assert!(out.path().join(f).exists(), "{f}");
    }
    let report = std::fs::read_to_string(out.path().join("report.json")).unwrap();
    assert!(!report.contains("elapsed"));
}

#[test]
fn verify_reports_failures_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = std::fs::read_to_string(data("chain.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&cfg).unwrap();
    // the first section's upper blade no longer matches a nonzero w2
    v["sections"][0]["w2"] = serde_json::json!(0.02);
    for s in v["sections"].as_array_mut().unwrap() {
        for key in ["lower", "upper"] {
            if let Some(p) = s.get(key).and_then(|p| p.as_str()) {
                s[key] = serde_json::json!(data(p).to_str().unwrap());
            }
        }
    }
    let path = dir.path().join("chain.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(bin().args(["verify", "--config"]).arg(&path));
    assert_eq!(o.status.code(), Some(1));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("root: FAIL error"), "{stdout}");
    assert!(stdout.contains("tip: FAIL error"), "{stdout}");
    assert!(stdout.lines().last().unwrap().contains("overall: FAIL"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"sections": [], "discretization": {"n_boundary": 256}}"#,
    )
    .unwrap();
    let o = run(bin().args(["verify", "--config"]).arg(&path));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("/sections"));
}

#[test]
fn position_lsq_prints_shift() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_csv(
        dir.path(),
        "a.csv",
        &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
        None,
    );
    let b = write_csv(
        dir.path(),
        "b.csv",
        &[(0.1, 0.0), (1.1, 0.0), (0.1, 1.0)],
        None,
    );
    let o = run(bin()
        .args(["position", "--method", "lsq", "--contours"])
        .arg(&a)
        .arg(&b));
    assert_eq!(o.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((s["dx"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert!(s["dy"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(s["method"], "lsq");
}

#[test]
fn position_lift_needs_speeds_and_box() {
    let dir = tempfile::tempdir().unwrap();
    let pts = [(1.0, 0.0), (0.0, -0.2), (-1.0, 0.0), (0.0, 0.2)];
    let a = write_csv(dir.path(), "a.csv", &pts, Some(&[1.0, 1.0, 1.5, 1.5]));
    let b = write_csv(dir.path(), "b.csv", &pts, Some(&[1.0, 1.0, 1.5, 1.5]));
    let o = run(bin()
        .args([
            "position",
            "--method",
            "lift",
            "--partition",
            "2",
            "--box",
            "-0.5",
            "-0.5",
            "0.5",
            "0.5",
            "--contours",
        ])
        .arg(&a)
        .arg(&b));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["method"], "lift");

    let plain = write_csv(dir.path(), "p.csv", &pts, None);
    let o = run(bin()
        .args([
            "position",
            "--method",
            "lift",
            "--box",
            "-0.5",
            "-0.5",
            "0.5",
            "0.5",
            "--contours",
        ])
        .arg(&plain)
        .arg(&plain));
    assert_eq!(o.status.code(), Some(2));
}
