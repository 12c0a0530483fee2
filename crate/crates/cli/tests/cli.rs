use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn laddertangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laddertangle"))
        .args(args)
        .env_remove("LADDERTANGLE_JOBS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

/// Baseline document with one field replaced.
fn write_config(dir: &Path, name: &str, edit: impl FnOnce(&mut Value)) -> String {
    let out = laddertangle(&[
        "run",
        "--scenario",
        "fig2-a",
        "--out",
        dir.to_str().unwrap(),
        "--delta1-points",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("fig2-a.manifest.json")).unwrap()).unwrap();
    let mut doc = manifest["config"].clone();
    doc["name"] = Value::from(name);
    edit(&mut doc);
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_csv_and_matching_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = laddertangle(&[
        "run",
        "--scenario",
        "fig2-a",
        "--out",
        out_dir,
        "--delta1-min",
        "-40",
        "--delta1-max",
        "40",
        "--delta1-points",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let bytes = std::fs::read(dir.path().join("fig2-a.csv")).unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "delta1_mhz,v12,du2,dv2,absorption");
    assert_eq!(lines.count(), 5);
    assert_eq!(column(&text, "delta1_mhz"), [-40.0, -20.0, 0.0, 20.0, 40.0]);
    assert!(text.contains("-4.0000000000000000e1,"));

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig2-a.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["scenario"], "fig2-a");
    assert_eq!(manifest["sweep"]["grid"]["points"], 5);
    let entry = &manifest["outputs"][0];
    assert_eq!(entry["file"], "fig2-a.csv");
    assert_eq!(entry["rows"], 5);
    assert_eq!(entry["sha256"], hex::encode(Sha256::digest(&bytes)));
}

#[test]
fn eit_dip_in_baseline_absorption() {
    let dir = tempfile::tempdir().unwrap();
    let out = laddertangle(&[
        "run",
        "--scenario",
        "fig2-e",
        "--out",
        dir.path().to_str().unwrap(),
        "--delta1-min",
        "-6",
        "--delta1-max",
        "6",
        "--delta1-points",
        "7",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("fig2-e.csv")).unwrap();
    let a = column(&text, "absorption");
    assert!(a[3] < a[2] && a[3] < a[4], "{a:?}");
}

#[test]
fn negative_decay_rate_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "neg", |d| d["decay"]["gamma1"] = Value::from(-1.0));
    let out = laddertangle(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("decay.gamma1"), "{}", stderr(&out));
}

#[test]
fn unknown_field_reports_path_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "typo", |d| d["doppler"]["nodez"] = Value::from(3));
    let out = laddertangle(&["run", "--config", &cfg]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(
        err.contains("doppler") && err.contains("nodez") && err.contains("line "),
        "{err}"
    );
}

#[test]
fn bad_invocations_exit_two() {
    for args in [
        vec!["run", "--scenario", "fig9-z"],
        vec!["run"],
        vec!["run", "--scenario", "fig3", "--delta1-points", "3"],
        vec!["run", "--scenario", "fig2-a", "--delta1-min", "5", "--delta1-max", "1"],
        vec!["feature-report", "/nonexistent/file.csv"],
    ] {
        let out = laddertangle(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn undamped_probe_transition_is_a_physics_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "undamped", |d| {
        d["decay"] = serde_json::json!({"gamma1": 0.0, "gamma2": 0.5, "p": 0.0});
    });
    let out = laddertangle(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
        "--delta1-points",
        "3",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("at delta1 = -800"), "{}", stderr(&out));
}

#[test]
fn validate_passes_and_reports_json() {
    let out = laddertangle(&["validate", "--points", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in [
        "decoupled-density",
        "steady-state-trace",
        "quadrature-convergence",
        "perturbative-oracle",
        "covariance-conjugation",
        "term-sign-interference",
    ] {
        assert!(names.contains(&expected), "{names:?}");
    }
}

#[test]
fn validate_catches_flipped_interference_sign() {
    let out = laddertangle(&["validate", "--points", "3", "--inject-fault", "interference-sign"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("term-sign-interference"), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn validate_with_empty_medium_keeps_vacuum_noise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty", |d| d["geometry"]["density"] = Value::from(0.0));
    let report = dir.path().join("report.json");
    let out = laddertangle(&[
        "validate",
        "--config",
        &cfg,
        "--points",
        "3",
        "--out",
        report.to_str().unwrap(),
    ]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let decoupled = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "decoupled-density")
        .unwrap();
    assert_eq!(decoupled["passed"], true);
    assert!(code(&out) == 0 || code(&out) == 1);
}

#[test]
fn feature_report_on_synthetic_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut flat = String::from("delta1_mhz,v12,du2,dv2,absorption\n");
    let mut dip = flat.clone();
    for k in -100..=100 {
        let x = k as f64 * 2.0;
        flat.push_str(&format!("{x},4,2,2,0.5\n"));
        let a = 0.5 - 0.2 * (-(x / 4.0).powi(2)).exp();
        dip.push_str(&format!("{x},4,2,2,{a}\n"));
    }
    let (flat_path, dip_path) = (dir.path().join("flat.csv"), dir.path().join("dip.csv"));
    std::fs::write(&flat_path, flat).unwrap();
    std::fs::write(&dip_path, dip).unwrap();

    let out = laddertangle(&["feature-report", flat_path.to_str().unwrap(), "--location", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["kind"], "none");

    let out = laddertangle(&["feature-report", dip_path.to_str().unwrap(), "--half-width", "20"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["kind"], "dip");
    assert_eq!(r["location"], 0.0);
    assert_eq!(r["column"], "absorption");

    let out = laddertangle(&["feature-report", dip_path.to_str().unwrap(), "--column", "nope"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn list_scenarios_names_all_thirteen() {
    let out = laddertangle(&["list-scenarios"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    let mut expected: Vec<String> = ('a'..='h').map(|c| format!("fig2-{c}")).collect();
    expected.push("fig3".into());
    expected.extend(('a'..='d').map(|c| format!("fig4-{c}")));
    assert_eq!(names, expected);
}

#[test]
fn jobs_flag_and_env_agree() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs_flag: Option<&str>, env: Option<&str>, sub: &str| {
        let out_dir = dir.path().join(sub);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_laddertangle"));
        cmd.env_remove("LADDERTANGLE_JOBS");
        if let Some(j) = jobs_flag {
            cmd.args(["--jobs", j]);
        }
        if let Some(j) = env {
            cmd.env("LADDERTANGLE_JOBS", j);
        }
        let out = cmd
            .args([
                "run",
                "--scenario",
                "fig4-c",
                "--delta1-points",
                "9",
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("fig4-c.manifest.json")).unwrap()).unwrap();
        (
            std::fs::read(out_dir.join("fig4-c.csv")).unwrap(),
            manifest["jobs"].as_u64().unwrap(),
        )
    };
    let (a, ja) = run(Some("1"), None, "flag");
    let (b, jb) = run(None, Some("3"), "env");
    assert_eq!((ja, jb), (1, 3));
    assert_eq!(a, b);
}
