//! End-to-end checks of the `guf` binary: flag handling, file outputs and
//! exit-code policy.

use std::path::{Path, PathBuf};
use std::process::Command;

fn guf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_guf"))
}

fn work_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("guf-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn quantile_prints_the_radius_table() {
    let output = guf()
        .args(["quantile", "--dim", "2", "--d", "0.3333,0.6667,1"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let radii: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((radii[0] - 2.1972).abs() < 5e-4, "{text}");
    assert!((radii[1] - 0.8109).abs() < 5e-4, "{text}");
    assert_eq!(radii[2], 0.0, "{text}");
}

#[test]
fn quantile_rejects_bad_levels() {
    let output = guf()
        .args(["quantile", "--dim", "2", "--d", "0"])
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn sample_reproduces_the_worked_example() {
    let dir = work_dir("sample");
    let belief = dir.join("belief.toml");
    write(
        &belief,
        "mean = [0.0, 0.0]\ncovariance = [[1.0, 0.0], [0.0, 1.0]]\n",
    );
    let csv_path = dir.join("set.csv");
    let output = guf()
        .arg("sample")
        .arg("--belief")
        .arg(&belief)
        .args(["--rule", "guf:n=3,mode=grid-closed,design=cum:2"])
        .arg("--out")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("stretch beta: 1.363"), "{stdout}");

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 24, "{csv}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sample_five_dim_cubature_weights() {
    let dir = work_dir("sample5");
    let belief = dir.join("belief.toml");
    let mut text = String::from("mean = [1.0, 2.0, 3.0, 4.0, 5.0]\ncovariance = [\n");
    for i in 0..5 {
        let row: Vec<String> = (0..5)
            .map(|j| {
                if i == j {
                    "2.0".into()
                } else {
                    "0.0".to_string()
                }
            })
            .collect();
        text.push_str(&format!("  [{}],\n", row.join(", ")));
    }
    text.push_str("]\n");
    write(&belief, &text);
    let output = guf()
        .arg("sample")
        .arg("--belief")
        .arg(&belief)
        .args(["--rule", "ckf3"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().filter(|l| l.starts_with("1,,,")).collect();
    assert_eq!(rows.len(), 10, "{stdout}");
    assert!(rows.iter().all(|r| r.starts_with("1,,,0.1,")), "{stdout}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn sample_zero_kappa_center_weight() {
    let dir = work_dir("samplek0");
    let belief = dir.join("belief.toml");
    write(
        &belief,
        "mean = [0.0, 0.0]\ncovariance = [[1.0, 0.0], [0.0, 1.0]]\n",
    );
    let output = guf()
        .arg("sample")
        .arg("--belief")
        .arg(&belief)
        .args(["--rule", "ukf:kappa=0"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let first_row = stdout
        .lines()
        .find(|l| l.starts_with("1,,,"))
        .expect("csv rows");
    assert!(first_row.starts_with("1,,,0,"), "{first_row}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn bench_quick_mode_truncates_series() {
    let dir = work_dir("bench");
    let output = guf()
        .args([
            "bench",
            "--scenario",
            "scenario1",
            "--rules",
            "gukf:kappa=1,ckf3,guf:n=2",
            "--runs",
            "1",
            "--steps",
            "5",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = std::fs::read_to_string(dir.join("rmse.csv")).unwrap();
    // Header plus 3 rules x 5 steps.
    assert_eq!(csv.lines().count(), 1 + 15, "{csv}");
    let summary = std::fs::read_to_string(dir.join("summary.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(json["seed"], 42);
    assert_eq!(json["config"]["steps"], 5);
    assert_eq!(json["common_random_numbers"], true);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn bench_scenario4_records_mixture() {
    let dir = work_dir("bench4");
    let output = guf()
        .args([
            "bench",
            "--scenario",
            "scenario4",
            "--rules",
            "ckf3,guf:n=5",
            "--runs",
            "2",
            "--steps",
            "10",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(output.status.success());
    let summary = std::fs::read_to_string(dir.join("summary.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&summary).unwrap();
    let mixture = &json["config"]["mixture"];
    assert_eq!(mixture["r1"][0][0], 1000.0);
    assert_eq!(mixture["r2"][1][1], 1e-3);
    assert_eq!(mixture["weight_first"], 0.5);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn compare_reports_identical_summaries() {
    let dir = work_dir("compare");
    for tag in ["a", "b"] {
        let status = guf()
            .args([
                "bench",
                "--scenario",
                "scenario1",
                "--rules",
                "ckf3",
                "--runs",
                "2",
                "--steps",
                "10",
            ])
            .arg("--out")
            .arg(dir.join(tag))
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let output = guf()
        .arg("compare")
        .arg(dir.join("a").join("summary.json"))
        .arg(dir.join("b").join("summary.json"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("+0.0000"), "zero delta expected: {text}");
    assert!(text.contains("ckf3"), "{text}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_scenario_fails_with_nonzero_exit() {
    let output = guf()
        .args(["bench", "--scenario", "scenario9"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("scenario9"), "{err}");
}

#[test]
fn malformed_belief_reports_parse_error() {
    let dir = work_dir("badbelief");
    let belief = dir.join("belief.toml");
    write(
        &belief,
        "mean = [0.0, 0.0]\ncovariance = [[1.0], [0.0, 1.0]]\n",
    );
    let output = guf()
        .arg("sample")
        .arg("--belief")
        .arg(&belief)
        .args(["--rule", "ckf3"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8(output.stderr).unwrap();
    assert!(err.contains("covariance"), "{err}");
    let _ = std::fs::remove_dir_all(&dir);
}
