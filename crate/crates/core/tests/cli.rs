use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kirchhoff_heat::runner::output::{read_trajectory_csv, TRAJECTORY_HEADER};
use kirchhoff_heat::runner::ScenarioConfig;
use tempfile::TempDir;

fn kheat(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kheat"))
        .args(args)
        .env("KHEAT_OUTPUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, cfg: &ScenarioConfig) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, cfg.to_json_pretty()).unwrap();
    p
}

fn short_config() -> ScenarioConfig {
    let mut c = ScenarioConfig::default_scenario();
    c.t_end = 1.0;
    c.record_every = 7;
    c
}

#[test]
fn simulate_writes_expected_rows_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "short.json", &short_config());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = kheat(&["simulate", cfg.to_str().unwrap()], dir);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let csv_a = fs::read(a.join("trajectory.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("trajectory.csv")).unwrap());
    assert_eq!(
        fs::read(a.join("diagnostics.json")).unwrap(),
        fs::read(b.join("diagnostics.json")).unwrap()
    );

    let text = String::from_utf8(csv_a).unwrap();
    assert_eq!(text.lines().next(), Some(TRAJECTORY_HEADER));
    // 1000 steps: records at multiples of 7 plus the final step.
    let records = read_trajectory_csv(text.as_bytes()).unwrap();
    assert_eq!(records.len(), 1 + 1000 / 7 + 1);
    assert_eq!(records.last().unwrap().t, 1.0);

    let diag: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["energy_monotone"], true);
    assert_eq!(diag["steps"], 1000);
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let mut bad = short_config();
    bad.params =
        serde_json::from_str(r#"{"m0": 1.0, "m1": 0.5, "alpha": 1.0, "beta": 1.0}"#).unwrap();
    let mut text = bad.to_json_pretty();
    text = text.replace("\"alpha\": 1.0", "\"alpha\": -1.0");
    let p = tmp.path().join("opposite.json");
    fs::write(&p, &text).unwrap();
    let out = kheat(&["simulate", p.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("same sign"));

    let unknown = tmp.path().join("unknown.json");
    fs::write(
        &unknown,
        short_config()
            .to_json_pretty()
            .replacen('{', "{\"bogus\": 1,", 1),
    )
    .unwrap();
    assert_eq!(
        kheat(&["simulate", unknown.to_str().unwrap()], tmp.path())
            .status
            .code(),
        Some(2)
    );

    let missing = tmp.path().join("missing.json");
    assert_eq!(
        kheat(&["verify", missing.to_str().unwrap()], tmp.path())
            .status
            .code(),
        Some(2)
    );

    let cfg = write_config(tmp.path(), "ok.json", &short_config());
    let out = kheat(
        &["converge", cfg.to_str().unwrap(), "--modes", "16,8"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_divergence_exits_with_three() {
    let tmp = TempDir::new().unwrap();
    let text = r#"{
        "spec_version": 1,
        "n_modes": 4,
        "params": {"m0": 1.0, "m1": 1.0, "alpha": 1.0, "beta": 1.0},
        "initial": {"displacement": {"kind": "coefficients", "values": [1000.0]}},
        "stepper": {"method": "implicit_midpoint", "dt": 0.5, "newton_max_iter": 5},
        "t_end": 5.0
    }"#;
    let p = tmp.path().join("stiff.json");
    fs::write(&p, text).unwrap();
    let out = kheat(&["simulate", p.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}

#[test]
fn study_subcommands_write_their_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "short.json", &short_config());
    let cfg = cfg.to_str().unwrap();
    let out_dir = tmp.path().join("out");

    let out = kheat(&["converge", cfg, "--modes", "4,8"], &out_dir);
    assert_eq!(out.status.code(), Some(0));
    let table = fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    assert_eq!(table.lines().count(), 2);

    let out = kheat(&["probe-uniqueness", cfg, "--eps", "0,1e-5"], &out_dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("bit-identical true"));

    let grid = tmp.path().join("grid.json");
    fs::write(&grid, r#"{"m1": [0.0, 0.5], "sigma": [1.0, 0.5]}"#).unwrap();
    let out = kheat(&["sweep", cfg, grid.to_str().unwrap()], &out_dir);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read_to_string(out_dir.join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        3
    );
    assert_eq!(
        fs::read_to_string(out_dir.join("sweep_sigma.csv"))
            .unwrap()
            .lines()
            .count(),
        3
    );
}

#[test]
fn verify_passes_on_bundled_scenario() {
    let tmp = TempDir::new().unwrap();
    let bundled = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/default.json");
    let out = kheat(&["verify", bundled], tmp.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
    assert_eq!(
        ScenarioConfig::from_path(bundled).unwrap(),
        ScenarioConfig::default_scenario()
    );
}
