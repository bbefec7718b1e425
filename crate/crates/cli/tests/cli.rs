use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fracvar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracvar"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verify_with_defaults_passes() {
    let tmp = TempDir::new().unwrap();
    let out = fracvar(tmp.path(), &["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lines = fs::read_to_string(tmp.path().join("checks.jsonl")).unwrap();
    assert!(lines.lines().count() >= 8);
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true, "{line}");
    }
}

#[test]
fn relax_energies_are_monotone() {
    let tmp = TempDir::new().unwrap();
    let out = fracvar(tmp.path(), &["relax"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("energy_vs_k.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for w in rows.windows(2) {
        assert!(w[1][1] <= w[0][1]);
        assert!(w[1][1] >= w[1][2]);
    }
}

#[test]
fn missing_alpha_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[grid]\ndim = 1\nkind = \"truncated-box\"\nhalf_extent = 2.0\npoints = 256\n[params]\np = 2.0\n")
        .unwrap();
    let out = fracvar(tmp.path(), &["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));
}

#[test]
fn presets_lists_integrands() {
    let tmp = TempDir::new().unwrap();
    let out = fracvar(tmp.path(), &["presets"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["quadratic", "pinched-nonconvex-1d", "double-well-unpinched"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn unknown_integrand_names_the_options() {
    let tmp = TempDir::new().unwrap();
    let out = fracvar(tmp.path(), &["envelope", "--override", "integrand=\"nope\""]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("nope") && err.contains("quadratic") && err.contains("pinched-nonconvex-1d"), "{err}");
}

#[test]
fn envelope_sweep_finds_no_false_witness() {
    let tmp = TempDir::new().unwrap();
    let out = fracvar(tmp.path(), &["envelope", "--override", "envelope.sweep_samples=9", "--override", "envelope.samples=2001"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["results"]["sweep"]["mismatches"].as_array().unwrap().len(), 0);
    assert!(tmp.path().join("envelope.csv").exists());
}

#[test]
fn same_seed_gives_identical_output() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let out = fracvar(dir.path(), &["verify", "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["summary.json", "checks.jsonl"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}
