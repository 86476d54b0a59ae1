// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn adnoise(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adnoise"))
        .args(args)
        .arg("--output")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = adnoise(&["validate"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(tmp.path().join("validate.csv")).unwrap();
    assert!(report.contains(",PASS"));
    assert!(!report.contains(",FAIL"));
}

#[test]
fn spectrum_writes_one_table_per_temperature() {
    let tmp = tempfile::tempdir().unwrap();
    let out = adnoise(&["spectrum", "--preset", "Ne-Au"], tmp.path());
    assert!(out.status.success());
    for k in 0..6 {
        let text = fs::read_to_string(tmp.path().join(format!("spectrum_{k:02}.csv"))).unwrap();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(header, "omega [Gamma0],omega [rad/s],S_mu [D^2/Hz]");
    }
    assert!(tmp.path().join("spectrum_summary.csv").exists());
}

#[test]
fn headers_record_version_seed_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "preset = \"Ne-Au\"\n[montecarlo]\nn_seeds = 20\n");
    let out = adnoise(&["mc-scaling", "--config", &cfg, "--seed", "77"], &tmp.path().join("o"));
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("o/mc_scaling.csv")).unwrap();
    assert!(text.starts_with(&format!("# adnoise {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(text.contains("# seed: 77\n"));
    assert!(text.contains("#   seed = 77\n"));
    assert!(text.contains("#   n_seeds = 20\n"));
    assert!(text.contains("#   U0 = "));
}

#[test]
fn temperature_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = adnoise(&["dipoles", "--temperature", "0.5hnu,40K"], tmp.path());
    assert!(out.status.success());
    let out = adnoise(&["rates", "--temperature", "0.5hnu,40K"], tmp.path());
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("rates.csv")).unwrap();
    let temps: std::collections::BTreeSet<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(temps.len(), 2);
    assert!(temps.contains("4.00000000e1"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "preset = \"Ne-Au\"\n[montecarlo]\nn_seeds = 200\n");
    let out = tmp.path().join("out");
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let _ = fs::remove_dir_all(&out);
        assert!(adnoise(&["spectrum", "--config", &cfg], &out).status.success());
        assert!(adnoise(&["mc-scaling", "--config", &cfg], &out).status.success());
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap())
            .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
            .collect();
        files.sort();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0].len(), 9);
    assert!(snapshots[0] == snapshots[1]);
}

#[test]
fn seed_changes_monte_carlo_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "preset = \"Ne-Au\"\n[montecarlo]\nn_seeds = 20\n");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(adnoise(&["mc-scaling", "--config", &cfg, "--seed", "1"], &a).status.success());
    assert!(adnoise(&["mc-scaling", "--config", &cfg, "--seed", "2"], &b).status.success());
    let data = |p: &Path| -> Vec<String> {
        fs::read_to_string(p.join("mc_scaling.csv"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(String::from)
            .collect()
    };
    assert_ne!(data(&a), data(&b));
}

#[test]
fn exit_codes_follow_error_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&str, i32); 5] = [
        ("preset = \"Ne-Au\"\n[potential]\nU0 = \"12 parsecs\"\n", 2),
        ("preset = \"K-surface\"\n", 2),
        ("preset = \"Ne-Au\"\nunknown_key = 3\n", 2),
        // 1 GHz Debye frequency masks every transition
        ("preset = \"Ne-Au\"\n[bulk]\ndebye_frequency = \"1 GHz\"\n", 3),
        // distances below 3 d0 resolve individual dipoles
        ("preset = \"Ne-Au\"\n[montecarlo]\nn_seeds = 5\ndistances = [1.0, 2.0]\n", 4),
    ];
    for (k, (doc, code)) in cases.iter().enumerate() {
        let dir = tmp.path().join(format!("c{k}"));
        fs::create_dir_all(&dir).unwrap();
        let cfg = write_config(&dir, doc);
        let sub = if *code == 4 { "mc-scaling" } else { "dipoles" };
        let out = adnoise(&[sub, "--config", &cfg], &dir.join("o"));
        assert_eq!(out.status.code(), Some(*code), "{doc}: {}", String::from_utf8_lossy(&out.stderr));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("adnoise: ["), "{err}");
    }
}

#[test]
fn missing_config_file_is_a_configuration_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = adnoise(&["states", "--config", "/nonexistent/run.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}
