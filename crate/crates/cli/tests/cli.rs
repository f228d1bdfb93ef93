use std::fs;
use std::path::Path;
use std::process::Command as Proc;

use ilw_cli::{execute, parse_config_str, Command, RunManifest, EXIT_ERROR, EXIT_OK, EXIT_VERDICT};

const SMALL: &str = r#"
[converge]
horizon = 0.1
delta_grid = [0.0]
[converge.settings]
modes = 128
box_length = 62.83185307179586
dt = 0.01
record_every = 5

[evolve]
kind = "low-frequency"
delta = 0.5
horizon = 0.1
[evolve.settings]
modes = 128
box_length = 62.83185307179586
dt = 0.01
record_every = 2
"#;

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_ilw"))
}

fn digests(dir: &Path) -> Vec<(String, String)> {
    RunManifest::read(dir)
        .unwrap()
        .outputs
        .into_iter()
        .map(|o| (o.path, o.sha256))
        .collect()
}

#[test]
fn selftest_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["selftest", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let m = RunManifest::read(dir.path()).unwrap();
    assert_eq!(m.command, "selftest");
    assert!(m.outputs.iter().any(|o| o.path == "selftest.json"));
}

#[test]
fn manifest_digests_match_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config_str(SMALL).unwrap();
    let out = execute(Command::Converge, &cfg, dir.path(), Some(1), None).unwrap();
    assert_eq!(out.exit_code(), EXIT_OK);
    for o in &out.manifest.outputs {
        let (n, h) = ilw_cli::manifest::sha256_file(&dir.path().join(&o.path)).unwrap();
        assert_eq!((n, h.as_str()), (o.bytes, o.sha256.as_str()));
    }
    // every default is echoed
    assert_eq!(out.manifest.config["instability"]["theta"], 0.1);
}

#[test]
fn kdv_only_convergence_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config_str(SMALL).unwrap();
    let out = execute(Command::Converge, &cfg, dir.path(), None, None).unwrap();
    assert_eq!(out.report.column("sup_error"), Some(vec![0.0]));
    assert_eq!(out.exit_code(), EXIT_OK);
}

#[test]
fn instability_reports_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = execute(Command::Instability, &Default::default(), dir.path(), None, None).unwrap();
    let fit = out.report.fit("band_norm_vs_n").expect("slope field present");
    assert!((fit.slope - 0.45).abs() < 0.05);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("instability.json")).unwrap()).unwrap();
    assert!(json["fits"][0]["fit"]["slope"].is_f64());
    assert!(dir.path().join("instability_band_norm.csv").exists());
}

#[test]
fn reruns_are_bitwise_identical_across_thread_counts() {
    let cfg = parse_config_str(SMALL).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in [Command::Instability, Command::Evolve] {
        execute(cmd, &cfg, a.path(), Some(1), None).unwrap();
        execute(cmd, &cfg, b.path(), Some(4), None).unwrap();
        assert_eq!(digests(a.path()), digests(b.path()), "{}", cmd.name());
    }
}

#[test]
fn evolve_exports_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config_str(SMALL).unwrap();
    let out = execute(Command::Evolve, &cfg, dir.path(), None, None).unwrap();
    assert_eq!(out.exit_code(), EXIT_OK);
    let rec = ilw_core::dynamics::read_trajectory(&dir.path().join("trajectory")).unwrap();
    assert_eq!(rec.times.len(), 6);
    assert_eq!(rec.kind, ilw_core::EquationKind::LowFrequency);
}

#[test]
fn failed_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("c.toml");
    fs::write(&cfg_path, "[instability]\nslope_tolerance = 1e-9\n").unwrap();
    let status = bin()
        .args(["instability", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("o"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_VERDICT));
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("c.toml");
    fs::write(&cfg_path, "[evolve]\ndelta = -1.0\n").unwrap();
    let out = bin()
        .args(["evolve", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delta ≥ 0"));
}

#[test]
fn seed_and_thread_env_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .env("ILW_THREADS", "2")
        .args(["selftest", "--seed", "99", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let m = RunManifest::read(dir.path()).unwrap();
    assert_eq!((m.seed, m.threads), (99, 2));
    assert_eq!(m.config["seed"], 99);
}

#[test]
fn csv_numbers_keep_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    execute(Command::Instability, &Default::default(), dir.path(), None, None).unwrap();
    let text = fs::read_to_string(dir.path().join("instability.csv")).unwrap();
    for field in text.lines().skip(1).flat_map(|l| l.split(',')) {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert!(mantissa.chars().filter(|c| c.is_ascii_digit()).count() >= 15, "{field}");
    }
}
