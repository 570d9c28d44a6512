use std::fs;
use std::path::Path;
use std::process::Command as Process;

use clap::Parser;
use prodlab::mcengine::Kind;
use prodlab_cli::{parse_config, run_with, Cli, EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(
        std::iter::once("prodlab").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn check_subcommand_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("check");
    let (code, stdout, _) = run(&["check", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{stdout}");
    assert_eq!(stdout.matches("[PASS]").count(), 3);
    let csv = fs::read_to_string(out.join("check.csv")).unwrap();
    assert!(csv.starts_with("check,value,target,tolerance,passed\n"));
    assert!(out.join("metadata.json").exists());
}

#[test]
fn same_config_twice_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "fclt.json",
        r#"{"kind": "fclt", "family": "Uniform", "params": [0, 1], "n": 200, "R": 300, "seed": 9}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).0, EXIT_OK);
    assert_eq!(
        run(&["fclt", "--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "3"]).0,
        EXIT_OK
    );
    for f in ["fclt.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unwritable_output_exits_with_runtime_code() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let target = blocker.join("nested");
    let (code, _, stderr) = run(&["extremal", "--seed", "1", "--out", target.to_str().unwrap()]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(stderr.contains("cannot write results"), "{stderr}");
}

#[test]
fn config_errors_exit_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"kind": "cltx"}"#, "clt, fclt, lil, extremal, check"),
        (r#"{"kind": "clt", "n": 0}"#, "n ≥ 1"),
        (r#"{"kind": "clt", "bogus": 1}"#, "bogus"),
        (
            r#"{"kind": "clt", "family": "Uniform", "params": [2, 1]}"#,
            "0 <= a < b",
        ),
    ];
    for (i, (body, needle)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("c{i}.json"), body);
        let (code, _, stderr) = run(&["run", "--config", &cfg]);
        assert_eq!(code, EXIT_CONFIG, "{body}");
        assert!(stderr.contains(needle), "{body}: {stderr}");
    }
    let (code, _, _) = run(&["run", "--config", "/nonexistent/config.json"]);
    assert_eq!(code, EXIT_CONFIG);
    let (code, _, _) = run(&["clt", "--workers", "many"]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn subcommand_and_config_kind_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "lil.json", r#"{"kind": "lil", "n": 100}"#);
    let (code, _, stderr) = run(&["clt", "--config", &cfg]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(stderr.contains("subcommand"), "{stderr}");
    let (code, _, _) = run(&["run"]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn flags_override_config_and_missing_seed_is_generated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "clt.json", r#"{"kind": "clt", "seed": 5, "workers": 2}"#);
    let cli = Cli::parse_from([
        "prodlab",
        "clt",
        "--config",
        &cfg,
        "--seed",
        "77",
        "--retain-samples",
        "false",
    ]);
    let parsed = parse_config(&cli.command).unwrap();
    assert_eq!(parsed.config.kind, Kind::Clt);
    assert_eq!(parsed.config.master_seed, 77);
    assert_eq!(parsed.config.workers_hint, 2);
    assert!(!parsed.config.retain_samples);
    assert!(!parsed.generated_seed);
    assert_eq!(parsed.out_dir, Path::new("results").join("clt"));

    let cli = Cli::parse_from(["prodlab", "lil"]);
    let parsed = parse_config(&cli.command).unwrap();
    assert!(parsed.generated_seed);
    assert_eq!(parsed.config.kind, Kind::Lil);
}

#[test]
fn generated_seed_is_echoed_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let (code, _, stderr) = run(&["extremal", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let seed: u64 = stderr
        .trim()
        .strip_prefix("seed: ")
        .and_then(|s| s.strip_suffix(" (generated)"))
        .unwrap()
        .parse()
        .unwrap();
    let meta = fs::read_to_string(out.join("metadata.json")).unwrap();
    assert!(meta.contains(&format!("\"seed\": {seed}")), "{meta}");
}

#[test]
fn metadata_config_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let (code, _, _) = run(&["lil", "--seed", "4", "--out", a.to_str().unwrap(), "--workers", "1"]);
    assert_eq!(code, EXIT_OK);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("metadata.json")).unwrap()).unwrap();
    let mut config = meta["config"].clone();
    config.as_object_mut().unwrap().remove("output");
    let cfg = write_config(dir.path(), "rerun.json", &config.to_string());
    let b = dir.path().join("b");
    assert_eq!(run(&["run", "--config", &cfg, "--out", b.to_str().unwrap()]).0, EXIT_OK);
    for f in ["lil.csv", "scaled_path.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_prodlab");
    let status = Process::new(bin).args(["run"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_CONFIG));
    let status = Process::new(bin).arg("--help").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&status.stdout).contains("extremal"));
}
