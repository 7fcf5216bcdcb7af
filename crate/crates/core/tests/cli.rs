use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaugefock::config::RunConfig;
use gaugefock::group::file::to_toml;
use gaugefock::group::parse_group_ref;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaugefock"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn group_info_tables_and_errors() {
    let out = bin(&["group-info", "D3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("classes    3"), "{text}");
    assert!(text.contains("sum dim^2  6 == |G| = 6"));

    let out = bin(&["group-info", "Z_N:N=4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("classes    4") && text.contains("irreps     4"), "{text}");

    assert_eq!(bin(&["group-info", "Q8"]).status.code(), Some(2));
}

#[test]
fn malformed_group_file_names_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let good = to_toml(&parse_group_ref("D3").unwrap()).unwrap();
    let path = write(dir.path(), "d3.toml", &good);
    assert_eq!(bin(&["group-info", "--file", &path]).status.code(), Some(0));

    // flip the sign of one entry of one irrep matrix
    let broken = good.replacen("[-1.0, 0.0]", "[1.0, 0.0]", 1);
    assert_ne!(broken, good);
    let path = write(dir.path(), "bad.toml", &broken);
    let out = bin(&["group-info", "--file", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("group fails validation") && err.contains("residual"), "{err}");

    let path = write(dir.path(), "garbage.toml", "name = \"X\"\norder = [\n");
    assert_eq!(bin(&["group-info", "--file", &path]).status.code(), Some(2));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["verify"]).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    assert_eq!(bin(&["verify", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = write(dir.path(), "bad.toml", "seed = 1\n[group]\nbuiltin = \"D3\"\n");
    assert_eq!(bin(&["spectrum", "--config", &bad]).status.code(), Some(2));
    let cfg = configs().join("z2_torus.toml");
    // vortex masses need an open single plaquette
    assert_eq!(bin(&["vortex-masses", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_flags_an_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(configs().join("su2_chain.toml")).unwrap();
    let good = write(dir.path(), "good.toml", &base);
    assert_eq!(bin(&["verify", "--config", &good]).status.code(), Some(0));

    let faulty = base.replace("coupling = 1.0", "coupling = 1.0\ndrop_hermitian_conjugate = true");
    let faulty = write(dir.path(), "faulty.toml", &faulty);
    let out_path = dir.path().join("faulty.json");
    let out = bin(&["verify", "--config", &faulty, "--output", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let result: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let checks = result["tasks"][0]["checks"].as_array().unwrap();
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.iter().any(|n| n.contains("hermitian")), "{failed:?}");
    assert!(checks.iter().all(|c| c["residual"].is_number() && c["tolerance"].is_number()));
}

#[test]
fn result_file_reruns_to_the_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let cfg = configs().join("d3_plaquette.toml");
    let out = bin(&["run", "--config", cfg.to_str().unwrap(), "--seed", "9", "--output", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let echo = RunConfig::load(&first).unwrap();
    assert_eq!(echo.seed, 9);
    let out = bin(&["run", "--config", first.to_str().unwrap(), "--output", second.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(first).unwrap(), std::fs::read(second).unwrap());
}

#[test]
fn basis_flag_and_stdout_json() {
    let cfg = configs().join("z2_torus.toml");
    let out = bin(&["spectrum", "--config", cfg.to_str().unwrap(), "--basis", "group"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["model"]["basis"], "group");
    assert_eq!(v["tasks"][0]["sector"]["levels"][0]["multiplicity"], 4);
    assert!(v.get("timings").is_none());
}
