//! Exit codes and output files of the built binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planar-dirac")).args(args).output().unwrap()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).to_str().unwrap().to_owned()
}

#[test]
fn missing_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = run(&["spectrum", "--config", "does/not/exist.toml", "--out", out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("exist.toml"));
    assert_eq!(run(&["spectrum", "--out", out]).status.code(), Some(2));
    assert_eq!(run(&["degeneracy", "--mode", "sideways"]).status.code(), Some(2));
}

#[test]
fn injected_wrong_claim_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["verify-algebra", "--config", &config("wrong_claim.toml"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stdout).contains("FAIL injected.wrong_sign"));
    assert!(dir.path().join("algebra.json").exists());
}

#[test]
fn pseudospin_caveat_is_logged() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["degeneracy", "--mode", "pseudospin", "--config", &config("pseudospin_coulomb.toml"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("negative energy"));
}

#[test]
fn free_particle_oracle_agrees_on_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["oracle-compare", "--config", &config("free.toml"), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("oracle.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["tool"], "planar-dirac");
    assert!(json["result"]["rows"].as_array().unwrap().is_empty());
}
