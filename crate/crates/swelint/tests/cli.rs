//! Black-box tests of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn swelint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swelint"))
        .args(args)
        .output()
        .expect("failed to launch swelint")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

#[test]
fn registry_show_resolves_ids_names_and_aliases() {
    let out = swelint(&["registry", "show", "SWE-114"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Transaction Order Dependence"));

    let out = swelint(&["registry", "show", "time manipulation"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("id: SWE-116"));

    let out = swelint(&["registry", "show", "Transaction Order Dependence"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("id: SWE-114"));

    let out = swelint(&["registry", "show", "SWE-999"]);
    assert_eq!(code(&out), 2);

    // reserved codes have no entry to show
    let out = swelint(&["registry", "show", "SWE-105"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn registry_list_filters_by_status() {
    let eliminated = swelint(&["registry", "list", "--status", "eliminated"]);
    assert_eq!(code(&eliminated), 0);
    assert_eq!(stdout(&eliminated).lines().count(), 11);

    let reserved = swelint(&["registry", "list", "--status", "reserved"]);
    assert_eq!(stdout(&reserved).lines().count(), 5);

    let active = swelint(&["registry", "list", "--status", "active"]);
    assert_eq!(stdout(&active).lines().count(), 72);

    let all = swelint(&["registry", "list"]);
    assert_eq!(stdout(&all).lines().count(), 88);
}

#[test]
fn registry_export_round_trips_byte_identically() {
    let out = swelint(&["registry", "export"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), swelint::registry::BUNDLED_REGISTRY);
    swelint::registry::load_registry(&stdout(&out)).expect("exported registry must load");
}

#[test]
fn selector_prints_known_hash_and_rejects_garbage() {
    let out = swelint(&["selector", "transfer(address,uint256)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "a9059cbb\n");

    let out = swelint(&["selector", "createUser()"]);
    assert_eq!(stdout(&out), "25ad91ce\n");

    for bad in ["", "transfer", "transfer(address", "no spaces (uint)"] {
        let out = swelint(&["selector", bad]);
        assert_eq!(code(&out), 2, "signature {bad:?} should be rejected");
    }
}

#[test]
fn scan_corpus_reports_wide_rule_coverage() {
    let corpus = corpus();
    let advisories = corpus.join("advisories.toml");
    let out = swelint(&[
        "scan",
        corpus.to_str().unwrap(),
        "--advisories",
        advisories.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 1, "corpus contains high findings");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let stats = report["rule_stats"].as_object().unwrap();
    assert!(stats.len() >= 30, "rule_stats covers {} rules, want >= 30", stats.len());
    assert!(report["files_scanned"].as_u64().unwrap() >= 100);
}

#[test]
fn scan_exit_codes_follow_the_fail_on_threshold() {
    let fig12 = corpus().join("solidity/fig12.sol");
    let out = swelint(&["scan", fig12.to_str().unwrap(), "--fail-on", "high"]);
    assert_eq!(code(&out), 0);
    let out = swelint(&["scan", fig12.to_str().unwrap(), "--fail-on", "low"]);
    assert_eq!(code(&out), 1);

    let fig06 = corpus().join("solidity/fig06.sol");
    let out = swelint(&["scan", fig06.to_str().unwrap(), "--fail-on", "high"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn scan_usage_errors_exit_2() {
    let out = swelint(&["scan", "/nonexistent/path"]);
    assert_eq!(code(&out), 2);

    let empty = tempfile::tempdir().unwrap();
    let out = swelint(&["scan", empty.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // a .go-only tree filtered down to Solidity leaves nothing to scan
    let go_only = corpus().join("chaincode");
    let out = swelint(&["scan", go_only.to_str().unwrap(), "--lang", "sol"]);
    assert_eq!(code(&out), 2);

    let fig12 = corpus().join("solidity/fig12.sol");
    let out = swelint(&["scan", fig12.to_str().unwrap(), "--fail-on", "urgent"]);
    assert_eq!(code(&out), 2);
    let out = swelint(&[
        "scan",
        fig12.to_str().unwrap(),
        "--enable",
        "SWE-116",
        "--disable",
        "SWE-116",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_path_warns_but_does_not_abort_the_scan() {
    let fig12 = corpus().join("solidity/fig12.sol");
    let out = swelint(&[
        "scan",
        fig12.to_str().unwrap(),
        "/nonexistent/extra.sol",
        "--fail-on",
        "low",
    ]);
    assert_eq!(code(&out), 1, "findings from the readable file still count");
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra.sol"));
}

#[test]
fn enable_and_disable_narrow_the_rule_set() {
    let fig06 = corpus().join("solidity/fig06.sol");
    let out = swelint(&["scan", fig06.to_str().unwrap(), "--enable", "SWE-107"]);
    let text = stdout(&out);
    assert!(text.contains("SWE-107"));
    assert!(!text.contains("SWE-101"));

    let out = swelint(&["scan", fig06.to_str().unwrap(), "--disable", "SWE-107,SWE-101"]);
    let text = stdout(&out);
    assert!(!text.contains("SWE-107"));
    assert!(!text.contains("SWE-101"));
}

#[test]
fn config_file_mirrors_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("swelint.toml");
    std::fs::write(&config_path, "format = \"json\"\nfail_on = \"low\"\n").unwrap();
    let fig12 = corpus().join("solidity/fig12.sol");

    let out = swelint(&[
        "scan",
        fig12.to_str().unwrap(),
        "--config",
        config_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "config file fail_on=low applies");
    serde_json::from_str::<serde_json::Value>(&stdout(&out)).expect("config file format=json applies");

    let out = swelint(&[
        "scan",
        fig12.to_str().unwrap(),
        "--config",
        config_path.to_str().unwrap(),
        "--format",
        "text",
        "--fail-on",
        "high",
    ]);
    assert_eq!(code(&out), 0, "--fail-on beats the config file");
    assert!(stdout(&out).starts_with(fig12.to_str().unwrap()), "--format beats the config file");

    std::fs::write(&config_path, "surprise = true\n").unwrap();
    let out = swelint(&[
        "scan",
        fig12.to_str().unwrap(),
        "--config",
        config_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "unknown config keys are usage errors");
}

#[test]
fn suppressions_honored_unless_disabled() {
    let suppressed = corpus().join("suppression/fig12.sol");
    let out = swelint(&["scan", suppressed.to_str().unwrap(), "--fail-on", "low"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());

    let out = swelint(&[
        "scan",
        suppressed.to_str().unwrap(),
        "--fail-on",
        "low",
        "--no-suppressions",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("SWE-116"));
}

#[test]
fn custom_registry_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("registry.toml");
    std::fs::write(&copy, swelint::registry::BUNDLED_REGISTRY).unwrap();
    let out = swelint(&["registry", "--registry", copy.to_str().unwrap(), "show", "SWE-114"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Transaction Order Dependence"));

    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "[[entry]]\nid = 1\n").unwrap();
    let out = swelint(&["registry", "--registry", broken.to_str().unwrap(), "show", "SWE-114"]);
    assert_eq!(code(&out), 2);
    let fig12 = corpus().join("solidity/fig12.sol");
    let out = swelint(&[
        "scan",
        fig12.to_str().unwrap(),
        "--registry",
        broken.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let corpus = corpus();
    let args = [
        "scan",
        corpus.to_str().unwrap(),
        "--format",
        "json",
        "--fail-on",
        "high",
    ];
    let first = swelint(&args);
    let second = swelint(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(code(&first), code(&second));
}
