use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn sidon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sidon")).args(args).output().expect("binary runs")
}

fn sidon_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sidon"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classical_command() {
    let out = sidon(&["classical", "--p", "3", "--h", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["set"], serde_json::json!([1, 6, 7]));
    assert_eq!(v["modulus"], 8);
    assert_eq!(v["verified"], true);

    let out = sidon(&["classical", "--p", "2", "--h", "2"]);
    assert_eq!(json(&out)["set"], serde_json::json!([1, 2]));
    assert_eq!(json(&out)["modulus"], 3);

    let out = sidon(&["classical", "--p", "4", "--h", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "invalid_input");
    assert!(err["error"]["message"].as_str().unwrap().contains("--k 2"));
}

#[test]
fn system_command_and_roundtrip() {
    let out = sidon(&["system", "--phi", "1,5", "--q", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["max_multiplicity"], 2);
    assert_eq!(v["certificate"]["q"], 7);
    assert_eq!(v["certificate"]["exponents"].as_array().unwrap().len(), 2);
    assert_eq!(v["counting_bound"]["ceiling"], 1130);

    // the printed system is re-ingestible by `verify`
    let again = sidon_stdin(&["verify"], std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(again.status.code(), Some(0));
    let w = json(&again);
    assert_eq!(w["report"], v["report"]);
    assert_eq!(w["sets"], v["sets"]);
}

#[test]
fn system_errors_have_codes() {
    let out = sidon(&["system", "--phi", "1,5", "--q", "11"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "not_admissible");

    let out = sidon(&["system", "--phi", "1,1", "--q", "4099"]);
    assert_eq!(out.status.code(), Some(3));

    let out = sidon(&["system", "--phi", "1,1", "--q", "7", "--ceiling", "40"]);
    assert_eq!(out.status.code(), Some(3));

    let out = sidon(&["system", "--phi", "1,0", "--q", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn declared_g_below_truth_fails_verification() {
    let out = sidon(&["system", "--phi", "1,5", "--q", "7", "--g", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verified"], false);
}

#[test]
fn experimental_prime_power_flag() {
    assert_eq!(sidon(&["system", "--phi", "1,1", "--q", "4"]).status.code(), Some(2));
    let out = sidon(&["system", "--phi", "1,1", "--q", "4", "--experimental-prime-power"]);
    assert_eq!(json(&out)["certificate"]["proven"], false);
}

#[test]
fn admissible_command() {
    let out = sidon(&["admissible", "--phi", "1,5", "--bound", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["direct_primes"], serde_json::json!([2, 3, 5, 7, 13, 17, 23, 37, 43, 47]));
    assert_eq!(v["progression"], serde_json::json!({"u": 2, "Q": 5, "witnesses": {"5": 2}}));
    assert_eq!(v["progression_primes"], serde_json::json!([2, 7, 17, 37, 47]));

    let out = sidon(&["admissible", "--phi", "1,2", "--bound", "50"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "exceptional_prime");
}

#[test]
fn table_command_csv() {
    let out = sidon(&["table", "--phi", "1,1", "--n", "47,119,167", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "n,q,ratio\n47,7,1.021055\n119,11,1.008368\n167,13,1.005970\n");
}

#[test]
fn witness_command() {
    let v = json(&sidon(&["witness", "--phi", "1,5", "--n", "50"]));
    assert_eq!(v["q"], 7);
    let out = sidon(&["witness", "--phi", "1,1", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["q"], Value::Null);
}

#[test]
fn oracle_command() {
    let v = json(&sidon(&["oracle", "--n", "7"]));
    assert_eq!(v["result"]["exact"], 4);
    assert_eq!(v["bracket"]["construction_q"], 3);
    assert_eq!(v["bracket"]["counting_ceiling"], 5);

    let v = json(&sidon(&["oracle", "--n", "4", "--phi", "1,1"]));
    assert_eq!(v["result"]["exact"], 2);
    assert_eq!(v["verified"], true);

    let out = sidon(&["oracle", "--n", "41"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_reads_file_and_reports_failure() {
    let dir = std::env::temp_dir().join(format!("sidon-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sys.json");
    std::fs::write(&path, r#"{"phi": [1, 1], "sets": [[0, 1], [0, 1]], "g": 1}"#).unwrap();
    let out = sidon(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["max_multiplicity"], 2);

    let out = sidon(&["verify", path.to_str().unwrap(), "--g", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "value,count\n0,1\n1,2\n2,1\n");

    let dup = dir.join("dup.json");
    std::fs::write(&dup, r#"{"phi": [1, 1], "sets": [[0, 0], [1]], "g": null}"#).unwrap();
    assert_eq!(sidon(&["verify", dup.to_str().unwrap()]).status.code(), Some(2));

    let out_path = dir.join("out.json");
    let out = sidon(&["classical", "--p", "5", "--h", "2", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["set"].as_array().unwrap().len(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_byte_stable() {
    for args in [
        &["system", "--phi", "1,5", "--q", "7"][..],
        &["classical", "--p", "2", "--k", "2", "--h", "2"][..],
        &["table", "--phi", "1,1", "--n", "47,119,167"][..],
        &["oracle", "--n", "9", "--format", "text"][..],
    ] {
        assert_eq!(sidon(args).stdout, sidon(args).stdout, "{args:?}");
    }
}
