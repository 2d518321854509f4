//! End-to-end tests of the `nvcoin` binary: document round trips, output
//! stability and the exit-code contract (0 ok, 1 invalid, 2 mismatch,
//! 3 parse error).

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvcoin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn compute_root_fixture_json() {
    let out = run(&["compute", "--fixture", "torus-3valued-root", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["L"], 0);
    assert_eq!(value["R"], 2);
    assert_eq!(value["N"], 2);
    assert_eq!(value["averaging"]["index_pi_s"], 2);
}

#[test]
fn oracle_circle_fixture_succeeds() {
    let out = run(&["oracle", "--fixture", "circle-sqrt2", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["summary"]["coincidence_count"], 1);
    assert_eq!(value["summary"]["index_sum"], 1);
}

#[test]
fn validate_invalid_group_exits_1() {
    let out = run(&["validate", "--fixture", "point-reflection"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("torsion"));

    let out = run(&["validate", "--fixture", "klein-bottle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("orientability"));

    let out = run(&["validate", "--fixture", "halfturn-3d"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn parse_error_exits_3() {
    let dir = std::env::temp_dir().join("nvcoin-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["compute", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["compute", "--fixture", "no-such-fixture"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degenerate_oracle_exits_1() {
    let out = run(&["oracle", "--fixture", "torus-3valued-degenerate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn example_round_trips_through_compute() {
    let dir = std::env::temp_dir().join("nvcoin-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fixture.json");
    let out = run(&[
        "example",
        "--fixture",
        "torus-3valued-root",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let direct = run(&["compute", "--fixture", "torus-3valued-root", "--format", "json"]);
    let via_file = run(&["compute", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert!(via_file.status.success());
    assert_eq!(stdout(&direct), stdout(&via_file));
}

#[test]
fn output_is_byte_stable_across_runs() {
    for fixture in ["torus-3valued-root", "halfturn-3d-endo-pair"] {
        let a = run(&["compute", "--fixture", fixture, "--format", "json"]);
        let b = run(&["compute", "--fixture", fixture, "--format", "json"]);
        assert_eq!(stdout(&a), stdout(&b), "unstable output for {fixture}");
    }
    let a = run(&["oracle", "--fixture", "torus-3valued-root", "--format", "json"]);
    let b = run(&["oracle", "--fixture", "torus-3valued-root", "--format", "json"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn classes_rejects_holonomy_targets() {
    let out = run(&["classes", "--fixture", "halfturn-3d-endo-pair"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["classes", "--fixture", "torus-3valued-root", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value.as_array().unwrap().len(), 2);
}
