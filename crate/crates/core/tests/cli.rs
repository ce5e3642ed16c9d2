use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nearcyc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearcyc")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "seed = 7\n[ranges]\nn_max = 4\nstalk_max = 3\nkernel_stalk_max = 2\nkunneth_pairs = 5\nkunneth_total = 12\nmonodromy_ops = 10\nmonodromy_dim = 8\ngraded_n = 3\ncollapse_max = 6\nexpand_n = 4\ngamma_n = 4\npurity_n = 3\n";

#[test]
fn coeff_cell_query() {
    let out = nearcyc(&["coeff-table", "--cell", "2,2,2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["cells"][0]["coefficient"], 3);
    assert_eq!(v["mismatches"], 0);
}

#[test]
fn coeff_sweep_has_no_mismatches() {
    let out = nearcyc(&["coeff-table", "--n", "8", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 15 * 64);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", SMALL);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = nearcyc(&["verify", "--config", &cfg, "--out", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn injected_fault_fails_nbar_with_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "fault.toml", &format!("{SMALL}[fault]\ntarget = \"nbar\"\nk = 2\nl1 = 1\nl2 = 1\n"));
    let out = nearcyc(&["verify", "--config", &cfg, "--suite", "nbar"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["summary"]["suites"]["nbar"]["failed"].as_u64().unwrap() > 0);
    let failing: Vec<&Value> = v["records"].as_array().unwrap().iter().filter(|r| r["passed"] == false).collect();
    for r in failing {
        assert_eq!(r["location"]["k"], 2);
        assert!(r["location"]["blocks"].as_array().unwrap().iter().any(|b| b[0] == 1 && b[1] == 1));
    }
}

#[test]
fn suite_filter_runs_collapse_alone() {
    let out = nearcyc(&["verify", "--suite", "collapse"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suites"], serde_json::json!(["collapse"]));
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["suite"] == "collapse"));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "seed = 1\n\n[ranges]\nstalk_mx = 2\n");
    let out = nearcyc(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4") && err.contains("stalk_mx"), "{err}");
}

#[test]
fn e1_page_demos() {
    let out = nearcyc(&["e1-page", "--demo", "semistable"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 4);

    let out = nearcyc(&["e1-page", "--demo", "concentrated", "--n", "3"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pure"], true);
    assert!(v["entries"].as_array().unwrap().iter().all(|e| e["m"] == 4));

    let out = nearcyc(&["e1-page", "--demo", "symbolic", "--n", "2", "--p", "1"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["symbolic"], true);
    assert_eq!(v["entries"][0]["dim"], 4);
}

#[test]
fn e1_page_from_fiber_file() {
    let dir = tempfile::tempdir().unwrap();
    let fiber = write(
        dir.path(),
        "fiber.json",
        r#"{"n": 2, "m1": 2, "m2": 2, "cohomology": [
            {"l1": 0, "l2": 0, "table": [[0, 0, 1], [2, 2, 2], [4, 4, 1]]},
            {"l1": 1, "l2": 0, "table": [[0, 0, 1], [2, 2, 1]]},
            {"l1": 0, "l2": 1, "table": [[0, 0, 1], [2, 2, 1]]},
            {"l1": 1, "l2": 1, "table": [[0, 0, 1]]}]}"#,
    );
    let out = nearcyc(&["e1-page", "--fiber", &fiber, "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,m,p,q,a,b,j,twist,dim,weight"));
}

#[test]
fn build_emits_json() {
    let out = nearcyc(&["build", "l", "--k", "1", "--n1", "2", "--n2", "2", "--realize", "2,2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["differentials"].is_array());
    let out = nearcyc(&["build", "nbar", "--k", "1"]);
    assert!(out.status.success());
}

#[test]
fn collapse_and_gamma_commands() {
    let out = nearcyc(&["collapse", "--max", "12", "--format", "table"]);
    assert!(out.status.success());
    let out = nearcyc(&["gamma", "--s", "1,1", "--mode", "tempered"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mismatches"], 0);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(nearcyc(&["coeff-table", "--cell", "1,2"]).status.code(), Some(2));
    assert_eq!(nearcyc(&["verify", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(nearcyc(&[]).status.code(), Some(2));
}
