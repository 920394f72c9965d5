//! End-to-end tests of the `symx` binary: exit codes, file round-trips and
//! report determinism.

use std::path::Path;
use std::process::{Command, Output};

fn symx(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symx"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

const C2C2M3: &str = r#"{"r_degree": 2, "r_generators": ["(0 1)"],
 "s_degree": 2, "s_generators": ["(0 1)"], "m": 3}"#;

#[test]
fn construct_then_analyze_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let params = write(dir, "params.json", C2C2M3);
    let spec = dir.join("spec.json");
    let out = symx(&["construct", "--params", &params, "--out", spec.to_str().unwrap()], dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // the construct output is accepted unchanged by analyze
    let report = dir.join("report.json");
    let out = symx(
        &["analyze", "--spec", spec.to_str().unwrap(), "--report", report.to_str().unwrap()],
        dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["local"]["order_arc_kernel"], "8");
    assert_eq!(value["local"]["order_kernels"]["gx1"], "16");
    assert_eq!(value["hypothesis"]["cond_i"]["status"], "fail");
    assert_eq!(value["tw_verdict"]["branch"], "p-group(2)");

    // byte-identical reports across runs
    let report2 = dir.join("report2.json");
    let out = symx(
        &["analyze", "--spec", spec.to_str().unwrap(), "--report", report2.to_str().unwrap()],
        dir,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text, std::fs::read_to_string(&report2).unwrap());
}

#[test]
fn verify_family_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let params = write(dir, "params.json", C2C2M3);
    for family in ["lemma1", "lemma2", "thm3"] {
        let out = symx(&["verify", "--family", family, "--params", &params], dir);
        assert_eq!(out.status.code(), Some(0), "family {family}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let spec = dir.join("spec.json");
    let out = symx(&["construct", "--params", &params, "--out", spec.to_str().unwrap()], dir);
    assert!(out.status.success());
    // hypothesis fails on this family: hyp1 reports the failure, thm1 skips
    let out = symx(&["verify", "--family", "hyp1", "--spec", spec.to_str().unwrap()], dir);
    assert_eq!(out.status.code(), Some(1));
    let out = symx(&["verify", "--family", "thm1", "--spec", spec.to_str().unwrap()], dir);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn analyze_rejects_broken_specs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let disconnected = write(
        dir,
        "disconnected.json",
        r#"{"degree": 4, "group_generators": ["(0 1)", "(0 1 2 3)"],
            "subgroup_generators": ["(0 1)"], "a": "(1 2)"}"#,
    );
    let out = symx(&["analyze", "--spec", &disconnected], dir);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("connectivity"), "stderr: {stderr}");

    let malformed = write(dir, "bad.json", "{\"degree\": 4, oops");
    let out = symx(&["analyze", "--spec", &malformed], dir);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");

    let out = symx(&["analyze", "--spec", dir.join("missing.json").to_str().unwrap()], dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corpus_run_and_filter() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let report = dir.join("corpus.json");
    let out = symx(
        &["corpus", "run", "--filter", "petersen", "--report", report.to_str().unwrap()],
        dir,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("petersen: pass"), "stdout: {stdout}");
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value[0]["name"], "petersen");
    assert_eq!(value[0]["outcome"], "pass");
    assert_eq!(value[0]["report"]["local"]["valency"], 3);

    let out = symx(&["corpus", "run", "--filter", "no-such-entry"], dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enum_bound_env_override() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let params = write(dir, "params.json", C2C2M3);
    let spec = dir.join("spec.json");
    let out = symx(&["construct", "--params", &params, "--out", spec.to_str().unwrap()], dir);
    assert!(out.status.success());

    // a tiny bound leaves the hypothesis undetermined: hyp1 exits 3
    let out = Command::new(env!("CARGO_BIN_EXE_symx"))
        .args(["verify", "--family", "hyp1", "--spec", spec.to_str().unwrap()])
        .env("SYMX_ENUM_BOUND", "2")
        .current_dir(dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let out = Command::new(env!("CARGO_BIN_EXE_symx"))
        .args(["corpus", "run"])
        .env("SYMX_ENUM_BOUND", "not-a-number")
        .current_dir(dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn explicit_graph_analysis_via_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // C5 with its dihedral group
    let c5 = write(
        dir,
        "c5.json",
        r#"{"vertices": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[0,4]],
            "aut_generators": ["(0 1 2 3 4)", "(1 4)(2 3)"]}"#,
    );
    let out = symx(&["analyze", "--spec", &c5], dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("conformance pass"), "stdout: {stdout}");
}
