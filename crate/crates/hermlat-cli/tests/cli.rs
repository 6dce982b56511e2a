use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn write_lattice(name: &str, v: &Value) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{name}.json"));
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

/// Diagonal gram over (p, eps0), optionally restricted to the first `rank` basis vectors.
fn diag_lattice(name: &str, p: u64, eps0: i64, d: &[i64], rank: Option<usize>) -> PathBuf {
    let n = d.len();
    let gram: Vec<Vec<[String; 2]>> = (0..n)
        .map(|i| (0..n).map(|j| [if i == j { d[i].to_string() } else { "0".into() }, "0".into()]).collect())
        .collect();
    let mut v = json!({"space": {"p": p, "eps0": eps0, "gram": gram}});
    if let Some(r) = rank {
        let basis: Vec<Vec<[String; 2]>> =
            (0..n).map(|i| (0..r).map(|j| [if i == j { "1" } else { "0" }.to_string(), "0".into()]).collect()).collect();
        v["basis"] = json!(basis);
    }
    write_lattice(name, &v)
}

fn hermlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermlat")).args(args).env_remove("HERMLAT_SEED").output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn dden_of_nonsplit_rank_two() {
    let path = diag_lattice("d13", 3, 2, &[1, 3], None);
    let out = hermlat(&["dden", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out), json!(4));
    let out = hermlat(&["int", path.to_str().unwrap()]);
    assert_eq!(stdout_json(&out), json!(4));
}

#[test]
fn invariants_and_enumeration() {
    let path = diag_lattice("inv13", 3, 2, &[1, 3], None);
    let inv = stdout_json(&hermlat(&["invariants", path.to_str().unwrap()]));
    assert_eq!(inv, json!({"a": [1, 3], "t": 2, "val": 4, "vertex": false, "selfdual": false}));
    let all = stdout_json(&hermlat(&["enumerate", path.to_str().unwrap(), "--kind", "overlattices"]));
    assert_eq!(all.as_array().unwrap().len(), 2);
    let vertex = stdout_json(&hermlat(&["enumerate", path.to_str().unwrap(), "--kind", "vertex"]));
    assert_eq!(vertex.as_array().unwrap().len(), 1);
}

#[test]
fn den_forms() {
    let path = diag_lattice("den13", 3, 2, &[1, 3], None);
    let poly = stdout_json(&hermlat(&["den", path.to_str().unwrap(), "--poly"]));
    assert_eq!(poly["coeffs"], json!([1, 0, 0, 0, -1]));
    let at = stdout_json(&hermlat(&["den", path.to_str().unwrap(), "--at", "2"]));
    // Two overlattices of type 2, index 1 and 3: (1 + 3⁻²)(1 − 3⁻²)(1 − 3⁻⁴).
    assert_eq!(at, json!("6400/6561"));
}

#[test]
fn corank_one_commands() {
    let path = diag_lattice("flat", 3, 1, &[1, 1, 3, 1], Some(3));
    let out = hermlat(&["ft-support", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out), json!({"witness": null}));
    let fam = stdout_json(&hermlat(&["enumerate", path.to_str().unwrap(), "--kind", "corank1", "--delta-max", "0"]));
    assert!(!fam.as_array().unwrap().is_empty());
    let full = diag_lattice("full", 3, 2, &[1, 3], None);
    assert_eq!(hermlat(&["ft-support", full.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_two() {
    let gram = json!([[["1", "0"], ["0", "1"]], [["0", "0"], ["3", "0"]]]);
    let path = write_lattice("nonherm", &json!({"space": {"p": 3, "eps0": 1, "gram": gram}}));
    let out = hermlat(&["invariants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not hermitian"));
    assert_eq!(hermlat(&["invariants", "/nonexistent/lattice.json"]).status.code(), Some(2));
    assert_eq!(hermlat(&["verify", "--suite", "coset", "--p", "9"]).status.code(), Some(2));
}

#[test]
fn coset_suite_passes() {
    let out = hermlat(&["verify", "--suite", "coset", "--p", "3"]);
    assert!(out.status.success());
    let r = stdout_json(&out);
    assert_eq!(r["suite"], "coset");
    assert_eq!(r["summary"]["total"], r["summary"]["passed"]);
    assert!(r["summary"]["total"].as_u64().unwrap() > 0);
    for c in r["cases"].as_array().unwrap() {
        assert_eq!(c["inputs"].as_str().unwrap().len(), 64);
        assert_eq!(c["pass"], c["expected"] == c["actual"]);
    }
}

#[test]
fn reports_are_identical_across_job_counts() {
    let args = ["verify", "--suite", "reduction", "--seed", "11"];
    let one = hermlat(&[&args[..], &["--jobs", "1"]].concat());
    let three = hermlat(&[&args[..], &["--jobs", "3"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_hermlat"))
        .args(["verify", "--suite", "glcount"])
        .env("HERMLAT_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&out)["summary"]["seed"], 42);
}
