use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FIX_A: &str = r#"{"nodes":["r","a","b"],"roots":["r"],"costs":[[0,1,3],[1,0,2],[3,2,0]]}"#;
const FIX_B: &str =
    r#"{"nodes":["r1","a","b","r2"],"roots":["r1","r2"],"costs":[[0,1,3,4],[1,0,2,3],[3,2,0,1],[4,3,1,0]]}"#;

fn kmlp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmlp")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn solve_covers_every_client() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "fixa.json", FIX_A);
    let out = kmlp(&["solve", "--alg", "kmlp-comb", "--input", s(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let route: Vec<&str> = v["routes"][0].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(route.contains(&"a") && route.contains(&"b"));
    assert_eq!(v["total_latency"], 4.0);
}

#[test]
fn single_depot_algorithm_rejects_multi_depot_instance() {
    let dir = TempDir::new().unwrap();
    let b = write(&dir, "fixb.json", FIX_B);
    let out = kmlp(&["solve", "--alg", "kmlp-lp", "--input", s(&b)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("single-depot algorithm on multi-depot instance"));
}

#[test]
fn seeded_solve_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let b = write(&dir, "fixb.json", FIX_B);
    let args = ["solve", "--alg", "multidepot", "--input", s(&b), "--seed", "7", "--no-derandomize"];
    let first = kmlp(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, kmlp(&args).stdout);
}

#[test]
fn bad_arguments_exit_2() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "fixa.json", FIX_A);
    assert_eq!(kmlp(&["solve", "--alg", "nope", "--input", s(&a)]).status.code(), Some(2));
    assert_eq!(kmlp(&["solve", "--alg", "kmlp-comb", "--input", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(kmlp(&["solve", "--alg", "kmlp-comb", "--input", s(&a), "--epsilon", "x"]).status.code(), Some(2));
}

#[test]
fn oracle_values_on_line_fixture() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "fixa.json", FIX_A);
    let opt = json(&kmlp(&["oracle", "--what", "opt", "--input", s(&a)]));
    assert_eq!(opt["optimum"]["exact"], "4");
    let bns = json(&kmlp(&["oracle", "--what", "bnslb", "--input", s(&a)]));
    assert_eq!(bns["optimum"]["exact"], "4");
    let table: Vec<&str> =
        bns["table"].as_array().unwrap().iter().map(|r| r["bottleneck"]["exact"].as_str().unwrap()).collect();
    assert_eq!(table, ["0", "1", "3"]);
    let lp3 = json(&kmlp(&["oracle", "--what", "lp3", "--input", s(&a), "--horizon", "4"]));
    assert!(lp3["optimum"]["value"].as_f64().unwrap() <= 4.0);
    let orient = json(&kmlp(&["oracle", "--what", "orienteering", "--input", s(&a), "--budget", "1"]));
    assert_eq!(orient["optimum"]["exact"], "1");
}

#[test]
fn oracle_guard_exits_4() {
    let dir = TempDir::new().unwrap();
    let n = 13;
    let names: Vec<String> = (0..n).map(|i| format!("\"v{i}\"")).collect();
    let rows: Vec<String> = (0..n)
        .map(|i: i64| format!("[{}]", (0..n).map(|j: i64| (i - j).abs().to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let text = format!(r#"{{"nodes":[{}],"roots":["v0"],"costs":[{}]}}"#, names.join(","), rows.join(","));
    let big = write(&dir, "big.json", &text);
    let out = kmlp(&["oracle", "--what", "opt", "--input", s(&big)]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_checks_feasibility_and_ratio() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "fixa.json", FIX_A);
    let sol = dir.path().join("sol.json");
    for (alg, against) in [("kmlp-comb", "bnslb"), ("kmlp-lp", "lp3"), ("mlp-lp", "opt")] {
        let out = kmlp(&["solve", "--alg", alg, "--input", s(&a), "--out", s(&sol)]);
        assert_eq!(out.status.code(), Some(0));
        let out = kmlp(&["verify", "--input", s(&a), "--solution", s(&sol), "--against", against]);
        assert_eq!(out.status.code(), Some(0), "{alg} against {against}");
        assert_eq!(json(&out)["check"]["pass"], true);
    }
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&sol).unwrap()).unwrap();
    v["routes"] = serde_json::json!([["r", "a"]]);
    let bad = write(&dir, "bad.json", &v.to_string());
    let out = kmlp(&["verify", "--input", s(&a), "--solution", s(&bad)]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("uncovered node"));
}

#[test]
fn verify_rejects_mismatched_instance() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "fixa.json", FIX_A);
    let b = write(&dir, "fixb.json", FIX_B);
    let sol = dir.path().join("sol.json");
    kmlp(&["solve", "--alg", "kmlp-comb", "--input", s(&a), "--out", s(&sol)]);
    let out = kmlp(&["verify", "--input", s(&b), "--solution", s(&sol)]);
    assert_eq!(out.status.code(), Some(2));
}

fn ratio_consistent(row: &Value) {
    for r in row["results"].as_array().unwrap() {
        let bound = row[r["bound"].as_str().unwrap()].as_f64();
        match (r["cost"].as_f64(), bound, r["ratio"].as_f64()) {
            (Some(c), Some(b), Some(q)) => assert!((c / b - q).abs() < 1e-12),
            (_, _, None) => {}
            other => panic!("ratio without its inputs: {other:?}"),
        }
    }
}

#[test]
fn bench_single_depot_rows() {
    let out = kmlp(&["bench", "--n", "6", "--k", "2", "--trials", "20", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20);
    let mu2 = 7.1824;
    for row in rows {
        ratio_consistent(row);
        let comb = row["results"].as_array().unwrap().iter().find(|r| r["algorithm"] == "kmlp-comb").unwrap();
        assert!(comb["ratio"].as_f64().unwrap() <= mu2);
    }
}

#[test]
fn bench_lp_chain_for_one_vehicle() {
    let out = kmlp(&["bench", "--n", "5", "--k", "1", "--trials", "20", "--seed", "2", "--algs", "kmlp-comb"]);
    let v = json(&out);
    for row in v["rows"].as_array().unwrap() {
        let (l1, l2, l3) = (row["lp1"].as_f64().unwrap(), row["lp2"].as_f64().unwrap(), row["lp3"].as_f64().unwrap());
        assert!(l3 <= l1 + 1e-9 && l1 <= l2 + 1e-9);
        assert!((l1 - l2).abs() < 1e-9);
    }
}

#[test]
fn bench_is_deterministic_and_handles_zero_trials() {
    let args = ["bench", "--n", "4", "--k", "2", "--trials", "3", "--seed", "9", "--depots", "multi"];
    assert_eq!(kmlp(&args).stdout, kmlp(&args).stdout);
    let out = kmlp(&["bench", "--n", "5", "--k", "1", "--trials", "0", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["rows"].as_array().unwrap().is_empty());
    assert_eq!(kmlp(&["bench", "--n", "3", "--k", "3", "--trials", "1", "--seed", "0"]).status.code(), Some(2));
}
