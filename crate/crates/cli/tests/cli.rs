use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pivotgrid"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIANGLE: &str = "3 3\n0 1\n0 2\n1 2\n";

#[test]
fn gen_prints_edge_lists() {
    let out = run(&["gen", "path", "1", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3 2\n0 1\n1 2\n");
    let out = run(&["gen", "tri", "2", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["vertices"], 4);
    assert_eq!(v["edges"].as_array().unwrap().len(), 5);
}

#[test]
fn compile_then_verify() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "tri.txt", TRIANGLE);
    let comp = dir.path().join("comp.json");
    let out = run(&["compile", s(&g), "-o", s(&comp)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&comp).unwrap()).unwrap();
    for key in ["rows", "cols", "tiles", "x_set", "z_set", "outputs", "output_map", "schedule"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let out = run(&["verify", s(&comp), s(&g)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", s(&comp), s(&g), "--outcomes", "random", "--seed", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verified"], true);
}

#[test]
fn verify_rejects_wrong_graph_and_tampered_plan() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "p2.txt", "2 1\n0 1\n");
    let comp = dir.path().join("comp.json");
    assert!(run(&["compile", s(&g), "-o", s(&comp)]).status.success());
    let empty = write(dir.path(), "e2.txt", "2 0\n");
    assert_eq!(run(&["verify", s(&comp), s(&empty)]).status.code(), Some(1));

    // Move the bridge vertex below the ΛZ tile from the X set to the Z set.
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&comp).unwrap()).unwrap();
    let cols = v["cols"].as_u64().unwrap();
    let bridge = 4 * cols + 2;
    let xs: Vec<u64> = v["x_set"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).filter(|&x| x != bridge).collect();
    let mut zs: Vec<u64> = v["z_set"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    zs.push(bridge);
    zs.sort_unstable();
    v["x_set"] = serde_json::json!(xs);
    v["z_set"] = serde_json::json!(zs);
    let bad = write(dir.path(), "bad.json", &v.to_string());
    let out = run(&["verify", s(&bad), s(&g)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("verification failed"));
}

#[test]
fn minor_triangle_vs_rectangular_grid() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "tri.txt", TRIANGLE);
    let h = dir.path().join("rect.txt");
    assert!(run(&["gen", "rect", "3", "3", "-o", s(&h)]).status.success());
    let out = run(&["minor", s(&g), s(&h)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "not a pivot minor\n");

    let p4 = write(dir.path(), "p4.txt", "4 3\n0 1\n1 2\n2 3\n");
    let c4 = write(dir.path(), "c4.txt", "4 4\n0 2\n0 3\n1 2\n1 3\n");
    let out = run(&["minor", s(&c4), s(&p4), "--mode", "labeled", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["answer"], "yes");
    assert_eq!(v["witness"]["pivots"], serde_json::json!([[1, 2]]));
    assert_eq!(run(&["minor", s(&g), s(&p4), "--max-size", "1"]).stdout, b"unknown: orbit truncated at 1 members\n");
}

#[test]
fn moves_on_graphs_and_states() {
    let dir = TempDir::new().unwrap();
    let p3 = write(dir.path(), "p3.txt", "3 2\n0 1\n1 2\n");
    let out = run(&["lc", s(&p3), "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), TRIANGLE);
    let st = write(dir.path(), "st.txt", "3 2\n0 1\n1 2\nS: 1\n");
    let out = run(&["lc", s(&st), "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("{TRIANGLE}S: 0 1 2\n"));
    let out = run(&["pivot", s(&p3), "0", "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3 2\n0 1\n0 2\n");
    assert_eq!(run(&["pivot", s(&p3), "0", "2"]).status.code(), Some(2));
}

#[test]
fn measure_replays_a_plan() {
    let dir = TempDir::new().unwrap();
    let p4 = write(dir.path(), "p4.txt", "4 3\n0 1\n1 2\n2 3\n");
    let out = run(&["measure", s(&p4), "--x", "1,2", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["graph"]["edges"], serde_json::json!([[0, 1]]));
    assert_eq!(v["survivors"], serde_json::json!([0, 3]));
    let out = run(&["measure", s(&p4), "--z", "0", "--outcomes", "forced:1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().nth(3), Some("S: 0"));
    assert_eq!(run(&["measure", s(&p4), "--z", "0", "--outcomes", "forced:"]).status.code(), Some(2));
}

#[test]
fn simulate_a_wire() {
    let dir = TempDir::new().unwrap();
    let pattern = r#"{"vertices":2,"edges":[[0,1]],"inputs":[0],"outputs":[1],
        "plan":[{"vertex":0,"angle_radians":1.5707963267948966,"order":0,"correction":[1]}]}"#;
    let p = write(dir.path(), "wire.json", pattern);
    let input = write(dir.path(), "in.json", r#"{"amplitudes": [[1, 0], [0, 0]]}"#);
    let out = run(&["simulate", s(&p), "--input", s(&input), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // H|0> = |+>, up to the recorded frame and phase.
    let amps = v["output_amplitudes"].as_array().unwrap();
    let mag = |i: usize| (amps[i][0].as_f64().unwrap().powi(2) + amps[i][1].as_f64().unwrap().powi(2)).sqrt();
    assert!((mag(0) - mag(1)).abs() < 1e-9);
    assert_eq!(v["transcript"].as_array().unwrap().len(), 1);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--max-n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains(" 0 failures"));
    assert_eq!(run(&["selftest", "--max-n", "9"]).status.code(), Some(4));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "tri", "0", "3"]).status.code(), Some(2));
    assert_eq!(run(&["compile", "/nonexistent/graph.txt"]).status.code(), Some(3));
    let dir = TempDir::new().unwrap();
    let junk = write(dir.path(), "junk.txt", "3 2\n0 1\n");
    assert_eq!(run(&["compile", s(&junk)]).status.code(), Some(3));
    let big = dir.path().join("big.txt");
    assert!(run(&["gen", "path", "1", "11", "-o", s(&big)]).status.success());
    assert_eq!(run(&["orbit", s(&big)]).status.code(), Some(4));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.txt", "4 4\n0 1\n1 2\n2 3\n0 3\n");
    for args in [
        vec!["compile", s(&g)],
        vec!["orbit", s(&g), "--format", "json"],
        vec!["measure", s(&g), "--x", "0,1", "--z", "2", "--outcomes", "random", "--seed", "42"],
        vec!["selftest", "--max-n", "2", "--random", "5", "--seed", "7"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
