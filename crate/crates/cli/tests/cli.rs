use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_resistnet"))
}

fn graph_file(dir: &Path, name: &str, nodes: usize, edges: &[(usize, usize, f64)]) -> PathBuf {
    let edges: Vec<Value> = edges.iter().map(|&(u, v, w)| serde_json::json!({"u": u, "v": v, "w": w})).collect();
    let path = dir.join(name);
    fs::write(&path, serde_json::json!({"nodes": nodes, "edges": edges}).to_string()).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out: Output = bin().args(args).arg("--json").output().unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    let doc = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), doc, stderr)
}

fn unit_triangle(dir: &Path) -> PathBuf {
    graph_file(dir, "tri.json", 3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
}

fn path4(dir: &Path) -> PathBuf {
    graph_file(dir, "path4.json", 4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
}

#[test]
fn analyze_stable_triangle() {
    let dir = TempDir::new().unwrap();
    let (code, doc, _) = run(&["analyze", unit_triangle(dir.path()).to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(doc["schema"], "resistnet.analyze");
    assert_eq!(doc["stability"]["verdict"], "stable_agreement");
    let s = &doc["stability"]["signature"];
    assert_eq!((s["n_plus"].as_u64(), s["n_minus"].as_u64(), s["n_zero"].as_u64()), (Some(2), Some(0), Some(1)));
    assert_eq!(doc["worst_single_edge"]["global_margin"].as_f64(), Some(1.5));
}

#[test]
fn analyze_negative_bridge_exits_2_with_cut() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(dir.path(), "neg.json", 2, &[(0, 1, -1.0)]);
    let (code, doc, _) = run(&["analyze", g.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(doc["stability"]["verdict"], "unstable");
    assert_eq!(doc["stability"]["witness"]["kind"], "cut_edges");
    assert_eq!(doc["negative_edges"]["cut"]["cut_edges"], serde_json::json!([0]));
}

#[test]
fn analyze_threshold_triangle_is_marginal() {
    let dir = TempDir::new().unwrap();
    // the other path has resistance 2, so -1/2 sits exactly on the threshold
    let g = graph_file(dir.path(), "m.json", 3, &[(0, 1, -0.5), (1, 2, 1.0), (0, 2, 1.0)]);
    let (code, doc, _) = run(&["analyze", g.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(doc["stability"]["verdict"], "marginal");
    assert_eq!(doc["negative_edges"]["thresholds"]["status"], "applicable");
}

#[test]
fn margin_modes() {
    let dir = TempDir::new().unwrap();
    let tri = unit_triangle(dir.path());
    let tri = tri.to_str().unwrap();

    let (code, doc, _) = run(&["margin", tri, "--edges", "single:0"]);
    assert_eq!(code, 0);
    assert_eq!(doc["method"], "exact_single_edge");
    assert_eq!(doc["global_margin"].as_f64(), Some(1.5));

    let g2 = graph_file(dir.path(), "tri2.json", 3, &[(0, 1, 2.0), (1, 2, 2.0), (0, 2, 2.0)]);
    let (code, doc, _) = run(&["margin", g2.to_str().unwrap(), "--edges", "all"]);
    assert_eq!(code, 0);
    assert_eq!(doc["method"], "uniform_weight");
    assert_eq!(doc["global_margin"].as_f64(), Some(2.0));

    let (code, doc, stderr) = run(&["margin", tri, "--edges", "set:0,1"]);
    assert_eq!(code, 0);
    assert_eq!(doc["method"], "small_gain");
    assert!(stderr.contains("falling back"), "{stderr}");
}

#[test]
fn margin_sector_verdicts() {
    let dir = TempDir::new().unwrap();
    let tri = unit_triangle(dir.path());
    let (code, doc, _) = run(&["margin", tri.to_str().unwrap(), "--sector", "-0.25,0.25"]);
    assert_eq!(code, 0);
    assert_eq!(doc["sector_check"]["verdict"], "stable");
    // |α| = 1 = 1/σ̄ fails the strict gain test
    let (code, doc, _) = run(&["margin", tri.to_str().unwrap(), "--sector", "-1,1"]);
    assert_eq!(code, 2);
    assert_eq!(doc["sector_check"]["gain_ok"], false);
}

#[test]
fn margin_requires_nominal_stability() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(dir.path(), "neg.json", 2, &[(0, 1, -1.0)]);
    let (code, doc, _) = run(&["margin", g.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(doc["status"], "not_nominally_stable");
}

#[test]
fn simulate_default_converges() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t.csv");
    let (code, doc, _) =
        run(&["simulate", unit_triangle(dir.path()).to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(doc["outcome"], "converged");
    assert_eq!(doc["cluster_count"].as_u64(), Some(1));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,x0,x1,x2,"));
}

#[test]
fn simulate_path_boundary_and_beyond() {
    let dir = TempDir::new().unwrap();
    let p = path4(dir.path());
    let p = p.to_str().unwrap();
    let (_, doc, _) = run(&["simulate", p, "--perturb", "1=-1", "--x0", "-1,-1,1,1"]);
    assert_eq!(doc["outcome"], "clustered");
    assert_eq!(doc["clusters"], serde_json::json!([[0, 1], [2, 3]]));
    let (_, doc, _) = run(&["simulate", p, "--perturb", "1=-1.5"]);
    assert_eq!(doc["outcome"], "diverged");
    assert!(doc["divergence_time"].is_number());
}

#[test]
fn simulate_nonlinear_and_rejections() {
    let dir = TempDir::new().unwrap();
    let tri = unit_triangle(dir.path());
    let tri = tri.to_str().unwrap();
    let (code, doc, _) = run(&["simulate", tri, "--nonlinear", "0=-0.25,0.5,1"]);
    assert_eq!(code, 0);
    assert_eq!(doc["outcome"], "converged");
    let (code, _, stderr) = run(&["simulate", tri, "--nonlinear", "0=-1,1,1", "--perturb", "0=1"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("cannot be combined"));
    let (code, _, stderr) = run(&["simulate", tri, "--dt", "10"]);
    assert_eq!(code, 1, "{stderr}");
}

#[test]
fn usage_and_input_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"nodes": 3, "edges": [{"u": 0, "v": 1}]}"#).unwrap();
    let (code, _, stderr) = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("line 1"), "{stderr}");
    assert_eq!(run(&["analyze", "/nonexistent/graph.json"]).0, 1);
    assert_eq!(run(&["bogus"]).0, 1);
    assert_eq!(run(&["margin", unit_triangle(dir.path()).to_str().unwrap(), "--edges", "single:9"]).0, 1);
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn text_output_is_key_value() {
    let dir = TempDir::new().unwrap();
    let out = bin().args(["analyze", unit_triangle(dir.path()).to_str().unwrap()]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: stable_agreement"), "{text}");
}

#[test]
fn repro_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let (code, doc, stderr) = run(&["repro-sec6", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{stderr}");
        assert_eq!(doc["binding_is_argmax_resistance"], true);
        assert_eq!(doc["runs"]["beyond"], "diverged");
        assert_eq!(doc["runs"]["nonlinear_unstable"], "diverged");
        assert_eq!(doc["runs"]["nonlinear_stable"], "converged");
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?} differs");
    }
}
