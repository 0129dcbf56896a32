//! End-to-end tests against the compiled `hmgf` binary.

use std::path::Path;
use std::process::{Command, Output};

const GRAPH_X: &str = "\
F 1 2
F 2 3
F 3 4
F 4 5
F 2 4
P 1 3 0.9
P 1 4 0.5
P 3 5 0.8
P 1 5 0.2
";

fn hmgf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmgf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_graph_x(dir: &Path) -> String {
    let path = dir.join("x.graph");
    std::fs::write(&path, GRAPH_X).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn solve_exact_on_graph_x() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph_x(dir.path());
    let out = hmgf(&[
        "solve", "--graph", &graph, "--solver", "exact", "--hops", "2", "--min-size", "3",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["members"], serde_json::json!(["1", "3", "4"]));
    assert!((doc["sigma"].as_f64().unwrap() - 1.4 / 3.0).abs() < 1e-12);
    assert_eq!(doc["strictly_feasible"], serde_json::json!(true));
    assert_eq!(doc["query"], serde_json::json!({"h": 2, "p": 3}));
    assert_eq!(doc["solver"], serde_json::json!("exact"));
}

#[test]
fn solve_maxgf_matches_exact_on_graph_x() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph_x(dir.path());
    let out = hmgf(&[
        "solve", "--graph", &graph, "--solver", "maxgf", "--hops", "2", "--min-size", "3",
        "--threads", "2",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["members"], serde_json::json!(["1", "3", "4"]));
}

#[test]
fn zero_hops_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph_x(dir.path());
    let out = hmgf(&[
        "solve", "--graph", &graph, "--solver", "exact", "--hops", "0", "--min-size", "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("h must be \u{2265} 1"));
}

#[test]
fn oversized_min_size_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph_x(dir.path());
    let out = hmgf(&[
        "solve", "--graph", &graph, "--solver", "exact", "--hops", "2", "--min-size", "9",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_graph_file_exits_one() {
    let out = hmgf(&[
        "solve", "--graph", "/nonexistent/g.txt", "--solver", "exact", "--hops", "2",
        "--min-size", "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tiny_ball_limit_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph_x(dir.path());
    let out = hmgf(&[
        "solve", "--graph", &graph, "--solver", "exact", "--hops", "2", "--min-size", "3",
        "--max-ball-size", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.graph");
    let b = dir.path().join("b.graph");
    for path in [&a, &b] {
        let out = hmgf(&[
            "generate", "--n", "10", "--friend-prob", "0.3", "--potential-prob", "0.2",
            "--seed", "7", "-o", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn predict_rewrites_potential_edges() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph_x(dir.path());
    let out_path = dir.path().join("pred.graph");
    let out = hmgf(&[
        "predict", "--graph", &graph, "--method", "cn", "--top-k", "2", "-o",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let f_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("F ")).collect();
    let p_lines: Vec<&str> = text.lines().filter(|l| l.starts_with("P ")).collect();
    assert_eq!(f_lines.len(), 5, "friend edges preserved");
    assert_eq!(p_lines.len(), 2, "top-k potential edges");
    for l in p_lines {
        let w: f64 = l.split_whitespace().nth(3).unwrap().parse().unwrap();
        assert!(w > 0.0 && w <= 1.0);
    }
}

#[test]
fn predict_requires_exactly_one_selection_flag() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_graph_x(dir.path());
    let out_path = dir.path().join("pred.graph");
    let out = hmgf(&["predict", "--graph", &graph, "-o", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = hmgf(&[
        "predict", "--graph", &graph, "--top-k", "2", "--threshold", "0.5", "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn evaluate_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    std::fs::write(
        &config,
        "sweep = n\nvalues = 8, 10\nh = 2\np = 3\nfriend_prob = 0.3\npotential_prob = 0.3\n\
         solvers = exact, maxgf, dks\nreps = 3\nseed = 5\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = hmgf(&[
        "evaluate", "--config", config.to_str().unwrap(), "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("scenario,instance,solver,sigma,feasible,max_hop,size,elapsed_ms\n"));
    // 2 scenarios x 3 reps x 3 solvers
    assert_eq!(csv.lines().count(), 1 + 18);
    for name in ["report.json", "plot_time.tsv", "plot_fearatio.tsv", "plot_objratio.tsv", "plot_size.tsv"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 18);
    assert_eq!(json["aggregates"].as_array().unwrap().len(), 6);
}

#[test]
fn help_exits_zero() {
    let out = hmgf(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("solve"));
}
