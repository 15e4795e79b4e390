use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use robust_coreset::coreset1d::build_robust_1d;
use robust_coreset::cost::robust_cost_weighted;
use robust_coreset::eval::sample_centers;
use robust_coreset::instances::gen_gaussian_1d;
use robust_coreset::{Dataset, Power, WeightedSet};
use robust_coreset_cli::{parse_coreset, parse_csv, parse_dataset, points_csv, EXIT_ASSUMPTION, EXIT_INVALID, EXIT_IO};
use tempfile::TempDir;

fn rcoreset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcoreset")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = rcoreset(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_1d(dir: &TempDir, name: &str, xs: &[f64]) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, points_csv(&Dataset::from_scalars(xs).unwrap(), None, "test data")).unwrap();
    path
}

#[test]
fn parse_examples() {
    let two = parse_csv("0,0\n3,4\n").unwrap();
    assert_eq!(two.points, Dataset::from_rows(&[[0.0, 0.0], [3.0, 4.0]]).unwrap());
    assert_eq!(two.header, None);
    let headed = parse_csv("x,y\n0,0\n3,4\n").unwrap();
    assert_eq!(headed.points, two.points);
    assert_eq!(headed.header, Some(vec!["x".to_string(), "y".to_string()]));
    let err = parse_csv("1,2\n1\n").unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
    assert!(parse_csv("").is_err());
    assert!(parse_csv("x,y\n").is_err());
    assert!(parse_csv("1,2\n3,inf\n").unwrap_err().to_string().contains("line 2"));
    assert!(parse_csv("1,2\n3,abc\n").unwrap_err().to_string().contains("line 2"));
    assert!(parse_csv("x,y\n1,2,3\n").unwrap_err().to_string().contains("line 2"));
}

#[test]
fn coreset_format_round_trips() {
    let pts = Dataset::from_rows(&[[0.1, -3.0], [1.0 / 3.0, 2.5e-7], [1e12, 7.0]]).unwrap();
    let set = WeightedSet::new(pts, vec![1.0 / 7.0, 2.0 / 3.0, 123.456_789_012_345_67]).unwrap();
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.csv");
    std::fs::write(&path, points_csv(set.points(), Some(set.weights()), "seed=1")).unwrap();
    assert_eq!(parse_coreset(&path).unwrap(), set);
}

#[test]
fn build_output_reproduces_costs() {
    let dir = TempDir::new().unwrap();
    let xs = gen_gaussian_1d(5000, 100, 3).unwrap();
    let data = write_1d(&dir, "p.csv", &xs);
    let out = dir.path().join("s.csv");
    ok(&["build", "--input", path_str(&data), "--output", path_str(&out), "--m", "100", "--eps", "0.2", "--seed", "5"]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# builder=ours1d") && text.contains("seed=5"));
    let parsed = parse_coreset(&out).unwrap();
    let direct = build_robust_1d(&xs, 100, 0.2).unwrap().set;
    let pts = parse_dataset(&data).unwrap();
    for c in sample_centers(&pts, 1, Power::One, 100, 9).unwrap() {
        let a = robust_cost_weighted(&parsed, &c, 100.0).unwrap();
        let b = robust_cost_weighted(&direct, &c, 100.0).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn build_without_outliers_keeps_total_weight() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("g.csv");
    ok(&["generate", "--family", "gauss", "--n", "3000", "--d", "3", "--k", "2", "--m", "0", "--seed", "4", "--output", path_str(&data)]);
    for builder in ["oursnd", "hllw25", "uniform"] {
        let out = dir.path().join(format!("{builder}.csv"));
        ok(&[
            "build", "--input", path_str(&data), "--output", path_str(&out), "--m", "0", "--k", "2", "--z", "2",
            "--builder", builder, "--size", "200", "--seed", "4", "--allow-violations",
        ]);
        let set = parse_coreset(&out).unwrap();
        assert!((set.total_weight() - 3000.0).abs() <= 1e-9 * 3000.0, "{builder}: {}", set.total_weight());
    }
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let dir = TempDir::new().unwrap();
    let data = write_1d(&dir, "p.csv", &gen_gaussian_1d(2000, 20, 1).unwrap());
    let out = dir.path().join("sweep.csv");
    ok(&[
        "sweep", "--input", path_str(&data), "--output", path_str(&out), "--m", "20", "--builder",
        "ours1d,hllw25,uniform", "--sizes", "40,60,80,100,120", "--trials", "10", "--centers", "20", "--seed", "2",
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(robust_coreset::eval::SweepTable::CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 150);
    assert!(rows.iter().all(|r| r.split(',').count() == 8));
}

#[test]
fn check_assumptions_passes_on_gaussian_defaults() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("g.csv");
    ok(&["generate", "--family", "gauss", "--n", "10000", "--d", "5", "--k", "5", "--m", "200", "--seed", "0", "--output", path_str(&data)]);
    let out = ok(&["check-assumptions", "--input", path_str(&data), "--m", "200", "--k", "5", "--seed", "0"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["cond1"], true);
    assert_eq!(report["cond2"], true);
    assert_eq!(report["seed"], 0);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(rcoreset(&["build", "--input", path_str(&missing), "--seed", "1"]).status.code(), Some(EXIT_IO));

    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "1,2\n1\n").unwrap();
    let out = rcoreset(&["build", "--input", path_str(&ragged), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let small = write_1d(&dir, "small.csv", &(0..40).map(f64::from).collect::<Vec<_>>());
    let args = ["build", "--input", path_str(&small), "--m", "15", "--seed", "1"];
    assert_eq!(rcoreset(&args).status.code(), Some(EXIT_ASSUMPTION));
    assert!(rcoreset(&[&args[..], &["--allow-small-n"]].concat()).status.success());

    assert_eq!(rcoreset(&["build", "--input", path_str(&small), "--z", "3"]).status.code(), Some(EXIT_INVALID));
    assert_eq!(rcoreset(&["build", "--input", path_str(&small), "--builder", "bogus"]).status.code(), Some(EXIT_INVALID));
    assert_eq!(rcoreset(&["frobnicate"]).status.code(), Some(EXIT_INVALID));
}

#[test]
fn seed_is_echoed_or_drawn() {
    let dir = TempDir::new().unwrap();
    let out = ok(&["generate", "--family", "ratio", "--n", "12", "--m", "8", "--output", path_str(&dir.path().join("r.csv"))]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("drawn from system entropy"));
    let out = ok(&["generate", "--family", "obstacle", "--n", "20", "--m", "3", "--seed", "77"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("seed=77"));
    assert_eq!(parse_csv(&text).unwrap().points.len(), 20);
}

#[test]
fn eval_reads_a_coreset_file() {
    let dir = TempDir::new().unwrap();
    let xs = gen_gaussian_1d(2000, 20, 6).unwrap();
    let data = write_1d(&dir, "p.csv", &xs);
    let exact = dir.path().join("exact.csv");
    let full = WeightedSet::unit(Dataset::from_scalars(&xs).unwrap());
    std::fs::write(&exact, points_csv(full.points(), Some(full.weights()), "seed=0")).unwrap();
    let out = ok(&["eval", "--input", path_str(&data), "--coreset", path_str(&exact), "--m", "20", "--trials", "2", "--centers", "30", "--seed", "3"]);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["max_error"], 0.0);

    let out = ok(&["eval", "--input", path_str(&data), "--m", "20", "--size", "60", "--trials", "3", "--centers", "30", "--seed", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}
