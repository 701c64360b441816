use std::path::Path;
use std::process::{Command, Output};

fn qnfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnfl")).args(args).output().expect("binary runs")
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

const SMALL: &str = r#"
master_seed = 3
jobs = 2

[grid]
n = 3
r = [1, 4]
m = [10, "inf"]
N = [2]

[trials]
unitary = 2
data = 3
"#;

#[test]
fn sweep_then_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let trials = dir.path().join("trials.csv");
    let summary = dir.path().join("summary.csv");

    let out = qnfl(&["sweep", "--config", cfg.to_str().unwrap(), "--out", trials.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&trials).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 6);
    assert!(text.lines().any(|l| l.starts_with("3,8,4,inf,2,")));

    let out = qnfl(&["aggregate", "--in", trials.to_str().unwrap(), "--out", summary.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&summary).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,d,r,m,N,ortho,trials,mean_risk,stderr_risk,mean_normalized_error,stderr_normalized_error"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn cli_flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let run = |seed: &str, jobs: &str, name: &str| {
        let path = dir.path().join(name);
        let out = qnfl(&[
            "sweep", "--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap(), "--seed", seed, "--jobs", jobs,
        ]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("3", "1", "a.csv"), run("3", "8", "b.csv"));
    assert_ne!(run("3", "1", "a.csv"), run("4", "1", "c.csv"));
}

#[test]
fn bound_prints_formal_and_informal() {
    let out = qnfl(&["bound", "--n", "4", "--r", "2", "--m", "100", "--N", "8", "--eps-tilde", "0.15"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "n,d,r,m,N,formal,informal,ideal,formal_branch");
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(&fields[..5], ["4", "16", "2", "100", "8"]);
    for v in &fields[5..8] {
        assert!(v.parse::<f64>().unwrap() >= 0.0);
    }
}

#[test]
fn bound_accepts_lists() {
    let out = qnfl(&["bound", "--n", "3,4", "--r", "1,2", "--m", "10,inf", "--N", "1,4", "--log-multiplier", "16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 16);
}

#[test]
fn verify_haar_suite_passes() {
    let out = qnfl(&["verify", "--suite", "haar", "--samples", "100000", "--seed", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
}

#[test]
fn verify_exit_code_reflects_failures() {
    // the published variance form misses at r >= 2
    let out = qnfl(&["verify", "--suite", "variance", "--samples", "100000", "--seed", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(1), "{text}");
    assert!(text.lines().all(|l| !l.starts_with("FAIL variance/exact")));
}

#[test]
fn usage_errors() {
    assert_eq!(qnfl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qnfl(&["verify", "--suite", "nope"]).status.code(), Some(2));
    let out = qnfl(&["sweep", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/cfg.toml"));
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "n,d,r,m,N,ortho,trial_u,trial_d,k_star,k_hat,error_indicator,risk,normalized_error,seed_hash\n\
         4,16,1,10,1,false,0,0,1,1,0,0.0,0.0,9\n\
         4,16,1,10,1,maybe,0,0,1,1,0,0.0,0.0,9\n",
    )
    .unwrap();
    let out = qnfl(&["aggregate", "--in", bad.to_str().unwrap(), "--out", dir.path().join("s.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn shipped_configs_parse() {
    for name in ["full_grid.toml", "ortho.toml", "acceptance.toml"] {
        let cfg = qnfl::harness::SweepConfig::load(&configs().join(name)).unwrap();
        assert!(!cfg.grid_points().is_empty(), "{name}");
    }
    let full = qnfl::harness::SweepConfig::load(&configs().join("full_grid.toml")).unwrap();
    let points = full.grid_points();
    assert_eq!(points.len(), 16 * 16 * 9);
    assert_eq!(points.len() * (full.trials_unitary * full.trials_data) as usize, 16 * 16 * 9 * 40);
}
