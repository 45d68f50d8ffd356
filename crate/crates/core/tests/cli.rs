mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use container_sim::config::{default_config, Optimum};
use tempfile::TempDir;

use common::{bin, configs_dir};

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn shipped(name: &str) -> String {
    configs_dir().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &Path, name: &str, cfg: &container_sim::EnvConfig) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn zero_noise_overflow_config() -> container_sim::EnvConfig {
    let mut cfg = default_config(5, 2, 60.0).unwrap();
    cfg.containers.truncate(1);
    cfg.pu_count = 1;
    cfg.initial_volume_range = [30.0, 30.0];
    cfg.containers[0].noise_std_per_sec = 0.0;
    cfg.containers[0].fill_rate = 1.0 / 60.0;
    cfg
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", &shipped("synthetic-5-2-120.json")]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(stdout(&ok).contains("0 warning(s)"));

    let dir = TempDir::new().unwrap();
    let mut cfg = default_config(5, 2, 60.0).unwrap();
    cfg.reward_penalty = 0.1;
    let bad = run(&["validate", &write_config(dir.path(), "bad.json", &cfg)]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("reward_penalty must be negative"));

    let mut cfg = default_config(5, 2, 60.0).unwrap();
    cfg.containers[0].optima = vec![
        Optimum {
            volume: 20.0,
            height: 1.0,
            width: 5.0,
        },
        Optimum {
            volume: 25.0,
            height: 0.9,
            width: 5.0,
        },
    ];
    let warned = run(&["validate", &write_config(dir.path(), "overlap.json", &cfg)]);
    assert_eq!(warned.status.code(), Some(0));
    assert!(stderr(&warned).contains("reward exceeds 1"));

    let missing = run(&["validate", "/nonexistent/cfg.json"]);
    assert_eq!(missing.status.code(), Some(2));
    fs::write(dir.path().join("junk.json"), "{ not json").unwrap();
    let junk = run(&["validate", &dir.path().join("junk.json").to_string_lossy()]);
    assert_eq!(junk.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["rollout", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_string_lossy();
    let bad_policy = run(&[
        "rollout",
        "--config",
        &shipped("synthetic-5-2-60.json"),
        "--policy",
        "ppo",
        "--out-dir",
        &out,
    ]);
    assert_eq!(bad_policy.status.code(), Some(1));
    let bad_grid = run(&["benchmark", "--grid", "5,7,60", "--episodes", "1"]);
    assert_eq!(bad_grid.status.code(), Some(1));
    assert!(stderr(&bad_grid).contains("unsupported grid point"));
}

#[test]
fn help_documents_every_flag() {
    let help = run(&["rollout", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = stdout(&help);
    for flag in [
        "--config",
        "--policy",
        "--threshold",
        "--episodes",
        "--seed",
        "--horizon",
        "--jobs",
        "--out-dir",
    ] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
    let text = stdout(&run(&["analyze", "--help"]));
    for flag in [
        "--traces",
        "--mode",
        "--per-container",
        "--out-dir",
        "ecdf-volumes",
        "ecdf-rewards",
        "trace-plot-data",
    ] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
    let text = stdout(&run(&["serve", "--help"]));
    for flag in ["--config", "--transport", "--port"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn rollout_do_nothing_overflow_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "overflow.json", &zero_noise_overflow_config());
    let out = dir.path().join("out");
    let o = run(&[
        "rollout",
        "--config",
        &cfg,
        "--policy",
        "do-nothing",
        "--episodes",
        "1",
        "--out-dir",
        &out.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["mean_cumulative_reward"], -1.0);
    assert_eq!(summary["overflows"], 1);
    let trace = fs::read_to_string(out.join("episode-1.csv")).unwrap();
    assert_eq!(
        trace.lines().next().unwrap(),
        "t,v_1,p_1,action,reward,terminated,truncated"
    );
    assert_eq!(trace.lines().count(), 11);
}

#[test]
fn rollout_fifteen_episodes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_string_lossy().into_owned();
    let o = run(&[
        "rollout",
        "--config",
        &shipped("synthetic-5-2-120.json"),
        "--episodes",
        "15",
        "--seed",
        "1",
        "--horizon",
        "600",
        "--out-dir",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for seed in 1..=15 {
        assert!(dir.path().join(format!("episode-{seed}.csv")).exists());
    }
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 16);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    let rewards: Vec<f64> = summary
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let mean = rewards.iter().sum::<f64>() / 15.0;
    let std = (rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / 14.0).sqrt();
    assert!((json["mean_cumulative_reward"].as_f64().unwrap() - mean).abs() < 1e-9);
    assert!((json["std_cumulative_reward"].as_f64().unwrap() - std).abs() < 1e-9);
}

#[test]
fn analyze_outputs() {
    let dir = TempDir::new().unwrap();
    let traces = dir.path().join("traces");
    let o = run(&[
        "rollout",
        "--config",
        &shipped("synthetic-5-5-120.json"),
        "--episodes",
        "15",
        "--horizon",
        "600",
        "--out-dir",
        &traces.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0));

    let out = dir.path().join("rewards");
    let o = run(&[
        "analyze",
        "--traces",
        &traces.to_string_lossy(),
        "--mode",
        "ecdf-rewards",
        "--out-dir",
        &out.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("ecdf-rewards.csv")).unwrap();
    let rows: Vec<(f64, f64)> = table
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',').map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
    assert_eq!(rows.last().unwrap().1, 1.0);
    let below = rows
        .iter()
        .take_while(|(v, _)| *v < 0.75)
        .last()
        .map_or(0.0, |r| r.1);
    assert!(1.0 - below >= 0.9, "mass above 0.75 is {}", 1.0 - below);

    let per = dir.path().join("volumes");
    let o = run(&[
        "analyze",
        "--traces",
        &traces.to_string_lossy(),
        "--mode",
        "ecdf-volumes",
        "--per-container",
        "--out-dir",
        &per.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for i in 1..=5 {
        assert!(per.join(format!("ecdf-volumes-c{i}.csv")).exists());
    }

    let plots = dir.path().join("plots");
    let o = run(&[
        "analyze",
        "--traces",
        &traces.to_string_lossy(),
        "--mode",
        "trace-plot-data",
        "--out-dir",
        &plots.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let vols = fs::read_to_string(plots.join("plot-1-volumes.csv")).unwrap();
    assert_eq!(vols.lines().next().unwrap(), "t,v_1,v_2,v_3,v_4,v_5");
    let rewards = fs::read_to_string(plots.join("plot-1-rewards.csv")).unwrap();
    assert!(rewards
        .lines()
        .skip(1)
        .all(|l| !l.ends_with(",0.0000000000000000e0")));
}

#[test]
fn analyze_without_emptyings_warns() {
    let dir = TempDir::new().unwrap();
    let traces = dir.path().join("traces");
    run(&[
        "rollout",
        "--config",
        &shipped("synthetic-5-2-120.json"),
        "--policy",
        "do-nothing",
        "--episodes",
        "2",
        "--out-dir",
        &traces.to_string_lossy(),
    ]);
    let out = dir.path().join("out");
    let o = run(&[
        "analyze",
        "--traces",
        &traces.to_string_lossy(),
        "--mode",
        "ecdf-volumes",
        "--out-dir",
        &out.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("no emptying events"));
    assert_eq!(
        fs::read_to_string(out.join("ecdf-volumes.csv")).unwrap(),
        "value,fraction\n"
    );

    let missing = run(&[
        "analyze",
        "--traces",
        &dir.path().join("nope").to_string_lossy(),
        "--mode",
        "ecdf-rewards",
        "--out-dir",
        &out.to_string_lossy(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
    fs::write(traces.join("episode-99.csv"), "garbage\n1,2\n").unwrap();
    let malformed = run(&[
        "analyze",
        "--traces",
        &traces.to_string_lossy(),
        "--mode",
        "ecdf-rewards",
        "--out-dir",
        &out.to_string_lossy(),
    ]);
    assert_eq!(malformed.status.code(), Some(2));
}

#[test]
fn benchmark_table() {
    let dir = TempDir::new().unwrap();
    let args = [
        "benchmark",
        "--grid",
        "5,2,120",
        "--grid",
        "5,5,60",
        "--episodes",
        "15",
        "--out-dir",
        &dir.path().to_string_lossy(),
    ];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let table = stdout(&first);
    assert_eq!(table.lines().count(), 3);
    let again = run(&args);
    assert_eq!(stdout(&again), table);

    let csv = fs::read_to_string(dir.path().join("benchmark.csv")).unwrap();
    let mean = |policy: &str| -> f64 {
        csv.lines()
            .find(|l| l.starts_with("5,2,120,") && l.contains(policy))
            .unwrap()
            .split(',')
            .nth(4)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(mean("rule-based") > mean("random"));
}
