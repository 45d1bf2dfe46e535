use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cpguide(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpguide"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

const LINE_SCENARIO: &str = r#"
[path]
kind = "line"
origin = [0.0, 0.0]
direction = [1.0, 0.0]
length = 60.0

[vehicle]
position = [0.0, 3.0]
heading_deg = 10.0

[guidance]
controller = "both"
optimize = false
gains = [1.0, 1.0]
"#;

#[test]
fn run_writes_trajectories_plot_data_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "line.toml", LINE_SCENARIO);
    let o = cpguide(&["run", "--config", &cfg, "--out", "out"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for name in [
        "trajectory_baseline.csv",
        "trajectory_proposed.csv",
        "trajectory_baseline_polyline.csv",
        "trajectory_proposed_polyline.csv",
        "path_polyline.csv",
        "summary.json",
        "summary.txt",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let csv = fs::read_to_string(out.join("trajectory_proposed.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,x,y,psi,a_cmd,cte,phase,k1,k2"));
    let steps = csv.lines().count() - 1;
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["runs"][1]["steps"], steps);
    assert!(stdout(&o).contains("improvement a_rms="));
}

#[test]
fn controller_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "line.toml", LINE_SCENARIO);
    let o = cpguide(
        &["run", "--config", &cfg, "--out", "out", "--controller", "baseline"],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(dir.path().join("out/trajectory_baseline.csv").is_file());
    assert!(!dir.path().join("out/trajectory_proposed.csv").exists());
    assert!(!stdout(&o).contains("improvement"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "line.toml",
        &LINE_SCENARIO.replace("optimize = false", "optimize = true"),
    );
    for out in ["a", "b"] {
        assert!(cpguide(&["run", "--config", &cfg, "--out", out], dir.path())
            .status
            .success());
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for n in names {
        let a = fs::read(dir.path().join("a").join(&n)).unwrap();
        let b = fs::read(dir.path().join("b").join(&n)).unwrap();
        assert!(a == b, "{n:?} differs");
    }
    let o = cpguide(&["compare", "a", "b"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("trajectory_proposed.csv: identical"));
}

#[test]
fn compare_reports_differences() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.toml", LINE_SCENARIO);
    let b = write(
        dir.path(),
        "b.toml",
        &LINE_SCENARIO.replace("gains = [1.0, 1.0]", "gains = [1.0, 3.0]"),
    );
    assert!(cpguide(&["run", "--config", &a, "--out", "a"], dir.path())
        .status
        .success());
    assert!(cpguide(&["run", "--config", &b, "--out", "b"], dir.path())
        .status
        .success());
    let o = cpguide(&["compare", "a", "b", "--out", "diff"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("trajectory_baseline.csv: identical"));
    assert!(text.contains("trajectory_proposed.csv: differs"));
    assert!(dir.path().join("diff/compare.txt").is_file());
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("typo.toml", "[vehicle]\nheadng_deg = 3.0\n"),
        ("syntax.toml", "[guidance\nl1 = 10\n"),
        ("negative.toml", "[guidance]\nl1 = -10.0\n"),
        ("empty_sweep.toml", "[sweep]\nheadings_deg = []\n"),
    ] {
        let cfg = write(dir.path(), name, text);
        let cmd = if name.starts_with("empty") { "sweep" } else { "run" };
        let o = cpguide(&[cmd, "--config", &cfg, "--out", "out"], dir.path());
        assert_eq!(
            o.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(!dir.path().join("out").exists(), "{name} left outputs");
    }
    let o = cpguide(&["run", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_geometry_exits_3_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "away.toml",
        "[path]\nkind = \"sinusoid\"\nx_range = [0.0, 150.0]\n[vehicle]\nposition = [0.0, -40.0]\nheading_deg = -90.0\n",
    );
    let o = cpguide(&["run", "--config", &cfg, "--out", "out"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/diagnostic.json")).unwrap()).unwrap();
    assert!(diag["error"].as_str().unwrap().contains("no feasible"));
    assert!(!dir.path().join("out/trajectory_baseline.csv").exists());
}

#[test]
fn single_heading_sweep_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "one.toml",
        "[vehicle]\nheading_deg = 39.118\n[sweep]\nheadings_deg = [39.118]\n",
    );
    let o = cpguide(
        &["--threads", "1", "sweep", "--config", &cfg, "--out", "sweep"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(cpguide(&["run", "--config", &cfg, "--out", "run"], dir.path())
        .status
        .success());

    let mut rows = csv::Reader::from_path(dir.path().join("sweep/sweep.csv")).unwrap();
    let headers = rows.headers().unwrap().clone();
    let records: Vec<_> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), 1);
    let col = |name: &str| {
        records[0][headers.iter().position(|h| h == name).unwrap()]
            .parse::<f64>()
            .unwrap()
    };

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("run/summary.json")).unwrap()).unwrap();
    let run = |k: usize, m: &str| summary["runs"][k]["close_range"][m].as_f64().unwrap();
    assert_eq!(col("baseline_d_rms"), run(0, "d_rms"));
    assert_eq!(col("proposed_d_rms"), run(1, "d_rms"));
    assert_eq!(col("proposed_a_max"), run(1, "a_peak"));
    assert_eq!(col("proposed_abs_a_max"), run(1, "a_max"));
    assert!(col("proposed_d_rms") < col("baseline_d_rms"));
    let table = fs::read_to_string(dir.path().join("sweep/sweep.txt")).unwrap();
    assert!(table.contains("a1 39.118"));
}

#[test]
fn oracle_is_deterministic_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let a = cpguide(&["oracle", "--seed", "5", "--out", "o"], dir.path());
    let b = cpguide(&["oracle", "--seed", "5"], dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).lines().skip(1).all(|l| l.starts_with("PASS")));
    assert!(dir.path().join("o/oracle.json").is_file());
}
