use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stdout);
    let end = text.rfind('}').expect("json object on stdout");
    serde_json::from_str(&text[..=end]).expect("valid json")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn list_games_names_both_builtins() {
    let o = nes(&["list-games"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("quadratic") && text.contains("fishwar"));
}

#[test]
fn equilibria_of_the_quadratic_game_match_closed_form() {
    let o = nes(&["equilibria", "--game", "quadratic"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["schema"], "nes/1");
    let eq = v["equilibria"].as_array().unwrap();
    let find = |k: &str| eq.iter().find(|e| e["kind"] == k).unwrap();
    let n = find("nash");
    assert!((n["x1"].as_f64().unwrap() - 0.6).abs() < 1e-10);
    assert!((n["x2"].as_f64().unwrap() + 0.3).abs() < 1e-10);
    let s = find("stackelberg");
    assert!((s["x1"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
    assert!((s["x2"].as_f64().unwrap() + 5.0 / 6.0).abs() < 1e-10);
}

#[test]
fn equilibria_of_fish_war_match_reference_values() {
    let o = nes(&["equilibria", "--game", "fishwar"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let eq = v["equilibria"].as_array().unwrap();
    let find = |k: &str| eq.iter().find(|e| e["kind"] == k).unwrap();
    let n = find("nash");
    assert!((n["x1"].as_f64().unwrap() - 0.3).abs() < 1e-3);
    assert!((n["x2"].as_f64().unwrap() - 0.9).abs() < 1e-3);
    let s = find("stackelberg");
    assert!((s["x1"].as_f64().unwrap() - 1.19426).abs() < 1e-4);
    assert!((s["x2"].as_f64().unwrap() - 0.01896).abs() < 1e-4);
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(nes(&["simulate", "--game", "nosuchgame"]).status.code(), Some(2));
    assert_eq!(nes(&["simulate", "--mode", "custom", "--alpha1", "0.01"]).status.code(), Some(2));
    assert_eq!(nes(&["sweep", "--probe", "omega1", "--values", "100,400"]).status.code(), Some(2));
    assert_eq!(nes(&["simulate", "--t-end", "0"]).status.code(), Some(2));
    assert_eq!(nes(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nes(&["simulate", "--dt", "1e-3", "--auto-dt", "16"]).status.code(), Some(2));
}

#[test]
fn short_simulation_is_deterministic_and_writes_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = nes(&["simulate", "--game", "quadratic", "--t-end", "2", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["trajectory.csv", "summary.json", "phase.svg", "time.svg"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f} differs between runs");
    }
    let csv = read(&a.path().join("trajectory.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,x1,x2");
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 0.0, 0.0]);
    assert!(csv.lines().count() <= 20_001);

    let summary: Value = serde_json::from_str(&read(&a.path().join("summary.json"))).unwrap();
    assert_eq!(summary["schema"], "nes/1");
    assert_eq!(summary["complete"], true);
    assert!(read(&a.path().join("phase.svg")).starts_with("<svg"));
}

#[test]
fn comparing_a_level_with_itself_gives_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = nes(&[
        "compare",
        "--pair",
        "partial:partial",
        "--t-end",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["sup_distance"].as_f64().unwrap(), 0.0);
    assert!(dir.path().join("error.csv").exists());
}

#[test]
fn design_reports_hierarchy_and_thresholds() {
    let o = nes(&["design", "--upsilon", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout).to_lowercase();
    assert!(text.contains("epsilon"));
    assert!(text.contains("omega1"));
}

#[test]
fn strict_boundary_stops_fish_war_stackelberg_with_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = nes(&[
        "simulate",
        "--game",
        "fishwar",
        "--mode",
        "stackelberg",
        "--t-end",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    let summary: Value = serde_json::from_str(&read(&dir.path().join("summary.json"))).unwrap();
    assert_eq!(summary["complete"], false);
    let t = summary["violation"]["t"].as_f64().unwrap();
    assert!(t > 0.0 && t < 20.0);
    assert!(read(&dir.path().join("trajectory.csv")).lines().count() > 2);
}

#[test]
fn sweep_writes_table_and_fitted_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = nes(&[
        "sweep",
        "--probe",
        "omega1",
        "--values",
        "100,400,1600",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let slope = v["slope"].as_f64().unwrap();
    assert!((-0.75..=-0.25).contains(&slope), "slope {slope}");
    let csv = read(&dir.path().join("sweep.csv"));
    assert_eq!(csv.lines().next().unwrap(), "param_value,sup_error");
    assert_eq!(csv.lines().count(), 4);
}
