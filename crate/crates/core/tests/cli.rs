use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rational-agent"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn transit_data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/transit_trials.csv")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn design_numbers(v: &Value) -> Vec<f64> {
    let d = &v["designs"][0];
    let mut out = vec![
        d["baseline"].as_f64().unwrap(),
        d["benchmark"].as_f64().unwrap(),
        d["value_of_information"].as_f64().unwrap(),
    ];
    for s in d["strategies"].as_array().unwrap() {
        out.push(s["visualization_optimal"].as_f64().unwrap());
    }
    out
}

#[test]
fn pre_weather_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("pre.json");
    let out = run(&["pre", "--case", "weather", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("R∅ baseline"));
    let v = read_json(&out_path);
    assert_eq!(v["command"], "pre");
    assert!((v["designs"][0]["baseline"].as_f64().unwrap() + 7.96).abs() < 0.005);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 2, "case": {"name": "weather"}}"#).unwrap();
    let missing = dir.path().join("missing.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["pre", "--case", "moon"],
        vec!["pre", "--config", bad.to_str().unwrap()],
        vec!["pre", "--case", "fernandes2018"],
        vec!["pre", "--case", "weather", "--scenario", "2"],
        vec!["post", "--case", "weather", "--trials", missing.to_str().unwrap()],
        vec!["post", "--case", "weather"],
        vec!["simulate", "--case", "weather", "--agent", "psychic"],
        vec!["simulate", "--case", "weather", "--strategy", "pie"],
        vec!["pre", "--case", "weather", "--grid-step", "0.7"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn bad_trial_rows_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let trials = dir.path().join("t.csv");
    std::fs::write(
        &trials,
        "trial_id,strategy,signal,state,response_kind,response\n\
         a,ci,2,freezing,action,salt\n\
         b,ci,9,freezing,action,salt\n\
         c,ci,2,slush,action,salt\n",
    )
    .unwrap();
    let out = run(&["post", "--case", "weather", "--trials", trials.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains('b') && err.contains("slush"), "{err}");
}

#[test]
fn exported_config_reproduces_pre() {
    let dir = tempfile::tempdir().unwrap();
    for case in ["weather", "kale2020"] {
        let cfg = dir.path().join(format!("{case}.json"));
        let direct = dir.path().join(format!("{case}-direct.json"));
        let via = dir.path().join(format!("{case}-config.json"));
        assert_eq!(code(&run(&["export", "--case", case, "--out", cfg.to_str().unwrap()])), 0);
        assert_eq!(code(&run(&["pre", "--case", case, "--out", direct.to_str().unwrap()])), 0);
        assert_eq!(code(&run(&["pre", "--config", cfg.to_str().unwrap(), "--out", via.to_str().unwrap()])), 0);
        let (a, b) = (design_numbers(&read_json(&direct)), design_numbers(&read_json(&via)));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9, "{case}: {x} vs {y}");
        }
    }
}

#[test]
fn case_config_with_relative_distributions() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(transit_data(), dir.path().join("trials.csv")).unwrap();
    let cfg = dir.path().join("transit.json");
    std::fs::write(
        &cfg,
        r#"{"schema_version": 1,
            "case": {"name": "fernandes2018", "scenario": 2, "distributions": "trials.csv"},
            "options": {"grid_step": 0.5}}"#,
    )
    .unwrap();
    let out_path = dir.path().join("pre.json");
    let out = run(&["pre", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&out_path);
    assert_eq!(v["designs"].as_array().unwrap().len(), 1);
    let d = &v["designs"][0];
    assert!(d["value_of_information"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_then_post() {
    let dir = tempfile::tempdir().unwrap();
    let trials = dir.path().join("trials.csv");
    let post = dir.path().join("post.json");
    let out = run(&[
        "simulate", "--case", "weather", "--agent", "rational", "--strategy", "ci", "--n", "20000", "--seed", "3",
        "--out", trials.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&trials).unwrap();
    assert!(text.starts_with("trial_id,strategy,signal,state,response_kind,response\n"));
    assert_eq!(text.lines().count(), 20001);
    let out = run(&["post", "--case", "weather", "--trials", trials.to_str().unwrap(), "--out", post.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&post);
    let row = &v["rows"][0];
    assert_eq!(row["strategy"], "ci");
    assert_eq!(row["optimization_loss"].as_f64().unwrap(), 0.0);
    assert!(row["belief_loss"].as_f64().unwrap().abs() < 0.1);
}

#[test]
fn belief_reports_post_with_bins() {
    let dir = tempfile::tempdir().unwrap();
    let trials = dir.path().join("reports.csv");
    let out = run(&[
        "simulate", "--case", "kale2020", "--task", "belief", "--agent", "noisy:k=0.5", "--n", "2000",
        "--seed", "5", "--out", trials.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "post", "--case", "kale2020", "--trials", trials.to_str().unwrap(), "--bin-width", "0.05",
        "--smoothing-alpha", "0.5",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pooled"), "{stdout}");
}

#[test]
fn transit_simulation_uses_supplied_distributions() {
    let dists = transit_data();
    let out = run(&[
        "simulate", "--case", "fernandes2018", "--dists", dists.to_str().unwrap(), "--scenario", "1",
        "--strategy", "full", "--n", "50", "--seed", "1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 51);
}
