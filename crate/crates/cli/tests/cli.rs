use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use darboux_cli::config::Config;
use darboux_cli::portrait::portrait;
use darboux_cli::report::{analyze, Input};
use darboux_core::rational::{frac, int};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("darboux-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_family_member() {
    let out = run(&["analyze", "--p", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], "1.0.0");
    assert_eq!(v["input"]["parameter"], "1");
    assert_eq!(v["finite_equilibria"].as_array().unwrap().len(), 1);
    assert_eq!(v["equator_equilibria"].as_array().unwrap().len(), 3);
    assert_eq!(v["darboux"]["rational"], true);
    assert_eq!(v["conservation"]["pass"], true);
    assert!(v["gamma"].is_null());
    assert_eq!(v["config_hash"], Config::default().hash());
}

#[test]
fn negative_and_fractional_parameters() {
    let out = run(&["analyze", "--p", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["finite_equilibria"].as_array().unwrap().len(), 5);
    let out = run(&["analyze", "--p", "-3/2", "--maxdeg", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["input"]["parameter"], "-3/2");
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("darboux-cli-out-{}.json", std::process::id()));
    let out = run(&["analyze", "--p", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, run(&["analyze", "--p", "2"]).stdout);
}

#[test]
fn system_file_input() {
    let fam = scratch(
        "fam.json",
        r#"{"p_comp": "x - x^2*y + a*x*y^2 + y^3", "q_comp": "y + a*y^3", "params": {"a": "1/2"}}"#,
    );
    let out = run(&["analyze", "--system", fam.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let by_file = json(&out);
    let by_p = json(&run(&["analyze", "--p", "1/2"]));
    assert_eq!(by_file["finite_equilibria"], by_p["finite_equilibria"]);
    assert_eq!(by_file["equator_equilibria"], by_p["equator_equilibria"]);
    assert_eq!(by_file["darboux"], by_p["darboux"]);
    assert!(by_file["input"]["parameter"].is_null());
}

#[test]
fn incomplete_analysis_exits_two() {
    // the whole equator is singular and P, Q share a factor
    let deg = scratch("deg.json", r#"{"p_comp": "x + x^3 + x*y^2", "q_comp": "y + x^2*y + y^3"}"#);
    let out = run(&["analyze", "--system", deg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    let stages: Vec<&str> = v["issues"].as_array().unwrap().iter().map(|i| i["stage"].as_str().unwrap()).collect();
    assert!(stages.contains(&"equator") && stages.contains(&"finite"), "{stages:?}");
    // a quadratic system is outside the chart formulas
    let quad = scratch("quad.json", r#"{"p_comp": "x + x^2", "q_comp": "y"}"#);
    assert_eq!(run(&["analyze", "--system", quad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    let bad = scratch("bad.json", r#"{"p_comp": "x +", "q_comp": "y"}"#);
    let unknown = scratch("unknown.toml", "[probe]\nwhatever = 1\n");
    let cases: [&[&str]; 8] = [
        &["analyze"],
        &["analyze", "--p", "abc"],
        &["analyze", "--p", "1", "--maxdeg", "3"],
        &["analyze", "--system", bad.to_str().unwrap()],
        &["analyze", "--system", "/nonexistent/system.json"],
        &["analyze", "--p", "1", "--config", unknown.to_str().unwrap()],
        &["frobnicate"],
        &["gamma-probe", "--maxdeg", "1", "--count", "2"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_changes_the_hash() {
    let cfg = scratch("seed.toml", "[conservation]\nseed = 11\n");
    let v = json(&run(&["analyze", "--p", "1", "--config", cfg.to_str().unwrap()]));
    let want = Config::from_toml("[conservation]\nseed = 11\n").unwrap().hash();
    assert_eq!(v["config_hash"], want.as_str());
    assert_ne!(want, Config::default().hash());
}

#[test]
fn gamma_probe_and_control() {
    let out = run(&["gamma-probe"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["curve"], "gamma");
    assert_eq!(v["result"]["points"], 200);
    assert_eq!(v["result"]["pass"], true);
    let out = run(&["gamma-probe", "--control", "algebraic", "--maxdeg", "4"]);
    let c = json(&out);
    assert_eq!(c["result"]["curve"], "algebraic");
    assert_eq!(c["result"]["pass"], true);
    assert!(c["result"]["statistic"].as_f64().unwrap() < 1e-10);
    assert!(v["result"]["statistic"].as_f64().unwrap() > 1e6 * c["result"]["statistic"].as_f64().unwrap());
}

#[test]
fn analyze_at_zero_carries_the_gamma_section() {
    let v = json(&run(&["analyze", "--p", "0"]));
    let g = &v["gamma"];
    assert_eq!(g["probe"]["pass"], true);
    assert_eq!(g["control"]["pass"], true);
    assert!(g["separation"].as_f64().unwrap() > 1e6);
    assert!(g["separatrix_deviation"].as_f64().unwrap() < 1e-4);
    assert_eq!(v["darboux"]["rational"], false);
}

#[test]
fn portrait_draws_the_reported_inventory() {
    let cfg = Config::default();
    for p in [int(1), int(-1), int(0), frac(1, 2)] {
        let d = portrait(&Input::Family(p.clone()), &cfg);
        let report = analyze(&Input::Family(p.clone()), &cfg);
        assert_eq!(d.report, report);
        let listed: Vec<(String, [String; 2], String)> = report
            .finite_equilibria
            .iter()
            .chain(report.equator_equilibria.iter())
            .flatten()
            .map(|e| (e.context.clone(), [e.point.x.clone(), e.point.y.clone()], e.tag.clone()))
            .collect();
        let drawn: Vec<_> = d.markers.iter().map(|m| (m.context.clone(), m.point.clone(), m.tag.clone())).collect();
        assert_eq!(drawn, listed, "p = {p}");
        // finite points once, equator points at both antipodes
        let groups = d.svg.matches(r#"<g class="eq""#).count();
        let n_eq = report.equator_equilibria.as_ref().unwrap().len();
        assert_eq!(groups, report.finite_equilibria.as_ref().unwrap().len() + 2 * n_eq, "p = {p}");
        // the degenerate point carries its sector counts
        assert_eq!(d.svg.matches("data-sectors=\"nodal=2 saddle=2 elliptic=0\"").count(), 2, "p = {p}");
    }
}

#[test]
fn portrait_cli_writes_svg() {
    let out = run(&["portrait", "--p", "1", "--grid", "2", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("<title>p = 1</title>"));
    assert!(svg.contains("class=\"separatrix\""));
    let other = run(&["portrait", "--p", "1", "--grid", "2", "--seed", "4"]).stdout;
    assert_ne!(svg.as_bytes(), &other[..]);
}
