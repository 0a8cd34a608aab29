use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn linkforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkforge"))
        .args(args)
        .env_remove("LINKFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

/// CSV rows (comment lines skipped) as header-keyed maps.
fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).deserialize().map(|r| r.unwrap()).collect()
}

const EXAMPLE: &str = "6,6.5,6.2,5.8";

#[test]
fn critical_points_of_the_example_linkage() {
    let out = linkforge(&["quad", "critical", "--sides", EXAMPLE, "--t", "2", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let located: Vec<(f64, f64)> = rows.iter().map(|r| (r["x"].parse().unwrap(), r["y"].parse().unwrap())).collect();
    for (x, y) in [(9.59, 7.60), (0.50, 3.24), (1.24, 0.58), (4.11, 0.30)] {
        assert!(located.iter().any(|p| (p.0 - x).abs() <= 0.01 && (p.1 - y).abs() <= 0.01), "{x}, {y}: {located:?}");
    }
    let types: Vec<&str> = rows.iter().map(|r| r["type"].as_str()).collect();
    assert_eq!(types, ["min", "max", "min", "max"]);
}

#[test]
fn example_convention_has_two_critical_points() {
    let out = linkforge(&["quad", "critical", "--sides", EXAMPLE, "--t", "2", "--convention", "example1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["count"], 2);
}

#[test]
fn zero_charge_gives_two_rows() {
    let out = linkforge(&["quad", "critical", "--sides", EXAMPLE, "--t", "0", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    assert_eq!(csv_rows(&String::from_utf8(out.stdout).unwrap()).len(), 2);
}

#[test]
fn malformed_input_exits_2() {
    assert_eq!(code(&linkforge(&["quad", "critical", "--sides", "6,6.5", "--t", "2"])), 2);
    assert_eq!(code(&linkforge(&["quad", "critical", "--sides", "10,1,1,1", "--t", "2"])), 2);
    assert_eq!(code(&linkforge(&["quad", "critical", "--sides", "a,b,c,d", "--t", "2"])), 2);
    assert_eq!(code(&linkforge(&["quad", "critical", "--sides", EXAMPLE, "--t", "2", "--kind", "alpha:0"])), 2);
    assert_eq!(code(&linkforge(&[])), 2);
}

#[test]
fn stabilize_recovers_the_charge() {
    let crit = json(&linkforge(&["quad", "critical", "--sides", EXAMPLE, "--t", "2"]));
    let global = crit["result"]["critical_points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["is_global_min"] == true)
        .unwrap()
        .clone();
    let target = format!("{},{}", global["x"], global["y"]);
    let out = linkforge(&["quad", "stabilize", "--sides", EXAMPLE, "--target", &target]);
    assert_eq!(code(&out), 0);
    let r = &json(&out)["result"];
    let t = r["t"]["finite"].as_f64().unwrap();
    assert!((t - 2.0).abs() < 1e-8, "{t}");
    assert!(r["check_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn aligned_targets_report_boundary_values() {
    // x = a + b = 7 folds p1 p2 p3; y = b + c = 9 folds p2 p3 p4
    let x_max = linkforge(&["quad", "stabilize", "--sides", "3,4,5,6.5", "--target", "7,5.5", "--tolerance", "1"]);
    assert_eq!(code(&x_max), 0, "{}", String::from_utf8_lossy(&x_max.stderr));
    let r = json(&x_max);
    assert_eq!(r["result"]["boundary"], true);
    assert_eq!(r["result"]["t"], "infinite");

    // at t = 0 the minimum of 1/y is the folded configuration with y = 9
    let crit = json(&linkforge(&["quad", "critical", "--sides", "3,4,5,6.5", "--t", "0"]));
    let y_max = crit["result"]["critical_points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["is_global_min"] == true)
        .unwrap()
        .clone();
    assert!((y_max["y"].as_f64().unwrap() - 9.0).abs() < 1e-9);
    let x = y_max["x"].as_f64().unwrap();
    let out = linkforge(&["quad", "stabilize", "--sides", "3,4,5,6.5", "--target", &format!("{x},9"), "--tolerance", "1e-3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["t"]["finite"], 0.0);
}

#[test]
fn navigation_runs_converge() {
    let out = linkforge(&["quad", "navigate", "--sides", EXAMPLE, "--runs", "20", "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let runs = json(&out)["result"].as_array().unwrap().clone();
    assert_eq!(runs.len(), 20);
    for r in &runs {
        assert_eq!(r["converged"], true);
        assert!(r["target_error"].as_f64().unwrap() <= 1e-6);
    }
}

#[test]
fn navigation_from_the_target_stays_put() {
    let crit = json(&linkforge(&["quad", "critical", "--sides", EXAMPLE, "--t", "2"]));
    let points = crit["result"]["critical_points"].as_array().unwrap().clone();
    let global = points.iter().find(|p| p["is_global_min"] == true).unwrap();
    let local = points.iter().find(|p| p["morse_type"] == "minimum" && p["is_global_min"] == false).unwrap();
    let target = format!("{},{}", global["x"], global["y"]);
    let start = format!("{},{}", local["x"], local["y"]);

    let out = linkforge(&["quad", "navigate", "--sides", EXAMPLE, "--start", &target, "--target", &target]);
    assert_eq!(code(&out), 0);
    let run = &json(&out)["result"][0];
    assert!(run["target_error"].as_f64().unwrap() <= 1e-6);

    let out = linkforge(&["quad", "navigate", "--sides", EXAMPLE, "--start", &start, "--target", &target]);
    assert_eq!(code(&out), 0);
    let run = &json(&out)["result"][0];
    assert_eq!(run["converged"], true);
    assert_eq!(run["trace"]["stages"].as_array().unwrap().len(), 2);
}

#[test]
fn oval_trace_has_four_arcs_inside_the_box() {
    let out = linkforge(&["oval", "trace", "--sides", EXAMPLE]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("# linkforge"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 512);
    let header: Vec<&str> = text.lines().find(|l| !l.starts_with('#')).unwrap().split(',').collect();
    assert_eq!(header, ["phi", "w", "z", "x", "y", "sgn_Fx", "sgn_Fy", "region", "g_residual"]);
    let signs: Vec<String> = rows.iter().map(|r| format!("{}{}", r["sgn_Fx"], r["sgn_Fy"])).collect();
    let changes = (0..signs.len()).filter(|&i| signs[i] != signs[(i + 1) % signs.len()]).count();
    assert_eq!(changes, 4);
    for r in &rows {
        let (x, y): (f64, f64) = (r["x"].parse().unwrap(), r["y"].parse().unwrap());
        assert!(x <= 12.5 + 1e-9 && y <= 12.7 + 1e-9);
        assert!(r["g_residual"].parse::<f64>().unwrap() <= 1e-10);
    }
}

#[test]
fn pentagon_commands() {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let regular = format!("{phi},{phi}");
    let out = linkforge(&["pentagon", "stabilize", "--chart", &regular]);
    assert_eq!(code(&out), 0);
    let pair = &json(&out)["result"]["pair"];
    assert!((pair["s"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((pair["t"].as_f64().unwrap() - 1.0).abs() < 1e-8);

    let out = linkforge(&["pentagon", "stabilize", "--chart", "1.5,1.7"]);
    assert_eq!(code(&out), 0);
    let pair = json(&out)["result"]["pair"].clone();
    assert!(pair["certificate"].as_f64().unwrap() <= 1e-6);
    let (s, t) = (pair["s"].to_string(), pair["t"].to_string());
    assert_eq!(code(&linkforge(&["pentagon", "verify", "--chart", "1.5,1.7", "--s", &s, "--t", &t])), 0);
    assert_eq!(code(&linkforge(&["pentagon", "verify", "--chart", "1.5,1.7", "--s", "1", "--t", "1"])), 1);

    let out = linkforge(&["pentagon", "stabilize", "--chart", "2,1.5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not strictly convex"));
}

#[test]
fn pentagon_probe_finds_nothing_lower() {
    let out = linkforge(&["pentagon", "probe", "--chart", "1.5,1.7", "--seeds", "16", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["result"]["verdict"], "no_lower_found");
    assert_eq!(r["result"]["descents"].as_array().unwrap().len(), 16);
}

#[test]
fn example_reproduction_reports_the_table_conflict() {
    let out = linkforge(&["reproduce-example1"]);
    // the tabulated rows cannot all be matched under either convention
    assert_eq!(code(&out), 1);
    let r = json(&out);
    assert_eq!(r["spec"]["convention"], "example1");
    assert_eq!(r["result"]["pass"], false);
    assert_eq!(r["result"]["table_types_alternate"], false);
    assert!(r["result"]["energy_gap_example1_form"].as_f64().unwrap() <= 0.03);
    let conventions = r["result"]["conventions"].as_array().unwrap();
    let eq3 = conventions.iter().find(|c| c["convention"] == "eq3").unwrap();
    assert_eq!(eq3["count"], 4);
    assert!(eq3["location_error"].as_f64().unwrap() <= 0.01);

    let out = linkforge(&["reproduce-example1", "--convention", "eq3"]);
    assert_eq!(code(&out), 1);
    let rows = json(&out)["result"]["rows"].as_array().unwrap().clone();
    assert!(rows.iter().any(|r| r["de"].as_f64().unwrap().abs() > 0.03));

    let out = linkforge(&["reproduce-example1", "--convention", "eq3", "--samples", "64"]);
    let conventions = json(&out)["result"]["conventions"].as_array().unwrap().clone();
    assert_eq!(conventions.iter().find(|c| c["convention"] == "eq3").unwrap()["count"], 4);
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn payload(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

#[test]
fn census_writes_reproducible_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a/census");
    let b = dir.path().join("b/census");
    let out = linkforge(&["census", "--trials", "100", "--seed", "11", "--output", a.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let summary: Value = serde_json::from_str(&read(&a.with_extension("json"))).unwrap();
    assert_eq!(summary["seed"], 11);
    assert_eq!(summary["version"], env!("CARGO_PKG_VERSION"));
    assert!(summary["result"]["max_count"].as_u64().unwrap() <= 4);
    let rows = csv_rows(&read(&a.with_extension("csv")));
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r["types"].split(';').count() == r["count"].parse::<usize>().unwrap()));

    let out = Command::new(env!("CARGO_BIN_EXE_linkforge"))
        .args(["census", "--trials", "100", "--output", b.to_str().unwrap()])
        .env("LINKFORGE_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(payload(&read(&a.with_extension("csv"))), payload(&read(&b.with_extension("csv"))));
}

#[test]
fn spec_file_replaces_flags() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("run.json");
    std::fs::write(&spec, r#"{"command": "quad-critical", "sides": [6, 6.5, 6.2, 5.8], "t": 2, "seed": 4}"#).unwrap();
    let out = linkforge(&["--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["seed"], 4);
    assert_eq!(r["spec"]["samples"], 4096);
    assert_eq!(r["result"]["count"], 4);

    std::fs::write(&spec, r#"{"command": "quad-critical", "sidez": [1]}"#).unwrap();
    assert_eq!(code(&linkforge(&["--spec", spec.to_str().unwrap()])), 2);
    assert_eq!(code(&linkforge(&["--spec", "/nonexistent/run.json"])), 2);
}
