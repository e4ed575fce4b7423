use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bethe-potts")).args(args).output().expect("binary runs")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn json_of(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn free_boundary_gives_unit_ratios() {
    let out = run(&["recurse", "--theta", "2.3", "--theta1", "0.7", "--thetap", "1.6", "--depth", "12"]);
    assert!(out.status.success());
    for row in csv_rows(&out) {
        for k in [1, 2] {
            assert!((row[k].parse::<f64>().unwrap() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn constant_boundary_converges_to_ordered_root() {
    let out = run(&["recurse", "--theta", "3", "--theta1", "3", "--boundary", "e1", "--depth", "150"]);
    let rows = csv_rows(&out);
    let u: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!((u - 4.7749).abs() < 1e-4);
}

#[test]
fn unit_theta1_gives_no_ordering() {
    let out = run(&["recurse", "--theta", "3", "--theta1", "1", "--boundary", "e1", "--depth", "10"]);
    for row in csv_rows(&out) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn phase_diagram_column_at_zero() {
    let out = run(&["phase-diagram", "--grid", "0:0:1", "--grid", "0.05:1.6:32"]);
    assert!(out.status.success());
    let critical = 1.0 / 4f64.ln();
    let step = 1.55 / 31.0;
    let mut seen_no = false;
    for row in csv_rows(&out) {
        let t: f64 = row[1].parse().unwrap();
        let transition = row[4] == "true";
        if transition {
            assert!(!seen_no, "transition region is not a lower interval");
            assert!(t < critical + step);
        } else {
            seen_no = true;
            assert!(t > critical - step);
        }
        if t >= 1.0 / 2f64.ln() {
            assert!(!transition);
        }
    }
}

#[test]
fn phase_diagram_columns_are_lower_intervals() {
    let out = run(&["phase-diagram", "--grid", "0:4:9", "--grid", "0.1:2:20", "--threads", "1"]);
    let rows = csv_rows(&out);
    for column in rows.chunks(20) {
        let flags: Vec<bool> = column.iter().map(|r| r[4] == "true").collect();
        let first_false = flags.iter().position(|&f| !f).unwrap_or(flags.len());
        assert!(flags[first_false..].iter().all(|&f| !f));
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&["phase-diagram", "--grid", "0:3:7", "--grid", "0.2:1.5:9", "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn json_matches_published_schema() {
    let schema: Value =
        serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    let docs = [
        json_of(&["recurse", "--jp", "1", "--j1p", "1", "--beta", "1.2", "--boundary", "e2", "--depth", "4"]),
        json_of(&["recurse", "--theta", "2", "--theta1", "2", "--boundary", "e3", "--full", "--depth", "3"]),
        json_of(&["fixed-points", "--theta", "3", "--theta1", "3"]),
        json_of(&["phase-diagram", "--grid", "0:1:2", "--grid", "0.5:1:3"]),
        json_of(&["critical-curve", "--grid", "-2:2:5"]),
        json_of(&["ground-states", "--jp", "-3", "--j1p", "1", "--family", "quasi"]),
        json_of(&["free-energy", "--jp", "1.5", "--j1p", "1.5", "--grid", "0.5:2:4"]),
    ];
    for doc in &docs {
        assert!(compiled.is_valid(doc), "{doc}");
        let width = doc["columns"].as_array().unwrap().len();
        assert!(doc["rows"].as_array().unwrap().iter().all(|r| r.as_array().unwrap().len() == width));
    }
}

#[test]
fn ground_state_report() {
    let out = run(&["ground-states", "--jp", "1", "--j1p", "1", "--family", "ti"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[2] == "B1" && r[6] == "true"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["fixed-points", "--jp", "1", "--theta", "2"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["phase-diagram", "--grid", "1:0:3", "--grid", "0:1:2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let overflow = run(&["recurse", "--theta", "1e300", "--theta1", "1e300", "--thetap", "1e300", "--boundary", "e1"]);
    assert_eq!(overflow.status.code(), Some(2));
}

#[test]
fn verify_reports_each_check() {
    let out = run(&["verify", "--depth", "1"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 10);
    let all_pass = rows.iter().all(|r| r[2] == "true");
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 3 }));

    let faulty = run(&["verify", "--depth", "2", "--inject-fault"]);
    assert_eq!(faulty.status.code(), Some(3));
    assert_eq!(csv_rows(&faulty)[0][2], "false");
}
