//! The `plap` binary: exit codes, output formats and configuration.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn plap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(args)
        .env_remove("PLAP_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("plap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Drops the wall-clock field so reports can be compared.
fn stable(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("duration_ms");
    v
}

#[test]
fn invalid_config_exits_one_without_output() {
    for args in [
        vec!["sigma", "--p", "2", "--samples", "0"],
        vec!["sigma", "--p", "1"],
        vec!["capacity", "--r", "2", "--R", "1"],
        vec!["dirac", "--radii", "0.1,0.2"],
        vec!["dirac", "--radii", "1.5,0.5", "--support", "1"],
        vec!["verify-fundamental", "--x0", "0,0"],
        vec!["verify-fundamental", "--c", "0"],
        vec!["sigma", "--format", "xml"],
        vec!["no-such-command"],
    ] {
        let out = plap(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn passing_run_exits_zero_with_schema() {
    let out = plap(&["verify-fundamental", "--k", "2", "--p", "3", "--points", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "plap-report/1");
    assert_eq!(v["command"], "verify-fundamental");
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["k"], 2.0);
    assert!(v["duration_ms"].is_u64());
    assert!(v["version"].is_string());
    for r in v["records"].as_array().unwrap() {
        assert!(r.get("exact").is_some() || r.get("stderr").is_some(), "{r}");
    }
    for c in v["checks"].as_array().unwrap() {
        let (val, reference, bound) = (
            c["value"].as_f64().unwrap(),
            c["reference"].as_f64().unwrap(),
            c["bound"].as_f64().unwrap(),
        );
        assert_eq!(c["pass"].as_bool().unwrap(), (val - reference).abs() <= bound);
    }
}

#[test]
fn failing_check_exits_two() {
    // an absurdly tight tolerance turns sampling noise into a failure
    let out = plap(&["sigma", "--samples", "20000", "--n-sigma", "1e-9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let args = ["ahlfors", "--samples", "40000", "--seed", "9"];
    let one = plap(&[&args[..], &["--threads", "1"]].concat());
    let four = plap(&[&args[..], &["--threads", "4"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(args)
        .env("PLAP_THREADS", "3")
        .output()
        .unwrap();
    let a = stable(json(&one));
    assert_eq!(a, stable(json(&four)));
    assert_eq!(a, stable(json(&env)));
}

#[test]
fn csv_format() {
    let out = plap(&["capacity", "--method", "closed-form", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,name,value,stderr,reference,bound,pass"));
    let row = lines.next().unwrap();
    assert!(
        row.starts_with("record,capacity_closed_form,1.0666666666666666e1,exact"),
        "{row}"
    );
}

#[test]
fn config_file_and_out_path() {
    let cfg = scratch("run.cfg");
    let out_path = scratch("report.json");
    std::fs::write(
        &cfg,
        format!(
            "# capacity run\nk = 2\np = 3\nmethod = radial\nknots = 64\nout = {}\n",
            out_path.display()
        ),
    )
    .unwrap();
    let out = plap(&["capacity", "--config", cfg.to_str().unwrap(), "--p", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["config"]["k"], 2.0);
    assert_eq!(v["config"]["p"], 8.0);
    assert_eq!(v["config"]["knots"], 64);
    let names: Vec<&str> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"capacity_radial") && !names.contains(&"capacity_mc"));
}

#[test]
fn bracket_report_lists_printed_values() {
    let out = plap(&["bracket-report", "--k", "2", "--points", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rec = |name: &str| {
        v["records"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["name"] == name)
            .map(|r| r["value"].as_f64().unwrap())
    };
    assert!(rec("bracket[1,2]").is_some() && rec("printed[1,2]").is_some());
    assert!(rec("max_abs_printed_discrepancy").unwrap() > 1e-3);
    // no k = 1 checks for k = 2
    assert_eq!(v["checks"].as_array().unwrap().len(), 1);
}

#[test]
fn help_exits_zero() {
    assert_eq!(plap(&["--help"]).status.code(), Some(0));
}
