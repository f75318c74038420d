use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grouptest"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_lemmas_passes_on_supported_groups() {
    for group in ["Z12", "D4", "Z1", "Q8"] {
        let v = json(&[
            "verify-lemmas",
            "--group",
            group,
            "--trials",
            "10",
            "--seed",
            "7",
        ]);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["passed"], true, "{group}");
        assert_eq!(v["config"]["seed"], 7);
        for check in v["checks"].as_array().unwrap() {
            assert_eq!(check["passed"], true, "{group}: {check}");
        }
    }
}

#[test]
fn period_reports_exact_query_counts() {
    let v = json(&[
        "period",
        "--group",
        "Z16",
        "--instance",
        "far-from-lp",
        "--delta",
        "0.1",
        "--trials",
        "4",
    ]);
    assert_eq!(v["summary"]["N"], 160);
    assert_eq!(v["summary"]["mean_queries"], 160.0);
    for verdict in v["verdicts"].as_array().unwrap() {
        assert_eq!(verdict["queries_used"], 160);
        assert_eq!(verdict["samples"].as_array().unwrap().len(), 160);
    }
    assert_eq!(v["distance"]["exact"], "1/2");
}

#[test]
fn periodic_instance_is_certified_and_always_accepted() {
    let v = json(&[
        "period",
        "--group",
        "Z8",
        "--instance",
        "periodic",
        "--H",
        "gens=4",
        "--trials",
        "30",
        "--seed",
        "5",
    ]);
    assert_eq!(v["completeness_certificate"], true);
    assert_eq!(v["summary"]["accept_rate"], 1.0);
    assert_eq!(v["distance"]["exact"], "0");
}

#[test]
fn summary_matches_verdict_stream() {
    let v = json(&[
        "period-general",
        "--group",
        "D4",
        "--instance",
        "far-from-lp",
        "--distance",
        "0.25",
        "--trials",
        "40",
        "--seed",
        "2",
    ]);
    let accepted = v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|x| x["accepted"] == true)
        .count();
    assert_eq!(v["summary"]["accepted"], accepted);
    assert_eq!(v["summary"]["accept_rate"], accepted as f64 / 40.0);
}

#[test]
fn ccr_examples() {
    let v = json(&[
        "ccr",
        "--group",
        "Z8",
        "--instance",
        "hidden-translation",
        "--u",
        "4",
        "--k",
        "2",
        "--t",
        "1",
        "--trials",
        "30",
    ]);
    assert_eq!(v["summary"]["accept_rate"], 1.0);
    assert_eq!(v["completeness_certificate"], true);
    let v = json(&[
        "ccr",
        "--group",
        "Z16",
        "--instance",
        "disjoint-range",
        "--k",
        "4",
        "--t",
        "1",
        "--delta",
        "0.5",
        "--trials",
        "3",
    ]);
    assert_eq!(v["summary"]["N"], 64);
    assert_eq!(v["distance"]["exact"], "1/2");
}

#[test]
fn custom_tables_and_instance_files() {
    let v = json(&[
        "period", "--group", "Z4", "--table", "3,5,3,5", "--K", "gens=", "--trials", "5",
    ]);
    assert_eq!(v["instance"]["kind"], "custom-table");
    assert_eq!(v["summary"]["accept_rate"], 1.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    let p = path.to_str().unwrap();
    let out = run(&[
        "gen-instance",
        "--group",
        "Z2xZ4",
        "--instance",
        "D1",
        "--seed",
        "9",
        "--out",
        p,
    ]);
    assert!(out.status.success());
    let inst: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(inst["kind"], "D1");
    assert_eq!(inst["group"], "Z2xZ4");
    assert!(inst["params"]["translation"].is_string());
    let v = json(&[
        "ccr",
        "--instance",
        p,
        "--k",
        "8",
        "--t",
        "1",
        "--trials",
        "5",
    ]);
    assert_eq!(v["summary"]["accept_rate"], 1.0);
}

#[test]
fn csv_output_has_one_row_per_trial() {
    let out = run(&[
        "period", "--group", "Z8", "--trials", "7", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[0].starts_with("command,group,master_seed,trial"));
}

#[test]
fn lowerbound_without_queries_has_no_advantage() {
    let v = json(&[
        "lowerbound",
        "--group",
        "Z256",
        "--q",
        "0",
        "--trials",
        "100",
    ]);
    let r = &v["reports"][0];
    assert_eq!(r["advantage"], 0.0);
    assert_eq!(r["q"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["verify-lemmas", "--group", "Z0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["period", "--group", "D4", "--trials", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["period", "--group", "Z8", "--delta", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["ccr", "--group", "Z8", "--k", "4", "--t", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let budget = run(&[
        "ccr",
        "--group",
        "Z16",
        "--instance",
        "disjoint-range",
        "--k",
        "16",
        "--t",
        "4",
        "--budget",
        "3",
    ]);
    assert_eq!(budget.status.code(), Some(3));
}
