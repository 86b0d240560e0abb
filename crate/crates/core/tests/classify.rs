use std::process::{Command, Output};

use crcodes::classify::{classify, extend, seed_pair, ClassifyOptions, Params, Side};
use crcodes::constructions::construct_code_d;
use crcodes::io::write_code;
use serde_json::Value;

fn params(q: &str, n: usize, d: usize) -> Params {
    Params::new(q.parse().unwrap(), n, d).unwrap()
}

#[test]
fn n13_first_stages_and_checkpoint() {
    let p = params("2,11,0;3,6,4;0,6,7", 13, 1);
    let dir = tempfile::tempdir().unwrap();
    let opts = ClassifyOptions { checkpoint_dir: Some(dir.path().to_path_buf()), max_stages: Some(2), ..ClassifyOptions::default() };
    let first = classify(&p, &[(2, 1), (1, 2)], &opts).unwrap();
    assert_eq!(first.report.counts(), vec![68, 77]);
    assert!(first.report.stages.iter().all(|s| s.double_count_balances()));
    assert_eq!(first.report.final_classes, None);

    let resumed = classify(&p, &[(2, 1), (1, 2)], &ClassifyOptions { resume: true, ..opts }).unwrap();
    assert_eq!(resumed.report.counts(), vec![68, 77]);
    assert!(resumed.report.resumed_after.is_some());
}

#[test]
fn growing_past_length_is_a_fixed_point() {
    let p = params("1,5;3,3", 6, 0);
    let mut pair = seed_pair(&p);
    while pair.r0 < 6 {
        pair = extend(&p, &pair, Side::R0).unwrap().into_iter().next().expect("the unique partition extends");
    }
    assert_eq!(extend(&p, &pair, Side::R0).unwrap(), vec![pair]);
}

#[test]
fn radius_two_needs_both_sides_close() {
    let p = params("2,10,0;3,4,5;0,6,6", 12, 0);
    assert!(classify(&p, &[(3, 1)], &ClassifyOptions::default()).is_err());
    assert!(extend(&params("1,5;3,3", 6, 0), &seed_pair(&params("1,5;3,3", 6, 0)), Side::R2).is_err());
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crcodes")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn cli_verifies_code_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.txt");
    std::fs::write(&d, write_code(&construct_code_d().unwrap())).unwrap();
    let out = cli(&["verify", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["cr"]["array"], serde_json::json!({"b": [9, 6, 1], "c": [1, 6, 13]}));
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);

    let rep = dir.path().join("rep.txt");
    std::fs::write(&rep, "3 2\n000\n111\n").unwrap();
    let v = json(&cli(&["verify", rep.to_str().unwrap()]));
    assert_eq!(v["result"]["cr"]["array"], serde_json::json!({"b": [3], "c": [1]}));
    assert_eq!(v["result"]["cr"]["quotient"]["entries"], serde_json::json!([[0, 3], [1, 2]]));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "4 2\n0000\n1000\n0110\n").unwrap();
    let v = json(&cli(&["verify", bad.to_str().unwrap()]));
    assert_eq!(v["result"]["cr"]["verdict"], "not_cr");
    assert!(v["result"]["cr"]["witness"]["vertex"].is_string());
}

#[test]
fn cli_classifies_and_reports_stably() {
    let args = ["classify", "--array", "5;3", "--n", "6", "--d", "0"];
    let a = cli(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["result"]["final_classes"], 1);
    assert_eq!(a.stdout, cli(&args).stdout);
}

#[test]
fn cli_exit_codes() {
    assert_eq!(cli(&["classify", "--quotient", "2,5;4,3", "--n", "7"]).status.code(), Some(2));
    assert_eq!(cli(&["verify", "/nonexistent/code.txt"]).status.code(), Some(4));
    assert_eq!(cli(&["classify", "--array", "5;3", "--n", "6", "--schedule", "2;3"]).status.code(), Some(4));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    let budget = cli(&["classify", "--array", "10,5;3,6", "--n", "12", "--budget-solutions", "1000"]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(json(&budget)["status"], "budget-exceeded");
}

#[test]
fn budget_interrupts_a_single_parent_stage() {
    let p = params("2,10,0;4,5,3;0,7,5", 12, 0);
    let opts = ClassifyOptions { raw_budget: Some(1000), ..ClassifyOptions::default() };
    assert!(matches!(classify(&p, &[(2, 1)], &opts), Err(crcodes::Error::Budget(_))));
}
