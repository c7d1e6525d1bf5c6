//! End-to-end checks of the binary: each subcommand, the exit-code
//! convention, and agreement with the corresponding library calls.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lgdda"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lgdda-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[track_caller]
fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap().trim().to_string()
}

#[track_caller]
fn assert_code(out: &Output, want: i32) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "stdout: {}\nstderr: {}",
        stdout_of(out),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn parse_echoes_canonical_form() {
    let out = run(&["parse", "p -> q"]);
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "~(p & ~q)");
}

#[test]
fn parse_reports_position_on_error() {
    let out = run(&["parse", "B{1,0} p"]);
    assert_code(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("offset"));
}

#[test]
fn mc_on_committee_model() {
    let model = data("committee.json");
    let model = model.to_str().unwrap();
    let out = run(&["mc", "--model", model, "--formula", "D{Ann Bob,0} in"]);
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "true");

    let out = run(&["mc", "--model", model, "--formula", "D{Ann Bob,1} in"]);
    assert_code(&out, 1);
    assert_eq!(stdout_of(&out), "false");

    let out = run(&["mc", "--model", model, "--formula", "D{Zoe,0} in"]);
    assert_code(&out, 2);
}

#[test]
fn sat_and_valid_exit_codes() {
    assert_code(&run(&["sat", "p & ~p"]), 1);
    assert_code(&run(&["sat", "B{1,1} p & B{1,1} ~p"]), 0);
    assert_code(&run(&["valid", "B{1,3} p -> B{1,1} p"]), 0);
    assert_code(&run(&["valid", "B{1,1} p -> B{1,3} p"]), 1);
}

#[test]
fn seed_order_flag_leaves_verdicts_alone() {
    for formula in ["D{1,1} p -> D{1 2,1} p", "~(B{1,2} p -> B{1,1} p)"] {
        let baseline = run(&["valid", formula]);
        for seed in ["1", "33", "777"] {
            let shuffled = run(&["valid", formula, "--seed-order", seed]);
            assert_eq!(baseline.status.code(), shuffled.status.code());
            assert_eq!(stdout_of(&baseline), stdout_of(&shuffled));
        }
    }
}

#[test]
fn max_depth_budget_is_exit_two() {
    let out = run(&["sat", "Dhat{1,0} Dhat{1,0} Dhat{1,0} p", "--max-depth", "1"]);
    assert_code(&out, 2);
}

#[test]
fn sat_json_matches_library_verdict() {
    let out = run(&["--json", "sat", "B{1,2} p & ~B{1,3} p", "--stats"]);
    assert_code(&out, 0);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["result"], "sat");
    let lib = lgdda::tableau::decide_formula(
        &lgdda::parse("B{1,2} p & ~B{1,3} p").unwrap(),
        lgdda::tableau::Mode::Sat,
        false,
        &lgdda::tableau::TableauConfig::default(),
    )
    .unwrap();
    assert_eq!(value["stats"]["nodes_visited"], lib.stats.nodes_visited);
}

#[test]
fn extracted_countermodel_round_trips_through_validate_and_mc() {
    let path = tmp("countermodel.json");
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "valid",
        "B{1,1} p -> D{1,0} q",
        "--extract-model",
        path_str,
    ]);
    assert_code(&out, 1);
    assert_eq!(stdout_of(&out), "invalid");

    let out = run(&["validate", "--in", path_str, "--as", "qngdm"]);
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "ok");

    // the countermodel satisfies the negated formula at its designated world
    let out = run(&[
        "mc",
        "--model",
        path_str,
        "--formula",
        "~(B{1,1} p -> D{1,0} q)",
    ]);
    assert_code(&out, 0);
}

#[test]
fn disagree_matches_library_and_paper_value() {
    let model = data("committee.json");
    let model_str = model.to_str().unwrap();
    let out = run(&["disagree", "--model", model_str, "--group", "Ann Bob Cath John"]);
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "2");

    let out = run(&["disagree", "--model", model_str, "--group", "Ann Bob"]);
    assert_eq!(stdout_of(&out), "0");

    // thin-adapter check against the library
    let text = std::fs::read_to_string(&model).unwrap();
    let m = lgdda::json::magbm_from_str(&text).unwrap();
    let group = lgdda::Group::new(["Ann", "Bob", "Cath", "John"].map(lgdda::Agent::new)).unwrap();
    assert_eq!(
        lgdda::semantics::disagreement_degree(&m, &group).to_string(),
        "2"
    );
}

#[test]
fn transform_chain_and_validate() {
    let committee = data("committee.json");
    let qngdm = tmp("committee_qngdm.json");
    let ngdm = tmp("committee_ngdm.json");
    let magbm = tmp("committee_magbm.json");
    let formula = "D{Ann Bob,0} in & disagree{Ann Bob Cath John,2}";

    let out = run(&[
        "transform",
        "--from",
        "magbm",
        "--to",
        "qngdm",
        "--in",
        committee.to_str().unwrap(),
        "--out",
        qngdm.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert_code(
        &run(&["validate", "--in", qngdm.to_str().unwrap(), "--as", "qngdm"]),
        0,
    );
    assert_code(
        &run(&["mc", "--model", qngdm.to_str().unwrap(), "--formula", formula]),
        0,
    );

    let out = run(&[
        "transform",
        "--from",
        "qngdm",
        "--to",
        "ngdm",
        "--in",
        qngdm.to_str().unwrap(),
        "--out",
        ngdm.to_str().unwrap(),
        "--formula",
        formula,
    ]);
    assert_code(&out, 0);
    assert_code(
        &run(&["validate", "--in", ngdm.to_str().unwrap(), "--as", "ngdm"]),
        0,
    );
    assert_code(
        &run(&["mc", "--model", ngdm.to_str().unwrap(), "--formula", formula]),
        0,
    );

    let out = run(&[
        "transform",
        "--from",
        "ngdm",
        "--to",
        "magbm",
        "--in",
        ngdm.to_str().unwrap(),
        "--out",
        magbm.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert_code(
        &run(&["mc", "--model", magbm.to_str().unwrap(), "--formula", formula]),
        0,
    );
}

#[test]
fn filtrate_shrinks_committee_model() {
    let committee = data("committee.json");
    let qngdm = tmp("filtrate_in.json");
    let filtered = tmp("filtrate_out.json");
    assert_code(
        &run(&[
            "transform",
            "--from",
            "magbm",
            "--to",
            "qngdm",
            "--in",
            committee.to_str().unwrap(),
            "--out",
            qngdm.to_str().unwrap(),
        ]),
        0,
    );
    let out = run(&[
        "filtrate",
        "--in",
        qngdm.to_str().unwrap(),
        "--formula",
        "D{Ann Bob,0} in",
        "--out",
        filtered.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    assert_code(
        &run(&["mc", "--model", filtered.to_str().unwrap(), "--formula", "D{Ann Bob,0} in"]),
        0,
    );
}

#[test]
fn validate_reports_violations_with_exit_one() {
    let out = run(&[
        "validate",
        "--in",
        data("qngdm_violation.json").to_str().unwrap(),
        "--as",
        "qngdm",
    ]);
    assert_code(&out, 1);
    assert!(stdout_of(&out).contains("partition-witness"));
}

#[test]
fn axioms_emits_parseable_valid_lines() {
    let path = tmp("axioms.txt");
    let out = run(&[
        "axioms",
        "--agents",
        "1",
        "--max-grade",
        "1",
        "--atoms",
        "1",
        "--max-omega",
        "1",
        "--max-psi",
        "1",
        "--emit",
        path.to_str().unwrap(),
    ]);
    assert_code(&out, 0);
    let lines = std::fs::read_to_string(&path).unwrap();
    assert!(lines.lines().count() > 0);
    for line in lines.lines() {
        lgdda::parse(line).expect("line parses");
    }
    assert!(lines.lines().any(|l| l == "~(B{1,1} p & ~B{1,1} p)"));
}

#[test]
fn fuzz_reports_clean_json() {
    let out = run(&["--json", "fuzz", "--n", "8", "--seed", "11"]);
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["n"], 8);
    let total = report["sat"].as_u64().unwrap()
        + report["unsat_confirmed"].as_u64().unwrap()
        + report["unsat_unconfirmed"].as_u64().unwrap();
    assert_eq!(total, 8);
}

#[test]
fn malformed_model_file_is_exit_two() {
    let path = tmp("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["mc", "--model", path.to_str().unwrap(), "--formula", "p"]);
    assert_code(&out, 2);
}
