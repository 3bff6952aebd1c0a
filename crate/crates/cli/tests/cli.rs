//! End-to-end tests of the binary: schemas, reference values, exit codes,
//! and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_routegame")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).unwrap()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("routegame-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const FIVE_LINK: &str = r#"{"capacities":["2","4","9","12","20"],"r":"30","r_a":"20"}"#;

#[test]
fn classify_reports_the_intermediate_regime() {
    let dir = temp_dir("classify");
    let file = write_file(&dir, "p2.json", FIVE_LINK);
    let json = stdout_json(&run(&["classify", file.to_str().unwrap()]));
    assert_eq!(json["regime"], "no_ne");
    assert_eq!(json["full_block_threshold"]["exact"], "39");
    assert_eq!(json["zero_block_threshold"]["exact"], "15/4");
}

#[test]
fn thresholds_match_reference_values() {
    let dir = temp_dir("thresholds");
    let file = write_file(
        &dir,
        "r20.json",
        r#"{"capacities":["2","4","9","12","20"],"r":"20"}"#,
    );
    let json = stdout_json(&run(&["thresholds", file.to_str().unwrap()]));
    assert_eq!(json["zero_block_threshold"]["exact"], "7");
    assert_eq!(json["total_capacity"]["exact"], "47");
}

#[test]
fn block_evaluates_the_worked_example() {
    let dir = temp_dir("block");
    let file = write_file(
        &dir,
        "fig.json",
        r#"{"capacities":["2","4","9","12","20"],"r":"25","r_a":"20",
            "route":["1","1","5","10","8"],"attack":["2","4","4","4","6"]}"#,
    );
    let json = stdout_json(&run(&["block", file.to_str().unwrap()]));
    assert_eq!(json["total"]["exact"], "4");
    let per_edge: Vec<String> = json["per_edge"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["exact"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(per_edge, vec!["1", "1", "0", "2", "0"]);
}

#[test]
fn block_accepts_flag_overrides() {
    let dir = temp_dir("block-flags");
    let file = write_file(
        &dir,
        "net.json",
        r#"{"capacities":["2","4","9","12","20"]}"#,
    );
    let json = stdout_json(&run(&[
        "block",
        file.to_str().unwrap(),
        "--route",
        "1,1,5,10,8",
        "--attack",
        "0,0,8,12,0",
    ]));
    assert_eq!(json["total"]["exact"], "14");
}

#[test]
fn best_response_finds_the_optimum() {
    let dir = temp_dir("br");
    let file = write_file(
        &dir,
        "inst.json",
        r#"{"capacities":["2","4","9","12","20"],"r_a":"20","route":["1","1","5","10","8"]}"#,
    );
    let json = stdout_json(&run(&["best-response", file.to_str().unwrap()]));
    assert_eq!(json["value"]["exact"], "14");
    // The witness attack re-parses into exact rationals summing to 20.
    let total: f64 = json["attack"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["approx"].as_f64().unwrap())
        .sum();
    assert!((total - 20.0).abs() < 1e-9);
}

#[test]
fn voi_reproduces_the_two_link_example() {
    let dir = temp_dir("voi");
    let file = write_file(
        &dir,
        "voi.json",
        r#"{"capacities":["3","6"],"r":"5","r_a":{"lo":"4","hi":"7"}}"#,
    );
    let json = stdout_json(&run(&["voi", file.to_str().unwrap()]));
    assert_eq!(json["value"]["exact"], "1/2");
    let route: Vec<String> = json["route"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["exact"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(route, vec!["2", "3"]);
}

#[test]
fn se_is_deterministic_and_exact_on_two_links() {
    let dir = temp_dir("se");
    let file = write_file(
        &dir,
        "se.json",
        r#"{"capacities":["3","6"],"r":"5","r_a":"5"}"#,
    );
    let first = run(&["se", file.to_str().unwrap(), "--seed", "9"]);
    let second = run(&["se", file.to_str().unwrap(), "--seed", "9"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");
    let json = stdout_json(&first);
    assert_eq!(json["value"]["exact"], "2");
    assert_eq!(json["certificate"]["gap"]["exact"], "0");
    assert_eq!(json["converged"], true);
}

#[test]
fn regions_emits_the_expected_schema_and_points() {
    let dir = temp_dir("regions");
    let file = write_file(
        &dir,
        "net.json",
        r#"{"capacities":["2","4","9","12","20"]}"#,
    );
    let svg_path = dir.join("map.svg");
    let output = run(&[
        "regions",
        file.to_str().unwrap(),
        "--r-max",
        "47",
        "--ra-max",
        "47",
        "--step",
        "5",
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,ra,regime"));
    let body: Vec<&str> = lines.collect();
    assert!(body.contains(&"20,5,zero_block_ne"));
    assert!(body.contains(&"30,20,no_ne"));
    assert!(body.contains(&"25,45,full_block_ne"));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("</svg>"));
}

#[test]
fn regions_is_independent_of_the_thread_count() {
    let dir = temp_dir("regions-threads");
    let file = write_file(
        &dir,
        "net.json",
        r#"{"capacities":["2","4","9","12","20"]}"#,
    );
    let args = [
        "regions",
        file.to_str().unwrap(),
        "--r-max",
        "47",
        "--ra-max",
        "47",
        "--step",
        "3",
    ];
    let single = Command::new(bin())
        .args(args)
        .env("ROUTEGAME_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(bin())
        .args(args)
        .env("ROUTEGAME_THREADS", "7")
        .output()
        .unwrap();
    assert!(single.status.success() && many.status.success());
    assert_eq!(single.stdout, many.stdout);
}

#[test]
fn curve_emits_both_columns_with_a_route() {
    let dir = temp_dir("curve");
    let file = write_file(
        &dir,
        "curve.json",
        r#"{"capacities":["3","6"],"r":"5","route":["2","3"]}"#,
    );
    let svg_path = dir.join("curve.svg");
    let output = run(&[
        "curve",
        file.to_str().unwrap(),
        "--ra-max",
        "9",
        "--samples",
        "10",
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ra,value,b_star"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 3));
    // Exact values at the two ends and at the worked intermediate budget.
    assert!(rows.contains(&vec!["0", "0", "0"]));
    assert!(rows.contains(&vec!["5", "2", "2"]));
    assert!(rows.contains(&vec!["9", "5", "5"]));
    assert!(std::fs::read_to_string(&svg_path)
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn risk_writes_the_csv_table() {
    let dir = temp_dir("risk");
    let file = write_file(
        &dir,
        "risk.json",
        r#"{"capacities":["3","6"],"r":"5","r_a":{"lo":"4","hi":"7"},"route":["2","3"]}"#,
    );
    let csv_path = dir.join("risk.csv");
    let output = run(&[
        "risk",
        file.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    let json = stdout_json(&output);
    assert_eq!(json["risk"]["exact"], "1/2");
    assert_eq!(json["argmax_budget"]["exact"], "4");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("ra,b_star,b_se,diff"));
    assert!(csv.contains("4,2,3/2,1/2"));
}

#[test]
fn kp_runs_both_paths_and_they_agree() {
    let dir = temp_dir("kp");
    let file = write_file(
        &dir,
        "kp.json",
        r#"{"items":[{"w":"2","v":"3"},{"w":"3","v":"4"},{"w":"4","v":"5"}],"W":"5"}"#,
    );
    let json = stdout_json(&run(&["kp", file.to_str().unwrap()]));
    assert_eq!(json["via_attack"]["value"]["exact"], "7");
    assert_eq!(json["dp"]["value"]["exact"], "7");
    assert_eq!(json["agree"], true);
    let selection: Vec<i64> = json["via_attack"]["selection"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    assert_eq!(selection, vec![0, 1]);

    // Single-path flags restrict the output.
    let json = stdout_json(&run(&["kp", file.to_str().unwrap(), "--dp"]));
    assert!(json.get("via_attack").is_none());
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let dir = temp_dir("exit");
    // Unreadable / malformed document: parse error, code 2.
    let bad = write_file(&dir, "bad.json", r#"{"capacities": "nope"}"#);
    let output = run(&["classify", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));

    // Bad rational literal: code 2.
    let bad_rat = write_file(
        &dir,
        "badrat.json",
        r#"{"capacities":["x"],"r":"1","r_a":"1"}"#,
    );
    let output = run(&["classify", bad_rat.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));

    // Infeasible demand: domain error, code 3.
    let infeasible = write_file(
        &dir,
        "infeasible.json",
        r#"{"capacities":["2","3"],"r":"99","r_a":"1"}"#,
    );
    let output = run(&["classify", infeasible.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));

    // Missing required field: domain error, code 3.
    let missing = write_file(&dir, "missing.json", r#"{"capacities":["2","3"]}"#);
    let output = run(&["classify", missing.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(3));

    // Solver size cap: code 4.
    let caps: Vec<String> = (0..24).map(|_| "\"1\"".to_string()).collect();
    let too_big = write_file(
        &dir,
        "big.json",
        &format!(
            r#"{{"capacities":[{}],"r_a":"3","route":[{}]}}"#,
            caps.join(","),
            (0..24)
                .map(|_| "\"0\"".to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    );
    let output = run(&["best-response", too_big.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn curve_without_a_route_has_two_columns() {
    let dir = temp_dir("curve-plain");
    let file = write_file(&dir, "net.json", r#"{"capacities":["3","6"],"r":"5"}"#);
    let output = run(&[
        "curve",
        file.to_str().unwrap(),
        "--ra-max",
        "9",
        "--samples",
        "4",
    ]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("ra,value"));
}

#[test]
fn starved_solver_reports_non_convergence() {
    let dir = temp_dir("starved");
    // Intermediate-budget four-link instance with a two-iteration budget and
    // an unreachable tolerance: the result is still printed, flagged via
    // exit code 5.
    let file = write_file(
        &dir,
        "hard.json",
        r#"{"capacities":["3","5","7","11"],"r":"13","r_a":"12"}"#,
    );
    let output = run(&[
        "se",
        file.to_str().unwrap(),
        "--max-iter",
        "2",
        "--tol",
        "1e-12",
    ]);
    assert_eq!(output.status.code(), Some(5));
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(json["converged"], false);
    assert!(json["certificate"]["gap"]["approx"].as_f64().unwrap() > 1e-12);
}

#[test]
fn unknown_document_fields_are_parse_errors() {
    let dir = temp_dir("unknown-field");
    let file = write_file(
        &dir,
        "typo.json",
        r#"{"capacities":["2","3"],"r":"1","ra":"1"}"#,
    );
    let output = run(&["classify", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn json_outputs_reparse_to_the_exact_values() {
    let dir = temp_dir("roundtrip");
    let file = write_file(
        &dir,
        "inst.json",
        r#"{"capacities":["2","4","9","12","20"],"r":"25"}"#,
    );
    let json = stdout_json(&run(&["thresholds", file.to_str().unwrap()]));
    let reparsed =
        routegame::parse_rational(json["full_block_threshold"]["exact"].as_str().unwrap()).unwrap();
    let expected = routegame::rational::frac(122, 3);
    assert_eq!(reparsed, expected);
}
