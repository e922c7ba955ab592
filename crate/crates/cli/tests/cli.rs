use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scriptswap"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema/output.v1.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid(validator: &jsonschema::Validator, text: &str) {
    let instance: Value = serde_json::from_str(text).expect("valid JSON");
    let errors: Vec<String> =
        validator.iter_errors(&instance).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "schema violations: {:#?}", errors);
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{ \"params\": { \"theta_a\": 1, ").unwrap();
    let out = run(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("bad.json"));
}

#[test]
fn out_of_domain_params_exit_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corrupt.json");
    let text = fs::read_to_string(config("reference.json")).unwrap().replace("\"beta\": 0.5", "\"beta\": 1.5");
    fs::write(&path, text).unwrap();
    for cmd in ["solve", "verify"] {
        let out = run(&[cmd, "--config", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr(&out).contains("beta"), "{}", stderr(&out));
    }
}

#[test]
fn missing_config_and_unwritable_output_exit_3() {
    let out = run(&["solve", "--config", "/nonexistent/scriptswap.json"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["solve", "--out", "/nonexistent/dir/out.txt"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(run(&["sweep", "--grid", "0:1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--axis", "delta"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--outputs", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--checks", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn mutual_preparation_game_has_exactly_pp() {
    let c = config("mutual_prep.json");
    let out = run(&["solve", "--config", c.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pure_ne"], serde_json::json!(["PP"]));
    assert_eq!(v["hetero_class"], "MutualPrepUnique");
}

#[test]
fn threshold_worked_example_prints_all_three() {
    let c = config("threshold_conflict.json");
    let out = run(&["threshold", "--config", c.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("p_bar_eq15        0.4\n"), "{}", text);
    assert!(text.contains("p_bar_dev         2.8\n"), "{}", text);
    assert!(text.contains("p_bar_numeric"), "{}", text);
    assert!(text.contains("PAPER-INCONSISTENCY:"), "{}", text);
}

#[test]
fn one_point_sweep_writes_two_line_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--axis",
        "c",
        "--grid",
        "10:10:1",
        "--outputs",
        "p_bar_dev,class",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text, "c,p_bar_dev,class,notes\n10,0.5,Coexisting,\n");
}

#[test]
fn sweep_csv_is_lf_terminated_with_axis_first() {
    let c = config("sweep_detection.json");
    let out = run(&["sweep", "--config", c.to_str().unwrap()]);
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p,p_bar_numeric,pure_ne_count,separating_ne_count,mixed_q_a,payoff_PP_a,class,notes"
    );
    assert_eq!(lines.count(), 19);
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let c = config("heterogeneous.json");
    let args = |threads: &'static str| {
        vec![
            "simulate",
            "--config",
            c.to_str().unwrap(),
            "--n",
            "30000",
            "--seed",
            "11",
            "--format",
            "csv",
            "--threads",
            threads,
        ]
    };
    let first = run(&args("1"));
    assert_eq!(first.status.code(), Some(0));
    for threads in ["1", "3", "8"] {
        assert_eq!(run(&args(threads)).stdout, first.stdout, "threads = {}", threads);
    }
    let other_seed =
        run(&["simulate", "--config", c.to_str().unwrap(), "--n", "30000", "--seed", "12", "--format", "csv"]);
    assert_ne!(other_seed.stdout, first.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("profile,regime,player,closed_form,mc_mean,se,z\n"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn simulate_honors_profile_and_regime_selection() {
    let out = run(&["simulate", "--profile", "PNP,npnp", "--regime", "traditional", "--n", "100", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("PNP,traditional,A,"));
    assert!(rows[3].starts_with("NPNP,traditional,B,"));
}

#[test]
fn sweep_is_byte_identical_across_threads() {
    let c = config("sweep_detection.json");
    let one = run(&["sweep", "--config", c.to_str().unwrap(), "--threads", "1", "--format", "json"]);
    let many = run(&["sweep", "--config", c.to_str().unwrap(), "--threads", "4", "--format", "json"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn verify_checks_filter_runs_one_block() {
    let out = run(&["verify", "--checks=derivatives"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{}", text);
    assert!(lines[0].starts_with("PASS  4  derivatives"));
    assert_eq!(lines[1], "verify: 1 of 1 checks passed");
}

#[test]
fn every_json_output_matches_the_schema() {
    let validator = schema();
    let reference = config("reference.json");
    let hetero = config("heterogeneous.json");
    let coord = config("coordination.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--config", reference.to_str().unwrap()],
        vec!["solve", "--config", coord.to_str().unwrap()],
        vec!["solve", "--config", hetero.to_str().unwrap()],
        vec!["threshold", "--config", hetero.to_str().unwrap(), "--ratio", "0.7"],
        vec!["threshold"],
        vec!["sweep", "--axis", "theta_b", "--grid", "0.1:1:10", "--outputs", "p_bar_numeric,prop2,class,mixed_q_b"],
        vec!["simulate", "--n", "1"],
        vec!["simulate", "--n", "2000"],
        vec!["welfare", "--config", coord.to_str().unwrap()],
        vec!["welfare"],
        vec!["verify", "--checks", "symmetry,mixed"],
    ];
    for args in cases {
        let mut args = args.clone();
        args.extend(["--format", "json"]);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{:?}: {}", args, stderr(&out));
        assert_valid(&validator, &stdout(&out));
    }
}

#[test]
fn schema_rejects_unknown_fields() {
    let validator = schema();
    let out = run(&["welfare", "--format", "json"]);
    let mut v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    v["extra"] = Value::Bool(true);
    assert!(!validator.is_valid(&v));
}

#[test]
fn every_format_renders_for_every_command() {
    for cmd in ["solve", "threshold", "sweep", "welfare"] {
        for format in ["table", "json", "csv"] {
            let out = run(&[cmd, "--format", format]);
            assert_eq!(out.status.code(), Some(0), "{} {}: {}", cmd, format, stderr(&out));
            assert!(!out.stdout.is_empty());
        }
    }
}
