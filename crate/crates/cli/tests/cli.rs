use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semicircle_core::ensembles::profile_constant;
use semicircle_core::graphs::wick_moment_oracle;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_semicircle-lab"));
    c.env_remove("SEMICIRCLE_LAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

fn assert_valid(name: &str, v: &Value) {
    let validator = schema(name);
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

const SMALL: [(&str, &[&str]); 8] = [
    ("simulate", &["--n", "32", "--seeds", "2"]),
    ("esd", &["--n", "16", "--seeds", "2", "--kind", "rademacher"]),
    ("distance", &["--n", "16", "--seeds", "3"]),
    ("moments", &["--n", "8", "--seeds", "4"]),
    ("graphs", &["--k", "6"]),
    ("interpolate", &["--n", "16", "--seeds", "2", "--kind", "dependent"]),
    ("counterexample", &["--n", "32", "--seeds", "2"]),
    ("check", &["--n", "32", "--seeds", "2", "--profile", "smooth"]),
];

#[test]
fn reports_validate_against_shipped_schemas() {
    let run_config = schema("run_config");
    for (cmd, extra) in SMALL {
        let mut args = vec![cmd, "--reproducible"];
        args.extend_from_slice(extra);
        let v = json(&args);
        assert_valid(cmd, &v);
        assert!(run_config.is_valid(&v["config"]), "{cmd} config echo");
        assert_eq!(v["command"], cmd);
        assert!(v.get("generated_at").is_none());
    }
    assert_valid(
        "ensemble_spec",
        &json(&["esd", "--n", "4", "--seeds", "1"])["config"]["ensemble"],
    );
}

#[test]
fn reruns_are_byte_identical_and_configs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, extra) in SMALL {
        let mut args = vec![cmd, "--reproducible"];
        args.extend_from_slice(extra);
        let first = stdout(&args);
        assert_eq!(first, stdout(&args), "{cmd}");

        // the echoed configuration reproduces the run on its own
        let v: Value = serde_json::from_str(&first).unwrap();
        let path = dir.path().join(format!("{cmd}.json"));
        std::fs::write(&path, v["config"].to_string()).unwrap();
        let mut again = vec![cmd, "--reproducible", "--config", path.to_str().unwrap()];
        if cmd == "interpolate" {
            again.push("--kind-y");
            again.push("gaussian");
        }
        assert_eq!(first, stdout(&again), "{cmd} via --config");
    }
}

#[test]
fn timestamp_present_unless_reproducible() {
    let v = json(&["esd", "--n", "4", "--seeds", "1"]);
    assert!(v["generated_at"].as_u64().unwrap() > 1_600_000_000);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["distance", "--n", "24", "--seeds", "5", "--reproducible"];
    let base = stdout(&args);
    for threads in ["1", "3"] {
        let out = bin()
            .args(args)
            .env("SEMICIRCLE_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap(), base);
    }
    let mut flag = args.to_vec();
    flag.extend(["--threads", "2"]);
    assert_eq!(stdout(&flag), base);
}

#[test]
fn graphs_tables() {
    let csv = stdout(&["graphs", "--k", "2", "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "g,t,category,contribution");
    assert_eq!(lines.len(), 3);

    let v = json(&["graphs", "--k", "4"]);
    assert_eq!(v["counts"]["category_1"], 2);
    assert_eq!(v["counts"]["total"], 15);
    let p = profile_constant(4).unwrap();
    let oracle = wick_moment_oracle(&p, 4).unwrap();
    assert!((v["total"].as_f64().unwrap() - oracle).abs() <= 1e-12 * oracle);

    let big = json(&["graphs", "--k", "10", "--n", "4"]);
    assert!(big["graphs"][0]["contribution"].is_null());
    assert_eq!(big["counts"]["category_1"], 42);

    let out = run(&["graphs", "--k", "13"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["graphs"]).status.code(), Some(2));
}

#[test]
fn zero_profile_is_half_away() {
    let v = json(&["simulate", "--profile", "zero", "--n", "16", "--seeds", "2"]);
    assert_eq!(v["kolmogorov"], 0.5);
    assert_eq!(v["histogram"].as_array().unwrap().len(), 401);
    assert_eq!(v["esd"].as_array().unwrap().len(), 401);
}

#[test]
fn simulate_csv_blocks() {
    let csv = stdout(&[
        "simulate",
        "--n",
        "16",
        "--seeds",
        "1",
        "--grid-points",
        "7",
        "--format",
        "csv",
    ]);
    let blocks: Vec<&str> = csv.split("\n\n\n").collect();
    assert_eq!(blocks.len(), 3);
    assert!(blocks[0].starts_with("x,density,semicircle\n"));
    assert_eq!(blocks[0].lines().count(), 8);
    assert!(blocks[1].starts_with("x,F\n"));
    assert!(blocks[2].starts_with("kolmogorov,levy\n"));
}

#[test]
fn interpolate_csv_columns_and_gap() {
    let csv = stdout(&[
        "interpolate",
        "--n",
        "16",
        "--seeds",
        "2",
        "--phi-points",
        "3",
        "--format",
        "csv",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("phi,re_z,im_z,re_s,im_s,stderr"));
    assert_eq!(lines.count(), 15);

    // gaussian against gaussian with the same seeds differs only through
    // the X/Y stream tags; identical specs give a finite, small gap
    let v = json(&["interpolate", "--n", "16", "--seeds", "2", "--phi-points", "2"]);
    assert!(v["gap"].as_f64().unwrap() < 0.5);
    assert_eq!(v["config"]["ensemble_y"]["kind"], "gaussian");
}

#[test]
fn check_verdicts() {
    let constant = json(&["check", "--n", "64", "--seeds", "2"]);
    assert_eq!(constant["pass"], true);

    let block = run(&["check", "--n", "64", "--seeds", "2", "--profile", "block", "--assert"]);
    assert_eq!(block.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&block.stdout).unwrap();
    assert_eq!(v["conditions"]["avg_b_deviation"], 0.2421875);
    assert_eq!(v["conditions"]["verdicts"]["avg_b"], false);

    let smooth = json(&[
        "check",
        "--n",
        "64",
        "--seeds",
        "2",
        "--profile",
        "smooth",
        "--alpha",
        "0.5",
    ]);
    assert_eq!(smooth["pass"], true);
}

#[test]
fn assert_mode_exit_codes() {
    let ok = run(&[
        "distance",
        "--n",
        "64",
        "--seeds",
        "2",
        "--assert",
        "--threshold",
        "0.5",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(&[
        "distance",
        "--n",
        "64",
        "--seeds",
        "2",
        "--assert",
        "--threshold",
        "0.0001",
    ]);
    assert_eq!(bad.status.code(), Some(4));
    // without --assert the same run succeeds
    assert!(run(&["distance", "--n", "64", "--seeds", "2"]).status.success());
}

#[test]
fn config_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| -> PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };

    let wrong = write("wrong.json", r#"{"subcommand": "graphs", "k": 4}"#);
    assert_eq!(
        run(&["esd", "--config", wrong.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let unknown = write("unknown.json", r#"{"sedes": 4}"#);
    assert_eq!(
        run(&["esd", "--config", unknown.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["esd", "--config", missing.to_str().unwrap()]).status.code(),
        Some(3)
    );
    let unwritable = dir.path().join("no/such/dir/out.json");
    assert_eq!(
        run(&["esd", "--n", "4", "--out", unwritable.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["esd", "--n", "0"]).status.code(), Some(2));
    assert_eq!(
        run(&["esd", "--n", "4", "--kind", "dependent", "--delta", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["esd", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["counterexample", "--profile", "smooth"]).status.code(), Some(2));

    let good = write(
        "good.json",
        r#"{"ensemble": {"kind": "gaussian", "n": 8, "profile": {"type": "constant"}},
            "seeds": [3, 1], "format": "csv", "grid": {"min": -1, "max": 1, "points": 3}}"#,
    );
    let out = dir.path().join("esd.csv");
    let status = run(&[
        "esd",
        "--config",
        good.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().next(), Some("x,F"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn moments_report_exact_values_for_small_gaussian() {
    let v = json(&["moments", "--n", "6", "--seeds", "3", "--max-k", "4"]);
    let rows = v["moments"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["exact"], 1.0);
    assert!(rows[3]["exact"].as_f64().unwrap() > 2.0);
    let big = json(&["moments", "--n", "20", "--seeds", "2", "--max-k", "2"]);
    assert!(big["moments"][0]["exact"].is_null());
}
