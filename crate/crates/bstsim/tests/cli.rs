//! Black-box tests of the `bstsim` binary: flag parsing, exit codes,
//! output routing, and the exact bytes of the smaller outputs.

use std::path::Path;
use std::process::{Command, Output};

fn bstsim() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bstsim"));
    cmd.env_remove("BSTSIM_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bstsim().args(args).output().expect("binary should run")
}

fn stdout_str(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("stdout should be UTF-8")
}

fn stderr_str(out: &Output) -> &str {
    std::str::from_utf8(&out.stderr).expect("stderr should be UTF-8")
}

fn status(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

#[test]
fn constants_prints_solver_json() {
    let out = run(&["constants"]);
    assert_eq!(status(&out), 0, "{}", stderr_str(&out));
    let v: serde_json::Value = serde_json::from_str(stdout_str(&out)).unwrap();
    assert!((v["a"].as_f64().unwrap() - 0.7680390470134656).abs() < 1e-15);
    assert!((v["b"].as_f64().unwrap() - 3.3110704070010053).abs() < 1e-15);
    assert!((v["alpha"].as_f64().unwrap() - 1.6783469900166605).abs() < 1e-15);
    assert!((v["beta"].as_f64().unwrap() - 0.6266353822983259).abs() < 1e-15);
    assert!((v["c"].as_f64().unwrap() - 4.311070407001005).abs() < 1e-15);
    assert!(v["residuals"].is_object());
    assert!(v["identities"].is_object());
    assert!(stdout_str(&out).ends_with('\n'));
}

#[test]
fn constants_rejects_nonpositive_tolerance() {
    let out = run(&["constants", "--tol", "0"]);
    assert_eq!(status(&out), 2);
    assert!(!stderr_str(&out).is_empty());
}

#[test]
fn run_small_trajectory_rows() {
    let out = run(&["run", "--n", "4", "--seed", "11"]);
    assert_eq!(status(&out), 0, "{}", stderr_str(&out));
    let text = stdout_str(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,H,h,F,R_height,R_saturation");
    assert_eq!(lines[1], "1,0,0,1,,");
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(last[0], "4");
    let height: u32 = last[1].parse().unwrap();
    assert!(height == 2 || height == 3, "four leaves reach depth 2 or 3");
    // Recentred columns are populated from n = 3 on.
    assert!(!last[4].is_empty() && !last[5].is_empty());
}

#[test]
fn run_rejects_multiple_members_in_csv_mode() {
    let out = run(&["run", "--n", "100", "--seed", "1", "--members", "2"]);
    assert_eq!(status(&out), 2);
}

#[test]
fn run_json_reports_ensemble_summary() {
    let out = run(&[
        "run", "--n", "1000", "--seed", "5", "--members", "3", "--format", "json",
    ]);
    assert_eq!(status(&out), 0, "{}", stderr_str(&out));
    let v: serde_json::Value = serde_json::from_str(stdout_str(&out)).unwrap();
    assert_eq!(v["members"], 3);
    let targets = v["targets"].as_array().unwrap();
    assert_eq!(targets.first().unwrap(), 1);
    assert_eq!(targets.last().unwrap(), 1000);
    let means = v["r_height"]["mean"].as_array().unwrap();
    assert_eq!(means.len(), targets.len());
    assert!(means[0].is_null(), "no recentring below three leaves");
    assert!(means.last().unwrap().is_number());
    assert_eq!(v["member_extrema"]["r_height"].as_array().unwrap().len(), 3);
}

#[test]
fn scientific_notation_counts_match_plain_ones() {
    let sci = run(&["run", "--n", "1e3", "--seed", "9"]);
    let plain = run(&["run", "--n", "1000", "--seed", "9"]);
    assert_eq!(status(&sci), 0);
    assert_eq!(sci.stdout, plain.stdout);
}

#[test]
fn malformed_counts_are_usage_errors() {
    for n in ["1.5", "0", "-3", "1e16", "ten"] {
        let out = run(&["run", "--n", n, "--seed", "1"]);
        assert_eq!(status(&out), 2, "--n {n} should be rejected");
    }
}

#[test]
fn fringe_two_leaves_exact_bytes() {
    let out = run(&["fringe", "--n", "2", "--seed", "1"]);
    assert_eq!(status(&out), 0, "{}", stderr_str(&out));
    assert_eq!(stdout_str(&out), "n,F,F_minus1,F_minus2\n2,2,0,0\n");
}

#[test]
fn fringe_requires_two_leaves() {
    let out = run(&["fringe", "--n", "1", "--seed", "1"]);
    assert_eq!(status(&out), 2);
}

#[test]
fn fringe_check_flag_reports_without_changing_rows() {
    let checked = run(&["fringe", "--n", "1e4", "--seed", "2", "--check-lemma"]);
    let unchecked = run(&["fringe", "--n", "1e4", "--seed", "2"]);
    assert_eq!(status(&checked), 0, "{}", stderr_str(&checked));
    assert_eq!(checked.stdout, unchecked.stdout, "the check must not consume randomness");
    assert!(stderr_str(&checked).contains("0 failures"));
    assert!(stderr_str(&unchecked).is_empty());
}

#[test]
fn out_dir_env_names_the_default_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = bstsim()
        .args(["run", "--n", "100", "--seed", "3"])
        .env("BSTSIM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(status(&out), 0, "{}", stderr_str(&out));
    assert!(out.stdout.is_empty(), "rows should go to the file, not stdout");
    let written = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert!(written.starts_with("n,H,h,F,R_height,R_saturation\n"));
    assert!(written.ends_with('\n'));
}

#[test]
fn explicit_out_path_wins_over_env_dir() {
    let env_dir = tempfile::tempdir().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let path = out_dir.path().join("rows.csv");
    let out = bstsim()
        .args(["fringe", "--n", "100", "--seed", "3", "--out"])
        .arg(&path)
        .env("BSTSIM_OUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(status(&out), 0, "{}", stderr_str(&out));
    assert!(path.is_file());
    assert!(
        !Path::new(&env_dir.path().join("fringe.csv")).exists(),
        "the explicit path replaces the env default"
    );
}

#[test]
fn validate_quick_json_isolates_the_known_failure() {
    let out = run(&["validate", "--quick", "--seed", "5", "--json"]);
    assert_eq!(status(&out), 1, "the exponential reference check fails by design");
    let v: serde_json::Value = serde_json::from_str(stdout_str(&out)).unwrap();
    assert_eq!(v["scale"], "quick");
    assert_eq!(v["seed"], 5);
    assert_eq!(v["passed"], false);
    let checks = v["checks"].as_array().unwrap();
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["zeta-vs-unit-exponential"]);
}

#[test]
fn validate_text_mode_prints_per_check_lines() {
    let out = run(&["validate", "--quick", "--seed", "5"]);
    assert_eq!(status(&out), 1);
    let text = stdout_str(&out);
    assert!(text.contains("zeta-vs-unit-exponential"));
    assert!(text.contains("FAIL"));
    assert!(text.contains("zeta-vs-gumbel"));
}

#[test]
fn validate_rejects_csv_format() {
    let out = run(&["validate", "--quick", "--seed", "5", "--format", "csv"]);
    assert_eq!(status(&out), 2);
}

#[test]
fn validate_json_flag_matches_format_json() {
    let via_flag = run(&["validate", "--quick", "--seed", "5", "--json"]);
    let via_format = run(&["validate", "--quick", "--seed", "5", "--format", "json"]);
    assert_eq!(via_flag.stdout, via_format.stdout);
}

#[test]
fn missing_seed_warns_and_defaults_to_zero() {
    let bare = run(&["run", "--n", "10"]);
    let seeded = run(&["run", "--n", "10", "--seed", "0"]);
    assert_eq!(status(&bare), 0);
    assert!(stderr_str(&bare).contains("no --seed given, using seed 0"));
    assert!(stderr_str(&seeded).is_empty());
    assert_eq!(bare.stdout, seeded.stdout);
}

#[test]
fn jobs_flag_does_not_change_results() {
    let one = run(&["run", "--n", "500", "--seed", "8", "--members", "2", "--format", "json", "--jobs", "1"]);
    let two = run(&["run", "--n", "500", "--seed", "8", "--members", "2", "--format", "json", "--jobs", "2"]);
    assert_eq!(status(&one), 0, "{}", stderr_str(&one));
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(status(&run(&["frobnicate"])), 2);
    assert_eq!(status(&run(&["run", "--n", "10", "--bogus"])), 2);
    assert_eq!(status(&run(&[])), 2, "a subcommand is required");
}

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(status(&help), 0);
    for sub in ["constants", "run", "fringe", "validate"] {
        assert!(stdout_str(&help).contains(sub), "help should list {sub}");
    }
    assert_eq!(status(&run(&["--version"])), 0);
}
