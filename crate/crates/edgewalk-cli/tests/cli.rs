//! End-to-end tests of the `edgewalk` binary: output contracts, exit
//! codes, determinism, and cross-checks between reported counters and
//! literal query counts.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgewalk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should launch")
}

fn run_ok(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout should be a JSON document")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit, not signal")
}

fn stdout_text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

#[test]
fn spectrum_complete_graph_matches_known_values() {
    let v = run_ok(&["spectrum", "--chain", "complete", "--n", "4"]);
    assert_eq!(v["states"], 4);
    assert!((v["delta"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((v["phase_gap"].as_f64().unwrap() - 2.461_918_834_681_549_5).abs() < 1e-9);
    assert!(v["gap_margin"].as_f64().unwrap() > 0.0);
    assert!(v["max_phase_deviation"].as_f64().unwrap() <= 1e-8);
    assert!(v["stationary_fidelity"].as_f64().unwrap() >= 1.0 - 1e-9);
}

#[test]
fn spectrum_set_walk_reports_both_gaps() {
    let v = run_ok(&["spectrum", "--chain", "johnson", "--n", "5", "--r", "2"]);
    assert_eq!(v["states"], 10);
    // The magnitude gap is set by the negative tail; the signed gap is the
    // closed form n / (r (n - r)).
    assert!((v["delta"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
    assert!((v["signed_gap"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-9);
}

#[test]
fn spectrum_rejects_oversized_subset() {
    let out = run(&["spectrum", "--chain", "johnson", "--n", "5", "--r", "3"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn identical_seeds_give_byte_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&[
            "search",
            "--chain",
            "complete",
            "--n",
            "8",
            "--marked",
            "3",
            "--algorithm",
            "quantum-exact",
            "--trials",
            "25",
            "--seed",
            "11",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same parameters and seed must reproduce bytes");
}

#[test]
fn classical_resample_budget_and_success() {
    let v = run_ok(&[
        "search",
        "--chain",
        "complete",
        "--n",
        "16",
        "--marked",
        "5",
        "--algorithm",
        "classical-1",
        "--trials",
        "100",
        "--seed",
        "7",
    ]);
    assert_eq!(v["rounds"], 48);
    assert!(v["success_rate"].as_f64().unwrap() >= 0.9);
    assert_eq!(v["trial_found"].as_array().unwrap().len(), 100);
}

#[test]
fn quantum_pe_defaults_bank_width_from_phase_gap() {
    let v = run_ok(&[
        "search",
        "--chain",
        "complete",
        "--n",
        "4",
        "--marked",
        "2",
        "--algorithm",
        "quantum-pe",
        "--trials",
        "5",
    ]);
    assert_eq!(v["reflection"]["s"], 4);
    assert_eq!(v["reflection"]["k"], 3);
    assert!(v["cost"]["walk_calls"].as_u64().unwrap() > 0);
}

#[test]
fn marked_containing_selects_subset_labels() {
    let v = run_ok(&[
        "search",
        "--chain",
        "johnson",
        "--n",
        "5",
        "--r",
        "2",
        "--marked-containing",
        "1,2",
        "--algorithm",
        "quantum-exact",
        "--trials",
        "20",
        "--seed",
        "3",
    ]);
    assert_eq!(v["marked_count"], 1);
    assert_eq!(v["first_found"], "1-2");
    assert!(v["success_rate"].as_f64().unwrap() >= 0.9);
}

#[test]
fn search_requires_a_marked_set() {
    let out = run(&[
        "search",
        "--chain",
        "complete",
        "--n",
        "4",
        "--algorithm",
        "classical-1",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn chain_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("chain.json");
    let second = dir.path().join("again.json");
    let out = run(&[
        "chain",
        "--chain",
        "johnson",
        "--n",
        "6",
        "--r",
        "2",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&[
        "chain",
        "--chain-file",
        first.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap(),
        "canonical serialization must be a fixed point"
    );
}

#[test]
fn chain_capacity_and_invariant_exit_codes() {
    let out = run(&["chain", "--chain", "complete", "--n", "5000"]);
    assert_eq!(exit_code(&out), 3, "state cap should report capacity");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("periodic.json");
    std::fs::write(&path, r#"{"states":["a","b"],"P":[[0,1],[1,0]]}"#).unwrap();
    let out = run(&["chain", "--chain-file", path.to_str().unwrap(), "--analyze"]);
    assert_eq!(exit_code(&out), 2, "periodic chain should report invariant");
}

#[test]
fn chain_analyze_reports_gaps() {
    let v = run_ok(&["chain", "--chain", "complete", "--n", "3", "--analyze"]);
    assert_eq!(v["states"], 3);
    assert_eq!(v["ergodic"], true);
    assert_eq!(v["reversible"], true);
    assert!((v["delta"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["signed_gap"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn reflect_sweep_table_matches_call_formula() {
    let out = run(&[
        "reflect",
        "--chain",
        "complete",
        "--n",
        "3",
        "--s-range",
        "2:3",
        "--k-range",
        "1:2",
        "--random-states",
        "2",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout_text(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header plus four (s, k) rows");
    assert!(lines[0].starts_with("s,k,controlled_walk_calls"));
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let s: u32 = fields[0].parse().unwrap();
        let k: u64 = fields[1].parse().unwrap();
        let calls: u64 = fields[2].parse().unwrap();
        assert_eq!(calls, 2 * k * (2u64.pow(s) - 1));
        assert_eq!(fields[9], "true", "ancilla bank must be restored");
    }
}

#[test]
fn reflect_rejects_malformed_range() {
    let out = run(&[
        "reflect", "--chain", "complete", "--n", "3", "--s-range", "4:2",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn apps_cost_sweep_reports_fitted_exponent() {
    let out = run(&["apps", "--kind", "triangle", "--n", "1e6"]);
    assert!(out.status.success());
    let text = stdout_text(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "header plus three sample sizes");
    assert_eq!(lines[0], "kind,n,r_star,cost_star,fitted_exponent");
    let fields: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(fields[0], "triangle-finding");
    assert_eq!(fields[1], "1000000");
    let exponent: f64 = fields[4].parse().unwrap();
    assert!((exponent - 1.30).abs() < 0.02);
}

#[test]
fn apps_simulation_query_count_matches_cost_units() {
    let v = run_ok(&[
        "apps", "--kind", "ed", "--n", "8", "--r", "4", "--simulate", "--trials", "50",
        "--seed", "2",
    ]);
    assert_eq!(v["kind"], "element-distinctness");
    assert!((v["epsilon"].as_f64().unwrap() - 3.0 / 14.0).abs() < 1e-12);
    assert_eq!(v["collision_pairs"], serde_json::json!([[1, 2]]));
    // One stationary setup reads r cells, each walk step reads one; with
    // the exact reflector nothing else touches the table.
    assert_eq!(v["oracle_queries"], 5);
    assert!((v["cost_units"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert!(v["search"]["success_rate"].as_f64().unwrap() >= 0.9);
}

#[test]
fn apps_unordered_simulation_counts_checks() {
    let v = run_ok(&[
        "apps",
        "--kind",
        "us",
        "--n",
        "8",
        "--marked",
        "3",
        "--simulate",
        "--algorithm",
        "classical-1",
        "--trials",
        "100",
        "--seed",
        "4",
    ]);
    assert_eq!(v["kind"], "unordered-search");
    assert_eq!(v["search"]["rounds"], 24);
    // Every round checks once and nothing else reads the table:
    // 24 checks x 100 trials.
    assert_eq!(v["oracle_queries"], 2400);
    assert!((v["cost_units"].as_f64().unwrap() - 2400.0).abs() < 1e-9);
}

#[test]
fn apps_instance_files_round_trip_through_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    std::fs::write(
        &path,
        r#"{"kind":"element-distinctness","n":6,"table":[9,5,7,5,2,4]}"#,
    )
    .unwrap();
    let v = run_ok(&[
        "apps",
        "--kind",
        "ed",
        "--n",
        "6",
        "--r",
        "3",
        "--simulate",
        "--instance",
        path.to_str().unwrap(),
        "--trials",
        "30",
        "--seed",
        "9",
    ]);
    // The planted collision sits at cells 2 and 4.
    assert_eq!(v["collision_pairs"], serde_json::json!([[2, 4]]));
    assert!(v["search"]["success_rate"].as_f64().unwrap() >= 0.9);

    let mismatched = run(&[
        "apps",
        "--kind",
        "us",
        "--n",
        "6",
        "--simulate",
        "--instance",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&mismatched), 1, "kind mismatch is a usage error");
}

#[test]
fn apps_rejects_unknown_kind_and_missing_inputs() {
    assert_eq!(exit_code(&run(&["apps", "--kind", "nosuch", "--n", "100"])), 1);
    // Simulating collision finding needs a subset size.
    assert_eq!(
        exit_code(&run(&["apps", "--kind", "ed", "--n", "8", "--simulate"])),
        1
    );
    // Only the two concrete instances can be simulated.
    assert_eq!(
        exit_code(&run(&[
            "apps", "--kind", "mpv", "--n", "16", "--simulate", "--r", "4"
        ])),
        1
    );
    assert_eq!(
        exit_code(&run(&[
            "search", "--chain", "complete", "--n", "4", "--marked", "2", "--algorithm",
            "frobnicate",
        ])),
        1
    );
}

#[test]
fn out_files_end_with_newline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "chain",
        "--chain",
        "complete",
        "--n",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(Path::new(&path).exists());
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.last(), Some(&b'\n'));
}
