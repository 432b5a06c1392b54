//! Integration checks for the CLI surface: headers, example values, exit
//! codes, and degenerate sweeps.

use std::process::{Command, Output};

fn longhop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_longhop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = longhop(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8")
}

#[test]
fn analytic_one_pass_uniform_prints_known_value() {
    let csv = stdout_of(&[
        "analytic",
        "--mode",
        "one-pass",
        "--g",
        "uniform",
        "--n",
        "10",
        "--positions",
        "random-uniform",
    ]);
    assert!(csv.contains("0.1937102445"), "output: {csv}");
    assert!(csv.starts_with("mode,g,n,positions,method,value\n"));
}

#[test]
fn analytic_multi_pass_hybrid_prints_closed_form() {
    let csv = stdout_of(&[
        "analytic",
        "--mode",
        "multi-pass",
        "--g",
        "hybrid",
        "--n",
        "10",
    ]);
    // 1/2 (1 + (10/11) 0.9^10) = 0.6584902000.
    assert!(csv.contains("0.6584902000"), "output: {csv}");
}

#[test]
fn analytic_zero_constant_on_scenario_is_zero() {
    let csv = stdout_of(&[
        "analytic",
        "--mode",
        "one-pass",
        "--g",
        "constant:0",
        "--n",
        "5",
        "--scenario",
        "uniform",
    ]);
    assert!(csv.contains(",exact,0.0000000000"), "output: {csv}");
}

#[test]
fn simulate_header_is_exact() {
    let csv = stdout_of(&[
        "simulate", "--mode", "one-pass", "--g", "uniform", "--n", "4", "--random", "--trials",
        "1000", "--seed", "5",
    ]);
    assert!(csv
        .starts_with("mode,g,n,trials,seed,mean_progress,std_error,mean_rounds,truncated_count\n"));
    let row = csv.lines().nth(1).unwrap();
    assert!(row.starts_with("one-pass,constant:0.25,4,1000,5,"));
}

#[test]
fn simulate_matches_closed_form_loosely() {
    let csv = stdout_of(&[
        "simulate", "--mode", "one-pass", "--g", "power:9", "--n", "10", "--random", "--trials",
        "200000", "--seed", "7",
    ]);
    let row = csv.lines().nth(1).unwrap();
    let mean: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
    let se: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    let target = 10.0 / 11.0 * 0.9f64.powi(9);
    assert!((mean - target).abs() <= 4.0 * se, "{mean} vs {target}");
}

#[test]
fn bad_g_spec_exits_2() {
    let out = longhop(&[
        "simulate",
        "--mode",
        "one-pass",
        "--g",
        "frobnicate",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown decision function"));
}

#[test]
fn clap_usage_error_exits_2() {
    let out = longhop(&[
        "simulate", "--mode", "sideways", "--g", "uniform", "--n", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_with_wrong_expectation_exits_1() {
    let out = longhop(&[
        "compare", "--mode", "one-pass", "--g", "uniform", "--n", "10", "--random", "--trials",
        "20000", "--seed", "3", "--expect", "0.9",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let csv = String::from_utf8_lossy(&out.stdout);
    assert!(csv.contains(",fail"), "output: {csv}");
}

#[test]
fn compare_without_analytic_counterpart_exits_2() {
    let out = longhop(&[
        "compare",
        "--mode",
        "multi-pass",
        "--g",
        "power:4",
        "--n",
        "6",
        "--random",
        "--trials",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonterminating_simulation_exits_3_when_asked() {
    let out = longhop(&[
        "simulate",
        "--mode",
        "multi-pass",
        "--g",
        "constant:1",
        "--n",
        "3",
        "--scenario",
        "uniform",
        "--trials",
        "10",
        "--fail-on-nonterminating",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn single_trial_sweep_rows_stay_well_formed() {
    let csv = stdout_of(&[
        "experiment",
        "--n-values",
        "20",
        "--d-values",
        "200,7500",
        "--m-values",
        "0",
        "--trials",
        "1",
        "--seed",
        "11",
    ]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 12, "row: {row}");
        let hops: u64 = fields[11].parse().unwrap();
        if hops >= 2 {
            assert!(!fields[10].is_empty(), "std_dev expected: {row}");
        }
        if hops == 0 {
            assert!(fields[9].is_empty(), "mean should be flagged empty: {row}");
        }
    }
}

#[test]
fn experiment_edge_exclusion_raises_dense_means() {
    // Dropping hops that originate inside the last range-length removes
    // the clipped-window drag, so the dense-cell mean moves up.
    let run = |extra: &[&str]| -> f64 {
        let mut args = vec![
            "experiment",
            "--n-values",
            "200",
            "--d-values",
            "1000",
            "--m-values",
            "0",
            "--algorithm",
            "multi-pass",
            "--g-family",
            "uniform",
            "--trials",
            "200",
            "--seed",
            "21",
        ];
        args.extend_from_slice(extra);
        let csv = stdout_of(&args);
        let row = csv.lines().nth(1).unwrap();
        row.split(',').nth(9).unwrap().parse().unwrap()
    };
    let raw = run(&[]);
    let filtered = run(&["--exclude-edge"]);
    assert!(
        filtered > raw,
        "edge exclusion should raise the mean: {filtered} vs {raw}"
    );
    assert!((filtered - 0.5).abs() < 0.05, "filtered mean {filtered}");
}

#[test]
fn experiment_m_binds_to_tx_power_when_asked() {
    // Binding m to the transmit power changes the drawn power levels, so
    // rows with different m must differ beyond the m column itself.
    let csv = stdout_of(&[
        "experiment",
        "--n-values",
        "50",
        "--d-values",
        "600",
        "--m-values",
        "-5,5",
        "--trials",
        "50",
        "--seed",
        "13",
        "--bind-m-to-tx",
        "--algorithm",
        "multi-pass",
    ]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    // Same range => same density and same g either way.
    let density: Vec<&str> = rows.iter().map(|r| r.split(',').nth(4).unwrap()).collect();
    assert_eq!(density[0], density[1]);
}
