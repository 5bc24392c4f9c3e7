//! Acceptance criteria, one test per registered check. Each prints a single
//! PASS/FAIL line; the full JSON report goes to stderr on failure.

use opfp::suite::{run_check, ScenarioConfig};

fn accept(id: &str) {
    let cfg = ScenarioConfig::default()
        .with_env()
        .expect("valid seed override");
    let report = run_check(&cfg, id).expect("registered check");
    println!("{}", report.summary_line());
    if !report.passed {
        eprintln!("{}", serde_json::to_string_pretty(&report).unwrap());
    }
    assert!(report.passed, "{}", report.summary_line());
}

#[test]
fn c01_partitions() {
    accept("c01");
}

#[test]
fn c02_scalar_oracles() {
    accept("c02");
}

#[test]
fn c03_arcsine_engines_agree() {
    accept("c03");
}

#[test]
fn c04_bernoulli_free_square_is_arcsine() {
    accept("c04");
}

#[test]
fn c05_abel_equation() {
    accept("c05");
}

#[test]
fn c06_quadratic_cauchy_equation() {
    accept("c06");
}

#[test]
fn c07_boolean_half_power_and_partial_trace() {
    accept("c07");
}

#[test]
fn c08_monotone_stability_and_semigroup() {
    accept("c08");
}

#[test]
fn c09_subordination() {
    accept("c09");
}

#[test]
fn c10_central_limits() {
    accept("c10");
}

#[test]
fn c11_transform_consistency() {
    accept("c11");
}
