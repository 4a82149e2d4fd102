//! Acceptance suite: each criterion runs at its pinned tolerance and
//! prints one pass/fail line (visible with `--nocapture`; the same
//! suite backs `fluctuon verify`).
//!
//! Orbit-table criteria run at period 19 by default so the suite stays
//! quick; set `FLUCTUON_ACCEPT_FULL=1` for the period-23 tables.

use fluctuon::verify::{self, Check};

const SEED: u64 = 1;

fn period() -> u32 {
    if std::env::var("FLUCTUON_ACCEPT_FULL").is_ok() {
        23
    } else {
        19
    }
}

fn assert_check(check: Check) {
    println!(
        "[{}] {} — {}",
        if check.passed { "PASS" } else { "FAIL" },
        check.name,
        check.detail
    );
    assert!(check.passed, "{}: {}", check.name, check.detail);
}

#[test]
fn criterion_01_jarzynski_identity() {
    assert_check(verify::jarzynski_random_chains(SEED));
}

#[test]
fn criterion_02_transient_fluctuation_relation() {
    assert_check(verify::transient_fluctuation_relation(SEED));
}

#[test]
fn criterion_03_markov_ft_pipeline() {
    assert_check(verify::markov_ft_pipeline());
}

#[test]
fn criterion_04_meanfield_phase_structure() {
    assert_check(verify::meanfield_phase_structure());
}

#[test]
fn criterion_05_meanfield_rate_nonconvexity() {
    assert_check(verify::meanfield_rate_nonconvexity());
}

#[test]
fn criterion_06_ising_chain() {
    assert_check(verify::ising_chain());
}

#[test]
fn criterion_07_tent_basics() {
    assert_check(verify::tent_basics(period()));
}

#[test]
fn criterion_08_inducing_roundtrips() {
    assert_check(verify::inducing_roundtrips(SEED));
}

#[test]
fn criterion_09_zeta_bracketing() {
    assert_check(verify::zeta_bracketing(period()));
}

#[test]
fn criterion_10_prime_period_convergence() {
    assert_check(verify::prime_period_convergence());
}

#[test]
fn criterion_11_square_map_ft() {
    assert_check(verify::square_map_ft(period()));
}

#[test]
fn criterion_12_hypothesis_testing() {
    assert_check(verify::hypothesis_testing());
}
