//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Tolerances and sample counts are pinned here; the underlying
//! checks live in `sympfact_core::suites`.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::time::Instant;

use sympfact_core::factor::{exp_factorization, factor_sp4, random_symplectic};
use sympfact_core::matrix::frobenius;
use sympfact_core::report::Report;
use sympfact_core::sampling::rng_for;
use sympfact_core::suites;

const SEED: u64 = 0x5EED_CAFE;

fn finish(criterion: &str, report: &Report) {
    println!(
        "{} criterion {criterion}: {} checks, {} failures",
        if report.passed() { "PASS" } else { "FAIL" },
        report.checked,
        report.failures.len()
    );
    for note in &report.notes {
        println!("       note: {note}");
    }
    assert!(
        report.passed(),
        "criterion {criterion} failed: {:#?}",
        report.failures
    );
}

#[test]
fn criterion_01_whitehead_identity() {
    let t0 = Instant::now();
    let report = suites::whitehead_suite();
    let elapsed = t0.elapsed();
    finish("1 (whitehead identity)", &report);
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
}

#[test]
fn criterion_02_last_row_recursion() {
    let report = suites::last_row_suite();
    assert!(report.checked >= 18);
    finish("2 (last-row recursion vs product)", &report);
}

#[test]
fn criterion_03_submersivity_dichotomy() {
    let t0 = Instant::now();
    let report = suites::submersivity_suite(200, SEED);
    let elapsed = t0.elapsed();
    // 200 off-singular samples per (K, n) plus constructed singular points
    assert!(report.checked >= 9 * 200);
    finish("3 (submersivity dichotomy)", &report);
    assert!(
        elapsed.as_secs_f64() < 300.0,
        "took {elapsed:?}, budget 5 min"
    );
}

#[test]
fn criterion_04_surjectivity_constructor() {
    let report = suites::surjectivity_suite(100, SEED);
    assert!(report.checked >= 200, "100 rational plus 100 complex targets");
    finish("4 (surjectivity constructor)", &report);
}

#[test]
fn criterion_05_triple_classification() {
    let report = suites::triples_suite(6);
    finish("5 (triple classification and inclusion chain)", &report);
}

#[test]
fn criterion_06_table_regeneration() {
    let report = suites::tables_suite();
    finish("6 (table regeneration)", &report);
}

#[test]
fn criterion_07_r_minor_identities_and_recursions() {
    let report = suites::rminor_suite(6);
    finish("7 (R-minor identities and recursions)", &report);
}

#[test]
fn criterion_08_tangency() {
    let report = suites::tangency_suite(6, false);
    assert!(
        report.notes.iter().any(|n| n.contains("sign conformance")),
        "the sign-conformance flag must be recorded"
    );
    finish("8 (tangency of lifted fields)", &report);
}

#[test]
fn criterion_09_spanning() {
    let report = suites::spanning_suite(34, 6, SEED);
    assert!(report.checked >= 100);
    finish("9 (spanning of new directions)", &report);
}

#[test]
fn criterion_10_rank_stability() {
    let report = suites::rank_stability_suite(100, 6, SEED);
    assert_eq!(report.checked, 100);
    finish("10 (rank stability across levels)", &report);
}

#[test]
fn criterion_11_factorization_round_trip() {
    let t0 = Instant::now();
    let mut rng = rng_for(SEED, "acceptance-factorization");
    let mut report = Report::new("factorization round trip");
    for trial in 0..100 {
        let a = random_symplectic(&mut rng, 8);
        let res = factor_sp4(&a, 1e-9).expect("round-trip inputs are symplectic");
        report.check(
            res.residual <= 1e-9,
            format!("trial {trial} residual"),
            "<= 1e-9",
            format!("{:.3e}", res.residual),
        );
        report.check(
            res.count <= 16,
            format!("trial {trial} count"),
            "<= 16",
            res.count.to_string(),
        );
        report.check(
            res.stage_deviation <= 1e-9 * frobenius(&a).max(1.0),
            format!("trial {trial} structural zeros"),
            "reduction structure within 1e-9",
            format!("{:.3e}", res.stage_deviation),
        );
    }
    let elapsed = t0.elapsed();
    finish("11 (factorization round trip)", &report);
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:?}, budget 10 s"
    );
}

#[test]
fn criterion_12_exponential_factorization() {
    let mut rng = rng_for(SEED, "acceptance-factorization");
    let mut report = Report::new("exponential factorization");
    for trial in 0..100 {
        let a = random_symplectic(&mut rng, 8);
        let res = factor_sp4(&a, 1e-9).expect("round-trip inputs are symplectic");
        let ef = exp_factorization(&res.factors);
        report.check(
            ef.max_square_norm() <= 1e-14,
            format!("trial {trial} nilpotency"),
            "log squares vanish within 1e-14",
            format!("{:.3e}", ef.max_square_norm()),
        );
        let rebuilt = ef.product();
        let rel = frobenius(&rebuilt.sub(&a)) / frobenius(&a).max(f64::MIN_POSITIVE);
        report.check(
            rel <= 1e-9,
            format!("trial {trial} exponential product"),
            "reconstructs the input within 1e-9",
            format!("{rel:.3e}"),
        );
    }
    finish("12 (exponential factorization)", &report);
}
