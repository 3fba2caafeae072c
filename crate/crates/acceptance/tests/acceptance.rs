//! One test per acceptance criterion; each prints a PASS/FAIL line.

use bregman_acceptance::{self as acc, Outcome};

fn report(o: Outcome) {
    println!("{}", o.line());
    assert!(o.passed, "{}", o.line());
}

#[test]
fn criterion_01_legendre_duality() {
    report(acc::legendre_duality());
}

#[test]
fn criterion_02_distance_dual_identity() {
    report(acc::distance_dual_identity());
}

#[test]
fn criterion_03_interval_centers() {
    report(acc::interval_centers());
}

#[test]
fn criterion_04_segment_midpoint() {
    report(acc::segment_midpoint());
}

#[test]
fn criterion_05_center_certificates() {
    report(acc::center_certificates());
}

#[test]
fn criterion_06_radius_duality() {
    report(acc::radius_duality());
}

#[test]
fn criterion_07_prox_lab_closed_forms() {
    report(acc::prox_lab_closed_forms());
}

#[test]
fn criterion_08_gradient_identities() {
    report(acc::gradient_identities());
}

#[test]
fn criterion_09_probe_suite() {
    report(acc::probe_suite());
}

#[test]
fn criterion_10_oracle_equivalence() {
    report(acc::oracle_equivalence());
}
