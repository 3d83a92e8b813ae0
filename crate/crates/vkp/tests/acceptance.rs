//! Acceptance gate: one test per end-to-end criterion, each printing a
//! single PASS/FAIL line. Shares its checks with `vkp selftest`.

use vkp::selftest::{self, Item};

fn gate(item: Item) {
    let tag = if item.passed { "PASS" } else { "FAIL" };
    println!("{tag} {} — {}", item.name, item.details);
    assert!(item.passed, "{}: {}", item.name, item.details);
}

#[test]
fn criterion_1_golden_formulas() {
    gate(selftest::golden_formulas());
}

#[test]
fn criterion_2_recursion_equals_closed_form() {
    gate(selftest::recursion_vs_closed());
}

#[test]
fn criterion_3_oracle_triangulation() {
    gate(selftest::oracle_triangulation(20));
}

#[test]
fn criterion_4_unit_jones_members() {
    gate(selftest::unit_jones());
}

#[test]
fn criterion_5_torus_coincidence() {
    gate(selftest::torus_coincidence());
}

#[test]
fn criterion_6_move_invariance() {
    gate(selftest::move_invariance(100));
}

#[test]
fn criterion_7_parity_certificates() {
    gate(selftest::parity_certificates());
}

#[test]
fn criterion_8_portraits() {
    gate(selftest::portraits(false));
}

#[test]
fn criterion_9_determinism() {
    gate(selftest::determinism());
}
