//! Acceptance gate: one test per criterion, each driving a named
//! verification suite and printing a single pass/fail line. Tolerances are
//! pinned inside the suites; run with `--nocapture` to see the lines for
//! passing criteria too.

use svoa::verify::run_suite;

fn criterion(number: u32, label: &str, suite: &str) {
    let start = std::time::Instant::now();
    let report = run_suite(suite).unwrap_or_else(|e| panic!("criterion {number} errored: {e}"));
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {number:2} [{verdict}] {label}: residual {} vs tolerance {} ({:.1?})",
        report.residual_norm,
        report.tolerance,
        start.elapsed()
    );
    assert!(
        report.pass,
        "criterion {number} ({label}) failed: residual {} tolerance {} details {:?}",
        report.residual_norm, report.tolerance, report.details
    );
}

#[test]
fn criterion_01_genus_zero_reduction_identity() {
    criterion(1, "genus-zero reduction identity, exact", "reduction0");
}

#[test]
fn criterion_02_genus_zero_ward_identity() {
    criterion(2, "genus-zero Ward identity, exact", "ward0");
}

#[test]
fn criterion_03_kernel_node_independence() {
    criterion(3, "reduction independent of kernel nodes, exact", "kernel-independence");
}

#[test]
fn criterion_04_mobius_invariance_genus_zero() {
    criterion(4, "Mobius invariance under 20 random maps, exact", "mobius0");
}

#[test]
fn criterion_05_sewing_matrix_consistency() {
    criterion(5, "closed-form sewing matrix equals shifted moments, symbolic", "atilde");
}

#[test]
fn criterion_06_quasiform_cross_validation() {
    criterion(6, "word-sum quasiform vs sewing expansion, 1e-6", "psi-crosscheck");
}

#[test]
fn criterion_07_holomorphic_form_span() {
    criterion(7, "holomorphic-form evaluation matrix has rank 3", "theta-rank");
}

#[test]
fn criterion_08_quasi_periodicity_consistency() {
    criterion(8, "extracted vs sewn form coefficients, 1e-5", "theta-consistency");
}

#[test]
fn criterion_09_formal_mobius_invariance_genus_g() {
    criterion(9, "derivation annihilates the partition series, exact", "mobius-g");
}

#[test]
fn criterion_10_degeneration() {
    criterion(10, "rho -> 0 collapses to the next genus down, exact", "degeneration");
}

#[test]
fn criterion_11_genus_g_ward_identity() {
    criterion(11, "genus-g Ward residual vanishes through rho^2, exact", "ward-g");
}

#[test]
fn criterion_12_genus_g_reduction_identity() {
    criterion(12, "genus-2 reduction at sampled points, node-independent, 1e-5", "reduction-g");
}

#[test]
fn criterion_13_voa_axioms() {
    criterion(13, "algebra axioms through weight 5, exact", "voa-axioms");
}
