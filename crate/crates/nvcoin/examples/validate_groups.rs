//! Validating flat-manifold group data: a torus, the 3-dimensional
//! half-turn Bieberbach group, and two groups that must be rejected
//! (the Klein bottle for orientability, the point reflection for torsion).

use nvcoin::crystal::{validate_flat_group, AffineElement};
use nvcoin::matrix::QMat;
use nvcoin::rational::{rat, rat_int};

fn show(name: &str, dim: usize, elems: &[AffineElement]) {
    let report = validate_flat_group(dim, elems);
    println!(
        "{name}: {}",
        if report.is_valid() { "valid" } else { "INVALID" }
    );
    for check in &report.checks {
        println!(
            "  [{}] {}{}",
            if check.passed { "ok" } else { "FAIL" },
            check.name,
            if check.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", check.detail)
            }
        );
    }
}

fn main() {
    show("torus T^3", 3, &[]);

    let half_turn = AffineElement::new(
        QMat::from_rows(vec![
            vec![rat_int(1), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(-1), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat_int(-1)],
        ]),
        vec![rat(1, 2), rat_int(0), rat_int(0)],
    );
    show("half-turn flat 3-manifold", 3, &[half_turn]);

    let klein = AffineElement::new(
        QMat::from_rows(vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ]),
        vec![rat(1, 2), rat_int(0)],
    );
    show("Klein bottle group", 2, &[klein]);

    let point_reflection = AffineElement::new(
        QMat::from_rows(vec![
            vec![rat_int(-1), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ]),
        vec![rat_int(0), rat_int(0)],
    );
    show("point-reflection group", 2, &[point_reflection]);
}
