//! Brute-force geometric verification: enumerate the coincidence points of
//! affine n-valued torus maps and check every count against the
//! determinant formulas.

use nvcoin::oracle::{oracle_report, AffineMap, AffineNValuedMap};
use nvcoin::matrix::QMat;
use nvcoin::rational::{format_rat, rat, rat_int};
use nvcoin::Error;

fn show(name: &str, f: &AffineNValuedMap, g: &AffineMap) -> Result<(), Error> {
    let report = oracle_report(f, g)?;
    println!(
        "{name}: #Coin = {}, essential classes = {}, index sum = {}",
        report.coincidence_count, report.essential_classes, report.index_sum
    );
    println!(
        "  formulas: L = {}, R = {}, N = {}",
        report.report.l, report.report.r, report.report.n
    );
    for check in &report.checks {
        println!("  verified {check}");
    }
    Ok(())
}

fn main() -> Result<(), Error> {
    // square-root map of the circle vs the identity
    let half = QMat::from_rows(vec![vec![rat(1, 2)]]);
    let sqrt2 = AffineNValuedMap {
        dim: 1,
        n: 2,
        branches: vec![(half.clone(), vec![rat_int(0)]), (half, vec![rat(1, 2)])],
    };
    show("circle square root vs id", &sqrt2, &AffineMap::identity(1))?;

    // cube-root map of the circle vs the identity
    let third = QMat::from_rows(vec![vec![rat(1, 3)]]);
    let sqrt3 = AffineNValuedMap {
        dim: 1,
        n: 3,
        branches: vec![
            (third.clone(), vec![rat_int(0)]),
            (third.clone(), vec![rat(1, 3)]),
            (third, vec![rat(2, 3)]),
        ],
    };
    show("circle cube root vs id", &sqrt3, &AffineMap::identity(1))?;

    // doubling map of the 2-torus vs the identity
    let two = QMat::from_rows(vec![
        vec![rat_int(2), rat_int(0)],
        vec![rat_int(0), rat_int(2)],
    ]);
    let doubling = AffineNValuedMap {
        dim: 2,
        n: 1,
        branches: vec![(two, vec![rat_int(0), rat_int(0)])],
    };
    show("torus doubling vs id", &doubling, &AffineMap::identity(2))?;

    // homotopy invariance, witnessed geometrically: shifting every branch
    // offset by the same rational vector moves the points but not the counts
    let mut shifted = sqrt3.clone();
    for (_, c) in &mut shifted.branches {
        c[0] = &c[0] + rat(1, 7);
    }
    let base = oracle_report(&sqrt3, &AffineMap::identity(1))?;
    let moved = oracle_report(&shifted, &AffineMap::identity(1))?;
    let set = nvcoin::oracle::enumerate_coincidences(&shifted, &AffineMap::identity(1))?;
    println!(
        "offset-perturbed cube root: points now at {:?}, same N = {} = {}",
        set.points
            .iter()
            .map(|p| format_rat(&p.point[0]))
            .collect::<Vec<_>>(),
        base.report.n,
        moved.report.n
    );
    Ok(())
}
