//! The worked 3-valued example: from the affine lift data alone, derive
//! the induced morphism, analyse its sigma-orbits and stabilizers, count
//! root classes downstairs and on the splitting cover, and let the oracle
//! find the actual roots.

use nvcoin::invariants::root_report;
use nvcoin::io::{affine_pair_from_wire, Document};
use nvcoin::nvmorph::{
    coin_and_fiber, reidemeister_classes_torus, reidemeister_classes_torus_over, sigma_analysis,
};
use nvcoin::oracle::{derive_morphism, enumerate_coincidences};
use nvcoin::rational::format_rat;
use nvcoin::{fixtures, Error, Lattice};

fn basis_string(lat: &Lattice) -> String {
    let cols: Vec<String> = (0..lat.rank())
        .map(|j| {
            let col: Vec<String> = lat.basis().col(j).iter().map(|x| x.to_string()).collect();
            format!("({})", col.join(","))
        })
        .collect();
    format!("span{{{}}}", cols.join(", "))
}

fn main() -> Result<(), Error> {
    let Some(Document::AffinePair(wire)) = fixtures::get("torus-3valued-root") else {
        unreachable!("built-in fixture");
    };
    let (f, g) = affine_pair_from_wire(&wire)?;
    println!("lift factors:");
    for (i, (m, c)) in f.branches.iter().enumerate() {
        let rows: Vec<String> = (0..m.rows())
            .map(|r| {
                let row: Vec<String> = m.row(r).iter().map(format_rat).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        println!(
            "  f_{}: M = {}  c = ({})",
            i + 1,
            rows.join(" "),
            c.iter().map(format_rat).collect::<Vec<_>>().join(", ")
        );
    }

    let (phi, psi) = derive_morphism(&f, &g)?;
    println!("derived morphism verifies: {}", phi.verify());

    let sa = sigma_analysis(&phi);
    println!("[Pi:S] = {}", sa.image_order);
    println!("splitting lattice L_S = {}", basis_string(&sa.splitting_lattice));
    for (i, b) in sa.branches.iter().enumerate() {
        println!(
            "  S_{}: lattice {}, [Pi:S_i] = {}, [S_i:S] = {}",
            i + 1,
            basis_string(&b.lattice),
            b.orbit_size,
            b.stab_order
        );
    }

    // root classes of the third branch: downstairs vs splitting cover
    let (down, down_reps, _) = reidemeister_classes_torus(&phi, &psi, &sa, 2)?;
    let (up, up_reps, _) =
        reidemeister_classes_torus_over(&phi, &psi, 2, &sa.splitting_lattice, &sa.s_hol_cosets)?;
    println!("branch 3 root classes downstairs: {down} {down_reps:?}");
    println!("branch 3 root classes on the cover: {up} {up_reps:?}");
    let cf = coin_and_fiber(&phi, &psi, &sa, 2, &phi.target.identity())?;
    println!(
        "fiber of the class projection: {:?} (so 1 class downstairs lifts to 2 upstairs)",
        cf.fiber_size
    );

    let report = root_report(&phi)?;
    println!("root invariants: L = {}, R = {}, N = {}", report.l, report.r, report.n);

    let set = enumerate_coincidences(&f, &g)?;
    println!("the oracle finds {} roots:", set.len());
    for p in &set.points {
        println!(
            "  ({}) from branch {}, class ({}, {:?}), index {}",
            p.point.iter().map(format_rat).collect::<Vec<_>>().join(", "),
            p.branch + 1,
            p.class.0 + 1,
            p.class.1,
            p.index
        );
    }
    Ok(())
}
