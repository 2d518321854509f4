//! Coincidence invariants on a flat manifold with holonomy: the
//! 3-dimensional half-turn manifold. The determinant formulas sum over
//! both holonomy cosets of the target and divide by the source holonomy
//! order.

use nvcoin::crystal::{AffineElement, FlatGroup, GroupElement, SingleMorphism};
use nvcoin::invariants::compute_report;
use nvcoin::matrix::{ivec, QMat};
use nvcoin::nvmorph::NvMorphism;
use nvcoin::rational::{format_rat, rat, rat_int};
use nvcoin::Error;

fn main() -> Result<(), Error> {
    let rot = QMat::from_rows(vec![
        vec![rat_int(1), rat_int(0), rat_int(0)],
        vec![rat_int(0), rat_int(-1), rat_int(0)],
        vec![rat_int(0), rat_int(0), rat_int(-1)],
    ]);
    let g = AffineElement::new(rot, vec![rat(1, 2), rat_int(0), rat_int(0)]);
    let group = FlatGroup::new(3, &[g])?;
    println!(
        "half-turn group: dimension {}, holonomy order {}",
        group.dim(),
        group.holonomy_order()
    );

    // the identity pair: every determinant vanishes
    let id = SingleMorphism::identity(&group);
    let report = compute_report(&NvMorphism::from_single(&id), &id)?;
    println!(
        "identity pair: L = {}, R = {}, N = {}",
        report.l, report.r, report.n
    );

    // a nondegenerate endomorphism: t1 -> t1^3, t2 -> t2^2, t3 -> t3^2,
    // g -> t1 g, against the identity
    let endo = SingleMorphism::new(
        group.clone(),
        group.clone(),
        vec![
            GroupElement::translation(ivec(&[3, 0, 0])),
            GroupElement::translation(ivec(&[0, 2, 0])),
            GroupElement::translation(ivec(&[0, 0, 2])),
        ],
        vec![GroupElement {
            hol: 1,
            trans: ivec(&[1, 0, 0]),
        }],
    )?;
    assert!(endo.verify());
    println!(
        "endomorphism linear part: {:?}",
        endo.lie_matrix()?
    );
    let phi = NvMorphism::from_single(&endo);
    let report = compute_report(&phi, &id)?;
    println!(
        "endomorphism vs identity: L = {}, R = {}, N = {}",
        report.l, report.r, report.n
    );
    for term in &report.branch_terms {
        let dets: Vec<String> = term
            .dets
            .iter()
            .map(|(j, d)| format!("coset {j}: {}", format_rat(d)))
            .collect();
        println!("  determinants: {}", dets.join(", "));
    }
    println!(
        "  averaging: [Pi:S] = {}, cover holonomy order {}",
        report.averaging.index_pi_s, report.averaging.splitting_holonomy_order
    );
    Ok(())
}
