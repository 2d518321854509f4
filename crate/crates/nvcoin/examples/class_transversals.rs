//! Reidemeister class transversals on torus targets, and transport of
//! class representatives between branches of one sigma-orbit.

use nvcoin::crystal::{FlatGroup, GroupElement, SingleMorphism};
use nvcoin::matrix::ivec;
use nvcoin::nvmorph::{
    reidemeister_classes_torus, sigma_analysis, transport_class, NvMorphism, Perm,
    SemidirectElement,
};
use nvcoin::Error;

fn main() -> Result<(), Error> {
    // a 4-valued self-map of the circle whose sigma is a 4-cycle:
    // lift factors t/4 + k/4
    let torus = FlatGroup::torus(1);
    let img = SemidirectElement {
        tuple: vec![
            GroupElement::translation(ivec(&[0])),
            GroupElement::translation(ivec(&[0])),
            GroupElement::translation(ivec(&[0])),
            GroupElement::translation(ivec(&[1])),
        ],
        perm: Perm::from_images(vec![1, 2, 3, 0])?,
    };
    let phi = NvMorphism::new(4, torus.clone(), torus.clone(), vec![img], vec![])?;
    assert!(phi.verify());
    let psi = SingleMorphism::identity(&torus);

    let sa = sigma_analysis(&phi);
    println!("orbits: {:?} ([Pi:S] = {})", sa.orbits, sa.image_order);

    for orbit in &sa.orbits {
        let i = orbit[0];
        let (count, reps, lattice) = reidemeister_classes_torus(&phi, &psi, &sa, i)?;
        let cols: Vec<String> = (0..lattice.rank())
            .map(|j| {
                let col: Vec<String> =
                    lattice.basis().col(j).iter().map(|x| x.to_string()).collect();
                format!("({})", col.join(","))
            })
            .collect();
        println!(
            "branch {} classes: {count}, image lattice span{{{}}}, representatives {:?}",
            i + 1,
            cols.join(", "),
            reps
        );
        // transport each representative to the next branch of the orbit and
        // back: the class labels biject
        if orbit.len() > 1 {
            let gamma = GroupElement::translation(ivec(&[1]));
            for rep in &reps {
                let alpha = GroupElement::translation(rep.clone());
                let (moved, j) = transport_class(&phi, &psi, &alpha, &gamma, i)?;
                let back_gamma = torus.invert(&gamma)?;
                let (back, j0) = transport_class(&phi, &psi, &moved, &back_gamma, j)?;
                println!(
                    "  ({}, {:?}) -> branch {} as {:?} -> back to branch {} as {:?}",
                    i + 1,
                    rep,
                    j + 1,
                    moved.trans,
                    j0 + 1,
                    back.trans
                );
                assert_eq!(back, alpha);
            }
        }
    }
    Ok(())
}
