//! The averaging block: cover invariants over the splitting cover, both
//! sides of each averaging relation, and the coin-condition verdicts --
//! including a degenerate fixture whose coin kernel escapes the splitting
//! subgroup.

use nvcoin::invariants::compute_report;
use nvcoin::io::{affine_pair_from_wire, Document};
use nvcoin::oracle::derive_morphism;
use nvcoin::{fixtures, Error};

fn show(name: &str) -> Result<(), Error> {
    let Some(Document::AffinePair(wire)) = fixtures::get(name) else {
        panic!("{name} is not an affine fixture");
    };
    let (f, g) = affine_pair_from_wire(&wire)?;
    let (phi, psi) = derive_morphism(&f, &g)?;
    let report = compute_report(&phi, &psi)?;
    let avg = &report.averaging;
    println!("{name}: L = {}, R = {}, N = {}", report.l, report.r, report.n);
    println!("  [Pi:S] = {}", avg.index_pi_s);
    for c in &avg.cover {
        println!(
            "  cover pair {}: L = {}, R = {}, N = {}",
            c.branch + 1,
            c.l,
            c.r,
            c.n
        );
    }
    println!(
        "  L identity: L*[Pi:S] = {} = cover sum {}",
        &report.l * nvcoin::rational::Int::from(avg.index_pi_s),
        avg.l_cover_sum
    );
    println!(
        "  R: average {} -> {}",
        avg.r_average,
        if avg.r_equality_holds { "equality" } else { "strict inequality" }
    );
    println!(
        "  N: average {} -> {}",
        nvcoin::rational::format_rat(&avg.n_average),
        if avg.n_equality_holds { "equality" } else { "strict inequality" }
    );
    for check in &avg.coin_checks {
        println!(
            "  coin check: branch {}, alpha = (hol {}, {:?}): kernel rank {}, in splitting: {}, u-image {}, fiber {:?}{}",
            check.branch + 1,
            check.alpha.hol,
            check.alpha.trans,
            check.kernel.rank(),
            check.kernel_in_splitting,
            check.u_image_size,
            check.fiber_size,
            if check.essential { "" } else { " (inessential)" }
        );
    }
    Ok(())
}

fn main() -> Result<(), Error> {
    show("torus-3valued-root")?;
    println!();
    show("torus-3valued-degenerate")?;
    Ok(())
}
