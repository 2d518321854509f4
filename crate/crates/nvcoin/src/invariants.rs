//! The Lefschetz, Reidemeister and Nielsen coincidence invariants of a
//! pair `(phi, psi)` on flat manifolds, evaluated by exact determinant
//! sums over the target holonomy transversal, together with the averaging
//! diagnostics over the splitting cover and the root specialization.
//!
//! All three invariants come from one family of determinants
//! `det(psi_* - A_alpha M_i)`: summed plainly for L, with absolute values
//! for N, and with `|0| = infinity` for R, each divided by the source
//! holonomy order. Integrality of the results is asserted, never rounded.

use num_traits::{Signed, Zero};

use crate::crystal::{GroupElement, SingleMorphism};
use crate::error::{Error, Result};
use crate::lattice::{Count, Lattice};
use crate::matrix::{IVec, QMat};
use crate::nvmorph::{
    branch_lie_matrix, coin_and_fiber, reidemeister_classes_torus, sigma_analysis, NvMorphism, SigmaAnalysis,
};
use crate::rational::{is_integer, rat_of, Int, Rat};

/// Determinants `det(psi_* - A_j M_i)` for one branch, one per target
/// holonomy coset.
#[derive(Clone, Debug)]
pub struct BranchTerm {
    pub branch: usize,
    pub lie_matrix: QMat,
    pub dets: Vec<(usize, Rat)>,
}

/// Cover invariants `L, R, N` of one lifted pair `(f_i, g)` over the
/// splitting cover.
#[derive(Clone, Debug)]
pub struct CoverInvariants {
    pub branch: usize,
    pub l: Int,
    pub r: Count,
    pub n: Int,
}

/// One evaluated coin condition `coin(tau_alpha phi_i, psi) <= S`.
#[derive(Clone, Debug)]
pub struct CoinCheck {
    pub branch: usize,
    pub alpha: GroupElement,
    /// Whether the classes at this alpha are essential (nonzero determinant).
    pub essential: bool,
    pub kernel: Lattice,
    pub kernel_in_splitting: bool,
    pub u_image_size: Int,
    pub fiber_size: Option<Int>,
    pub trivial: bool,
}

/// A rational average that may be infinite.
#[derive(Clone, PartialEq, Debug)]
pub enum Average {
    Finite(Rat),
    Infinite,
}

impl std::fmt::Display for Average {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Average::Finite(v) => write!(f, "{}", crate::rational::format_rat(v)),
            Average::Infinite => write!(f, "inf"),
        }
    }
}

/// The averaging block: cover invariants, both sides of each averaging
/// relation, and the coin-condition verdicts.
#[derive(Clone, Debug)]
pub struct AveragingReport {
    /// `[Pi : S]`.
    pub index_pi_s: usize,
    /// `[S : S cap Gamma]`, the holonomy order of the splitting cover.
    pub splitting_holonomy_order: usize,
    pub cover: Vec<CoverInvariants>,
    pub l_cover_sum: Int,
    pub l_identity_holds: bool,
    pub r_average: Average,
    pub n_average: Rat,
    pub r_equality_holds: bool,
    pub n_equality_holds: bool,
    /// `None` when skipped because `R` is infinite.
    pub r_condition: Option<bool>,
    pub n_condition: bool,
    pub coin_checks: Vec<CoinCheck>,
}

/// Reidemeister class data for one sigma-orbit (torus targets).
#[derive(Clone, Debug)]
pub struct OrbitClasses {
    pub orbit_rep: usize,
    pub orbit: Vec<usize>,
    pub count: Count,
    pub representatives: Vec<IVec>,
}

/// Full invariant report for a pair `(phi, psi)`.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub l: Int,
    pub r: Count,
    pub n: Int,
    pub source_holonomy_order: usize,
    pub target_holonomy_order: usize,
    pub branch_terms: Vec<BranchTerm>,
    /// Class transversals per orbit; only for torus targets.
    pub classes: Option<Vec<OrbitClasses>>,
    pub averaging: AveragingReport,
}

fn check_pair(phi: &NvMorphism, psi: &SingleMorphism) -> Result<()> {
    if phi.source != psi.source || phi.target != psi.target {
        return Err(Error::GroupMismatch(
            "phi and psi must share source and target groups".to_string(),
        ));
    }
    Ok(())
}

/// All branch determinant data for a verified pair.
pub fn branch_determinants(
    phi: &NvMorphism,
    psi: &SingleMorphism,
    sa: &SigmaAnalysis,
) -> Result<Vec<BranchTerm>> {
    check_pair(phi, psi)?;
    let psi_star = psi.lie_matrix()?;
    let transversal = phi.target.holonomy_transversal();
    let mut terms = Vec::with_capacity(phi.n);
    for i in 0..phi.n {
        let m_i = branch_lie_matrix(phi, sa, i)?;
        let dets = transversal
            .iter()
            .map(|(j, a)| (*j, psi_star.sub(&a.mul(&m_i)).det()))
            .collect();
        terms.push(BranchTerm {
            branch: i,
            lie_matrix: m_i,
            dets,
        });
    }
    Ok(terms)
}

fn exact_quotient(sum: Rat, divisor: usize, what: &str) -> Result<Int> {
    let q = sum / rat_of(&Int::from(divisor));
    if !is_integer(&q) {
        return Err(Error::NonIntegralResult(format!(
            "{what} = {} is not an integer",
            crate::rational::format_rat(&q)
        )));
    }
    Ok(q.to_integer())
}

fn aggregate(terms: &[BranchTerm], k1: usize) -> Result<(Int, Count, Int)> {
    let mut l_sum = Rat::zero();
    let mut n_sum = Rat::zero();
    let mut infinite = false;
    for term in terms {
        for (_, d) in &term.dets {
            l_sum += d;
            n_sum += d.abs();
            if d.is_zero() {
                infinite = true;
            }
        }
    }
    let l = exact_quotient(l_sum, k1, "L")?;
    let n = exact_quotient(n_sum.clone(), k1, "N")?;
    let r = if infinite {
        Count::Infinite
    } else {
        Count::Finite(exact_quotient(n_sum, k1, "R")?)
    };
    Ok((l, r, n))
}

/// The Lefschetz number `L(f, g)`.
pub fn lefschetz(phi: &NvMorphism, psi: &SingleMorphism) -> Result<Int> {
    let sa = sigma_analysis(phi);
    let terms = branch_determinants(phi, psi, &sa)?;
    Ok(aggregate(&terms, phi.source.holonomy_order())?.0)
}

/// The Reidemeister number `R(f, g)`; infinite iff a determinant vanishes.
pub fn reidemeister(phi: &NvMorphism, psi: &SingleMorphism) -> Result<Count> {
    let sa = sigma_analysis(phi);
    let terms = branch_determinants(phi, psi, &sa)?;
    Ok(aggregate(&terms, phi.source.holonomy_order())?.1)
}

/// The Nielsen number `N(f, g)`.
pub fn nielsen(phi: &NvMorphism, psi: &SingleMorphism) -> Result<Int> {
    let sa = sigma_analysis(phi);
    let terms = branch_determinants(phi, psi, &sa)?;
    Ok(aggregate(&terms, phi.source.holonomy_order())?.2)
}

/// Lie matrix of the restriction of `psi` to the subgroup with translation
/// lattice `lat`, through the refinement by the target holonomy order.
fn restricted_lie_matrix(psi: &SingleMorphism, lat: &Lattice) -> Result<QMat> {
    let d = psi.source.dim();
    assert!(lat.is_full_rank());
    let m = Int::from(psi.target.holonomy_order());
    let mut cols = Vec::with_capacity(d);
    for b in 0..d {
        let u: IVec = lat.basis().col(b).iter().map(|x| x * &m).collect();
        let img = psi.apply_translation(&u);
        if img.hol != 0 {
            return Err(Error::ImageNotTranslation);
        }
        cols.push(img.trans.iter().map(rat_of).collect::<Vec<Rat>>());
    }
    let w = QMat::from_columns(d, cols);
    let scaled = lat.basis().scale(&m).to_rat();
    Ok(w.mul(&scaled.inverse().expect("full-rank basis")))
}

/// Lie matrix of the restriction of branch `i` of `phi` to the splitting
/// lattice, through the refinement by the target holonomy order.
fn restricted_branch_lie_matrix(phi: &NvMorphism, lat: &Lattice, i: usize) -> Result<QMat> {
    let d = phi.source.dim();
    let m = Int::from(phi.target.holonomy_order());
    let mut cols = Vec::with_capacity(d);
    for b in 0..d {
        let u: IVec = lat.basis().col(b).iter().map(|x| x * &m).collect();
        let img = phi.apply_translation(&u).tuple[i].clone();
        if img.hol != 0 {
            return Err(Error::ImageNotTranslation);
        }
        cols.push(img.trans.iter().map(rat_of).collect::<Vec<Rat>>());
    }
    let w = QMat::from_columns(d, cols);
    let scaled = lat.basis().scale(&m).to_rat();
    Ok(w.mul(&scaled.inverse().expect("full-rank basis")))
}

/// Computes the averaging block and asserts every averaging relation; a
/// violated relation is an implementation bug and errors loudly.
pub fn averaging_report(
    phi: &NvMorphism,
    psi: &SingleMorphism,
    sa: &SigmaAnalysis,
    terms: &[BranchTerm],
    l: &Int,
    r: &Count,
    n: &Int,
) -> Result<AveragingReport> {
    let index_pi_s = sa.image_order;
    let k_s = sa.splitting_holonomy_order();
    let l_s = &sa.splitting_lattice;
    let basis_det = l_s.basis().to_rat().det();
    let transversal = phi.target.holonomy_transversal();

    // cover invariants from the restricted morphisms, recomputed rather
    // than derived from the downstairs determinants
    let psi_restricted = restricted_lie_matrix(psi, l_s)?;
    let psi_star = psi.lie_matrix()?;
    if psi_restricted != psi_star {
        return Err(Error::MismatchDetected(
            "restricted psi_* differs from psi_*".to_string(),
        ));
    }
    let mut cover = Vec::with_capacity(phi.n);
    let mut l_cover_sum = Rat::zero();
    let mut r_sum = Rat::zero();
    let mut r_infinite = false;
    let mut n_sum = Rat::zero();
    for i in 0..phi.n {
        let restricted = restricted_branch_lie_matrix(phi, l_s, i)?;
        if restricted != terms[i].lie_matrix {
            return Err(Error::MismatchDetected(format!(
                "restricted branch {i} linear part differs from M_i"
            )));
        }
        let mut l_i = Rat::zero();
        let mut n_i = Rat::zero();
        let mut inf_i = false;
        for (j, a) in &transversal {
            let _ = j;
            let det = psi_restricted.sub(&a.mul(&restricted)).det() * basis_det.clone();
            l_i += det.clone();
            n_i += det.abs();
            if det.is_zero() {
                inf_i = true;
            }
        }
        let l_val = exact_quotient(l_i, k_s, "cover L")?;
        let n_val = exact_quotient(n_i.clone(), k_s, "cover N")?;
        let r_val = if inf_i {
            r_infinite = true;
            Count::Infinite
        } else {
            let v = exact_quotient(n_i, k_s, "cover R")?;
            r_sum += rat_of(&v);
            Count::Finite(v)
        };
        l_cover_sum += rat_of(&l_val);
        n_sum += rat_of(&n_val);
        cover.push(CoverInvariants {
            branch: i,
            l: l_val,
            r: r_val,
            n: n_val,
        });
    }

    let l_cover_sum_int = l_cover_sum.to_integer();
    let l_identity_holds = l * Int::from(index_pi_s) == l_cover_sum_int;
    if !l_identity_holds {
        return Err(Error::MismatchDetected(format!(
            "Lefschetz averaging identity fails: L*[Pi:S] = {} vs sum {}",
            l * Int::from(index_pi_s),
            l_cover_sum_int
        )));
    }

    // coin-condition checks per orbit representative
    let mut coin_checks = Vec::new();
    for orbit in &sa.orbits {
        let i = orbit[0];
        let branch_det_nonzero: Vec<bool> = terms[i].dets.iter().map(|(_, d)| !d.is_zero()).collect();
        let alphas: Vec<(GroupElement, bool)> = if phi.target.is_torus() {
            let finite = branch_det_nonzero[0];
            if finite {
                let (_, reps, _) = reidemeister_classes_torus(phi, psi, sa, i)?;
                reps.into_iter()
                    .map(|v| (GroupElement::translation(v), true))
                    .collect()
            } else {
                vec![(phi.target.identity(), false)]
            }
        } else {
            // the linearized condition depends only on the holonomy coset
            transversal
                .iter()
                .enumerate()
                .map(|(idx, (j, _))| {
                    (
                        GroupElement {
                            hol: *j,
                            trans: crate::matrix::ivec_zero(phi.target.dim()),
                        },
                        branch_det_nonzero[idx],
                    )
                })
                .collect()
        };
        for (alpha, essential) in alphas {
            let cf = coin_and_fiber(phi, psi, sa, i, &alpha)?;
            coin_checks.push(CoinCheck {
                branch: i,
                alpha,
                essential,
                kernel: cf.kernel,
                kernel_in_splitting: cf.kernel_in_splitting,
                u_image_size: cf.u_image_size,
                fiber_size: cf.fiber_size,
                trivial: cf.trivial,
            });
        }
    }

    let r_average = if r_infinite {
        Average::Infinite
    } else {
        Average::Finite(r_sum / rat_of(&Int::from(index_pi_s)))
    };
    let n_average = n_sum / rat_of(&Int::from(index_pi_s));

    // R averaging: R >= average, equality iff a cover R is infinite or all
    // coin conditions hold
    let (r_equality_holds, r_condition) = match (r, &r_average) {
        (Count::Infinite, Average::Infinite) => (true, None),
        (Count::Infinite, Average::Finite(_)) => {
            return Err(Error::MismatchDetected(
                "R infinite but every cover R finite".to_string(),
            ));
        }
        (Count::Finite(_), Average::Infinite) => {
            return Err(Error::MismatchDetected(
                "R finite but a cover R is infinite".to_string(),
            ));
        }
        (Count::Finite(rv), Average::Finite(avg)) => {
            let rv_rat = rat_of(rv);
            if rv_rat < *avg {
                return Err(Error::MismatchDetected(format!(
                    "R averaging inequality fails: {rv} < {}",
                    crate::rational::format_rat(avg)
                )));
            }
            let equality = rv_rat == *avg;
            let condition = coin_checks.iter().all(|c| c.trivial);
            if equality != condition {
                return Err(Error::MismatchDetected(
                    "R averaging equality condition is inconsistent with the coin verdicts"
                        .to_string(),
                ));
            }
            (equality, Some(condition))
        }
    };

    // N averaging: N >= average, equality iff coin conditions hold at all
    // essential classes
    let n_rat = rat_of(n);
    if n_rat < n_average {
        return Err(Error::MismatchDetected(format!(
            "N averaging inequality fails: {n} < {}",
            crate::rational::format_rat(&n_average)
        )));
    }
    let n_equality_holds = n_rat == n_average;
    let n_condition = coin_checks
        .iter()
        .filter(|c| c.essential)
        .all(|c| c.trivial);
    if n_equality_holds != n_condition {
        return Err(Error::MismatchDetected(
            "N averaging equality condition is inconsistent with the coin verdicts".to_string(),
        ));
    }

    Ok(AveragingReport {
        index_pi_s,
        splitting_holonomy_order: k_s,
        cover,
        l_cover_sum: l_cover_sum_int,
        l_identity_holds,
        r_average,
        n_average,
        r_equality_holds,
        n_equality_holds,
        r_condition,
        n_condition,
        coin_checks,
    })
}

/// Full report: invariants, class tables for torus targets, averaging
/// diagnostics. Verifies both morphisms first.
pub fn compute_report(phi: &NvMorphism, psi: &SingleMorphism) -> Result<InvariantReport> {
    check_pair(phi, psi)?;
    if !phi.verify() {
        return Err(Error::InvalidInput(
            "phi is not a homomorphism (relator check failed)".to_string(),
        ));
    }
    if !psi.verify() {
        return Err(Error::InvalidInput(
            "psi is not a homomorphism (relator check failed)".to_string(),
        ));
    }
    let sa = sigma_analysis(phi);
    let terms = branch_determinants(phi, psi, &sa)?;
    let k1 = phi.source.holonomy_order();
    let (l, r, n) = aggregate(&terms, k1)?;
    if n.is_negative() {
        return Err(Error::MismatchDetected("N < 0".to_string()));
    }
    if let Count::Finite(rv) = &r {
        if &n > rv {
            return Err(Error::MismatchDetected(format!("N = {n} exceeds R = {rv}")));
        }
    }

    let classes = if phi.target.is_torus() {
        let mut orbit_classes = Vec::new();
        let mut class_sum = Count::Finite(Int::zero());
        for orbit in &sa.orbits {
            let i = orbit[0];
            let (count, reps, _) = reidemeister_classes_torus(phi, psi, &sa, i)?;
            class_sum = match (&class_sum, &count) {
                (Count::Finite(a), Count::Finite(b)) => Count::Finite(a + b),
                _ => Count::Infinite,
            };
            orbit_classes.push(OrbitClasses {
                orbit_rep: i,
                orbit: orbit.clone(),
                count,
                representatives: reps,
            });
        }
        // the class decomposition must agree with the determinant formula
        if class_sum != r {
            return Err(Error::MismatchDetected(format!(
                "class count {class_sum} disagrees with R = {r}"
            )));
        }
        Some(orbit_classes)
    } else {
        None
    };

    let averaging = averaging_report(phi, psi, &sa, &terms, &l, &r, &n)?;

    Ok(InvariantReport {
        l,
        r,
        n,
        source_holonomy_order: k1,
        target_holonomy_order: phi.target.holonomy_order(),
        branch_terms: terms,
        classes,
        averaging,
    })
}

/// Root invariants: the coincidence invariants against the trivial
/// morphism (induced by a constant map).
pub fn root_report(phi: &NvMorphism) -> Result<InvariantReport> {
    let psi = SingleMorphism::trivial(&phi.source, &phi.target);
    compute_report(phi, &psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::tests::half_turn_group;
    use crate::crystal::FlatGroup;
    use crate::matrix::{ivec, IMat};
    use crate::nvmorph::tests::three_valued_fixture;
    use crate::rational::int;

    #[test]
    fn doubling_map_invariants() {
        // n = 1 torus, phi_* = 2I, psi_* = I: L = det(-I) = 1, R = N = 1
        let f = IMat::from_rows(vec![ivec(&[2, 0]), ivec(&[0, 2])]);
        let phi = NvMorphism::from_single(&SingleMorphism::torus_by_matrix(&f));
        let psi = SingleMorphism::identity(&FlatGroup::torus(2));
        let report = compute_report(&phi, &psi).unwrap();
        assert_eq!(report.l, int(1));
        assert_eq!(report.r, Count::finite(1));
        assert_eq!(report.n, int(1));
    }

    #[test]
    fn identity_pair_invariants() {
        let psi = SingleMorphism::identity(&FlatGroup::torus(2));
        let phi = NvMorphism::from_single(&psi);
        let report = compute_report(&phi, &psi).unwrap();
        assert_eq!(report.l, int(0));
        assert_eq!(report.r, Count::Infinite);
        assert_eq!(report.n, int(0));
    }

    #[test]
    fn three_valued_root_invariants() {
        let phi = three_valued_fixture();
        let report = root_report(&phi).unwrap();
        assert_eq!(report.l, int(0));
        assert_eq!(report.r, Count::finite(2));
        assert_eq!(report.n, int(2));
        // averaging block: [Pi:S] = 2, cover R = (1, 1, 2)
        let avg = &report.averaging;
        assert_eq!(avg.index_pi_s, 2);
        let rs: Vec<Count> = avg.cover.iter().map(|c| c.r.clone()).collect();
        assert_eq!(
            rs,
            vec![Count::finite(1), Count::finite(1), Count::finite(2)]
        );
        assert!(avg.l_identity_holds);
        assert!(avg.r_equality_holds);
        assert_eq!(avg.r_condition, Some(true));
        assert!(avg.n_equality_holds);
    }

    #[test]
    fn circle_square_root_invariants() {
        // 2-valued circle map t -> {t/2, t/2 + 1/2} against the identity
        let torus = FlatGroup::torus(1);
        let img = crate::nvmorph::SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0])),
                GroupElement::translation(ivec(&[1])),
            ],
            perm: crate::nvmorph::Perm::from_images(vec![1, 0]).unwrap(),
        };
        let phi = NvMorphism::new(2, torus.clone(), torus.clone(), vec![img], vec![]).unwrap();
        assert!(phi.verify());
        let psi = SingleMorphism::identity(&torus);
        let report = compute_report(&phi, &psi).unwrap();
        // |1 - 1/2| + |1 - 1/2| = 1
        assert_eq!(report.l, int(1));
        assert_eq!(report.r, Count::finite(1));
        assert_eq!(report.n, int(1));
    }

    #[test]
    fn split_map_averages_are_plain_sums() {
        // trivial sigma: S = Pi, N = sum of branch Nielsen numbers
        let torus = FlatGroup::torus(1);
        let img = crate::nvmorph::SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[2])),
                GroupElement::translation(ivec(&[3])),
            ],
            perm: crate::nvmorph::Perm::identity(2),
        };
        let phi = NvMorphism::new(2, torus.clone(), torus.clone(), vec![img], vec![]).unwrap();
        let psi = SingleMorphism::identity(&torus);
        let report = compute_report(&phi, &psi).unwrap();
        assert_eq!(report.averaging.index_pi_s, 1);
        // branches have degrees 2 and 3: N = |1-2| + |1-3| = 3
        assert_eq!(report.n, int(3));
        let n_cover_sum: Int = report.averaging.cover.iter().map(|c| c.n.clone()).sum();
        assert_eq!(n_cover_sum, int(3));
    }

    #[test]
    fn half_turn_identity_pair() {
        let g = half_turn_group();
        let psi = SingleMorphism::identity(&g);
        let phi = NvMorphism::from_single(&psi);
        let report = compute_report(&phi, &psi).unwrap();
        assert_eq!(report.l, int(0));
        assert_eq!(report.r, Count::Infinite);
        assert_eq!(report.n, int(0));
        assert!(report.classes.is_none());
    }

    #[test]
    fn half_turn_nondegenerate_endomorphism_pair() {
        let g = half_turn_group();
        // phi: t1 -> t1^3, t2 -> t2^2, t3 -> t3^2, g -> t1 g; psi = id
        let phi_single = SingleMorphism::new(
            g.clone(),
            g.clone(),
            vec![
                GroupElement::translation(ivec(&[3, 0, 0])),
                GroupElement::translation(ivec(&[0, 2, 0])),
                GroupElement::translation(ivec(&[0, 0, 2])),
            ],
            vec![GroupElement {
                hol: 1,
                trans: ivec(&[1, 0, 0]),
            }],
        )
        .unwrap();
        assert!(phi_single.verify());
        let phi = NvMorphism::from_single(&phi_single);
        let psi = SingleMorphism::identity(&g);
        let report = compute_report(&phi, &psi).unwrap();
        // dets: id coset: det(I - diag(3,2,2)) = -2; g coset: det(I - diag(3,-2,-2)) = -18
        assert_eq!(report.l, int(-10));
        assert_eq!(report.r, Count::finite(10));
        assert_eq!(report.n, int(10));
        assert!(report.averaging.l_identity_holds);
        assert!(report.averaging.r_equality_holds);
    }

    #[test]
    fn degenerate_branch_forces_infinite_r() {
        // one singular branch: contributes 0 to N, R becomes infinite
        let torus = FlatGroup::torus(1);
        let img = crate::nvmorph::SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[1])),
                GroupElement::translation(ivec(&[2])),
            ],
            perm: crate::nvmorph::Perm::identity(2),
        };
        let phi = NvMorphism::new(2, torus.clone(), torus.clone(), vec![img], vec![]).unwrap();
        let psi = SingleMorphism::identity(&torus);
        let report = compute_report(&phi, &psi).unwrap();
        // branch degrees 1 and 2: dets 0 and -1
        assert_eq!(report.r, Count::Infinite);
        assert_eq!(report.n, int(1));
        assert_eq!(report.l, int(-1));
    }

    #[test]
    fn degenerate_kernel_fixture_diagnostics() {
        // engineered fixture: third branch diag(0,-1), root case; its coin
        // kernel escapes the splitting lattice but the class is inessential
        let torus = FlatGroup::torus(2);
        let e1 = crate::nvmorph::SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0, 0])),
                GroupElement::translation(ivec(&[1, 0])),
                GroupElement::translation(ivec(&[0, 0])),
            ],
            perm: crate::nvmorph::Perm::from_images(vec![1, 0, 2]).unwrap(),
        };
        let e2 = crate::nvmorph::SemidirectElement {
            tuple: vec![
                GroupElement::translation(ivec(&[0, -1])),
                GroupElement::translation(ivec(&[0, -1])),
                GroupElement::translation(ivec(&[0, -1])),
            ],
            perm: crate::nvmorph::Perm::identity(3),
        };
        let phi = NvMorphism::new(3, torus.clone(), torus, vec![e1, e2], vec![]).unwrap();
        let report = root_report(&phi).unwrap();
        assert_eq!(report.r, Count::Infinite);
        assert_eq!(report.n, int(1));
        let avg = &report.averaging;
        assert_eq!(avg.r_condition, None); // skipped: R infinite
        assert!(avg.n_equality_holds);
        assert!(avg.n_condition);
        // the degenerate branch shows a nontrivial kernel verdict
        let degenerate = avg
            .coin_checks
            .iter()
            .find(|c| c.branch == 2)
            .expect("check for third branch");
        assert!(!degenerate.essential);
        assert!(!degenerate.kernel_in_splitting);
    }

    #[test]
    fn n1_reduction_matches_classical_formulas() {
        for (f_rows, g_rows) in [
            ([[3i64, 1], [0, 2]], [[1i64, 0], [0, 1]]),
            ([[2, 0], [1, -1]], [[0, 1], [1, 0]]),
        ] {
            let f = IMat::from_rows(vec![ivec(&f_rows[0]), ivec(&f_rows[1])]);
            let gm = IMat::from_rows(vec![ivec(&g_rows[0]), ivec(&g_rows[1])]);
            let phi = NvMorphism::from_single(&SingleMorphism::torus_by_matrix(&f));
            let psi = SingleMorphism::torus_by_matrix(&gm);
            let diff = gm.to_rat().sub(&f.to_rat());
            let det = diff.det();
            let report = compute_report(&phi, &psi).unwrap();
            assert_eq!(rat_of(&report.l), det);
            assert_eq!(rat_of(&report.n), det.abs());
        }
    }
}
