//! Geometric ground truth on tori: affine n-valued maps given by rational
//! lifts, exact enumeration of their coincidence points with an affine
//! single-valued map, Nielsen class labels and transversal local indices,
//! and the comparison record against the algebraic invariants.
//!
//! A lift factor is `f_i(x) = M_i x + c_i`; the single-valued map is
//! `g(x) = G x + b` with `G` integral so that it descends to the torus.
//! Every coincidence of a nondegenerate pair is transversal, so its local
//! index is the sign of `det(G - M_i)`.

use num_traits::{Signed, Zero};

use crate::crystal::{FlatGroup, GroupElement, SingleMorphism, ValidationReport};
use crate::error::{Error, Result};
use crate::invariants::{compute_report, InvariantReport};
use crate::lattice::{
    affine_meets_witness, lattice_index, lattice_intersect, quotient_transversal, Count, Lattice,
};
use crate::matrix::{
    qvec_sub, qvec_to_int, IMat, IVec, QMat, QVec,
};
use crate::nvmorph::{
    reidemeister_classes_torus, sigma_analysis, NvMorphism, Perm, SemidirectElement,
    SigmaAnalysis,
};
use crate::rational::{rat_of, Int, Rat};

/// An affine n-valued torus map, given by the lift factors of one lift.
#[derive(Clone, PartialEq, Debug)]
pub struct AffineNValuedMap {
    pub dim: usize,
    pub n: usize,
    /// `(M_i, c_i)` per branch.
    pub branches: Vec<(QMat, QVec)>,
}

/// An affine single-valued torus map `x -> G x + b`, `G` integral.
#[derive(Clone, PartialEq, Debug)]
pub struct AffineMap {
    pub linear: QMat,
    pub offset: QVec,
}

impl AffineMap {
    /// The constant map at a point.
    pub fn constant(point: QVec) -> AffineMap {
        let d = point.len();
        AffineMap {
            linear: QMat::zero(d, d),
            offset: point,
        }
    }

    pub fn identity(d: usize) -> AffineMap {
        AffineMap {
            linear: QMat::identity(d),
            offset: crate::matrix::qvec_zero(d),
        }
    }
}

/// One enumerated coincidence point with its Nielsen class data.
#[derive(Clone, Debug)]
pub struct CoincidencePoint {
    /// Exact coordinates in `[0,1)^d`.
    pub point: QVec,
    /// Branch (the orbit representative used for enumeration), 0-based.
    pub branch: usize,
    /// The lift shift `alpha` with `g~ = alpha f~_i` at the solving lift.
    pub shift: IVec,
    /// Canonical class label `(orbit representative, coset representative)`.
    pub class: (usize, IVec),
    /// Local index, +1 or -1.
    pub index: i32,
}

/// The coincidence set of a validated nondegenerate pair.
#[derive(Clone, Debug)]
pub struct CoincidenceSet {
    pub points: Vec<CoincidencePoint>,
}

impl CoincidenceSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Class labels with their index sums, sorted.
    pub fn class_table(&self) -> Vec<((usize, IVec), i64, usize)> {
        let mut table: Vec<((usize, IVec), i64, usize)> = Vec::new();
        for p in &self.points {
            match table.iter_mut().find(|(label, _, _)| *label == p.class) {
                Some((_, sum, count)) => {
                    *sum += i64::from(p.index);
                    *count += 1;
                }
                None => table.push((p.class.clone(), i64::from(p.index), 1)),
            }
        }
        table.sort_by(|a, b| a.0.cmp(&b.0));
        table
    }
}

/// The oracle's comparison record against the determinant formulas.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub coincidence_count: usize,
    pub nonempty_classes: usize,
    pub essential_classes: usize,
    pub index_sum: i64,
    pub report: InvariantReport,
    /// Human-readable confirmations, one per cross-check.
    pub checks: Vec<String>,
}

fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Checks equivariance (per lattice generator a permutation and integer
/// shifts must exist) and pairwise branch disjointness.
pub fn validate_map(f: &AffineNValuedMap) -> ValidationReport {
    let mut report = ValidationReport::default();
    let d = f.dim;
    if f.branches.len() != f.n || f.n == 0 {
        report.push("shape", false, "branch count differs from n");
        return report;
    }
    for (m, c) in &f.branches {
        if m.rows() != d || m.cols() != d || c.len() != d {
            report.push("shape", false, "branch dimensions inconsistent");
            return report;
        }
    }
    report.push("shape", true, "");

    // n-valuedness: no two branches may ever collide on the torus
    let mut distinct = true;
    for i in 0..f.n {
        for j in i + 1..f.n {
            let diff_m = f.branches[i].0.sub(&f.branches[j].0);
            let diff_c = qvec_sub(&f.branches[i].1, &f.branches[j].1);
            if let Some(witness) = affine_meets_witness(&diff_m, &diff_c) {
                distinct = false;
                report.push(
                    "n-valued",
                    false,
                    format!(
                        "branches {} and {} collide at x = ({})",
                        i + 1,
                        j + 1,
                        witness
                            .iter()
                            .map(crate::rational::format_rat)
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                );
            }
        }
    }
    if distinct {
        report.push("n-valued", true, "");
    }

    // equivariance: for each generator, each branch must match a unique
    // branch with equal linear part up to an integer shift
    let mut equivariant = true;
    for a in 0..d {
        let mut hit = vec![false; f.n];
        for i in 0..f.n {
            let (m_i, c_i) = &f.branches[i];
            let mut me = m_i.col(a);
            for (x, c) in me.iter_mut().zip(c_i) {
                *x += c;
            }
            let mut matched = None;
            for (j, (m_j, c_j)) in f.branches.iter().enumerate() {
                if m_j != m_i {
                    continue;
                }
                let shift = qvec_sub(&me, c_j);
                if qvec_to_int(&shift).is_some() {
                    if matched.is_some() {
                        // two matches would force a branch collision,
                        // already reported by the n-valued check
                        continue;
                    }
                    matched = Some(j);
                }
            }
            match matched {
                Some(j) if !hit[j] => hit[j] = true,
                _ => {
                    equivariant = false;
                    report.push(
                        "equivariance",
                        false,
                        format!(
                            "generator {} does not permute the branches (branch {} unmatched)",
                            a + 1,
                            i + 1
                        ),
                    );
                }
            }
        }
    }
    if equivariant {
        report.push("equivariance", true, "");
    }
    report
}

fn validate_g(f: &AffineNValuedMap, g: &AffineMap) -> Result<IMat> {
    if g.linear.rows() != f.dim || g.linear.cols() != f.dim || g.offset.len() != f.dim {
        return Err(Error::DimensionMismatch(
            "g has a different dimension than f".to_string(),
        ));
    }
    g.linear.to_int().ok_or_else(|| {
        Error::InvalidInput("g must have an integer linear part to descend to the torus".into())
    })
}

/// Reads the induced morphisms off the lift data: shifts and permutations
/// from equivariance for `phi`, the columns of `G` for `psi`.
pub fn derive_morphism(
    f: &AffineNValuedMap,
    g: &AffineMap,
) -> Result<(NvMorphism, SingleMorphism)> {
    let report = validate_map(f);
    if let Some(fail) = report.failures().first() {
        let detail = format!("{}: {}", fail.name, fail.detail);
        return Err(match fail.name.as_str() {
            "n-valued" => Error::NotNValued(detail),
            "equivariance" => Error::NotEquivariant(detail),
            _ => Error::InvalidInput(detail),
        });
    }
    let g_int = validate_g(f, g)?;
    let d = f.dim;
    let torus = FlatGroup::torus(d);
    let mut lattice_images = Vec::with_capacity(d);
    for a in 0..d {
        // f_i(x + e_a) = phi_i(e_a) + f_{sigma^{-1}(i)}(x)
        let mut tuple = vec![GroupElement::translation(crate::matrix::ivec_zero(d)); f.n];
        let mut inv_images = vec![0usize; f.n];
        for i in 0..f.n {
            let (m_i, c_i) = &f.branches[i];
            let mut me = m_i.col(a);
            for (x, c) in me.iter_mut().zip(c_i) {
                *x += c;
            }
            let (j, shift) = f
                .branches
                .iter()
                .enumerate()
                .find_map(|(j, (m_j, c_j))| {
                    if m_j != m_i {
                        return None;
                    }
                    qvec_to_int(&qvec_sub(&me, c_j)).map(|s| (j, s))
                })
                .expect("validated equivariance");
            inv_images[i] = j;
            tuple[i] = GroupElement::translation(shift);
        }
        let perm = Perm::from_images(inv_images)?.inverse();
        lattice_images.push(SemidirectElement { tuple, perm });
    }
    let phi = NvMorphism::new(f.n, torus.clone(), torus.clone(), lattice_images, vec![])?;
    if !phi.verify() {
        return Err(Error::MismatchDetected(
            "derived morphism fails the relator check".to_string(),
        ));
    }
    // the induced morphism of g only sees the linear part
    let psi = SingleMorphism::torus_by_matrix(&g_int);
    Ok((phi, psi))
}

/// Enumerates all coincidence points of a validated nondegenerate pair,
/// with class labels and local indices, sorted by (class, point).
pub fn enumerate_coincidences(f: &AffineNValuedMap, g: &AffineMap) -> Result<CoincidenceSet> {
    let (phi, psi) = derive_morphism(f, g)?;
    let sa = sigma_analysis(&phi);
    enumerate_with(f, g, &phi, &psi, &sa)
}

fn enumerate_with(
    f: &AffineNValuedMap,
    g: &AffineMap,
    phi: &NvMorphism,
    psi: &SingleMorphism,
    sa: &SigmaAnalysis,
) -> Result<CoincidenceSet> {
    let d = f.dim;
    // degeneracy is refused up front, for every branch
    for (i, (m_i, _)) in f.branches.iter().enumerate() {
        if g.linear.sub(m_i).det().is_zero() {
            return Err(Error::DegenerateBranch(i + 1));
        }
    }
    let mut points = Vec::new();
    for orbit in &sa.orbits {
        let i = orbit[0];
        let (m_i, c_i) = &f.branches[i];
        let t = g.linear.sub(m_i);
        let t_inv = t.inverse().expect("nondegenerate branch");
        // solutions of T x = alpha + c_i - b over all alpha in Z^d form
        // the coset x0 + T^{-1} Z^d
        let x0 = t_inv.mul_vec(&qvec_sub(c_i, &g.offset));
        let (num, q) = t_inv.clear_denominators();
        let lam_num = Lattice::from_generators(&num);
        let q_scaled = Lattice::standard(d).scaled(&q);
        let meet = lattice_intersect(&lam_num, &q_scaled);
        let reps = quotient_transversal(&lam_num, &meet)?;
        let (_, _, class_lattice) = reidemeister_classes_torus(phi, psi, sa, i)?;
        for rep in reps {
            // lambda = rep / q is a lattice point of T^{-1} Z^d
            let lambda: QVec = rep.iter().map(|x| Rat::new(x.clone(), q.clone())).collect();
            let point: QVec = x0
                .iter()
                .zip(&lambda)
                .map(|(a, b)| frac(&(a + b)))
                .collect();
            // alpha = T(x0 + lambda) + b - c_i = T lambda, integral
            let shift =
                qvec_to_int(&t.mul_vec(&lambda)).expect("lift shift must be integral");
            let class_rep = class_lattice.canonical_rep(&shift);
            let det = t.det();
            let index = if det.is_positive() { 1 } else { -1 };
            points.push(CoincidencePoint {
                point,
                branch: i,
                shift,
                class: (i, class_rep),
                index,
            });
        }
    }
    // distinct classes never share points; duplicated points would be a bug
    let mut seen: Vec<&QVec> = Vec::new();
    for p in &points {
        if seen.iter().any(|q| **q == p.point) {
            return Err(Error::MismatchDetected(format!(
                "duplicate coincidence point ({})",
                p.point
                    .iter()
                    .map(crate::rational::format_rat)
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        seen.push(&p.point);
    }
    points.sort_by(|a, b| a.class.cmp(&b.class).then_with(|| a.point.cmp(&b.point)));
    Ok(CoincidenceSet { points })
}

/// Runs the full cross-validation: enumerates the coincidence set, computes
/// the algebraic invariants, and asserts every geometric/algebraic
/// comparison. `MismatchDetected` is the primary self-verification failure.
pub fn oracle_report(f: &AffineNValuedMap, g: &AffineMap) -> Result<OracleReport> {
    let (phi, psi) = derive_morphism(f, g)?;
    let sa = sigma_analysis(&phi);
    let coincidences = enumerate_with(f, g, &phi, &psi, &sa)?;
    let report = compute_report(&phi, &psi)?;

    let table = coincidences.class_table();
    let coincidence_count = coincidences.len();
    let nonempty_classes = table.len();
    let essential_classes = table.iter().filter(|(_, sum, _)| *sum != 0).count();
    let index_sum: i64 = coincidences.points.iter().map(|p| i64::from(p.index)).sum();

    let mut checks = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| -> Result<()> {
        if !ok {
            return Err(Error::MismatchDetected(format!("{name}: {detail}")));
        }
        checks.push(format!("{name}: {detail}"));
        Ok(())
    };

    check(
        "essential-classes = N",
        Int::from(essential_classes) == report.n,
        format!("{essential_classes} vs N = {}", report.n),
    )?;
    check(
        "index-sum = L",
        Int::from(index_sum) == report.l,
        format!("{index_sum} vs L = {}", report.l),
    )?;
    let nonempty_le_r = match &report.r {
        Count::Finite(rv) => &Int::from(nonempty_classes) <= rv,
        Count::Infinite => true,
    };
    check(
        "nonempty-classes <= R",
        nonempty_le_r,
        format!("{nonempty_classes} vs R = {}", report.r),
    )?;
    check(
        "N <= #Coin",
        report.n <= Int::from(coincidence_count),
        format!("N = {} vs {} points", report.n, coincidence_count),
    )?;
    // nondegenerate affine pairs fill every class with a single transversal
    // point, so the count, the class count and R all agree
    check(
        "#Coin = N = R",
        Int::from(coincidence_count) == report.n
            && report.r == Count::Finite(Int::from(coincidence_count)),
        format!(
            "{} points, N = {}, R = {}",
            coincidence_count, report.n, report.r
        ),
    )?;
    // the per-orbit point count matches [Z^d : L_i] * |det(G - M_i)|
    for orbit in &sa.orbits {
        let i = orbit[0];
        let l_i = &sa.branches[i].lattice;
        let idx = match lattice_index(&Lattice::standard(f.dim), l_i).expect("sublattice") {
            Count::Finite(v) => v,
            Count::Infinite => unreachable!("stabilizer lattice has finite index"),
        };
        let det = g.linear.sub(&f.branches[i].0).det().abs();
        let expected = rat_of(&idx) * det;
        let actual = coincidences
            .points
            .iter()
            .filter(|p| p.branch == i)
            .count();
        check(
            "orbit point count",
            rat_of(&Int::from(actual)) == expected,
            format!(
                "orbit of branch {}: {} points vs [Z^d:L_i]*|det| = {}",
                i + 1,
                actual,
                crate::rational::format_rat(&expected)
            ),
        )?;
    }

    Ok(OracleReport {
        coincidence_count,
        nonempty_classes,
        essential_classes,
        index_sum,
        report,
        checks,
    })
}
