//! Flat-manifold fundamental groups: torsion-free orientable
//! crystallographic groups given by a translation lattice Z^d plus a finite
//! holonomy in affine normal form, and single-valued morphisms between
//! them.
//!
//! An element is written `(t, j)` for `translation(t) . h_j`, acting as
//! `x -> A_j x + a_j + t`. Holonomy representatives are normalized so their
//! translation parts lie in `[0,1)^d`, which pins down the multiplication
//! table cocycles.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{ivec_zero, qvec_to_int, qvec_zero, IMat, IVec, Mat, QMat, QVec};
use crate::rational::{rat_of, Int, Rat};

/// An invertible affine map `x -> A x + a`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineElement {
    pub rot: QMat,
    pub trans: QVec,
}

impl AffineElement {
    pub fn new(rot: QMat, trans: QVec) -> AffineElement {
        assert_eq!(rot.rows(), rot.cols(), "rotation must be square");
        assert_eq!(rot.rows(), trans.len(), "translation dimension");
        AffineElement { rot, trans }
    }

    pub fn identity(dim: usize) -> AffineElement {
        AffineElement::new(QMat::identity(dim), qvec_zero(dim))
    }

    pub fn dim(&self) -> usize {
        self.trans.len()
    }

    /// Composition `self . other` as maps.
    pub fn compose(&self, other: &AffineElement) -> AffineElement {
        let rot = self.rot.mul(&other.rot);
        let mut trans = self.rot.mul_vec(&other.trans);
        for (t, s) in trans.iter_mut().zip(&self.trans) {
            *t += s;
        }
        AffineElement::new(rot, trans)
    }
}

/// A single check inside a validation report.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of validating user-supplied group or map data.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// An element `translation(t) . h_j` of a flat group.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct GroupElement {
    pub hol: usize,
    pub trans: IVec,
}

impl GroupElement {
    pub fn translation(t: IVec) -> GroupElement {
        GroupElement { hol: 0, trans: t }
    }

    pub fn is_identity(&self) -> bool {
        self.hol == 0 && self.trans.iter().all(|x| x.is_zero())
    }
}

/// Generators of a flat group: the lattice basis and the non-identity
/// holonomy representatives.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Gen {
    Lat(usize),
    Hol(usize),
}

/// A word in the generators, evaluated left to right.
#[derive(Clone, Debug)]
pub struct Word(pub Vec<(Gen, i64)>);

/// Ambient group operations, so words can be evaluated in flat groups and
/// in the semidirect covering groups alike.
pub trait GroupOps {
    type Elem: Clone + PartialEq;
    fn identity_elem(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;

    fn power(&self, a: &Self::Elem, e: i64) -> Self::Elem {
        let base = if e < 0 { self.inverse(a) } else { a.clone() };
        let mut acc = self.identity_elem();
        for _ in 0..e.unsigned_abs() {
            acc = self.multiply(&acc, &base);
        }
        acc
    }

    fn eval_word(&self, word: &Word, image: &impl Fn(Gen) -> Self::Elem) -> Self::Elem {
        let mut acc = self.identity_elem();
        for &(gen, exp) in &word.0 {
            let g = image(gen);
            acc = self.multiply(&acc, &self.power(&g, exp));
        }
        acc
    }
}

/// A torsion-free orientable crystallographic group with lattice Z^d.
#[derive(Clone, Debug)]
pub struct FlatGroup {
    dim: usize,
    holonomy: Vec<AffineElement>,
    rot_int: Vec<IMat>,
    /// `table[i][j] = (m, v)` with `h_i h_j = translation(v) . h_m`.
    table: Vec<Vec<(usize, IVec)>>,
    inverse_hol: Vec<usize>,
}

impl PartialEq for FlatGroup {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.holonomy == other.holonomy
    }
}
impl Eq for FlatGroup {}

/// Normalize raw holonomy data: identity first, translations reduced into
/// `[0,1)^d`.
fn normalize_holonomy(dim: usize, elems: &[AffineElement]) -> Vec<AffineElement> {
    let mut out = Vec::new();
    let id_rot = QMat::identity(dim);
    for e in elems {
        if e.rot == id_rot {
            continue;
        }
        let trans: QVec = e.trans.iter().map(|x| x - x.floor()).collect();
        out.push(AffineElement::new(e.rot.clone(), trans));
    }
    out.insert(0, AffineElement::identity(dim));
    out
}

/// Checks that raw data defines a torsion-free orientable flat group:
/// integer unimodular rotations forming a finite group with exact integer
/// cocycles, orientability, and the averaged-translation torsion criterion.
pub fn validate_flat_group(dim: usize, elems: &[AffineElement]) -> ValidationReport {
    let mut report = ValidationReport::default();
    for e in elems {
        if e.dim() != dim || e.rot.rows() != dim {
            report.push(
                "dimensions",
                false,
                format!("element has dimension {} instead of {dim}", e.dim()),
            );
            return report;
        }
    }
    let holonomy = normalize_holonomy(dim, elems);
    // identity-coset representatives must differ from the identity by a
    // lattice translation only
    let id_rot = QMat::identity(dim);
    for e in elems {
        if e.rot == id_rot && qvec_to_int(&e.trans).is_none() {
            report.push(
                "lattice",
                false,
                "rotation-free element with non-integer translation",
            );
            return report;
        }
    }

    let mut rot_int = Vec::new();
    let mut structural_ok = true;
    for (j, e) in holonomy.iter().enumerate() {
        match e.rot.to_int() {
            Some(a) if a.det().abs().is_one() => rot_int.push(a),
            _ => {
                report.push(
                    "rotation-integrality",
                    false,
                    format!("holonomy {j} is not integer unimodular"),
                );
                structural_ok = false;
            }
        }
    }
    if !structural_ok {
        return report;
    }
    report.push("rotation-integrality", true, "");

    let distinct = (0..holonomy.len())
        .all(|i| (i + 1..holonomy.len()).all(|j| holonomy[i].rot != holonomy[j].rot));
    report.push(
        "rotation-faithful",
        distinct,
        if distinct {
            String::new()
        } else {
            "two holonomy representatives share a rotation part".to_string()
        },
    );
    if !distinct {
        return report;
    }

    // closure of the rotation set and exactness of the cocycles
    let mut closed = true;
    let mut exact = true;
    for i in 0..holonomy.len() {
        for j in 0..holonomy.len() {
            let prod = holonomy[i].compose(&holonomy[j]);
            match holonomy.iter().position(|h| h.rot == prod.rot) {
                None => {
                    closed = false;
                    report.push(
                        "rotation-closure",
                        false,
                        format!("product of rotations {i} and {j} is not in the holonomy"),
                    );
                }
                Some(m) => {
                    let diff: QVec = prod
                        .trans
                        .iter()
                        .zip(&holonomy[m].trans)
                        .map(|(a, b)| a - b)
                        .collect();
                    if qvec_to_int(&diff).is_none() {
                        exact = false;
                        report.push(
                            "table-closure",
                            false,
                            format!("cocycle of h_{i} h_{j} is not integral"),
                        );
                    }
                }
            }
        }
    }
    if closed {
        report.push("rotation-closure", true, "");
    }
    if exact {
        report.push("table-closure", true, "");
    }
    if !closed || !exact {
        return report;
    }

    let orientable = rot_int.iter().all(|a| a.det().is_one());
    report.push(
        "orientability",
        orientable,
        if orientable {
            String::new()
        } else {
            "a rotation part has determinant -1".to_string()
        },
    );

    // torsion-freeness: no holonomy class may contain a finite-order element
    let k = holonomy.len();
    let mut torsion_free = true;
    for j in 1..k {
        let a = &rot_int[j];
        let mut power = a.clone();
        let mut order = 1usize;
        while power != IMat::identity(dim) {
            power = power.mul(a);
            order += 1;
            if order > k {
                break;
            }
        }
        let mut avg = IMat::zero(dim, dim);
        let mut acc = IMat::identity(dim);
        for _ in 0..order {
            avg = avg.add(&acc);
            acc = acc.mul(a);
        }
        // element (A_j, a_j + t) has finite order iff N_j (a_j + t) = 0
        let na = avg.to_rat().mul_vec(&holonomy[j].trans);
        let image = Lattice::from_generators(&avg);
        let in_image = qvec_to_int(&na).is_some_and(|v| image.contains(&v));
        if in_image {
            torsion_free = false;
            report.push(
                "torsion-free",
                false,
                format!("holonomy class {j} contains a finite-order element"),
            );
        }
    }
    if torsion_free {
        report.push("torsion-free", true, "");
    }
    report
}

impl FlatGroup {
    /// The d-torus group Z^d.
    pub fn torus(dim: usize) -> FlatGroup {
        FlatGroup::new(dim, &[]).expect("torus data is valid")
    }

    /// Builds a validated group; `Err(InvalidInput)` carries the first
    /// failed check. Use [`validate_flat_group`] for the full report.
    pub fn new(dim: usize, elems: &[AffineElement]) -> Result<FlatGroup> {
        let report = validate_flat_group(dim, elems);
        if let Some(fail) = report.failures().first() {
            return Err(Error::InvalidInput(format!(
                "{}: {}",
                fail.name, fail.detail
            )));
        }
        let holonomy = normalize_holonomy(dim, elems);
        let rot_int: Vec<IMat> = holonomy.iter().map(|e| e.rot.to_int().unwrap()).collect();
        let k = holonomy.len();
        let mut table = vec![vec![(0usize, ivec_zero(dim)); k]; k];
        for (i, hi) in holonomy.iter().enumerate() {
            for (j, hj) in holonomy.iter().enumerate() {
                let prod = hi.compose(hj);
                let m = holonomy.iter().position(|h| h.rot == prod.rot).unwrap();
                let diff: QVec = prod
                    .trans
                    .iter()
                    .zip(&holonomy[m].trans)
                    .map(|(a, b)| a - b)
                    .collect();
                table[i][j] = (m, qvec_to_int(&diff).unwrap());
            }
        }
        let inverse_hol = (0..k)
            .map(|i| (0..k).find(|&j| table[i][j].0 == 0).unwrap())
            .collect();
        Ok(FlatGroup {
            dim,
            holonomy,
            rot_int,
            table,
            inverse_hol,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Order of the holonomy group `[Pi : Gamma]`.
    pub fn holonomy_order(&self) -> usize {
        self.holonomy.len()
    }

    pub fn is_torus(&self) -> bool {
        self.holonomy.len() == 1
    }

    pub fn holonomy_element(&self, j: usize) -> &AffineElement {
        &self.holonomy[j]
    }

    pub fn rotation_int(&self, j: usize) -> &IMat {
        &self.rot_int[j]
    }

    pub fn rotation(&self, j: usize) -> QMat {
        self.rot_int[j].to_rat()
    }

    pub fn check_element(&self, e: &GroupElement) -> Result<()> {
        if e.hol >= self.holonomy.len() || e.trans.len() != self.dim {
            return Err(Error::GroupMismatch(format!(
                "element (hol {}, dim {}) does not belong to this group",
                e.hol,
                e.trans.len()
            )));
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            hol: 0,
            trans: ivec_zero(self.dim),
        }
    }

    /// `x . y` with `x = translation(t) h_j`: the table renormalizes the
    /// product to the unique normal form.
    pub fn compose(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check_element(x)?;
        self.check_element(y)?;
        let (m, v) = &self.table[x.hol][y.hol];
        let rotated = self.rot_int[x.hol].mul_vec(&y.trans);
        let trans: IVec = x
            .trans
            .iter()
            .zip(rotated.iter().zip(v))
            .map(|(a, (b, c))| a + b + c)
            .collect();
        Ok(GroupElement { hol: *m, trans })
    }

    pub fn invert(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check_element(x)?;
        let j = x.hol;
        let jinv = self.inverse_hol[j];
        // solve (t, j)(s, jinv) = identity for s
        let (_, v) = &self.table[j][jinv];
        let a_inv = {
            let m = self.rot_int[j].to_rat().inverse().expect("unimodular");
            m.to_int().expect("integer inverse of unimodular matrix")
        };
        let inner: IVec = x.trans.iter().zip(v).map(|(a, b)| a + b).collect();
        let s: IVec = a_inv.mul_vec(&inner).iter().map(|t| -t.clone()).collect();
        Ok(GroupElement { hol: jinv, trans: s })
    }

    /// The affine map `x -> A_j x + a_j + t` realizing the element.
    pub fn as_affine(&self, e: &GroupElement) -> AffineElement {
        let h = &self.holonomy[e.hol];
        let trans: QVec = h
            .trans
            .iter()
            .zip(&e.trans)
            .map(|(a, t)| a + rat_of(t))
            .collect();
        AffineElement::new(h.rot.clone(), trans)
    }

    /// One representative per holonomy coset, with its rotation part; the
    /// rotation is constant on the coset.
    pub fn holonomy_transversal(&self) -> Vec<(usize, QMat)> {
        (0..self.holonomy.len())
            .map(|j| (j, self.rotation(j)))
            .collect()
    }

    /// Finite presentation on `t_1..t_d, g_1..g_{k-1}`: lattice commutators,
    /// holonomy conjugation relations, and the multiplication table.
    pub fn relators(&self) -> Vec<Word> {
        let d = self.dim;
        let k = self.holonomy.len();
        let mut words = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                words.push(Word(vec![
                    (Gen::Lat(a), 1),
                    (Gen::Lat(b), 1),
                    (Gen::Lat(a), -1),
                    (Gen::Lat(b), -1),
                ]));
            }
        }
        for j in 1..k {
            for a in 0..d {
                let mut w = vec![(Gen::Hol(j), 1), (Gen::Lat(a), 1), (Gen::Hol(j), -1)];
                let col = self.rot_int[j].col(a);
                for (i, c) in col.iter().enumerate() {
                    let e = i64::try_from(c).expect("small rotation entry");
                    if e != 0 {
                        w.push((Gen::Lat(i), -e));
                    }
                }
                words.push(Word(w));
            }
        }
        for i in 1..k {
            for j in 1..k {
                let (m, v) = &self.table[i][j];
                let mut w = vec![(Gen::Hol(i), 1), (Gen::Hol(j), 1)];
                if *m != 0 {
                    w.push((Gen::Hol(*m), -1));
                }
                for (idx, c) in v.iter().enumerate() {
                    let e = i64::try_from(c).expect("small cocycle entry");
                    if e != 0 {
                        w.push((Gen::Lat(idx), -e));
                    }
                }
                words.push(Word(w));
            }
        }
        words
    }
}

impl GroupOps for FlatGroup {
    type Elem = GroupElement;

    fn identity_elem(&self) -> GroupElement {
        self.identity()
    }

    fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.compose(a, b).expect("elements of this group")
    }

    fn inverse(&self, a: &GroupElement) -> GroupElement {
        self.invert(a).expect("element of this group")
    }
}

/// A morphism between flat groups, specified on the canonical generators.
#[derive(Clone, PartialEq, Debug)]
pub struct SingleMorphism {
    pub source: FlatGroup,
    pub target: FlatGroup,
    pub lattice_images: Vec<GroupElement>,
    pub holonomy_images: Vec<GroupElement>,
}

impl SingleMorphism {
    pub fn new(
        source: FlatGroup,
        target: FlatGroup,
        lattice_images: Vec<GroupElement>,
        holonomy_images: Vec<GroupElement>,
    ) -> Result<SingleMorphism> {
        if lattice_images.len() != source.dim()
            || holonomy_images.len() != source.holonomy_order() - 1
        {
            return Err(Error::InvalidInput(
                "generator image count does not match the source group".to_string(),
            ));
        }
        for img in lattice_images.iter().chain(&holonomy_images) {
            target.check_element(img)?;
        }
        Ok(SingleMorphism {
            source,
            target,
            lattice_images,
            holonomy_images,
        })
    }

    /// The identity endomorphism.
    pub fn identity(group: &FlatGroup) -> SingleMorphism {
        let d = group.dim();
        let lattice_images = (0..d)
            .map(|a| {
                let mut t = ivec_zero(d);
                t[a] = Int::one();
                GroupElement::translation(t)
            })
            .collect();
        let holonomy_images = (1..group.holonomy_order())
            .map(|j| GroupElement {
                hol: j,
                trans: ivec_zero(d),
            })
            .collect();
        SingleMorphism {
            source: group.clone(),
            target: group.clone(),
            lattice_images,
            holonomy_images,
        }
    }

    /// The trivial morphism (everything to the identity); the morphism
    /// induced by a constant map.
    pub fn trivial(source: &FlatGroup, target: &FlatGroup) -> SingleMorphism {
        SingleMorphism {
            source: source.clone(),
            target: target.clone(),
            lattice_images: vec![target.identity(); source.dim()],
            holonomy_images: vec![target.identity(); source.holonomy_order() - 1],
        }
    }

    /// Torus-to-torus morphism sending lattice generators to the columns of
    /// an integer matrix.
    pub fn torus_by_matrix(f: &IMat) -> SingleMorphism {
        assert_eq!(f.rows(), f.cols());
        let d = f.rows();
        let torus = FlatGroup::torus(d);
        let lattice_images = (0..d)
            .map(|a| GroupElement::translation(f.col(a)))
            .collect();
        SingleMorphism {
            source: torus.clone(),
            target: torus,
            lattice_images,
            holonomy_images: Vec::new(),
        }
    }

    fn image_of(&self, gen: Gen) -> GroupElement {
        match gen {
            Gen::Lat(a) => self.lattice_images[a].clone(),
            Gen::Hol(j) => self.holonomy_images[j - 1].clone(),
        }
    }

    /// True iff every relator of the source maps to the identity.
    pub fn verify(&self) -> bool {
        let image = |g: Gen| self.image_of(g);
        self.source
            .relators()
            .iter()
            .all(|w| self.target.eval_word(w, &image) == self.target.identity())
    }

    /// Image of a pure lattice translation.
    pub fn apply_translation(&self, v: &[Int]) -> GroupElement {
        assert_eq!(v.len(), self.source.dim());
        let mut acc = self.target.identity();
        for (a, e) in v.iter().enumerate() {
            let exp = i64::try_from(e).expect("translation exponent fits i64");
            let p = self.target.power(&self.lattice_images[a], exp);
            acc = self.target.multiply(&acc, &p);
        }
        acc
    }

    /// Image of an arbitrary element `(t, j) = translation(t) . h_j`.
    pub fn apply(&self, e: &GroupElement) -> Result<GroupElement> {
        self.source.check_element(e)?;
        let t_img = self.apply_translation(&e.trans);
        if e.hol == 0 {
            return Ok(t_img);
        }
        Ok(self
            .target
            .multiply(&t_img, &self.holonomy_images[e.hol - 1]))
    }

    /// Linear part with respect to the refinement `s * Z^d`; all refined
    /// lattice images must be pure translations.
    pub fn lie_matrix_with_scale(&self, s: &Int) -> Result<QMat> {
        let d = self.source.dim();
        let mut cols = Vec::with_capacity(d);
        for a in 0..d {
            let mut v = ivec_zero(d);
            v[a] = s.clone();
            let img = self.apply_translation(&v);
            if img.hol != 0 {
                return Err(Error::ImageNotTranslation);
            }
            cols.push(
                img.trans
                    .iter()
                    .map(|x| Rat::new(x.clone(), s.clone()))
                    .collect::<QVec>(),
            );
        }
        Ok(Mat::from_columns(d, cols))
    }

    /// The induced Lie-algebra (linear part) matrix, computed through the
    /// refinement `m * Z^d` with `m` the target holonomy order.
    pub fn lie_matrix(&self) -> Result<QMat> {
        let m = Int::from(self.target.holonomy_order());
        self.lie_matrix_with_scale(&m)
    }
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::matrix::ivec;
    use crate::rational::{int, rat, rat_int};

    pub fn half_turn_group() -> FlatGroup {
        // d = 3, holonomy Z/2: g = (diag(1,-1,-1), (1/2,0,0))
        let rot = QMat::from_rows(vec![
            vec![rat_int(1), rat_int(0), rat_int(0)],
            vec![rat_int(0), rat_int(-1), rat_int(0)],
            vec![rat_int(0), rat_int(0), rat_int(-1)],
        ]);
        let g = AffineElement::new(rot, vec![rat(1, 2), rat_int(0), rat_int(0)]);
        FlatGroup::new(3, &[g]).unwrap()
    }

    pub fn klein_bottle_data() -> (usize, Vec<AffineElement>) {
        let rot = QMat::from_rows(vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ]);
        let g = AffineElement::new(rot, vec![rat(1, 2), rat_int(0)]);
        (2, vec![g])
    }

    pub fn point_reflection_data() -> (usize, Vec<AffineElement>) {
        let rot = QMat::from_rows(vec![
            vec![rat_int(-1), rat_int(0)],
            vec![rat_int(0), rat_int(-1)],
        ]);
        let g = AffineElement::new(rot, vec![rat_int(0), rat_int(0)]);
        (2, vec![g])
    }

    #[test]
    fn torus_is_valid() {
        for d in 1..=4 {
            assert!(validate_flat_group(d, &[]).is_valid());
        }
    }

    #[test]
    fn half_turn_group_is_valid_and_composes() {
        let g = half_turn_group();
        assert_eq!(g.holonomy_order(), 2);
        let gen = GroupElement {
            hol: 1,
            trans: ivec(&[0, 0, 0]),
        };
        // g . g = translation((1,0,0)), by hand: A^2 = I, a + A a = (1,0,0)
        let sq = g.compose(&gen, &gen).unwrap();
        assert_eq!(sq, GroupElement::translation(ivec(&[1, 0, 0])));
        // inverses compose to the identity
        let inv = g.invert(&gen).unwrap();
        assert_eq!(g.compose(&gen, &inv).unwrap(), g.identity());
        assert_eq!(g.compose(&inv, &gen).unwrap(), g.identity());
    }

    #[test]
    fn translations_compose_additively() {
        let g = FlatGroup::torus(2);
        let a = GroupElement::translation(ivec(&[1, 0]));
        let b = GroupElement::translation(ivec(&[0, 1]));
        assert_eq!(
            g.compose(&a, &b).unwrap(),
            GroupElement::translation(ivec(&[1, 1]))
        );
    }

    #[test]
    fn klein_bottle_rejected_for_orientability() {
        let (d, elems) = klein_bottle_data();
        let report = validate_flat_group(d, &elems);
        assert!(!report.is_valid());
        assert!(report.failures().iter().any(|c| c.name == "orientability"));
    }

    #[test]
    fn point_reflection_rejected_for_torsion() {
        let (d, elems) = point_reflection_data();
        let report = validate_flat_group(d, &elems);
        assert!(!report.is_valid());
        assert!(report.failures().iter().any(|c| c.name == "torsion-free"));
    }

    #[test]
    fn group_axioms_random_triples() {
        let g = half_turn_group();
        let elems: Vec<GroupElement> = (0..6)
            .map(|s: i64| GroupElement {
                hol: (s % 2) as usize,
                trans: ivec(&[s - 2, 3 - s, 2 * s - 5]),
            })
            .collect();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    let ab_c = g.compose(&g.compose(a, b).unwrap(), c).unwrap();
                    let a_bc = g.compose(a, &g.compose(b, c).unwrap()).unwrap();
                    assert_eq!(ab_c, a_bc);
                }
            }
            let inv = g.invert(a).unwrap();
            assert_eq!(g.compose(a, &inv).unwrap(), g.identity());
        }
    }

    #[test]
    fn relators_shape() {
        let torus = FlatGroup::torus(2);
        assert_eq!(torus.relators().len(), 1);

        let g = half_turn_group();
        let words = g.relators();
        // 3 commutators + 3 conjugations + 1 table relator (g*g)
        assert_eq!(words.len(), 3 + 3 + 1);
        let ident = SingleMorphism::identity(&g);
        assert!(ident.verify());
    }

    #[test]
    fn torus_morphisms_by_any_integer_matrix_verify() {
        for entries in [[1i64, 0, 0, 1], [2, 1, 0, 3], [0, -1, 5, 2]] {
            let f = IMat::from_rows(vec![
                ivec(&[entries[0], entries[1]]),
                ivec(&[entries[2], entries[3]]),
            ]);
            let m = SingleMorphism::torus_by_matrix(&f);
            assert!(m.verify());
            assert_eq!(m.lie_matrix().unwrap(), f.to_rat());
        }
    }

    #[test]
    fn corrupted_holonomy_morphism_fails_verification() {
        let g = half_turn_group();
        let mut m = SingleMorphism::identity(&g);
        assert!(m.verify());
        // g -> t1 g breaks g^2 = t1: (t1 g)^2 = t1^3
        m.holonomy_images[0].trans[0] += 1;
        assert!(!m.verify());

        // g -> t2 g is still a morphism (another lift choice), so flipping
        // that entry must keep verification green
        let mut m2 = SingleMorphism::identity(&g);
        m2.holonomy_images[0].trans[1] += 1;
        assert!(m2.verify());
    }

    #[test]
    fn trivial_morphism_has_zero_lie_matrix() {
        let torus = FlatGroup::torus(2);
        let m = SingleMorphism::trivial(&torus, &torus);
        assert!(m.verify());
        assert_eq!(m.lie_matrix().unwrap(), QMat::zero(2, 2));
    }

    #[test]
    fn lie_matrix_refinement_invariance() {
        let g = half_turn_group();
        // endomorphism: t1 -> t1^3, t2 -> t2^2, t3 -> t3^2, g -> t1 g
        let m = SingleMorphism::new(
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
        assert!(m.verify());
        let base = m.lie_matrix().unwrap();
        let refined = m.lie_matrix_with_scale(&int(4)).unwrap();
        assert_eq!(base, refined);
        let expected = IMat::from_rows(vec![
            ivec(&[3, 0, 0]),
            ivec(&[0, 2, 0]),
            ivec(&[0, 0, 2]),
        ]);
        assert_eq!(base, expected.to_rat());
    }

    #[test]
    fn holonomy_transversal_representative_independence() {
        let g = half_turn_group();
        let transversal = g.holonomy_transversal();
        assert_eq!(transversal.len(), 2);
        // replacing a representative by a lattice translate keeps the rotation
        let shifted = GroupElement {
            hol: 1,
            trans: ivec(&[5, -3, 2]),
        };
        assert_eq!(g.as_affine(&shifted).rot, transversal[1].1);
    }
}
