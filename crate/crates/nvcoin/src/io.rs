//! JSON wire formats and text rendering.
//!
//! Rationals travel as strings `"p/q"` (or `"p"` for integers); rational
//! matrices as row-major nested arrays of such strings; lattice vectors as
//! plain integer arrays. Branch indices and permutations are 1-based on the
//! wire. Three input document shapes are recognized by their keys:
//!
//! * a flat group: `{"dimension": d, "holonomy": [...]}` (holonomy may be
//!   omitted for a torus),
//! * an algebraic pair: `{"source": .., "target": .., "phi": .., "psi": ..}`,
//! * an affine pair: `{"dimension": d, "n": n, "branches": [...], "g": ..}`.

use serde::{Deserialize, Serialize};

use crate::crystal::{
    validate_flat_group, AffineElement, FlatGroup, GroupElement, SingleMorphism, ValidationReport,
};
use crate::error::{Error, Result};
use crate::invariants::{Average, AveragingReport, InvariantReport};
use crate::lattice::Count;
use crate::matrix::{IVec, QMat, QVec};
use crate::nvmorph::{NvMorphism, Perm, SemidirectElement};
use crate::oracle::{
    derive_morphism, validate_map, AffineMap, AffineNValuedMap, CoincidenceSet, OracleReport,
};
use crate::rational::{format_rat, parse_rat, Int};

fn int_to_i64(v: &Int) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Parse(format!("integer {v} does not fit the wire format")))
}

fn ivec_to_wire(v: &[Int]) -> Result<Vec<i64>> {
    v.iter().map(int_to_i64).collect()
}

fn ivec_from_wire(v: &[i64]) -> IVec {
    v.iter().map(|&x| Int::from(x)).collect()
}

fn qvec_to_wire(v: &[crate::rational::Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

fn qvec_from_wire(v: &[String]) -> Result<QVec> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn qmat_to_wire(m: &QMat) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| qvec_to_wire(&m.row(i))).collect()
}

fn qmat_from_wire(rows: &[Vec<String>]) -> Result<QMat> {
    let parsed: Result<Vec<QVec>> = rows.iter().map(|r| qvec_from_wire(r)).collect();
    let parsed = parsed?;
    let cols = parsed.first().map_or(0, |r| r.len());
    if parsed.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix rows".to_string()));
    }
    Ok(QMat::from_rows(parsed))
}

// ---------------------------------------------------------------- wire types

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AffineElementWire {
    pub rotation: Vec<Vec<String>>,
    pub translation: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FlatGroupWire {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holonomy: Vec<AffineElementWire>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct GroupElementWire {
    pub holonomy: usize,
    pub translation: Vec<i64>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SingleMorphismWire {
    pub lattice_images: Vec<GroupElementWire>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holonomy_images: Vec<GroupElementWire>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SemidirectElementWire {
    pub tuple: Vec<GroupElementWire>,
    /// 1-based image array of the permutation part.
    pub perm: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct NvMorphismWire {
    pub n: usize,
    pub lattice_images: Vec<SemidirectElementWire>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holonomy_images: Vec<SemidirectElementWire>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AffineMapWire {
    pub linear: Vec<Vec<String>>,
    pub offset: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AffinePairWire {
    pub dimension: usize,
    pub n: usize,
    pub branches: Vec<AffineMapWire>,
    pub g: AffineMapWire,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AlgebraicPairWire {
    pub source: FlatGroupWire,
    pub target: FlatGroupWire,
    pub phi: NvMorphismWire,
    pub psi: SingleMorphismWire,
}

/// A parsed input document.
#[derive(Clone, Debug)]
pub enum Document {
    Group(FlatGroupWire),
    AlgebraicPair(AlgebraicPairWire),
    AffinePair(AffinePairWire),
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("expected a JSON object".to_string()))?;
        let doc = if obj.contains_key("branches") && obj.contains_key("g") {
            Document::AffinePair(
                serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            )
        } else if obj.contains_key("phi") && obj.contains_key("psi") {
            Document::AlgebraicPair(
                serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            )
        } else if obj.contains_key("dimension") {
            Document::Group(
                serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?,
            )
        } else {
            return Err(Error::Parse(
                "unrecognized document: expected a flat group, an algebraic pair or an affine pair"
                    .to_string(),
            ));
        };
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        match self {
            Document::Group(w) => serde_json::to_string_pretty(w).expect("serializable"),
            Document::AlgebraicPair(w) => serde_json::to_string_pretty(w).expect("serializable"),
            Document::AffinePair(w) => serde_json::to_string_pretty(w).expect("serializable"),
        }
    }
}

// -------------------------------------------------------- wire <-> domain

pub fn affine_element_from_wire(w: &AffineElementWire) -> Result<AffineElement> {
    let rot = qmat_from_wire(&w.rotation)?;
    let trans = qvec_from_wire(&w.translation)?;
    if rot.rows() != rot.cols() || rot.rows() != trans.len() {
        return Err(Error::Parse("affine element dimensions inconsistent".to_string()));
    }
    Ok(AffineElement::new(rot, trans))
}

pub fn affine_element_to_wire(e: &AffineElement) -> AffineElementWire {
    AffineElementWire {
        rotation: qmat_to_wire(&e.rot),
        translation: qvec_to_wire(&e.trans),
    }
}

pub fn group_holonomy_from_wire(w: &FlatGroupWire) -> Result<Vec<AffineElement>> {
    w.holonomy.iter().map(affine_element_from_wire).collect()
}

/// Validates the wire data and builds the group.
pub fn group_from_wire(w: &FlatGroupWire) -> Result<FlatGroup> {
    let elems = group_holonomy_from_wire(w)?;
    FlatGroup::new(w.dimension, &elems)
}

pub fn group_to_wire(dimension: usize, holonomy_nontrivial: &[AffineElement]) -> FlatGroupWire {
    FlatGroupWire {
        dimension,
        holonomy: holonomy_nontrivial.iter().map(affine_element_to_wire).collect(),
    }
}

pub fn element_from_wire(w: &GroupElementWire) -> GroupElement {
    GroupElement {
        hol: w.holonomy,
        trans: ivec_from_wire(&w.translation),
    }
}

pub fn element_to_wire(e: &GroupElement) -> Result<GroupElementWire> {
    Ok(GroupElementWire {
        holonomy: e.hol,
        translation: ivec_to_wire(&e.trans)?,
    })
}

pub fn single_morphism_from_wire(
    w: &SingleMorphismWire,
    source: &FlatGroup,
    target: &FlatGroup,
) -> Result<SingleMorphism> {
    SingleMorphism::new(
        source.clone(),
        target.clone(),
        w.lattice_images.iter().map(element_from_wire).collect(),
        w.holonomy_images.iter().map(element_from_wire).collect(),
    )
}

pub fn single_morphism_to_wire(m: &SingleMorphism) -> Result<SingleMorphismWire> {
    Ok(SingleMorphismWire {
        lattice_images: m
            .lattice_images
            .iter()
            .map(element_to_wire)
            .collect::<Result<_>>()?,
        holonomy_images: m
            .holonomy_images
            .iter()
            .map(element_to_wire)
            .collect::<Result<_>>()?,
    })
}

fn semidirect_from_wire(w: &SemidirectElementWire, n: usize) -> Result<SemidirectElement> {
    if w.perm.len() != n || w.tuple.len() != n {
        return Err(Error::ArityMismatch);
    }
    let images: Vec<usize> = w
        .perm
        .iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| Error::Parse("permutation images are 1-based".to_string()))
        })
        .collect::<Result<_>>()?;
    Ok(SemidirectElement {
        tuple: w.tuple.iter().map(element_from_wire).collect(),
        perm: Perm::from_images(images)?,
    })
}

fn semidirect_to_wire(e: &SemidirectElement) -> Result<SemidirectElementWire> {
    Ok(SemidirectElementWire {
        tuple: e.tuple.iter().map(element_to_wire).collect::<Result<_>>()?,
        perm: e.perm.images().iter().map(|&i| i + 1).collect(),
    })
}

pub fn nv_morphism_from_wire(
    w: &NvMorphismWire,
    source: &FlatGroup,
    target: &FlatGroup,
) -> Result<NvMorphism> {
    let lattice_images = w
        .lattice_images
        .iter()
        .map(|e| semidirect_from_wire(e, w.n))
        .collect::<Result<_>>()?;
    let holonomy_images = w
        .holonomy_images
        .iter()
        .map(|e| semidirect_from_wire(e, w.n))
        .collect::<Result<_>>()?;
    NvMorphism::new(
        w.n,
        source.clone(),
        target.clone(),
        lattice_images,
        holonomy_images,
    )
}

pub fn nv_morphism_to_wire(m: &NvMorphism) -> Result<NvMorphismWire> {
    Ok(NvMorphismWire {
        n: m.n,
        lattice_images: m
            .lattice_images
            .iter()
            .map(semidirect_to_wire)
            .collect::<Result<_>>()?,
        holonomy_images: m
            .holonomy_images
            .iter()
            .map(semidirect_to_wire)
            .collect::<Result<_>>()?,
    })
}

pub fn affine_pair_from_wire(w: &AffinePairWire) -> Result<(AffineNValuedMap, AffineMap)> {
    let mut branches = Vec::with_capacity(w.branches.len());
    for b in &w.branches {
        branches.push((qmat_from_wire(&b.linear)?, qvec_from_wire(&b.offset)?));
    }
    let f = AffineNValuedMap {
        dim: w.dimension,
        n: w.n,
        branches,
    };
    let g = AffineMap {
        linear: qmat_from_wire(&w.g.linear)?,
        offset: qvec_from_wire(&w.g.offset)?,
    };
    Ok((f, g))
}

pub fn affine_pair_to_wire(f: &AffineNValuedMap, g: &AffineMap) -> AffinePairWire {
    AffinePairWire {
        dimension: f.dim,
        n: f.n,
        branches: f
            .branches
            .iter()
            .map(|(m, c)| AffineMapWire {
                linear: qmat_to_wire(m),
                offset: qvec_to_wire(c),
            })
            .collect(),
        g: AffineMapWire {
            linear: qmat_to_wire(&g.linear),
            offset: qvec_to_wire(&g.offset),
        },
    }
}

// ------------------------------------------------------------- validation

#[derive(Serialize, Debug)]
pub struct CheckWire {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Serialize, Debug)]
pub struct ValidationWire {
    pub subject: String,
    pub valid: bool,
    pub checks: Vec<CheckWire>,
}

pub fn validation_to_wire(subject: &str, report: &ValidationReport) -> ValidationWire {
    ValidationWire {
        subject: subject.to_string(),
        valid: report.is_valid(),
        checks: report
            .checks
            .iter()
            .map(|c| CheckWire {
                name: c.name.clone(),
                passed: c.passed,
                detail: c.detail.clone(),
            })
            .collect(),
    }
}

/// Validates whatever the document describes; one report per subject.
pub fn validate_document(doc: &Document) -> Result<Vec<ValidationWire>> {
    let mut out = Vec::new();
    match doc {
        Document::Group(w) => {
            let elems = group_holonomy_from_wire(w)?;
            out.push(validation_to_wire(
                "group",
                &validate_flat_group(w.dimension, &elems),
            ));
        }
        Document::AlgebraicPair(w) => {
            let src_elems = group_holonomy_from_wire(&w.source)?;
            let tgt_elems = group_holonomy_from_wire(&w.target)?;
            let src_report = validate_flat_group(w.source.dimension, &src_elems);
            let tgt_report = validate_flat_group(w.target.dimension, &tgt_elems);
            let groups_ok = src_report.is_valid() && tgt_report.is_valid();
            out.push(validation_to_wire("source group", &src_report));
            out.push(validation_to_wire("target group", &tgt_report));
            if groups_ok {
                let source = FlatGroup::new(w.source.dimension, &src_elems)?;
                let target = FlatGroup::new(w.target.dimension, &tgt_elems)?;
                let mut mor = ValidationReport::default();
                match nv_morphism_from_wire(&w.phi, &source, &target) {
                    Ok(phi) => mor.push("phi-relators", phi.verify(), ""),
                    Err(e) => mor.push("phi-wellformed", false, e.to_string()),
                }
                match single_morphism_from_wire(&w.psi, &source, &target) {
                    Ok(psi) => mor.push("psi-relators", psi.verify(), ""),
                    Err(e) => mor.push("psi-wellformed", false, e.to_string()),
                }
                out.push(validation_to_wire("morphisms", &mor));
            }
        }
        Document::AffinePair(w) => {
            let (f, g) = affine_pair_from_wire(w)?;
            let map_report = validate_map(&f);
            out.push(validation_to_wire("n-valued map", &map_report));
            let mut g_report = ValidationReport::default();
            g_report.push(
                "g-integral-linear-part",
                g.linear.is_integral(),
                if g.linear.is_integral() {
                    String::new()
                } else {
                    "g does not descend to the torus".to_string()
                },
            );
            out.push(validation_to_wire("single-valued map", &g_report));
            if map_report.is_valid() && g.linear.is_integral() {
                let mut mor = ValidationReport::default();
                match derive_morphism(&f, &g) {
                    Ok((phi, psi)) => {
                        mor.push("derived-phi-relators", phi.verify(), "");
                        mor.push("derived-psi-relators", psi.verify(), "");
                    }
                    Err(e) => mor.push("derived-morphism", false, e.to_string()),
                }
                out.push(validation_to_wire("derived morphisms", &mor));
            }
        }
    }
    Ok(out)
}

pub fn validations_to_table(reports: &[ValidationWire]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&format!(
            "{}: {}\n",
            r.subject,
            if r.valid { "valid" } else { "INVALID" }
        ));
        for c in &r.checks {
            s.push_str(&format!(
                "  [{}] {}{}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                if c.detail.is_empty() {
                    String::new()
                } else {
                    format!(": {}", c.detail)
                }
            ));
        }
    }
    s
}

// ------------------------------------------------------------ report wire

fn count_to_value(c: &Count) -> Result<serde_json::Value> {
    Ok(match c {
        Count::Finite(v) => serde_json::Value::from(int_to_i64(v)?),
        Count::Infinite => serde_json::Value::from("inf"),
    })
}

fn average_to_value(a: &Average) -> serde_json::Value {
    match a {
        Average::Finite(v) => serde_json::Value::from(format_rat(v)),
        Average::Infinite => serde_json::Value::from("inf"),
    }
}

fn averaging_to_value(avg: &AveragingReport) -> Result<serde_json::Value> {
    let cover: Vec<serde_json::Value> = avg
        .cover
        .iter()
        .map(|c| -> Result<serde_json::Value> {
            Ok(serde_json::json!({
                "branch": c.branch + 1,
                "L": int_to_i64(&c.l)?,
                "R": count_to_value(&c.r)?,
                "N": int_to_i64(&c.n)?,
            }))
        })
        .collect::<Result<_>>()?;
    let coin_checks: Vec<serde_json::Value> = avg
        .coin_checks
        .iter()
        .map(|c| -> Result<serde_json::Value> {
            Ok(serde_json::json!({
                "branch": c.branch + 1,
                "alpha": {
                    "holonomy": c.alpha.hol,
                    "translation": ivec_to_wire(&c.alpha.trans)?,
                },
                "essential": c.essential,
                "kernel_rank": c.kernel.rank(),
                "coin_in_splitting": c.trivial,
                "kernel_in_splitting": c.kernel_in_splitting,
                "u_image_size": int_to_i64(&c.u_image_size)?,
                "fiber_size": match &c.fiber_size {
                    Some(v) => serde_json::Value::from(int_to_i64(v)?),
                    None => serde_json::Value::Null,
                },
            }))
        })
        .collect::<Result<_>>()?;
    Ok(serde_json::json!({
        "index_pi_s": avg.index_pi_s,
        "splitting_holonomy_order": avg.splitting_holonomy_order,
        "cover": cover,
        "L_cover_sum": int_to_i64(&avg.l_cover_sum)?,
        "L_identity": avg.l_identity_holds,
        "R_average": average_to_value(&avg.r_average),
        "N_average": format_rat(&avg.n_average),
        "R_equality": avg.r_equality_holds,
        "N_equality": avg.n_equality_holds,
        "R_condition": avg.r_condition,
        "N_condition": avg.n_condition,
        "coin_checks": coin_checks,
    }))
}

/// The report as the documented JSON shape
/// `{"L": .., "R": .., "N": .., "averaging": {..}, "classes": [..]}`.
pub fn report_to_value(report: &InvariantReport) -> Result<serde_json::Value> {
    let classes = match &report.classes {
        None => serde_json::Value::Null,
        Some(orbits) => serde_json::Value::Array(
            orbits
                .iter()
                .map(|o| -> Result<serde_json::Value> {
                    let reps: Vec<Vec<i64>> = o
                        .representatives
                        .iter()
                        .map(|r| ivec_to_wire(r))
                        .collect::<Result<_>>()?;
                    Ok(serde_json::json!({
                        "orbit_rep": o.orbit_rep + 1,
                        "orbit": o.orbit.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "count": count_to_value(&o.count)?,
                        "representatives": reps,
                    }))
                })
                .collect::<Result<_>>()?,
        ),
    };
    Ok(serde_json::json!({
        "L": int_to_i64(&report.l)?,
        "R": count_to_value(&report.r)?,
        "N": int_to_i64(&report.n)?,
        "averaging": averaging_to_value(&report.averaging)?,
        "classes": classes,
    }))
}

pub fn report_to_json(report: &InvariantReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(&report_to_value(report)?).expect("serializable"))
}

pub fn report_to_table(report: &InvariantReport) -> Result<String> {
    let mut s = String::new();
    s.push_str(&format!("L = {}\n", report.l));
    s.push_str(&format!("R = {}\n", report.r));
    s.push_str(&format!("N = {}\n", report.n));
    s.push_str(&format!(
        "holonomy orders: source {}, target {}\n",
        report.source_holonomy_order, report.target_holonomy_order
    ));
    let avg = &report.averaging;
    s.push_str(&format!("[Pi:S] = {}\n", avg.index_pi_s));
    s.push_str("branch  M_i dets (per target coset)   cover L  cover R  cover N\n");
    for (term, cover) in report.branch_terms.iter().zip(&avg.cover) {
        let dets: Vec<String> = term.dets.iter().map(|(_, d)| format_rat(d)).collect();
        s.push_str(&format!(
            "{:>6}  {:<30}  {:>7}  {:>7}  {:>7}\n",
            term.branch + 1,
            dets.join(", "),
            cover.l.to_string(),
            cover.r.to_string(),
            cover.n.to_string(),
        ));
    }
    s.push_str(&format!(
        "averaging: L identity {}; R avg {} ({}); N avg {} ({})\n",
        if avg.l_identity_holds { "holds" } else { "FAILS" },
        avg.r_average,
        if avg.r_equality_holds { "equality" } else { "strict" },
        format_rat(&avg.n_average),
        if avg.n_equality_holds { "equality" } else { "strict" },
    ));
    match avg.r_condition {
        Some(cond) => s.push_str(&format!("coin condition (all classes): {cond}\n")),
        None => s.push_str("coin condition: skipped (R infinite)\n"),
    }
    if let Some(classes) = &report.classes {
        s.push_str("classes (torus target):\n");
        for o in classes {
            let orbit: Vec<String> = o.orbit.iter().map(|i| (i + 1).to_string()).collect();
            s.push_str(&format!(
                "  orbit {{{}}} (rep {}): {} classes",
                orbit.join(","),
                o.orbit_rep + 1,
                o.count
            ));
            if !o.representatives.is_empty() {
                let reps: Vec<String> = o
                    .representatives
                    .iter()
                    .map(|r| {
                        format!(
                            "({})",
                            r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                        )
                    })
                    .collect();
                s.push_str(&format!(": {}", reps.join(" ")));
            }
            s.push('\n');
        }
    }
    Ok(s)
}

// ------------------------------------------------------- coincidence wire

pub fn coincidences_to_value(set: &CoincidenceSet) -> Result<serde_json::Value> {
    let points: Vec<serde_json::Value> = set
        .points
        .iter()
        .map(|p| -> Result<serde_json::Value> {
            Ok(serde_json::json!({
                "point": qvec_to_wire(&p.point),
                "branch": p.branch + 1,
                "shift": ivec_to_wire(&p.shift)?,
                "class": {
                    "branch": p.class.0 + 1,
                    "representative": ivec_to_wire(&p.class.1)?,
                },
                "index": p.index,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(serde_json::Value::Array(points))
}

pub fn oracle_to_value(report: &OracleReport, set: &CoincidenceSet) -> Result<serde_json::Value> {
    Ok(serde_json::json!({
        "points": coincidences_to_value(set)?,
        "summary": {
            "coincidence_count": report.coincidence_count,
            "nonempty_classes": report.nonempty_classes,
            "essential_classes": report.essential_classes,
            "index_sum": report.index_sum,
        },
        "invariants": report_to_value(&report.report)?,
        "checks": report.checks,
    }))
}

pub fn oracle_to_table(report: &OracleReport, set: &CoincidenceSet) -> Result<String> {
    let mut s = String::new();
    s.push_str(&format!(
        "{} coincidence points, {} nonempty classes, {} essential, index sum {}\n",
        report.coincidence_count,
        report.nonempty_classes,
        report.essential_classes,
        report.index_sum
    ));
    s.push_str("point                     branch  shift       class             index\n");
    for p in &set.points {
        let coords: Vec<String> = p.point.iter().map(format_rat).collect();
        let shift: Vec<String> = p.shift.iter().map(|x| x.to_string()).collect();
        let class_rep: Vec<String> = p.class.1.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!(
            "({:<22})  {:>6}  ({:<9})  ({}, ({}))  {:>5}\n",
            coords.join(", "),
            p.branch + 1,
            shift.join(","),
            p.class.0 + 1,
            class_rep.join(","),
            p.index
        ));
    }
    for c in &report.checks {
        s.push_str(&format!("check ok: {c}\n"));
    }
    s.push_str(&report_to_table(&report.report)?);
    Ok(s)
}
