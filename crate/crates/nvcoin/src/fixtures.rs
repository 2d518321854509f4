//! Built-in input documents: the worked examples and the validation
//! counterexamples, in the exact wire format the CLI reads.

use crate::io::{
    AffineMapWire, AffinePairWire, AlgebraicPairWire, Document, FlatGroupWire,
    GroupElementWire, NvMorphismWire, SemidirectElementWire, SingleMorphismWire,
};

fn srow(entries: &[&str]) -> Vec<String> {
    entries.iter().map(|s| s.to_string()).collect()
}

fn smat(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| srow(r)).collect()
}

fn elem(holonomy: usize, translation: &[i64]) -> GroupElementWire {
    GroupElementWire {
        holonomy,
        translation: translation.to_vec(),
    }
}

/// The 3-valued torus map with lift factors
/// `(t1/2, -t2), (t1/2 + 1/2, -t2), (-t1, -t2 + 1/2)` against the constant
/// map at 0, i.e. its root problem.
fn torus_3valued_root() -> Document {
    Document::AffinePair(AffinePairWire {
        dimension: 2,
        n: 3,
        branches: vec![
            AffineMapWire {
                linear: smat(&[&["1/2", "0"], &["0", "-1"]]),
                offset: srow(&["0", "0"]),
            },
            AffineMapWire {
                linear: smat(&[&["1/2", "0"], &["0", "-1"]]),
                offset: srow(&["1/2", "0"]),
            },
            AffineMapWire {
                linear: smat(&[&["-1", "0"], &["0", "-1"]]),
                offset: srow(&["0", "1/2"]),
            },
        ],
        g: AffineMapWire {
            linear: smat(&[&["0", "0"], &["0", "0"]]),
            offset: srow(&["0", "0"]),
        },
    })
}

/// Same 3-valued root fixture with the third branch degenerated to
/// `diag(0,-1)`: its coincidence count is infinite and its coin kernel
/// escapes the splitting subgroup.
fn torus_3valued_degenerate() -> Document {
    Document::AffinePair(AffinePairWire {
        dimension: 2,
        n: 3,
        branches: vec![
            AffineMapWire {
                linear: smat(&[&["1/2", "0"], &["0", "-1"]]),
                offset: srow(&["0", "0"]),
            },
            AffineMapWire {
                linear: smat(&[&["1/2", "0"], &["0", "-1"]]),
                offset: srow(&["1/2", "0"]),
            },
            AffineMapWire {
                linear: smat(&[&["0", "0"], &["0", "-1"]]),
                offset: srow(&["0", "1/2"]),
            },
        ],
        g: AffineMapWire {
            linear: smat(&[&["0", "0"], &["0", "0"]]),
            offset: srow(&["0", "0"]),
        },
    })
}

/// The 2-valued square-root map of the circle, `t -> {t/2, t/2 + 1/2}`,
/// against the identity.
fn circle_sqrt2() -> Document {
    Document::AffinePair(AffinePairWire {
        dimension: 1,
        n: 2,
        branches: vec![
            AffineMapWire {
                linear: smat(&[&["1/2"]]),
                offset: srow(&["0"]),
            },
            AffineMapWire {
                linear: smat(&[&["1/2"]]),
                offset: srow(&["1/2"]),
            },
        ],
        g: AffineMapWire {
            linear: smat(&[&["1"]]),
            offset: srow(&["0"]),
        },
    })
}

/// The doubling map of the 2-torus against the identity (n = 1).
fn torus_doubling() -> Document {
    Document::AffinePair(AffinePairWire {
        dimension: 2,
        n: 1,
        branches: vec![AffineMapWire {
            linear: smat(&[&["2", "0"], &["0", "2"]]),
            offset: srow(&["0", "0"]),
        }],
        g: AffineMapWire {
            linear: smat(&[&["1", "0"], &["0", "1"]]),
            offset: srow(&["0", "0"]),
        },
    })
}

fn half_turn_group_wire() -> FlatGroupWire {
    FlatGroupWire {
        dimension: 3,
        holonomy: vec![crate::io::AffineElementWire {
            rotation: smat(&[&["1", "0", "0"], &["0", "-1", "0"], &["0", "0", "-1"]]),
            translation: srow(&["1/2", "0", "0"]),
        }],
    }
}

/// The 3-dimensional half-turn flat manifold group: holonomy Z/2 generated
/// by `(diag(1,-1,-1), (1/2,0,0))`.
fn halfturn_3d() -> Document {
    Document::Group(half_turn_group_wire())
}

/// The Klein-bottle group, rejected for orientability.
fn klein_bottle() -> Document {
    Document::Group(FlatGroupWire {
        dimension: 2,
        holonomy: vec![crate::io::AffineElementWire {
            rotation: smat(&[&["1", "0"], &["0", "-1"]]),
            translation: srow(&["1/2", "0"]),
        }],
    })
}

/// The point-reflection crystallographic group, rejected for torsion.
fn point_reflection() -> Document {
    Document::Group(FlatGroupWire {
        dimension: 2,
        holonomy: vec![crate::io::AffineElementWire {
            rotation: smat(&[&["-1", "0"], &["0", "-1"]]),
            translation: srow(&["0", "0"]),
        }],
    })
}

fn identity_nv_wire(dim: usize, hol_count: usize) -> NvMorphismWire {
    let lattice_images = (0..dim)
        .map(|a| {
            let mut t = vec![0i64; dim];
            t[a] = 1;
            SemidirectElementWire {
                tuple: vec![elem(0, &t)],
                perm: vec![1],
            }
        })
        .collect();
    let holonomy_images = (1..=hol_count)
        .map(|j| SemidirectElementWire {
            tuple: vec![elem(j, &vec![0; dim])],
            perm: vec![1],
        })
        .collect();
    NvMorphismWire {
        n: 1,
        lattice_images,
        holonomy_images,
    }
}

fn identity_single_wire(dim: usize, hol_count: usize) -> SingleMorphismWire {
    SingleMorphismWire {
        lattice_images: (0..dim)
            .map(|a| {
                let mut t = vec![0i64; dim];
                t[a] = 1;
                elem(0, &t)
            })
            .collect(),
        holonomy_images: (1..=hol_count).map(|j| elem(j, &vec![0; dim])).collect(),
    }
}

/// The identity pair on the half-turn manifold: L = 0, N = 0, R infinite.
fn halfturn_identity_pair() -> Document {
    Document::AlgebraicPair(AlgebraicPairWire {
        source: half_turn_group_wire(),
        target: half_turn_group_wire(),
        phi: identity_nv_wire(3, 1),
        psi: identity_single_wire(3, 1),
    })
}

/// A nondegenerate endomorphism pair on the half-turn manifold:
/// `t1 -> t1^3, t2 -> t2^2, t3 -> t3^2, g -> t1 g` against the identity.
fn halfturn_endo_pair() -> Document {
    let phi = NvMorphismWire {
        n: 1,
        lattice_images: vec![
            SemidirectElementWire {
                tuple: vec![elem(0, &[3, 0, 0])],
                perm: vec![1],
            },
            SemidirectElementWire {
                tuple: vec![elem(0, &[0, 2, 0])],
                perm: vec![1],
            },
            SemidirectElementWire {
                tuple: vec![elem(0, &[0, 0, 2])],
                perm: vec![1],
            },
        ],
        holonomy_images: vec![SemidirectElementWire {
            tuple: vec![elem(1, &[1, 0, 0])],
            perm: vec![1],
        }],
    };
    Document::AlgebraicPair(AlgebraicPairWire {
        source: half_turn_group_wire(),
        target: half_turn_group_wire(),
        phi,
        psi: identity_single_wire(3, 1),
    })
}

/// Names and one-line descriptions of every built-in fixture.
pub fn registry() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "torus-3valued-root",
            "3-valued torus map (t1/2,-t2),(t1/2+1/2,-t2),(-t1,-t2+1/2) vs the constant map: the root problem",
        ),
        (
            "torus-3valued-degenerate",
            "same map with a singular third branch: infinite R, degenerate coin kernel",
        ),
        (
            "circle-sqrt2",
            "2-valued square-root map of the circle vs the identity",
        ),
        ("torus-doubling", "doubling map of the 2-torus vs the identity"),
        ("halfturn-3d", "the 3-dimensional half-turn Bieberbach group"),
        (
            "halfturn-3d-identity-pair",
            "identity pair on the half-turn manifold (R infinite)",
        ),
        (
            "halfturn-3d-endo-pair",
            "nondegenerate endomorphism pair on the half-turn manifold",
        ),
        ("klein-bottle", "Klein-bottle group: rejected (orientability)"),
        (
            "point-reflection",
            "point-reflection crystallographic group: rejected (torsion)",
        ),
    ]
}

/// Looks up a built-in fixture by name.
pub fn get(name: &str) -> Option<Document> {
    match name {
        "torus-3valued-root" => Some(torus_3valued_root()),
        "torus-3valued-degenerate" => Some(torus_3valued_degenerate()),
        "circle-sqrt2" => Some(circle_sqrt2()),
        "torus-doubling" => Some(torus_doubling()),
        "halfturn-3d" => Some(halfturn_3d()),
        "halfturn-3d-identity-pair" => Some(halfturn_identity_pair()),
        "halfturn-3d-endo-pair" => Some(halfturn_endo_pair()),
        "klein-bottle" => Some(klein_bottle()),
        "point-reflection" => Some(point_reflection()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_round_trips_through_json() {
        for (name, _) in registry() {
            let doc = get(name).unwrap();
            let json = doc.to_json();
            let reparsed = Document::parse(&json).unwrap();
            assert_eq!(json, reparsed.to_json(), "round trip for {name}");
        }
    }

    #[test]
    fn registry_names_resolve() {
        for (name, desc) in registry() {
            assert!(get(name).is_some(), "fixture {name} missing");
            assert!(!desc.is_empty());
        }
        assert!(get("no-such-fixture").is_none());
    }
}
