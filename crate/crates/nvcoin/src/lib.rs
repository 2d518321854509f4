//! Exact calculator and verifier for Nielsen, Reidemeister and Lefschetz
//! coincidence invariants of pairs `(f, g)`, where `f` is an n-valued map
//! and `g` a single-valued map between closed orientable flat manifolds
//! (tori and Bieberbach quotients).
//!
//! Everything is exact rational / integer arithmetic: invariants come out
//! as integers, naturals or a first-class infinity, never as floats. On
//! tori, a geometric brute-force oracle enumerates the actual coincidence
//! points of affine n-valued maps and cross-checks every computed
//! invariant.

pub mod crystal;
pub mod error;
pub mod fixtures;
pub mod invariants;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod nvmorph;
pub mod oracle;
pub mod rational;

pub use error::{Error, Result};
pub use lattice::{Count, Lattice};
pub use rational::{Int, Rat};
