//! Bundled example interpretations: a two-world model `MI` and a three-world
//! model `MJ` over the signature `({A},{r})`, together with a six-pair
//! relation between them that the relation checker accepts as a
//! bisimulation.  They are small enough to verify by hand and recur
//! throughout the tests and the command-line examples.
//!
//! `MI` has worlds `v1,v2` and domain `a,b`, with `b ∈ A` at `v1` and the
//! single role edge `(a,b) ∈ r` at `v2`.  `MJ` has worlds `w1,w2,w3` over
//! the same domain, with `b ∈ A` at `w3` and `(a,b) ∈ r` at `w2` — there the
//! role edge and the `A`-membership of `b` never meet in one world, which is
//! what `exists dia r . A` distinguishes while bisimilarity cannot.

use crate::model::{load, load_relation, PointPair, S5Interpretation};

/// Canonical document of the two-world example model.
pub const MI_JSON: &str = include_str!("../../../fixtures/MI.json");

/// Canonical document of the three-world example model.
pub const MJ_JSON: &str = include_str!("../../../fixtures/MJ.json");

/// Canonical document of the six-pair bisimulation between [`fixture_mi`]
/// and [`fixture_mj`].
pub const R_JSON: &str = include_str!("../../../fixtures/R.json");

/// The two-world example model.
pub fn fixture_mi() -> S5Interpretation {
    load(MI_JSON).expect("bundled model MI is valid")
}

/// The three-world example model.
pub fn fixture_mj() -> S5Interpretation {
    load(MJ_JSON).expect("bundled model MJ is valid")
}

/// The six-pair bisimulation between [`fixture_mi`] and [`fixture_mj`].
pub fn fixture_relation() -> Vec<PointPair> {
    load_relation(R_JSON).expect("bundled relation R is valid")
}
