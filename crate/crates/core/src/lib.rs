//! Workbench library for a two-dimensional modal description logic: concepts
//! and first-order formulas are evaluated over finite interpretations that
//! combine a set of worlds with a shared domain of individuals, where the
//! modalities `box`/`dia` quantify over worlds and roles relate individuals
//! within a world.
//!
//! The crate provides:
//!
//! - [`syntax`]: ASTs, a concrete ASCII syntax with parsers and canonical
//!   printers, rank computation, the standard translation of concepts into
//!   formulas, and the two-sorted first-order translation.
//! - [`model`]: finite interpretations, their canonical JSON serialization,
//!   and model constructions — restriction, Gaifman graph data, disjoint
//!   unions, tree and partial unravellings, and exhaustive enumeration.
//! - [`semantics`]: model checking for concepts and formulas, locality
//!   checks, and equivalence of formulas over classes of models.
//! - [`games`]: relation checking, the unbounded, depth-bounded, and
//!   alternating bisimilarity deciders, and bounded Ehrenfeucht–Fraïssé
//!   equivalence.
//! - [`normalform`]: rank-`k` characteristic normal forms of pointed models,
//!   their rendering as concepts, and the characterization of a formula as a
//!   disjunction of normal forms over a model class.
//! - [`gen`]: seeded random generation of concepts, formulas, and
//!   interpretations, used by the built-in property suites.
//! - [`fixtures`]: the small bundled example interpretations used throughout
//!   the documentation and tests.

pub(crate) mod dense;
pub mod fixtures;
pub mod games;
pub mod generate;
pub mod model;
pub mod normalform;
pub mod semantics;
pub mod syntax;
