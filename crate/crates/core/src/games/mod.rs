//! Game-theoretic comparison of pointed models: verification of candidate
//! bisimulation relations, bisimilarity (unbounded, depth-bounded, and the
//! alternating variant with its optional world phases), and bounded
//! Ehrenfeucht–Fraïssé equivalence over tuples.
//!
//! All solvers work on the product of the two interpretations and require
//! them to share a signature.  The relation checker is written naively and
//! independently of the fixpoint solvers on purpose, so the two can audit
//! each other.

mod bisim;
mod ef;

use thiserror::Error;

use crate::model::ModelError;

pub use bisim::{
    atomic_agreement, bisim_relation, bisimilar, bisimilar_alt, bisimilar_alt_n, bisimilar_n,
    check_bisimulation, BisimClause, BisimViolation, GameConfig,
};
pub use ef::{ef_equivalent_n, ef_equivalent_n_with_caps, is_partial_isomorphism, EfCaps, EfConfig};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GamesError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("tuples must have equal, nonzero length (left {left}, right {right})")]
    TupleShape { left: usize, right: usize },
    #[error("{requested} round(s) exceed the rounds cap of {cap}")]
    RoundsCap { requested: usize, cap: usize },
    #[error("domain size {size} exceeds the domain cap of {cap}")]
    DomainCap { size: usize, cap: usize },
}
