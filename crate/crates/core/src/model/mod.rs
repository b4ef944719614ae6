//! Finite interpretations and everything that builds new ones from old:
//! serialization, domain restriction, disjoint extensions, distance data on
//! the role graph, tree and partial unravellings, and exhaustive enumeration
//! of all models within size bounds.

mod enumerate;
mod gaifman;
mod interp;
mod io;
mod unravel;

pub use enumerate::{count_models, enumerate_models, ClassSpec, ModelEnumeration};
pub use gaifman::{gaifman, neighborhood, GaifmanData};
pub use interp::{ModelError, S5Interpretation};
pub use io::{load, load_relation, save, save_relation, LoadError, PointPair};
pub use unravel::{partial_unravelling, tree_unravelling, PartialUnravelling, Unravelling};
