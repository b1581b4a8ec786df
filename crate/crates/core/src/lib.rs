//! Finite p-groups given by refined power-commutator presentations.
//!
//! The crate covers pc arithmetic ([`pc`]), the subgroup lattice
//! ([`subgroup`], [`quotient`]), characteristic series and class predicates
//! ([`series`]), commutator sets and witness certificates ([`commutator`],
//! [`witness`]), the covering verdict for small derived rank ([`verdict`]),
//! power-structure checks ([`properties`]), and builders plus the
//! presentation text format ([`constructions`], [`format`]).

pub mod commutator;
pub mod config;
pub mod constructions;
pub mod error;
pub mod format;
mod linalg;
pub mod pc;
pub mod properties;
pub mod quotient;
pub mod series;
pub mod subgroup;
pub mod verdict;
pub mod witness;

pub use config::Gate;
pub use error::{Error, Result};
pub use pc::{Element, PcBuilder, PcPresentation, Word};
pub use quotient::{quotient, QuotientMap};
pub use subgroup::Subgroup;
