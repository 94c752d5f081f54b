//! Decision, counting and enumeration for constraint satisfaction problems
//! with global cardinality constraints over finite domains.
//!
//! A global cardinality constraint prescribes exactly how many variables must
//! take each domain value. For a fixed constraint language the problem is
//! either polynomial-time solvable or NP-complete; this crate implements both
//! sides of that split:
//!
//! - [`classifier`] decides which side a language falls on by searching for a
//!   conservative majority and a conservative minority polymorphism;
//! - [`consistency`] and [`solver`] implement the polynomial algorithm for
//!   tractable languages (pair consistency, then a component/block recursion
//!   over sets of cardinality vectors);
//! - [`counter`] runs the same recursion with exact solution counts;
//! - [`reductions`] builds the gadget instances behind the hardness proofs;
//! - [`oracle`] is the brute-force ground truth every other module is tested
//!   against at desk scale.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs, so everything here is safe to call concurrently.

pub mod acceptance;
pub mod cardinality;
pub mod classifier;
pub mod consistency;
pub mod counter;
pub mod domain;
pub mod error;
pub mod instance;
pub mod language;
pub mod oracle;
pub mod partition;
pub mod reductions;
pub mod relation;
pub mod solver;

pub use cardinality::{CardinalityVector, CountMap};
pub use domain::DomainSpec;
pub use error::{Error, Result};
pub use instance::{Constraint, Instance};
pub use language::ConstraintLanguage;
pub use partition::Partition;
pub use relation::{Relation, ThickMappingCheck, ThickMappingWitness, Tuple};
