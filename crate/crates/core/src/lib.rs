//! Extrinsic symmetric spaces from extrinsic symmetric triples: exact
//! validation, orbit geometry, central and quadratic extensions, and a
//! catalog of worked examples.

pub mod catalog;
pub mod error;
pub mod extensions;
pub mod lie;
pub mod matrix;
pub mod orbit;
pub mod quadext;
pub mod rational;
pub mod report;
pub mod subspace;
pub mod triples;

pub use error::{Error, Result};
pub use lie::{InnerProduct, LieAlgebra, LinearMap};
pub use matrix::{Matrix, Vector};
pub use rational::Scalar;
pub use report::ValidationReport;
pub use subspace::Subspace;
pub use triples::{ExtrinsicTriple, Flavor};
