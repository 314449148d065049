//! Exact computations on finite classical polar spaces: enumeration of
//! totally isotropic subspaces, the association scheme of the dual polar
//! graph, and Cameron-Liebler sets of generators.

pub mod bitset;
pub mod clsets;
pub mod combinatorics;
pub mod enumeration;
pub mod error;
pub mod exact;
pub mod field;
pub mod geometry;
pub mod io;
pub mod scheme;
pub mod search;
pub mod suite;

pub use error::{Error, Result};
