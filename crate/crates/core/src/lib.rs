//! Exact scattering diagrams over graded Lie algebras: consistent completion,
//! tropical trees, broken lines, theta functions and the quiver case.

pub mod completion;
pub mod diagram;
pub mod error;
pub mod group;
pub mod json;
pub mod lattice;
pub mod lie;
pub mod marked;
pub mod quiver;
pub mod rings;
pub mod svg;
pub mod theta;
pub mod trees;

pub use error::{Error, Result};
