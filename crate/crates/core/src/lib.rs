//! Electrical networks on disks and cylinders: exact response matrices, local equivalences,
//! the electrical R-matrix, grove polynomials, and the inverse problem for the networks `N(m)`.

pub mod cli;
pub mod cylinder;
pub mod equivalences;
pub mod error;
pub mod groves;
pub mod inverse;
pub mod matrix;
pub mod netcore;
pub mod rmatrix;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Rational, Weight};
