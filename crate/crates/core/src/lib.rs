//! Grid-based convex analysis in finite dimension.
//!
//! Functions are sampled on rational lattice grids and take values in
//! `]-inf, +inf]`. The crate provides exact and fast Legendre–Fenchel
//! conjugation, the quadrivariate inf-convolution formulas and their dual
//! minimum counterparts, qualification checks, representative functions and
//! finite monotone operator graphs.

pub mod error;
pub mod conjugate;
pub mod lp;
pub mod monops;
pub mod numcore;
pub mod quadab;
pub mod reprfn;
pub mod qualif;

pub use error::{Error, Result};
pub use numcore::*;
