//! Numerical laboratory for degenerate quasilinear elliptic problems
//! `-div(g(|∇u|) ∇u / |∇u|) = f(|x|, u)`: flux laws and the strong maximum
//! principle class, the explicit two-bump plateau solution, radial shooting
//! and second variation, and grid fields on a disk.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closedform;
pub mod error;
pub mod field2d;
pub mod operators;
pub mod probe;
pub mod quad;
pub mod radial;

pub use error::{Error, Result};

/// Version string embedded in every output record.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
