//! Numerical radii of complex matrices, block-tridiagonal strictly
//! positive completions with certificates, and trace-preserving
//! conditional expectations on matrix *-subalgebras.
//!
//! The crate is organised in four library modules plus a CLI front end:
//!
//! - [`linalg`]: dense complex matrices and the Hermitian eigensolver.
//! - [`numrad`]: numerical radius, the unit-circle positivity sweep,
//!   Haar-unitary sampling, and free joint numerical radius lower bounds.
//! - [`completion`]: feasibility and optimization of block-tridiagonal
//!   strictly positive completions, with validating certificates.
//! - [`subalgebra`]: *-subalgebra bases, conditional expectations, and the
//!   completion-transfer construction.

mod barrier;
pub mod cli;
pub mod completion;
pub mod error;
pub mod json;
pub mod linalg;
pub mod numrad;
pub mod subalgebra;

pub use error::{Error, Result};
