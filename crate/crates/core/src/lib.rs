//! Numerical free probability at desk scale.
//!
//! The crate covers R-diagonal matrix models and their asymptotic freeness,
//! the one-variable free entropy and its identities, the measure geometry of
//! the polar decomposition, free cumulants on *-distributions, and Monte Carlo
//! microstate volumes.

pub mod cumulants;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod matrix;
pub mod microstates;
pub mod models;
pub mod parallel;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod suite;
pub mod word;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use rng::RngStream;
pub use spectral::{FunctionSpec, SpectralMeasure};
