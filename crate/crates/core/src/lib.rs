//! Numerical laboratory for circle-domain uniformization of Sierpinski packings.
//!
//! The crate builds, for a finite packing of disjoint continua on the Riemann
//! sphere, the normalized conformal map onto a circle domain (Koebe
//! circularization), and provides the surrounding instrumentation: spherical
//! geometry primitives, packing functionals (diameters, fatness, Hausdorff
//! and relative distances), a discrete transboundary-modulus solver, and
//! convergence diagnostics for the sequence of circle domains as the number
//! of components grows.

pub mod artifact;
pub mod error;
pub mod exec;
pub mod lab;
pub mod modulus;
pub mod packing;
pub mod render;
pub mod sphere;
pub mod uniformize;

pub use error::{Error, Result};

/// Library version embedded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
