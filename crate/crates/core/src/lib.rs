//! Certified p-adic Frobenius matrices of smooth projective hypersurfaces over
//! prime fields, and the Picard-number bounds they imply.
//!
//! The pipeline runs in stages:
//!
//! 1. [`precision`] picks a working precision from the target precision.
//! 2. [`geometry`] validates the input and builds the monomial cohomology basis.
//! 3. [`groebner`] and [`reduction`] implement reduction of poles over `Z/p^s`.
//! 4. [`frobenius`] expands the Frobenius lift and assembles the matrix.
//! 5. [`spectral`] turns the approximate matrix into certified bounds.
//! 6. [`zeta`] counts points by brute force to cross-check the trace.
//!
//! [`pipeline`] ties these together for the command-line tool.

pub mod dense;
pub mod error;
pub mod frobenius;
pub mod geometry;
pub mod groebner;
pub mod par;
pub mod pipeline;
pub mod poly;
pub mod precision;
pub mod reduction;
pub mod residue;
pub mod spectral;
pub mod zeta;

pub use error::{Error, Result};
