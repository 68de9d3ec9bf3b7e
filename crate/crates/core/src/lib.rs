//! Curvature invariants of hypersurfaces computed from their principal
//! curvatures.
//!
//! Every pointwise quantity (mean and higher mean curvatures, normalized
//! scalar curvature, `|A|^2`, the traceless part `phi = A - H I`, Newton
//! tensor eigenvalues) is available in two numeric regimes: exact rationals
//! ([`Rational`]) for identity checking and `f64` for data coming out of the
//! [`immersion`] pipeline. The crate is `no_std` and only needs `alloc`.
//!
//! Modules:
//!
//! - [`spectrum`]: symmetric functions and the invariant report of a spectrum.
//! - [`simons`]: right-hand sides of the Laplacian formula for `|A|^2` and the
//!   constant-mean-curvature bracket.
//! - [`cylinders`]: generalized cylinders `R^{n-k} x S^k(r)` and the scalar
//!   curvature ladders they realize.
//! - [`caseverify`]: limit-spectrum constraint systems, the feasibility
//!   scanner, closed-form certificates and the principal curvature set test.
//! - [`immersion`]: shape operator recovery for parametrized patches.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod caseverify;
pub mod cylinders;
mod error;
pub mod immersion;
pub mod scalar;
pub mod simons;
pub mod spectrum;

pub use error::Error;
pub use scalar::{Field, Rational, Regime, Scalar, Tolerance};
pub use spectrum::{CurvatureSpectrum, InvariantReport};

pub type Result<T, E = Error> = core::result::Result<T, E>;
