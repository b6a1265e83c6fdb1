//! Smooth periodic traveling waves of the Camassa-Holm equation.
//!
//! Parameters `(a, b, c)` index the waves: `c` is the speed and `a`, `b` are
//! the two integration constants of the profile equation. The modules cover
//! the existence region, elliptic-function profiles and their period, the
//! conserved quantities along fixed-period families, monotonicity of the
//! period in `b`, and the spectra of the linearized operators.

// NaN must fail the domain checks, so several guards are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod functionals;
pub mod monotonicity;
pub mod numeric;
pub mod profile;
pub mod spectra;
pub mod wave_family;

pub use error::{Error, Result};
