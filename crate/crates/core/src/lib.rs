//! Cauchy transforms of the ultraspherical laws `gamma_n`, their global
//! inverse on the lower half-plane, the Voiculescu transform, and numerical
//! certificates of free infinite divisibility.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod format;
pub mod inversion;
pub mod measures;
pub mod quadrature;
pub mod suite;
pub mod tolerances;
pub mod transforms;

pub use error::{Error, Result};
pub use exact::UltraIndex;
pub use num_complex::Complex64;
