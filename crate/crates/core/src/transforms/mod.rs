//! Branch-correct evaluation of the Cauchy transforms `G_1` and `G_n` on the
//! slit plane, the quadrature oracle, and identity residuals.

mod branch;
mod identities;
mod ultra;

pub use branch::{g1_continued, g1_offcut, parse_complex, sqrt_asym, ComplexPoint, Region, SlitPoint};
pub use identities::{
    cauchy_derivative, check_derivative_identity, check_eq3, estimate_dn, DnEstimate, IdentityResidual,
};
pub use ultra::{gn_closed, gn_derivative, gn_quadrature, gn_recurrence, Ultraspherical};
