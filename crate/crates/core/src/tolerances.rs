//! Every numerical threshold used by the library, in one place.
//!
//! Certificates and residual tables are only comparable across runs when the
//! thresholds that produced them are fixed, so nothing outside this module
//! hard-codes a tolerance.

/// Absolute target for the Cauchy-integral quadrature oracle.
pub const QUADRATURE_TARGET: f64 = 1e-12;

/// Successive-refinement gap accepted as converged by the quadrature rules.
pub const QUADRATURE_REFINE_GAP: f64 = 1e-14;

/// Final residual `|G(z) - w|` required of every inversion.
pub const INVERSION_RESIDUAL: f64 = 1e-12;

/// Residual accepted at intermediate continuation nodes.
pub const CONTINUATION_RESIDUAL: f64 = 1e-10;

/// Default certificate threshold on `max Im phi`.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;

/// Below this modulus the two-term asymptotic inverse seeds Newton directly.
pub const FAR_FIELD_SEED_RADIUS: f64 = 0.1;

/// Targets with `|Re w|` below this go to the imaginary-axis inverter.
pub const AXIS_BAND: f64 = 1e-12;

/// In the closed upper half-plane, beyond this modulus the transform is
/// summed from its moment series instead of the polynomial closed form.
pub const FAR_FIELD_RADIUS: f64 = 2.5;

/// Number of trapezoid nodes on the Cauchy circle used for high derivatives.
pub const CAUCHY_CIRCLE_NODES: usize = 64;

/// Largest Cauchy circle radius.
pub const CAUCHY_CIRCLE_MAX_RADIUS: f64 = 0.25;

/// Newton iterations allowed per continuation node before the step is halved.
pub const NEWTON_STEP_ITERS: usize = 5;

/// Hard iteration cap for a standalone Newton solve.
pub const NEWTON_MAX_ITERS: usize = 60;

/// Continuation gives up once the step fraction drops below this.
pub const MIN_STEP_FRACTION: f64 = 1e-12;

/// Initial continuation step as a fraction of the segment length.
pub const INITIAL_STEP_FRACTION: f64 = 1.0 / 64.0;

/// Derivative modulus below which the continuation step is halved.
pub const SMALL_DERIVATIVE: f64 = 1e-8;

/// Tunable subset of the thresholds, carried by certificates and CLI runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub inversion_residual: f64,
    pub certificate: f64,
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            inversion_residual: INVERSION_RESIDUAL,
            certificate: CERTIFICATE_TOLERANCE,
            quadrature: QUADRATURE_TARGET,
        }
    }
}
