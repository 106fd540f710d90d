//! Residual checks for the functional and differential identities satisfied
//! by the ultraspherical transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::branch::{g1_continued, Region, SlitPoint};
use super::ultra::{gn_closed, gn_derivative, Ultraspherical};
use crate::error::{Error, Result};
use crate::exact::{catalan, UltraIndex};
use crate::quadrature::trapezoid_half_period;
use crate::tolerances::{CAUCHY_CIRCLE_MAX_RADIUS, CAUCHY_CIRCLE_NODES, QUADRATURE_TARGET};

/// `|lhs - rhs|` of a named identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub point: Complex64,
    pub residual: f64,
    pub identity: &'static str,
}

/// `G_{n+1}'(z) = (n+1)/2 (1 - z G_n(z))`.
pub fn check_derivative_identity(n: UltraIndex, z: &SlitPoint) -> Result<IdentityResidual> {
    let next = UltraIndex::new(n.get() as i64 + 1)?;
    let lhs = gn_derivative(next, z)?;
    let rhs = (1.0 - z.value() * gn_closed(n, z)) * ((n.get() + 1) as f64 / 2.0);
    Ok(IdentityResidual {
        point: z.value(),
        residual: (lhs - rhs).norm(),
        identity: "derivative",
    })
}

/// `(1/2pi) int t^(2k) sqrt(4-t^2)/(z-t) dt = z^(2k) G_1(z) - sum_{j<k} C_j z^(2(k-j)-1)`,
/// with the left side by quadrature; `z` must lie in the upper half-plane.
pub fn check_eq3(k: u32, z: &SlitPoint) -> Result<IdentityResidual> {
    if z.region() != Region::Upper {
        return Err(Error::Domain(z.value(), "the moment-expansion check"));
    }
    let zv = z.value();
    let lhs = trapezoid_half_period(
        |t| {
            let (s, c) = t.sin_cos();
            Complex64::new((2.0 * c).powi(2 * k as i32) * 4.0 * s * s / (2.0 * PI), 0.0)
                / (zv - 2.0 * c)
        },
        QUADRATURE_TARGET,
    )?
    .value;
    let tail: Complex64 = (0..k)
        .map(|j| zv.powi((2 * (k - j) - 1) as i32) * catalan(j).to_f64().unwrap_or(f64::NAN))
        .sum();
    let rhs = zv.powi(2 * k as i32) * g1_continued(z) - tail;
    Ok(IdentityResidual {
        point: zv,
        residual: (lhs - rhs).norm(),
        identity: "moment-expansion",
    })
}

/// `order`-th derivative of `G_n` at `z` by the trapezoid rule on a Cauchy
/// circle that stays inside the slit plane.
pub fn cauchy_derivative(n: UltraIndex, z: &SlitPoint, order: u32) -> Result<Complex64> {
    let g = Ultraspherical::cached(n);
    if order == 0 {
        return Ok(g.value(z));
    }
    let dist = z.distance_to_slit();
    if dist == 0.0 {
        return Err(Error::Singular(z.value()));
    }
    let radius = CAUCHY_CIRCLE_MAX_RADIUS.min(0.5 * dist);
    let m = CAUCHY_CIRCLE_NODES;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let theta = 2.0 * PI * j as f64 / m as f64;
        let node = SlitPoint::new(z.value() + Complex64::from_polar(radius, theta))?;
        acc += g.value(&node) * Complex64::from_polar(1.0, -(order as f64) * theta);
    }
    let fact: f64 = (1..=order).map(f64::from).product();
    Ok(acc * fact / (m as f64 * radius.powi(order as i32)))
}

/// Empirical constant in `(-1)^n G_n^(n-1) = (d_n / n!) G_1^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DnEstimate {
    /// Real part of the mean ratio.
    pub d_n: f64,
    /// Largest `|r(z) - mean|` over the sample.
    pub spread: f64,
    /// `spread / |mean|`.
    pub relative_spread: f64,
}

/// Forms `r(z) = (-1)^n n! G_n^(n-1)(z) / G_1(z)^n` over the sample; a small
/// spread certifies that `G_n^(n-1)` is a constant multiple of `G_1^n`.
pub fn estimate_dn(n: UltraIndex, sample: &[SlitPoint]) -> Result<DnEstimate> {
    if sample.len() < 2 {
        return Err(Error::DegenerateSample(format!(
            "need at least 2 points, got {}",
            sample.len()
        )));
    }
    let nv = n.get();
    let sign = if nv.is_multiple_of(2) { 1.0 } else { -1.0 };
    let fact: f64 = (1..=nv).map(f64::from).product();
    let ratios = sample
        .iter()
        .map(|z| {
            let d = cauchy_derivative(n, z, nv - 1)?;
            Ok(d * sign * fact / g1_continued(z).powi(nv as i32))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max);
    Ok(DnEstimate {
        d_n: mean.re,
        spread,
        relative_spread: spread / mean.norm(),
    })
}
