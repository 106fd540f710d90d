//! Quadrature rules used as independent oracles.
//!
//! Integrals over `[-2, 2]` are taken in the angle variable `t = 2 cos(theta)`.
//! Every density in the ultraspherical family becomes a polynomial in
//! `sin(theta)` times the Jacobian, so the integrand is smooth and periodic
//! and the trapezoid rule converges geometrically.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::QUADRATURE_REFINE_GAP;

const MIN_LEVEL_NODES: usize = 16;
const MAX_LEVEL_NODES: usize = 1 << 22;

/// Result of an adaptive rule: the value plus the last refinement gap.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub gap: f64,
    pub nodes: usize,
}

/// `int_0^pi f(theta) d theta` for an `f` whose even 2pi-periodic extension is
/// smooth, by trapezoid doubling until two levels differ by less than `gap`.
pub fn trapezoid_half_period<F>(f: F, target: f64) -> Result<Estimate<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    let pi = std::f64::consts::PI;
    let mut n = MIN_LEVEL_NODES;
    let h = pi / n as f64;
    let mut sum = (f(0.0) + f(pi)) * 0.5;
    for j in 1..n {
        sum += f(j as f64 * h);
    }
    let mut prev = sum * h;
    let goal = target.clamp(f64::MIN_POSITIVE, QUADRATURE_REFINE_GAP);
    loop {
        let h = pi / (2 * n) as f64;
        for j in 0..n {
            sum += f((2 * j + 1) as f64 * h);
        }
        n *= 2;
        let value = sum * h;
        let gap = (value - prev).norm();
        let scale = value.norm().max(1.0);
        if gap <= goal * scale {
            return Ok(Estimate { value, gap, nodes: n });
        }
        if n >= MAX_LEVEL_NODES {
            return Err(Error::Precision { achieved: gap, target });
        }
        prev = value;
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=order {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = order as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre on `[a, b]` with panel doubling.
pub fn composite_gauss<F>(f: F, a: f64, b: f64, target: f64) -> Result<Estimate<f64>>
where
    F: Fn(f64) -> f64,
{
    const ORDER: usize = 20;
    let (x, w) = gauss_legendre(ORDER);
    let rule = |panels: usize| -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let mid = a + (p as f64 + 0.5) * h;
                x.iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * f(mid + 0.5 * h * xi))
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    };
    let mut panels = 2;
    let mut prev = rule(1);
    let goal = target.min(QUADRATURE_REFINE_GAP);
    loop {
        let value = rule(panels);
        let gap = (value - prev).abs();
        if gap <= goal * value.abs().max(1.0) {
            return Ok(Estimate { value, gap, nodes: panels * ORDER });
        }
        if panels >= 1 << 14 {
            return Err(Error::Precision { achieved: gap, target });
        }
        prev = value;
        panels *= 2;
    }
}
