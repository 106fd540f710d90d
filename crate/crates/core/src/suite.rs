//! The residual suite behind `ultrafid identities`: every identity checked
//! at one index `n`, aggregated to a max-residual table.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::exact::{build_by_recurrence, build_p, build_q, build_q_binomial, UltraIndex};
use crate::format::fmt_float;
use crate::transforms::{
    check_derivative_identity, check_eq3, estimate_dn, gn_closed, gn_quadrature, gn_recurrence,
    SlitPoint,
};

/// `k`-th element of the base-`b` van der Corput sequence.
fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while k > 0 {
        out += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    out
}

/// Deterministic low-discrepancy points (Halton 2,3) in a box.
pub fn halton_box(count: usize, re: (f64, f64), im: (f64, f64)) -> Vec<Complex64> {
    (1..=count as u64)
        .map(|k| {
            Complex64::new(
                re.0 + (re.1 - re.0) * radical_inverse(k, 2),
                im.0 + (im.1 - im.0) * radical_inverse(k, 3),
            )
        })
        .collect()
}

/// `nx * ny` cell-centred grid of `[-3, 3] x (0, 3]` in the upper half-plane.
pub fn upper_grid(nx: usize, ny: usize) -> Vec<SlitPoint> {
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = 3.0 * (j + 1) as f64 / ny as f64;
        for i in 0..nx {
            let x = -3.0 + 6.0 * (i as f64 + 0.5) / nx as f64;
            out.push(SlitPoint::new(Complex64::new(x, y)).expect("grid point in upper half-plane"));
        }
    }
    out
}

/// `count` equispaced points of `[-1.98, 1.98]` on the gap.
pub fn gap_points(count: usize) -> Vec<SlitPoint> {
    (0..count)
        .map(|k| {
            let x = -1.98 + 3.96 * k as f64 / (count.max(2) - 1) as f64;
            SlitPoint::real(x).expect("gap point")
        })
        .collect()
}

/// Slit-plane sample in `[-2, 2] x [-2, 2]` that keeps `0.05` away from `+-2`.
pub fn slit_sample(count: usize) -> Vec<SlitPoint> {
    halton_box(4 * count, (-2.0, 2.0), (-2.0, 2.0))
        .into_iter()
        .filter(|z| (z - 2.0).norm() > 0.05 && (z + 2.0).norm() > 0.05)
        .filter_map(|z| SlitPoint::new(z).ok())
        .take(count)
        .collect()
}

/// One line of the residual table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub identity: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SuiteRow {
    fn new(identity: &'static str, max_residual: f64, tolerance: f64) -> Self {
        Self { identity, max_residual, tolerance, pass: max_residual <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub n: u32,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity,max_residual,tolerance,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.identity,
                fmt_float(r.max_residual),
                fmt_float(r.tolerance),
                r.pass
            ));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("identity residuals for n = {}\n", self.n);
        for r in &self.rows {
            out.push_str(&format!(
                "  {:<34} {:>24}  tol {:<8e} {}\n",
                r.identity,
                fmt_float(r.max_residual),
                r.tolerance,
                if r.pass { "PASS" } else { "FAIL" }
            ));
        }
        out
    }
}

fn max_of(it: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

/// Runs the full suite at index `n`.
pub fn run_suite(n: UltraIndex) -> Result<SuiteReport> {
    let mut rows = Vec::new();

    let (q_rec, p_rec) = build_by_recurrence(n);
    let exact_mismatch = [
        build_q(n) != q_rec,
        build_p(n) != p_rec,
        build_q(n) != build_q_binomial(n),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    rows.push(SuiteRow::new("polynomial recurrence (exact)", exact_mismatch as f64, 0.0));

    let mut pts = upper_grid(12, 12);
    pts.extend(gap_points(20));
    let rec = pts
        .iter()
        .map(|z| (gn_recurrence(n, z) - gn_closed(n, z)).norm())
        .fold(0.0, f64::max);
    rows.push(SuiteRow::new("recurrence vs closed form", rec, 1e-10));

    let quad = max_of(
        pts.iter()
            .map(|z| gn_quadrature(n, z.value()).map(|q| (q - gn_closed(n, z)).norm())),
    )?;
    rows.push(SuiteRow::new("quadrature vs closed form", quad, 1e-10));

    let edge = [2.0, -2.0]
        .iter()
        .map(|&x| {
            let z = SlitPoint::real(x).expect("branch point");
            (gn_closed(n, &z).re - x.signum() * n.edge_value()).abs() + gn_closed(n, &z).im.abs()
        })
        .fold(0.0, f64::max);
    rows.push(SuiteRow::new("boundary values at +-2", edge, 1e-12));

    let deriv = max_of(
        slit_sample(100)
            .iter()
            .map(|z| check_derivative_identity(n, z).map(|r| r.residual)),
    )?;
    rows.push(SuiteRow::new("derivative identity", deriv, 1e-10));

    let upper = halton_box(20, (-2.5, 2.5), (0.2, 2.5));
    let expansion = max_of((0..=5u32).flat_map(|k| {
        upper.iter().map(move |&z| {
            let p = SlitPoint::new(z)?;
            check_eq3(k, &p).map(|r| r.residual)
        })
    }))?;
    rows.push(SuiteRow::new("moment expansion (k <= 5)", expansion, 1e-9));

    let sample: Vec<SlitPoint> = halton_box(40, (-1.6, 1.6), (-1.4, 1.4))
        .into_iter()
        .filter_map(|z| SlitPoint::new(z).ok())
        .collect();
    let dn = estimate_dn(n, &sample)?;
    rows.push(SuiteRow::new("constant ratio spread (relative)", dn.relative_spread, 1e-6));

    Ok(SuiteReport { n: n.get(), rows })
}
