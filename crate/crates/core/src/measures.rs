//! Density-level facts about `gamma_n`: Stieltjes inversion, the Beta
//! push-forwards, moments, and convergence to the Gaussian after scaling.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::UltraIndex;
use crate::format::fmt_float;
use crate::quadrature::{composite_gauss, trapezoid_half_period};
use crate::tolerances::QUADRATURE_TARGET;
use crate::transforms::{gn_closed, SlitPoint, Ultraspherical};
use num_complex::Complex64;

/// `c_n (4 - x^2)^(n - 1/2)` on `(-2, 2)`, zero elsewhere.
pub fn density_ultra(n: UltraIndex, x: f64) -> f64 {
    Ultraspherical::cached(n).density(x)
}

/// `-Im G_n(x + i eps) / pi`.
pub fn stieltjes_invert(n: UltraIndex, x: f64, eps: f64) -> Result<f64> {
    if !(x.abs() < 2.0) || !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("stieltjes_invert(x = {x}, eps = {eps})")));
    }
    let z = SlitPoint::new(Complex64::new(x, eps))?;
    Ok(-gn_closed(n, &z).im / PI)
}

/// `int t^order d gamma_n(t)` by quadrature; odd orders vanish by symmetry.
pub fn moment(n: UltraIndex, order: u32) -> Result<f64> {
    if order % 2 == 1 {
        return Ok(0.0);
    }
    let g = Ultraspherical::cached(n);
    let c = g.norm_const();
    let two_n = 2 * n.get() as i32;
    let e = trapezoid_half_period(
        |t| {
            let (s, co) = t.sin_cos();
            Complex64::new(c * (2.0 * co).powi(order as i32) * (2.0 * s).powi(two_n), 0.0)
        },
        QUADRATURE_TARGET,
    )?;
    Ok(e.value.re)
}

/// Samples of a density on ordered abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn new(abscissae: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::InvalidParameter("abscissae and values differ in length".into()));
        }
        if abscissae.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("abscissae must be strictly increasing".into()));
        }
        if values.iter().chain(&abscissae).any(|v| !v.is_finite()) || values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("values must be finite and nonnegative".into()));
        }
        Ok(Self { abscissae, values })
    }

    /// `density_ultra(n, .)` on `nx` equispaced points of `[x_min, x_max]`.
    pub fn sample(n: UltraIndex, x_min: f64, x_max: f64, nx: usize) -> Result<Self> {
        let xs = linspace(x_min, x_max, nx)?;
        let g = Ultraspherical::cached(n);
        let values = xs.iter().map(|&x| g.density(x)).collect();
        Self::new(xs, values)
    }

    pub fn trapezoid_mass(&self) -> f64 {
        self.abscissae
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in self.abscissae.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", fmt_float(*x), fmt_float(*v)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = read_csv(text, ["x", "value"])?;
        let (xs, vs) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
        Self::new(xs, vs)
    }
}

/// `n` equispaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !a.is_finite() || !b.is_finite() || !(a < b) {
        return Err(Error::InvalidParameter(format!("linspace({a}, {b}, {n})")));
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

fn read_csv<const W: usize>(text: &str, header: [&str; W]) -> Result<Vec<[f64; W]>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let found = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse(format!("expected header {}", header.join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.len() != W {
            return Err(Error::Parse(format!("expected {W} columns")));
        }
        let mut row = [0.0; W];
        for (slot, field) in row.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{field:?}: {e}")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Beta parameters restricted to positive half-integers, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BetaParams {
    twice_alpha: u32,
    twice_beta: u32,
}

impl BetaParams {
    pub fn from_doubled(twice_alpha: u32, twice_beta: u32) -> Result<Self> {
        if twice_alpha == 0 || twice_beta == 0 {
            return Err(Error::InvalidParameter("Beta parameters must be positive".into()));
        }
        Ok(Self { twice_alpha, twice_beta })
    }

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let doubled = |a: f64| {
            let d = 2.0 * a;
            if d.fract() == 0.0 && d >= 1.0 && d <= u32::MAX as f64 {
                Ok(d as u32)
            } else {
                Err(Error::InvalidParameter(format!("{a} is not a positive half-integer")))
            }
        };
        Self::from_doubled(doubled(alpha)?, doubled(beta)?)
    }

    pub fn alpha(&self) -> f64 {
        self.twice_alpha as f64 / 2.0
    }

    pub fn beta(&self) -> f64 {
        self.twice_beta as f64 / 2.0
    }

    /// `Beta(n + 1/2, n + 1/2)`.
    pub fn symmetric(n: UltraIndex) -> Self {
        Self { twice_alpha: 2 * n.get() + 1, twice_beta: 2 * n.get() + 1 }
    }
}

/// `rational * pi^pi_power`, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiMultiple {
    pub rational: BigRational,
    pub pi_power: u32,
}

impl PiMultiple {
    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN) * PI.powi(self.pi_power as i32)
    }
}

/// `Gamma(k/2)` as `rational * sqrt(pi)^e`; returns `(rational, e)`.
fn gamma_half(k: u32) -> (BigRational, u32) {
    if k.is_multiple_of(2) {
        let m = k / 2;
        let f = (1..m as u64).fold(BigUint::one(), |acc, i| acc * i);
        (BigRational::from_integer(BigInt::from(f)), 0)
    } else {
        // Gamma(m + 1/2) = (2m-1)!! sqrt(pi) / 2^m
        let m = (k - 1) / 2;
        let dfact = (1..=m as u64).fold(BigUint::one(), |acc, i| acc * (2 * i - 1));
        let r = BigRational::new(BigInt::from(dfact), BigInt::one() << m as usize);
        (r, 1)
    }
}

/// `B(alpha, beta)` for half-integer arguments, exactly.
pub fn beta_function(p: BetaParams) -> PiMultiple {
    let (ra, ea) = gamma_half(p.twice_alpha);
    let (rb, eb) = gamma_half(p.twice_beta);
    let (rs, es) = gamma_half(p.twice_alpha + p.twice_beta);
    PiMultiple {
        rational: ra * rb / rs,
        pi_power: (ea + eb - es) / 2,
    }
}

/// `u^(alpha-1) (1-u)^(beta-1) / B(alpha, beta)` for `0 < u < 1`.
pub fn beta_density(p: BetaParams, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter(format!("Beta density at u = {u}")));
    }
    let b = beta_function(p).to_f64();
    Ok(u.powf(p.alpha() - 1.0) * (1.0 - u).powf(p.beta() - 1.0) / b)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|&u| !(u > 0.0 && u < 1.0)) {
        return Err(Error::InvalidParameter("grid points must lie in (0, 1)".into()));
    }
    Ok(())
}

/// Density of `(2 - X)/4` for `X ~ gamma_n`, at `u`.
pub fn affine_pushforward(n: UltraIndex, u: f64) -> f64 {
    4.0 * density_ultra(n, 2.0 - 4.0 * u)
}

/// Density of `X^2/4` for `X ~ gamma_n`, at `u` (both branches folded).
pub fn square_pushforward(n: UltraIndex, u: f64) -> f64 {
    2.0 * density_ultra(n, 2.0 * u.sqrt()) / u.sqrt()
}

/// `max_u |density of (2-X)/4 - Beta(n+1/2, n+1/2)|`.
pub fn check_beta_symmetric(n: UltraIndex, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    let p = BetaParams::symmetric(n);
    grid.iter().try_fold(0.0f64, |acc, &u| {
        Ok(acc.max((affine_pushforward(n, u) - beta_density(p, u)?).abs()))
    })
}

/// Residuals of the square push-forward checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquareResiduals {
    /// `X^2/4` against `Beta(1/2, n+1/2)`.
    pub square: f64,
    /// `1 - X^2/4` against `Beta(n+1/2, 1/2)`.
    pub complement: f64,
}

impl SquareResiduals {
    pub fn max(&self) -> f64 {
        self.square.max(self.complement)
    }
}

pub fn check_beta_square(n: UltraIndex, grid: &[f64]) -> Result<SquareResiduals> {
    check_grid(grid)?;
    let nv = n.get();
    let sq = BetaParams::from_doubled(1, 2 * nv + 1)?;
    let co = BetaParams::from_doubled(2 * nv + 1, 1)?;
    let mut out = SquareResiduals { square: 0.0, complement: 0.0 };
    for &u in grid {
        out.square = out.square.max((square_pushforward(n, u) - beta_density(sq, u)?).abs());
        out.complement = out
            .complement
            .max((square_pushforward(n, 1.0 - u) - beta_density(co, u)?).abs());
    }
    Ok(out)
}

/// `int_0^1 f(u) du` through `u = sin^2 phi`, which absorbs the half-integer
/// endpoint powers of the Beta family.
pub fn unit_interval_mass<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let e = composite_gauss(
        |phi| {
            let (s, c) = phi.sin_cos();
            f(s * s) * 2.0 * s * c
        },
        0.0,
        PI / 2.0,
        QUADRATURE_TARGET,
    )?;
    Ok(e.value)
}

/// Per-`n` sup distance between the variance-normalized density and the
/// standard Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub entries: Vec<(u32, f64)>,
}

impl ConvergenceReport {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn distance(&self, n: u32) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == n).map(|e| e.1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sup_distance\n");
        for (n, d) in &self.entries {
            out.push_str(&format!("{n},{}\n", fmt_float(*d)));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = read_csv(text, ["n", "sup_distance"])?;
        let mut entries = Vec::with_capacity(rows.len());
        for [n, d] in rows {
            if n.fract() != 0.0 || !(n >= 1.0 && n <= u32::MAX as f64) || !d.is_finite() || d < 0.0 {
                return Err(Error::Parse(format!("bad row {n},{d}")));
            }
            entries.push((n as u32, d));
        }
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Parse("rows must be sorted by n".into()));
        }
        Ok(Self { entries })
    }
}

/// For each `n`: `sigma_n = sqrt(m_2)`, then
/// `sup_x |sigma_n rho_n(sigma_n x) - exp(-x^2/2)/sqrt(2 pi)|` over `x_grid`.
pub fn poincare_report(n_list: &[UltraIndex], x_grid: &[f64]) -> Result<ConvergenceReport> {
    if n_list.is_empty() || x_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut ns: Vec<UltraIndex> = n_list.to_vec();
    ns.sort();
    ns.dedup();
    let gauss = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    let entries = ns
        .into_iter()
        .map(|n| {
            let sigma = moment(n, 2)?.sqrt();
            let g = Ultraspherical::cached(n);
            let sup = x_grid
                .iter()
                .map(|&x| (sigma * g.density(sigma * x) - gauss(x)).abs())
                .fold(0.0, f64::max);
            Ok((n.get(), sup))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: i64) -> UltraIndex {
        UltraIndex::new(n).unwrap()
    }

    fn midpoints(k: usize) -> Vec<f64> {
        (0..k).map(|j| (j as f64 + 0.5) / k as f64).collect()
    }

    #[test]
    fn density_examples() {
        assert!((density_ultra(idx(1), 0.0) - 1.0 / PI).abs() < 1e-15);
        for n in 1..=5 {
            assert_eq!(density_ultra(idx(n), 2.0), 0.0);
            assert_eq!(density_ultra(idx(n), -2.0), 0.0);
            assert_eq!(density_ultra(idx(n), 3.0), 0.0);
        }
        let expect = 3f64.powf(1.5) / (6.0 * PI);
        assert!((density_ultra(idx(2), 1.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn beta_function_exact_values() {
        let half = BetaParams::new(0.5, 0.5).unwrap();
        assert_eq!(beta_function(half), PiMultiple { rational: BigRational::one(), pi_power: 1 });
        let b = beta_function(BetaParams::new(1.5, 1.5).unwrap());
        assert_eq!(b.rational, BigRational::new(1.into(), 8.into()));
        assert_eq!(b.pi_power, 1);
        // B(1/2, 1) = 2, B(2, 3) = 1/12
        assert_eq!(beta_function(BetaParams::new(0.5, 1.0).unwrap()).to_f64(), 2.0);
        let b = beta_function(BetaParams::new(2.0, 3.0).unwrap());
        assert_eq!((b.rational, b.pi_power), (BigRational::new(1.into(), 12.into()), 0));
        assert!(BetaParams::new(0.3, 1.0).is_err());
        assert!(BetaParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn beta_density_examples() {
        let v = beta_density(BetaParams::new(0.5, 0.5).unwrap(), 0.5).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-15);
        let v = beta_density(BetaParams::new(1.5, 1.5).unwrap(), 0.5).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-15);
        let p = BetaParams::new(0.5, 1.5).unwrap();
        assert!(beta_density(p, 1.0 - 1e-12).unwrap() < 1e-5);
        assert!(beta_density(p, 0.0).is_err());
        assert!(beta_density(p, 1.0).is_err());
    }

    #[test]
    fn beta_pushforwards() {
        let grid = midpoints(100);
        for n in [1, 3] {
            assert!(check_beta_symmetric(idx(n), &grid).unwrap() < 1e-12);
        }
        for n in [1, 2] {
            assert!(check_beta_square(idx(n), &grid).unwrap().max() < 1e-12);
        }
        let centre = check_beta_symmetric(idx(4), &[0.5]).unwrap();
        assert!(centre < 1e-13);
        assert!(check_beta_symmetric(idx(1), &[]).is_err());
        assert!(check_beta_square(idx(1), &[1.0]).is_err());
        // Near the support edge both sides vanish.
        assert!(square_pushforward(idx(2), 1.0 - 1e-9) < 1e-10);
    }

    #[test]
    fn pushforward_masses() {
        for n in 1..=6 {
            let m = unit_interval_mass(|u| affine_pushforward(idx(n), u)).unwrap();
            assert!((m - 1.0).abs() < 1e-8);
            let m = unit_interval_mass(|u| square_pushforward(idx(n), u)).unwrap();
            assert!((m - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn moments_small_cases() {
        for n in 1..=6 {
            assert!((moment(idx(n), 0).unwrap() - 1.0).abs() < 1e-12);
            assert!((moment(idx(n), 2).unwrap() - 2.0 / (n as f64 + 1.0)).abs() < 1e-12);
            assert_eq!(moment(idx(n), 3).unwrap(), 0.0);
        }
        assert!((moment(idx(1), 6).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn stieltjes_examples() {
        assert!((stieltjes_invert(idx(1), 0.0, 1e-12).unwrap() - 1.0 / PI).abs() < 1e-11);
        let d = stieltjes_invert(idx(2), 0.5, 1e-6).unwrap();
        assert!((d - density_ultra(idx(2), 0.5)).abs() < 1e-5);
        let d = stieltjes_invert(idx(3), 1.9, 1e-6).unwrap();
        assert!((d - density_ultra(idx(3), 1.9)).abs() < 1e-4);
        assert!(stieltjes_invert(idx(3), 2.0, 1e-6).is_err());
        assert!(stieltjes_invert(idx(3), 1.0, 0.0).is_err());
    }

    #[test]
    fn density_grid_csv_and_mass() {
        let g = DensityGrid::sample(idx(2), -2.0, 2.0, 5).unwrap();
        let text = g.to_csv();
        assert!(text.starts_with("x,value\n-2.0000000000000000e0,0.0000000000000000e0\n"));
        assert_eq!(DensityGrid::from_csv(&text).unwrap(), g);
        assert!(DensityGrid::from_csv("x,y\n1,2\n").is_err());
        assert!(DensityGrid::from_csv("x,value\n1,-2\n").is_err());
        assert!(DensityGrid::from_csv("x,value\n1,2\n0,2\n").is_err());
        let fine = DensityGrid::sample(idx(3), -2.0, 2.0, 20001).unwrap();
        assert!((fine.trapezoid_mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn convergence_report_csv() {
        let r = ConvergenceReport { entries: vec![(1, 0.1), (2, 0.05)] };
        assert!(r.is_strictly_decreasing());
        assert_eq!(ConvergenceReport::from_csv(&r.to_csv()).unwrap(), r);
        assert!(ConvergenceReport::from_csv("n,sup_distance\n2,0.1\n1,0.2\n").is_err());
        assert!(ConvergenceReport::from_csv("n,sup_distance\n0.5,0.1\n").is_err());
    }
}
