//! Cauchy transforms of the ultraspherical laws `gamma_n`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::branch::{g1_continued, g1_offcut, s_on, Region, SlitPoint};
use crate::error::{Error, Result};
use crate::exact::{build_p, build_q, recurrence_coefficient, scaled_norm_const, UltraIndex};
use crate::quadrature::{composite_gauss, trapezoid_half_period};
use crate::tolerances::{FAR_FIELD_RADIUS, QUADRATURE_TARGET};

const SERIES_TERMS: usize = 160;

/// Floating-point evaluator for `G_n` built from the exact kernel.
///
/// Near the support the transform is evaluated from the closed form
/// `Q_n(z^2) G_1(z) + z P_n(z^2)`. In the upper half-plane far from the
/// support that form cancels catastrophically (both terms grow like
/// `|z|^(2n-3)` while the sum decays like `1/z`), so there the moment series
/// `sum m_2k z^-(2k+1)` is used instead.
#[derive(Debug, Clone)]
pub struct Ultraspherical {
    n: UltraIndex,
    q: Vec<f64>,
    p: Vec<f64>,
    dq: Vec<f64>,
    dp: Vec<f64>,
    moments: Vec<f64>,
    c_n: f64,
}

fn horner(coeffs: &[f64], x: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn cache() -> &'static RwLock<HashMap<UltraIndex, Arc<Ultraspherical>>> {
    static CACHE: OnceLock<RwLock<HashMap<UltraIndex, Arc<Ultraspherical>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl Ultraspherical {
    pub fn new(n: UltraIndex) -> Self {
        let q_exact = build_q(n);
        let p_exact = build_p(n);
        let nf = n.get() as f64;
        // m_2k = prod_{i<k} 2(2i+1)/(n+1+i)
        let mut moments = Vec::with_capacity(SERIES_TERMS);
        let mut m = 1.0;
        for i in 0..SERIES_TERMS {
            moments.push(m);
            m *= 2.0 * (2 * i + 1) as f64 / (nf + 1.0 + i as f64);
        }
        let two_pi_c = scaled_norm_const(n).to_f64().unwrap_or(f64::NAN);
        Self {
            n,
            q: q_exact.to_f64(),
            p: p_exact.to_f64(),
            dq: q_exact.derivative().to_f64(),
            dp: p_exact.derivative().to_f64(),
            moments,
            c_n: two_pi_c / (2.0 * PI),
        }
    }

    /// Shared instance; built once per index.
    pub fn cached(n: UltraIndex) -> Arc<Self> {
        if let Some(u) = cache().read().ok().and_then(|m| m.get(&n).cloned()) {
            return u;
        }
        let built = Arc::new(Self::new(n));
        match cache().write() {
            Ok(mut m) => m.entry(n).or_insert(built).clone(),
            Err(_) => built,
        }
    }

    pub fn index(&self) -> UltraIndex {
        self.n
    }

    /// Normalization constant `c_n` of the density.
    pub fn norm_const(&self) -> f64 {
        self.c_n
    }

    /// Even moments `m_0, m_2, ...` of `gamma_n`, closed form.
    pub fn even_moment(&self, k: usize) -> f64 {
        self.moments[k]
    }

    /// `Q_n(z^2) G_1(z) + z P_n(z^2)`, by Horner.
    pub fn closed(&self, p: &SlitPoint) -> Complex64 {
        let z = p.value();
        let z2 = z * z;
        horner(&self.q, z2) * g1_continued(p) + z * horner(&self.p, z2)
    }

    /// Analytic derivative of [`Self::closed`], using `G_1' = -+ G_1 / s`.
    pub fn closed_derivative(&self, p: &SlitPoint) -> Result<Complex64> {
        let z = p.value();
        let s = s_on(p);
        if p.region() == Region::Edge || s.norm() == 0.0 {
            return Err(Error::Singular(z));
        }
        let w = g1_continued(p);
        let dw = match p.region() {
            Region::Lower => w / s,
            _ => -w / s,
        };
        let z2 = z * z;
        Ok(2.0 * z * horner(&self.dq, z2) * w
            + horner(&self.q, z2) * dw
            + horner(&self.p, z2)
            + 2.0 * z2 * horner(&self.dp, z2))
    }

    fn use_series(&self, p: &SlitPoint) -> bool {
        p.region() == Region::Upper && p.value().norm() >= FAR_FIELD_RADIUS
    }

    fn series(&self, z: Complex64) -> (Complex64, Complex64) {
        let u = 1.0 / (z * z);
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for (k, m) in self.moments.iter().enumerate() {
            let term = power * *m;
            value += term;
            deriv += term * (2 * k + 1) as f64;
            if k > 2 && term.norm() < 1e-18 * value.norm() {
                break;
            }
            power *= u;
        }
        (value / z, -deriv * u)
    }

    /// `G_n(z)` on the slit plane, numerically stable everywhere.
    pub fn value(&self, p: &SlitPoint) -> Complex64 {
        if self.use_series(p) {
            self.series(p.value()).0
        } else {
            self.closed(p)
        }
    }

    /// `G_n'(z)` on the slit plane, numerically stable everywhere.
    pub fn derivative(&self, p: &SlitPoint) -> Result<Complex64> {
        if self.use_series(p) {
            Ok(self.series(p.value()).1)
        } else {
            self.closed_derivative(p)
        }
    }

    /// `lim_{e -> 0+} G_n(x + i e)` on the whole real line: the gap value on
    /// `[-2, 2]`, the real-valued ordinary transform outside.
    pub fn boundary_value(&self, x: f64) -> Result<Complex64> {
        if !x.is_finite() {
            return Err(Error::NonFinite(Complex64::new(x, 0.0)));
        }
        if x.abs() <= 2.0 {
            return Ok(self.value(&SlitPoint::real(x)?));
        }
        let z = Complex64::new(x, 0.0);
        if x.abs() >= FAR_FIELD_RADIUS {
            return Ok(self.series(z).0);
        }
        let z2 = z * z;
        Ok(horner(&self.q, z2) * g1_offcut(z)? + z * horner(&self.p, z2))
    }

    /// `c_n (4 - x^2)^(n - 1/2)` on `[-2, 2]`, zero outside.
    pub fn density(&self, x: f64) -> f64 {
        if !(x.abs() < 2.0) {
            return 0.0;
        }
        self.c_n * (4.0 - x * x).powf(self.n.get() as f64 - 0.5)
    }

    /// Density in the angle variable: `rho(2 cos t) * 2 sin t = c_n (2 sin t)^(2n)`.
    fn angular_weight(&self, theta: f64) -> f64 {
        self.c_n * (2.0 * theta.sin()).powi(2 * self.n.get() as i32)
    }

    /// `int_{-2}^{2} rho(t) / (z - t) dt` by quadrature in the angle variable.
    ///
    /// Upper half-plane points use the periodic trapezoid rule; gap points
    /// use the principal value plus the `-i pi rho(x)` jump; the branch
    /// points use the integrable closed integrand.
    pub fn quadrature(&self, z: Complex64) -> Result<Complex64> {
        let p = SlitPoint::new(z)?;
        match p.region() {
            Region::Upper => {
                let e = trapezoid_half_period(
                    |t| Complex64::new(self.angular_weight(t), 0.0) / (z - 2.0 * t.cos()),
                    QUADRATURE_TARGET,
                )?;
                Ok(e.value)
            }
            Region::Gap => self.principal_value(z.re),
            Region::Edge => {
                // sin^2 t / (+-2 - 2 cos t) simplifies to +-(1 +- cos t)/2.
                let sign = z.re.signum();
                let n = self.n.get() as i32;
                let e = trapezoid_half_period(
                    |t| {
                        let v = self.c_n
                            * 4f64.powi(n)
                            * t.sin().powi(2 * n - 2)
                            * (1.0 + sign * t.cos())
                            / 2.0;
                        Complex64::new(sign * v, 0.0)
                    },
                    QUADRATURE_TARGET,
                )?;
                Ok(e.value)
            }
            Region::Lower => Err(Error::Domain(z, "the quadrature oracle")),
        }
    }

    fn principal_value(&self, x: f64) -> Result<Complex64> {
        let rho_x = self.density(x);
        let theta0 = (x / 2.0).acos();
        let h = |t: f64| {
            let d = x - 2.0 * t.cos();
            if d == 0.0 {
                return 0.0;
            }
            (self.density(2.0 * t.cos()) - rho_x) * 2.0 * t.sin() / d
        };
        let left = composite_gauss(h, 0.0, theta0, QUADRATURE_TARGET)?;
        let right = composite_gauss(h, theta0, PI, QUADRATURE_TARGET)?;
        let pv = left.value + right.value + rho_x * ((2.0 + x) / (2.0 - x)).ln();
        Ok(Complex64::new(pv, -PI * rho_x))
    }
}

/// `G_n(z) = Q_n(z^2) G_1(z) + z P_n(z^2)`.
pub fn gn_closed(n: UltraIndex, z: &SlitPoint) -> Complex64 {
    Ultraspherical::cached(n).closed(z)
}

/// `G_n` from `G_1` by `G_{k+1} = a_k ((4 - z^2) G_k + z)`.
pub fn gn_recurrence(n: UltraIndex, z: &SlitPoint) -> Complex64 {
    let zv = z.value();
    let four_minus = 4.0 - zv * zv;
    let mut g = g1_continued(z);
    for k in 1..n.get() {
        let a = recurrence_coefficient(k).to_f64().unwrap_or(f64::NAN);
        g = (four_minus * g + zv) * a;
    }
    g
}

/// Independent quadrature oracle for `G_n`; see [`Ultraspherical::quadrature`].
pub fn gn_quadrature(n: UltraIndex, z: Complex64) -> Result<Complex64> {
    Ultraspherical::cached(n).quadrature(z)
}

/// Exact derivative of the closed form; singular at `+-2`.
pub fn gn_derivative(n: UltraIndex, z: &SlitPoint) -> Result<Complex64> {
    Ultraspherical::cached(n).closed_derivative(z)
}
