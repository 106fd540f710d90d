//! Global inverse of `G_n` on the lower half-plane, the Voiculescu transform
//! `phi_n(z) = G_n^{-1}(1/z) - z`, and certificates that `Im phi_n <= 0` on
//! the upper half-plane.
//!
//! The open lower-right quadrant is foliated by segments `eta_t` joining
//! `-it` to `n/(2n-1) + t`. The inverse is known on the imaginary axis (where
//! `G_n` is a monotone bijection onto `i(-inf, 0)`), and is continued along
//! `eta_t` by predictor-corrector Newton. Targets left of the axis are
//! reached through the mirror rule `G^{-1}(-conj w) = -conj G^{-1}(w)`.
//!
//! The mirror rule is what the symmetry `G(-conj z) = -conj G(z)` of a
//! symmetric law forces. The reflection `u + iv -> -u + iv` without the
//! conjugate would send a point of the lower half-plane back to itself and
//! is not compatible with injectivity; the test suite checks the mirror rule
//! against continuation along the reflected segments.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::UltraIndex;
use crate::tolerances::{
    AXIS_BAND, CERTIFICATE_TOLERANCE, CONTINUATION_RESIDUAL, FAR_FIELD_SEED_RADIUS,
    INITIAL_STEP_FRACTION, INVERSION_RESIDUAL, MIN_STEP_FRACTION, NEWTON_MAX_ITERS,
    NEWTON_STEP_ITERS, SMALL_DERIVATIVE,
};
use crate::transforms::{SlitPoint, Ultraspherical};

const POLISH_STEPS: usize = 3;

/// The segment `eta_t` from `-it` to `n/(2n-1) + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaSegment {
    pub n: UltraIndex,
    pub t: f64,
}

impl EtaSegment {
    pub fn new(n: UltraIndex, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("segment parameter t = {t}")));
        }
        Ok(Self { n, t })
    }

    pub fn start(&self) -> Complex64 {
        Complex64::new(0.0, -self.t)
    }

    pub fn end(&self) -> Complex64 {
        Complex64::new(self.n.edge_value() + self.t, 0.0)
    }

    pub fn point(&self, sigma: f64) -> Complex64 {
        self.start() * (1.0 - sigma) + self.end() * sigma
    }
}

/// Position of a target on the foliation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentLocation {
    pub t: f64,
    pub sigma: f64,
}

/// Finds `t > 0`, `sigma in (0,1)` with `w = (1-sigma)(-it) + sigma (b + t)`,
/// `b = n/(2n-1)`, for `w` in the open lower-right quadrant.
///
/// With `u = Re w`, `v = -Im w` this is `t^2 + (b - u - v) t - b v = 0`.
pub fn locate_segment(n: UltraIndex, w: Complex64) -> Result<SegmentLocation> {
    if !(w.re > 0.0 && w.im < 0.0) || !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Domain(w, "the lower-right quadrant"));
    }
    let b = n.edge_value();
    let (u, v) = (w.re, -w.im);
    let beta = b - u - v;
    let disc = (beta * beta + 4.0 * b * v).sqrt();
    // Pick the cancellation-free form of the positive root.
    let t = if beta <= 0.0 {
        (disc - beta) / 2.0
    } else {
        2.0 * b * v / (disc + beta)
    };
    Ok(SegmentLocation { t, sigma: u / (b + t) })
}

/// Inverse image of a target together with continuation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionResult {
    pub preimage: Complex64,
    pub target: Complex64,
    /// Accepted continuation steps (1 for a direct solve).
    pub steps: usize,
    pub max_newton_iters: usize,
    pub final_residual: f64,
}

struct Newton {
    z: Complex64,
    iters: usize,
    residual: f64,
}

/// True when the straight move `a -> b` touches `(-inf,-2] U [2,+inf)`.
fn crosses_slit(a: Complex64, b: Complex64) -> bool {
    if b.im == 0.0 {
        return b.re.abs() >= 2.0;
    }
    if (a.im > 0.0) == (b.im > 0.0) || a.im == 0.0 {
        return false;
    }
    let s = a.im / (a.im - b.im);
    let x = a.re + s * (b.re - a.re);
    x.abs() >= 2.0
}

/// Damped Newton for `G(z) = target` that refuses to leave the slit plane.
fn newton(
    g: &Ultraspherical,
    mut z: Complex64,
    target: Complex64,
    tol: f64,
    max_iters: usize,
) -> Result<Newton> {
    let mut p = SlitPoint::new(z)?;
    let mut f = g.value(&p) - target;
    let mut residual = f.norm();
    for iter in 0..=max_iters {
        if residual <= tol {
            return Ok(Newton { z, iters: iter, residual });
        }
        if iter == max_iters {
            break;
        }
        let d = g.derivative(&p)?;
        let step = f / d;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = z - step * lambda;
            if !crosses_slit(z, cand) {
                if let Ok(cp) = SlitPoint::new(cand) {
                    let cf = g.value(&cp) - target;
                    if cf.norm() < residual || lambda == 1.0 && cf.norm() <= 2.0 * residual {
                        z = cand;
                        p = cp;
                        f = cf;
                        residual = cf.norm();
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::Convergence { target, residual })
}

/// Newton to the inversion tolerance, then a few more full steps while they
/// keep reducing the residual, so the result sits at the rounding floor.
fn polish(g: &Ultraspherical, z: Complex64, target: Complex64) -> Result<Newton> {
    let mut best = newton(g, z, target, INVERSION_RESIDUAL, NEWTON_MAX_ITERS)?;
    for _ in 0..POLISH_STEPS {
        let p = SlitPoint::new(best.z)?;
        let cand = best.z - (g.value(&p) - target) / g.derivative(&p)?;
        if crosses_slit(best.z, cand) {
            break;
        }
        let Ok(cp) = SlitPoint::new(cand) else { break };
        let residual = (g.value(&cp) - target).norm();
        if !(residual < best.residual) {
            break;
        }
        best = Newton { z: cand, iters: best.iters + 1, residual };
    }
    Ok(best)
}

/// Two-term asymptotic inverse `1/w + m_2 w`.
fn far_seed(g: &Ultraspherical, w: Complex64) -> Complex64 {
    1.0 / w + g.even_moment(1) * w
}

/// The unique `iy` with `G_n(iy) = iv`, `v < 0`, found by marching the target
/// geometrically along the negative imaginary axis from a far seed.
pub fn invert_on_axis(n: UltraIndex, v: f64) -> Result<Complex64> {
    let g = Ultraspherical::cached(n);
    invert_axis_with(&g, v)
}

fn invert_axis_with(g: &Ultraspherical, v: f64) -> Result<Complex64> {
    if !(v < 0.0) || !v.is_finite() {
        return Err(Error::Domain(Complex64::new(0.0, v), "the negative imaginary axis"));
    }
    let target_of = |vk: f64| Complex64::new(0.0, vk);
    let mut vk = v.max(-FAR_FIELD_SEED_RADIUS);
    let seed = far_seed(g, target_of(vk));
    let mut y = newton(g, Complex64::new(0.0, seed.im), target_of(vk), CONTINUATION_RESIDUAL, NEWTON_MAX_ITERS)?
        .z
        .im;
    let mut ratio = 2.0;
    while vk > v {
        let next = (vk * ratio).max(v);
        let p = SlitPoint::new(Complex64::new(0.0, y))?;
        let slope = g.derivative(&p)?.re;
        let predicted = y + (next - vk) / slope;
        match newton(g, Complex64::new(0.0, predicted), target_of(next), CONTINUATION_RESIDUAL, NEWTON_STEP_ITERS) {
            Ok(r) if r.z.re.abs() <= 1e-9 * r.z.im.abs().max(1.0) => {
                y = r.z.im;
                vk = next;
                ratio = (ratio * 1.5).min(2.0);
            }
            _ => {
                ratio = 1.0 + (ratio - 1.0) / 2.0;
                if ratio - 1.0 < MIN_STEP_FRACTION {
                    return Err(Error::Continuation { at: Complex64::new(0.0, y), target: target_of(v) });
                }
            }
        }
    }
    let r = polish(g, Complex64::new(0.0, y), target_of(v))?;
    Ok(Complex64::new(0.0, r.z.im))
}

/// Continues the inverse along the straight segment from `-it` (whose
/// preimage lies on the imaginary axis) to `w`.
///
/// Used for both halves of the plane: along `eta_t` for `Re w > 0` and along
/// the reflected segment for `Re w < 0`.
pub fn continue_inverse(n: UltraIndex, t: f64, w: Complex64) -> Result<InversionResult> {
    let g = Ultraspherical::cached(n);
    continue_with(&g, t, w)
}

fn continue_with(g: &Ultraspherical, t: f64, w: Complex64) -> Result<InversionResult> {
    let start = Complex64::new(0.0, -t);
    let mut z = invert_axis_with(g, -t)?;
    let mut s = 0.0;
    let mut ds = INITIAL_STEP_FRACTION;
    let mut steps = 0;
    let mut max_iters = 0;
    let path = |s: f64| start + (w - start) * s;
    while s < 1.0 {
        if ds < MIN_STEP_FRACTION {
            return Err(Error::Continuation { at: z, target: w });
        }
        let s_next = (s + ds).min(1.0);
        let p = SlitPoint::new(z)?;
        let d = g.derivative(&p)?;
        if d.norm() < SMALL_DERIVATIVE {
            ds /= 2.0;
            continue;
        }
        let predicted = z + (path(s_next) - path(s)) / d;
        if crosses_slit(z, predicted) {
            ds /= 2.0;
            continue;
        }
        match newton(g, predicted, path(s_next), CONTINUATION_RESIDUAL, NEWTON_STEP_ITERS) {
            Ok(r) if !crosses_slit(z, r.z) => {
                z = r.z;
                s = s_next;
                steps += 1;
                max_iters = max_iters.max(r.iters);
                if r.iters <= 2 {
                    ds = (ds * 2.0).min(0.25);
                }
            }
            _ => ds /= 2.0,
        }
    }
    let r = polish(g, z, w)?;
    Ok(InversionResult {
        preimage: r.z,
        target: w,
        steps: steps.max(1),
        max_newton_iters: max_iters.max(r.iters),
        final_residual: r.residual,
    })
}

fn invert_right(g: &Ultraspherical, w: Complex64) -> Result<InversionResult> {
    if w.norm() < FAR_FIELD_SEED_RADIUS {
        // Small targets come from the far upper half-plane, where G is
        // injective; any solution found there is the preimage.
        if let Ok(r) = polish(g, far_seed(g, w), w) {
            if r.z.im > 0.0 {
                return Ok(InversionResult {
                    preimage: r.z,
                    target: w,
                    steps: 1,
                    max_newton_iters: r.iters,
                    final_residual: r.residual,
                });
            }
        }
    }
    let loc = locate_segment(g.index(), w)?;
    continue_with(g, loc.t, w)
}

/// `G_n^{-1}(w)` for `Im w < 0`, valued in the domain `D_n`.
pub fn g_inverse(n: UltraIndex, w: Complex64) -> Result<InversionResult> {
    let g = Ultraspherical::cached(n);
    inverse_with(&g, w)
}

fn inverse_with(g: &Ultraspherical, w: Complex64) -> Result<InversionResult> {
    if !(w.im < 0.0) || !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Domain(w, "the lower half-plane"));
    }
    if w.re.abs() < AXIS_BAND {
        let z = invert_axis_with(g, w.im)?;
        let residual = (g.value(&SlitPoint::new(z)?) - w).norm();
        return Ok(InversionResult {
            preimage: z,
            target: w,
            steps: 1,
            max_newton_iters: 0,
            final_residual: residual,
        });
    }
    if w.re > 0.0 {
        return invert_right(g, w);
    }
    let mirrored = invert_right(g, -w.conj())?;
    Ok(InversionResult {
        preimage: -mirrored.preimage.conj(),
        target: w,
        ..mirrored
    })
}

/// `phi_n(z) = G_n^{-1}(1/z) - z` for `Im z > 0`.
pub fn voiculescu(n: UltraIndex, z: Complex64) -> Result<Complex64> {
    let g = Ultraspherical::cached(n);
    voiculescu_with(&g, z)
}

fn voiculescu_with(g: &Ultraspherical, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(z, "the upper half-plane"));
    }
    Ok(inverse_with(g, 1.0 / z)?.preimage - z)
}

/// Polar grid in the upper half-plane: `nr` log-spaced radii in
/// `[r_min, r_max]` times `ntheta` angles `pi (j + 1/2) / ntheta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub nr: usize,
    pub ntheta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { r_min: 1e-2, r_max: 1e2, nr: 64, ntheta: 64 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_min.is_finite()
            && self.r_max.is_finite()
            && self.r_min > 0.0
            && self.r_max >= self.r_min
            && self.nr >= 1
            && self.ntheta >= 1;
        if !ok {
            return Err(Error::InvalidParameter(format!("grid {self:?}")));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        if self.nr == 1 {
            return vec![self.r_min];
        }
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        (0..self.nr)
            .map(|k| (a + (b - a) * k as f64 / (self.nr - 1) as f64).exp())
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.ntheta)
            .map(|j| std::f64::consts::PI * (j as f64 + 0.5) / self.ntheta as f64)
            .collect()
    }

    /// Points in radius-major order.
    pub fn points(&self) -> Vec<Complex64> {
        let angles = self.angles();
        self.radii()
            .into_iter()
            .flat_map(|r| angles.iter().map(move |&th| Complex64::from_polar(r, th)))
            .collect()
    }

    pub fn doubled(&self) -> Self {
        Self { nr: 2 * self.nr, ntheta: 2 * self.ntheta, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Evidence that `phi_n` maps the sampled upper half-plane into the closed
/// lower half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub n: UltraIndex,
    pub spec: GridSpec,
    pub grid: Vec<Complex64>,
    pub im_phi: Vec<f64>,
    pub max_im_phi: f64,
    pub argmax: Complex64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// Version of the certificate JSON layout.
pub const CERTIFICATE_SCHEMA: u32 = 1;

/// The archived form of a [`Certificate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub schema: u32,
    pub n: u32,
    pub tolerance: f64,
    pub grid: GridSpec,
    pub max_im_phi: f64,
    pub argmax: [f64; 2],
    pub verdict: Verdict,
}

impl CertificateRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate record is always serializable")
    }

    /// Parses and validates an archived certificate.
    pub fn from_json(text: &str) -> Result<Self> {
        let rec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CERTIFICATE_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {}", self.schema)));
        }
        UltraIndex::new(self.n as i64)?;
        self.grid.validate()?;
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::Parse(format!("tolerance {}", self.tolerance)));
        }
        if !self.max_im_phi.is_finite() || !self.argmax.iter().all(|c| c.is_finite()) || !(self.argmax[1] > 0.0) {
            return Err(Error::Parse("non-finite maximum or argmax outside the upper half-plane".into()));
        }
        let expected = if self.max_im_phi <= self.tolerance { Verdict::Pass } else { Verdict::Fail };
        if expected != self.verdict {
            return Err(Error::Parse("verdict disagrees with max_im_phi and tolerance".into()));
        }
        Ok(())
    }
}

impl Certificate {
    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            schema: CERTIFICATE_SCHEMA,
            n: self.n.get(),
            tolerance: self.tolerance,
            grid: self.spec,
            max_im_phi: self.max_im_phi,
            argmax: [self.argmax.re, self.argmax.im],
            verdict: self.verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Evaluates `Im phi_n` over the grid in parallel; passes iff the maximum is
/// at most `tolerance`.
pub fn fid_certificate(n: UltraIndex, spec: &GridSpec, tolerance: f64) -> Result<Certificate> {
    spec.validate()?;
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance}")));
    }
    let grid = spec.points();
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let g = Ultraspherical::cached(n);
    let im_phi = grid
        .par_iter()
        .map(|&z| voiculescu_with(&g, z).map(|phi| phi.im))
        .collect::<Result<Vec<_>>>()?;
    // First maximum in grid order, so the argmax does not depend on scheduling.
    let (k, max_im_phi) = im_phi
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
    let verdict = if max_im_phi <= tolerance { Verdict::Pass } else { Verdict::Fail };
    Ok(Certificate {
        n,
        spec: *spec,
        argmax: grid[k],
        grid,
        im_phi,
        max_im_phi,
        verdict,
        tolerance,
    })
}

/// Certificate with the default grid and tolerance.
pub fn default_certificate(n: UltraIndex) -> Result<Certificate> {
    fid_certificate(n, &GridSpec::default(), CERTIFICATE_TOLERANCE)
}
