//! Points of the slit plane and the two extensions of the semicircle
//! transform `G_1`.
//!
//! The continued `G_1` is single valued on `C \ ((-inf,-2] U [2,+inf))`: it is
//! `(z - s(z))/2` on the upper half-plane and `(z + s(z))/2` on the lower one,
//! where `s` is the square root of `z^2 - 4` cut along `[-2, 2]` with
//! `s(z) ~ z` at infinity. The two formulas glue across `(-2, 2)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex number with finite components.
pub type ComplexPoint = Complex64;

/// Which piece of the slit plane a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Upper,
    Lower,
    /// Real point in `(-2, 2)`, read as the limit from the upper half-plane.
    Gap,
    /// One of the branch points `+-2`, read as a boundary limit.
    Edge,
}

/// A point of the slit plane, or one of its two boundary branch points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitPoint {
    z: Complex64,
    region: Region,
}

impl SlitPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite(z));
        }
        let region = if z.im > 0.0 {
            Region::Upper
        } else if z.im < 0.0 {
            Region::Lower
        } else if z.re.abs() < 2.0 {
            Region::Gap
        } else if z.re.abs() == 2.0 {
            Region::Edge
        } else {
            return Err(Error::Domain(z, "the slit plane"));
        };
        // Normalise a signed zero so that the stored value is canonical.
        let z = if z.im == 0.0 { Complex64::new(z.re, 0.0) } else { z };
        Ok(Self { z, region })
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.z
    }

    pub fn region(&self) -> Region {
        self.region
    }

    /// Distance to the forbidden rays `(-inf,-2] U [2,+inf)`.
    pub fn distance_to_slit(&self) -> f64 {
        let z = self.z;
        let right = if z.re >= 2.0 { z.im.abs() } else { (z - 2.0).norm() };
        let left = if z.re <= -2.0 { z.im.abs() } else { (z + 2.0).norm() };
        right.min(left)
    }
}

impl TryFrom<Complex64> for SlitPoint {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        Self::new(z)
    }
}

impl fmt::Display for SlitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.z)
    }
}

impl FromStr for SlitPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_complex(s)?)
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` (also with `j`); whitespace is
/// ignored and both components must be finite.
pub fn parse_complex(input: &str) -> Result<Complex64> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a complex number: {input:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let real = |t: &str| -> Result<f64> {
        if !t.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b)) {
            return Err(bad());
        }
        t.parse::<f64>().map_err(|_| bad())
    };
    let z = match s.strip_suffix(['i', 'j']) {
        None => Complex64::new(real(&s)?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
            let (re_part, im_part) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("", body),
            };
            let im = match im_part {
                "" | "+" => 1.0,
                "-" => -1.0,
                t => real(t)?,
            };
            let re = if re_part.is_empty() { 0.0 } else { real(re_part)? };
            Complex64::new(re, im)
        }
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite(z));
    }
    Ok(z)
}

fn on_interval(z: Complex64) -> bool {
    z.im == 0.0 && z.re.abs() <= 2.0
}

/// `sqrt(z-2) sqrt(z+2)` with principal roots: cut exactly `[-2, 2]`, and
/// asymptotic to `z`.
fn s_unchecked(z: Complex64) -> Complex64 {
    (z - 2.0).sqrt() * (z + 2.0).sqrt()
}

/// Square root of `z^2 - 4` with branch cut `[-2, 2]` and `s(z)/z -> 1`.
pub fn sqrt_asym(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite(z));
    }
    if on_interval(z) {
        return Err(Error::Domain(z, "sqrt_asym"));
    }
    Ok(s_unchecked(z))
}

/// The square root as seen from the region the point lives in; on the gap it
/// is the limit from above, `i sqrt(4 - x^2)`.
pub(crate) fn s_on(p: &SlitPoint) -> Complex64 {
    match p.region {
        Region::Upper | Region::Lower => s_unchecked(p.z),
        Region::Gap => Complex64::new(0.0, (4.0 - p.z.re * p.z.re).sqrt()),
        Region::Edge => Complex64::new(0.0, 0.0),
    }
}

/// The continuation of `G_1` through `(-2, 2)`, mapping the slit plane into
/// the closed lower half-plane.
pub fn g1_continued(p: &SlitPoint) -> Complex64 {
    let z = p.z;
    let s = s_on(p);
    match p.region {
        // (z - s)/2 = 2/(z + s) without the cancellation at large |z|.
        Region::Upper | Region::Gap | Region::Edge => 2.0 / (z + s),
        Region::Lower => (z + s) / 2.0,
    }
}

/// The ordinary Cauchy transform of the semicircle law off its support, with
/// `G(conj z) = conj G(z)`.
pub fn g1_offcut(z: Complex64) -> Result<Complex64> {
    let s = sqrt_asym(z)?;
    Ok(2.0 / (z + s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(re: f64, im: f64) -> SlitPoint {
        SlitPoint::new(c(re, im)).unwrap()
    }

    #[test]
    fn regions() {
        assert_eq!(pt(0.3, 1.0).region(), Region::Upper);
        assert_eq!(pt(5.0, -1.0).region(), Region::Lower);
        assert_eq!(pt(1.9, 0.0).region(), Region::Gap);
        assert_eq!(pt(1.9, -0.0).region(), Region::Gap);
        assert_eq!(pt(-2.0, 0.0).region(), Region::Edge);
        assert!(matches!(SlitPoint::real(2.5), Err(Error::Domain(..))));
        assert!(matches!(SlitPoint::new(c(f64::NAN, 1.0)), Err(Error::NonFinite(_))));
    }

    #[test]
    fn sqrt_asym_examples() {
        let r5 = 5f64.sqrt();
        assert!((sqrt_asym(c(3.0, 0.0)).unwrap() - c(r5, 0.0)).norm() < 1e-15);
        assert!((sqrt_asym(c(-3.0, 0.0)).unwrap() - c(-r5, 0.0)).norm() < 1e-15);
        let s = sqrt_asym(c(0.0, 1.0)).unwrap();
        assert!((s - c(0.0, r5)).norm() < 1e-15);
        assert!((s * s + 5.0).norm() < 1e-14);
        assert!(sqrt_asym(c(1.0, 0.0)).is_err());
        assert!(sqrt_asym(c(2.0, 0.0)).is_err());
    }

    #[test]
    fn sqrt_asym_signed_zero_off_interval() {
        let r5 = 5f64.sqrt();
        assert!((sqrt_asym(c(3.0, -0.0)).unwrap() - c(r5, 0.0)).norm() < 1e-15);
        assert!((sqrt_asym(c(-3.0, -0.0)).unwrap() - c(-r5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn g1_examples() {
        let r5 = 5f64.sqrt();
        assert!((g1_continued(&pt(0.0, 0.0)) - c(0.0, -1.0)).norm() < 1e-15);
        assert!((g1_continued(&pt(2.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g1_continued(&pt(-2.0, 0.0)) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((g1_continued(&pt(0.0, 1.0)) - c(0.0, (1.0 - r5) / 2.0)).norm() < 1e-15);
        let w = g1_continued(&pt(0.0, -3.0));
        assert!((w - c(0.0, -(3.0 + 13f64.sqrt()) / 2.0)).norm() < 1e-14);
        assert!(w.norm() > 1.0);
    }

    #[test]
    fn offcut_examples() {
        let r5 = 5f64.sqrt();
        assert!((g1_offcut(c(3.0, 0.0)).unwrap() - c((3.0 - r5) / 2.0, 0.0)).norm() < 1e-15);
        assert!((g1_offcut(c(0.0, 1.0)).unwrap() - c(0.0, (1.0 - r5) / 2.0)).norm() < 1e-15);
        assert!((g1_offcut(c(0.0, -1.0)).unwrap() - c(0.0, (r5 - 1.0) / 2.0)).norm() < 1e-15);
        assert!(g1_offcut(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn gluing_across_gap() {
        for k in 0..40 {
            let x = -1.95 + 3.9 * k as f64 / 39.0;
            let above = g1_continued(&pt(x, 1e-8));
            let below = g1_continued(&pt(x, -1e-8));
            let on = g1_continued(&pt(x, 0.0));
            assert!((above - below).norm() < 1e-7, "x = {x}");
            assert!((above - on).norm() < 1e-7);
            assert!((on.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn offcut_jumps_across_gap_but_not_outside() {
        let a = g1_offcut(c(0.5, 1e-9)).unwrap();
        let b = g1_offcut(c(0.5, -1e-9)).unwrap();
        assert!((a - b).norm() > 1.0);
        let a = g1_offcut(c(3.0, 1e-9)).unwrap();
        let b = g1_offcut(c(3.0, -1e-9)).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_complex("1.5-2i").unwrap(), c(1.5, -2.0));
        assert_eq!(parse_complex(" -i ").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(parse_complex("2.5j").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("-1e-3-1e-2i").unwrap(), c(-1e-3, -1e-2));
        for bad in ["", "abc", "1+", "nan", "infi", "1++2i", "1e400", "i1"] {
            assert!(parse_complex(bad).is_err(), "{bad:?}");
        }
    }
}
