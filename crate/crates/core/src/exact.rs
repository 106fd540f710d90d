//! Exact combinatorial kernel: Catalan numbers, the scaled normalization
//! constant `2*pi*c_n`, and the polynomials `Q_n`, `P_n` for which
//! `G_n(z) = Q_n(z^2) G_1(z) + z P_n(z^2)`.
//!
//! Working with `2*pi*c_n = n! / (2^(n-1) (2n-1)!!)` keeps every coefficient
//! rational; floating point enters only when a polynomial is evaluated.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Index `n >= 1` of the ultraspherical law `gamma_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UltraIndex(u32);

impl UltraIndex {
    pub fn new(n: i64) -> Result<Self> {
        if n < 1 || n > u32::MAX as i64 {
            return Err(Error::InvalidIndex(n));
        }
        Ok(Self(n as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `n / (2n - 1)`, the value of the transform at `z = 2`.
    pub fn edge_value(self) -> f64 {
        let n = self.0 as f64;
        n / (2.0 * n - 1.0)
    }
}

impl fmt::Display for UltraIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `C_j = (2j)! / (j! (j+1)!)`.
pub fn catalan(j: u32) -> BigUint {
    // C_{k+1} = C_k * 2(2k+1) / (k+2); the division is exact.
    let mut c = BigUint::one();
    for k in 0..j {
        c = c * BigUint::from(2 * (2 * k as u64 + 1)) / BigUint::from(k as u64 + 2);
    }
    c
}

fn factorial(k: u32) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, i| acc * i)
}

fn odd_double_factorial(n: u32) -> BigUint {
    // (2n-1)!! = 1*3*...*(2n-1)
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * (2 * i - 1))
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `2*pi*c_n = n! / (2^(n-1) (2n-1)!!)`.
pub fn scaled_norm_const(n: UltraIndex) -> BigRational {
    let n = n.get();
    let den = (BigUint::one() << (n - 1) as usize) * odd_double_factorial(n);
    ratio(factorial(n), den)
}

/// `(n+1) / (2(2n+1))`, the coefficient of the three-term recurrence
/// `G_{n+1} = a_n ((4 - z^2) G_n + z)`.
pub fn recurrence_coefficient(n: u32) -> BigRational {
    BigRational::new(BigInt::from(n + 1), BigInt::from(2 * (2 * n + 1)))
}

/// Polynomial with exact rational coefficients; `coefficients[j]` multiplies `X^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coefficients: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self { coefficients: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn coefficient(&self, j: usize) -> BigRational {
        self.coefficients.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coefficients.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coefficients.len().max(other.coefficients.len());
        Self::new((0..len).map(|j| self.coefficient(j) + other.coefficient(j)).collect())
    }

    /// Multiplies by `(4 - X)`.
    pub fn times_four_minus_x(&self) -> Self {
        let four = BigRational::from_integer(BigInt::from(4));
        let len = self.coefficients.len() + 1;
        let coeffs = (0..len)
            .map(|j| {
                let mut c = &four * self.coefficient(j);
                if j > 0 {
                    c -= self.coefficient(j - 1);
                }
                c
            })
            .collect();
        Self::new(coeffs)
    }

    /// Coefficients rounded to the nearest double.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * BigRational::from_integer(BigInt::from(j)))
                .collect(),
        )
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})X")?,
                _ => write!(f, "({c})X^{j}")?,
            }
        }
        Ok(())
    }
}

/// `Q_n(X) = 2*pi*c_n (4 - X)^(n-1)`, expanded.
pub fn build_q(n: UltraIndex) -> RationalPolynomial {
    let mut q = RationalPolynomial::constant(scaled_norm_const(n));
    for _ in 1..n.get() {
        q = q.times_four_minus_x();
    }
    q
}

/// `Q_n` from the binomial sum `2*pi*c_n sum_j C(n-1, j) (-1)^j 4^(n-1-j) X^j`.
pub fn build_q_binomial(n: UltraIndex) -> RationalPolynomial {
    let m = n.get() - 1;
    let norm = scaled_norm_const(n);
    let coeffs = (0..=m)
        .map(|j| {
            let binom = factorial(m) / (factorial(j) * factorial(m - j));
            let mut c = BigInt::from(binom) * (BigInt::one() << (2 * (m - j)) as usize);
            if j % 2 == 1 {
                c = -c;
            }
            BigRational::from_integer(c) * &norm
        })
        .collect();
    RationalPolynomial::new(coeffs)
}

/// `P_n(X) = 2*pi*c_n sum_{k=1}^{n-1} ( sum_{j=1}^{n-k}
/// (-1)^(j+k) 4^(n-j-k) (n-1)! / ((j+k-1)! (n-j-k)!) C_{j-1} ) X^(k-1)`.
pub fn build_p(n: UltraIndex) -> RationalPolynomial {
    let n_val = n.get();
    let norm = scaled_norm_const(n);
    let top = factorial(n_val - 1);
    let coeffs = (1..n_val)
        .map(|k| {
            let inner = (1..=n_val - k).fold(BigInt::zero(), |acc, j| {
                let jk = j + k;
                let mag = &top / (factorial(jk - 1) * factorial(n_val - jk))
                    * (BigUint::one() << (2 * (n_val - jk)) as usize)
                    * catalan(j - 1);
                let term = BigInt::from(mag);
                if jk % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            });
            BigRational::from_integer(inner) * &norm
        })
        .collect();
    RationalPolynomial::new(coeffs)
}

/// `(Q_n, P_n)` generated by lifting the three-term recurrence to polynomials:
/// `Q_{k+1} = a_k (4-X) Q_k`, `P_{k+1} = a_k ((4-X) P_k + 1)` from
/// `Q_1 = 1`, `P_1 = 0`.
pub fn build_by_recurrence(n: UltraIndex) -> (RationalPolynomial, RationalPolynomial) {
    let one = RationalPolynomial::constant(BigRational::one());
    let mut q = one.clone();
    let mut p = RationalPolynomial::zero();
    for k in 1..n.get() {
        let a = recurrence_coefficient(k);
        q = q.times_four_minus_x().scale(&a);
        p = p.times_four_minus_x().add(&one).scale(&a);
    }
    (q, p)
}
