//! Dense integer polynomials of small degree.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::exact_sqrt;
use crate::error::{invalid, Result};

/// Polynomial with arbitrary-precision integer coefficients, constant term
/// first. The highest stored coefficient is never zero; the zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `a*x + b`
    pub fn linear(a: BigInt, b: BigInt) -> Self {
        Self::new(vec![b, a])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Horner evaluation; exact for any integer argument.
    pub fn evaluate(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `self(inner(x))`
    pub fn compose(&self, inner: &IntPolynomial) -> IntPolynomial {
        self.coeffs
            .iter()
            .rev()
            .fold(IntPolynomial::zero(), |acc, c| {
                &(&acc * inner) + &IntPolynomial::constant(c.clone())
            })
    }

    /// `Some(h)` with `self == divisor * h` and `h` integral.
    ///
    /// Long division is carried out over the rationals; the first
    /// non-integral quotient coefficient or a nonzero remainder means no
    /// integral quotient exists.
    pub fn exact_divide(&self, divisor: &IntPolynomial) -> Result<Option<IntPolynomial>> {
        let Some(dd) = divisor.degree() else {
            return invalid("division by the zero polynomial");
        };
        let Some(nd) = self.degree() else {
            return Ok(Some(IntPolynomial::zero()));
        };
        if nd < dd {
            return Ok(None);
        }
        let lead = divisor.leading().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Ok(None);
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Ok(None);
        }
        Ok(Some(IntPolynomial::new(quot)))
    }

    fn quadratic_coeffs(&self) -> Result<(BigInt, BigInt, BigInt)> {
        if self.degree() != Some(2) {
            return invalid(format!("expected a quadratic, got {self}"));
        }
        Ok((self.coeff(2), self.coeff(1), self.coeff(0)))
    }

    /// `b^2 - 4ac` of a quadratic.
    pub fn discriminant(&self) -> Result<BigInt> {
        let (a, b, c) = self.quadratic_coeffs()?;
        Ok(&b * &b - BigInt::from(4) * a * c)
    }

    /// Irreducibility over Z of a primitive quadratic: the discriminant is
    /// not a perfect square. Non-primitive input is rejected.
    pub fn is_irreducible_quadratic(&self) -> Result<bool> {
        let disc = self.discriminant()?;
        if !self.content().is_one() {
            return invalid(format!("{self} is not primitive"));
        }
        Ok(exact_sqrt(&disc).is_none())
    }
}

/// The cyclotomic polynomials used by the families: Φ3, Φ4 and Φ6.
pub fn cyclotomic(k: u32) -> Result<IntPolynomial> {
    match k {
        3 => Ok(IntPolynomial::from_i64(&[1, 1, 1])),
        4 => Ok(IntPolynomial::from_i64(&[1, 0, 1])),
        6 => Ok(IntPolynomial::from_i64(&[1, -1, 1])),
        _ => invalid(format!("cyclotomic polynomial only provided for k in {{3,4,6}}, got {k}")),
    }
}

/// Auxiliary quadratics of the k = 3 construction:
/// g0 = 3x²−1, g1 = 3x²−3x+1, g2 = 3x²+3x+1.
pub fn aux_g(j: u32) -> Result<IntPolynomial> {
    match j {
        0 => Ok(IntPolynomial::from_i64(&[-1, 0, 3])),
        1 => Ok(IntPolynomial::from_i64(&[1, -3, 3])),
        2 => Ok(IntPolynomial::from_i64(&[1, 3, 3])),
        _ => invalid(format!("auxiliary polynomial index must be 0, 1 or 2, got {j}")),
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let body = match (i, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "x".to_string(),
                (1, false) => format!("{mag}x"),
                (_, true) => format!("x^{i}"),
                (_, false) => format!("{mag}x^{i}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<crate::serde_int::Int> = Vec::deserialize(deserializer)?;
        Ok(IntPolynomial::new(raw.into_iter().map(|c| c.0).collect()))
    }
}
