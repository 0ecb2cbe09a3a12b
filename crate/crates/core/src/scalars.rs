//! Scalar rings used throughout the crate.
//!
//! Identities are checked with [`QPolynomial`] coefficients so that a single
//! pass certifies every value of the deformation parameter at once; numerical
//! estimates run on plain `f64`. Both implement [`Scalar`], and every
//! structure that depends on the deformation parameter stores `q` as a value
//! of the ring it works over.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QfockError, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Common interface of the exact and floating scalar rings.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn from_i64(n: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// Numeric value when the element is a plain number (always for `f64`,
    /// only for constant polynomials in the exact ring).
    fn to_f64(&self) -> Option<f64>;

    /// Equality up to `tol` in floating mode; exact equality otherwise.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base.clone();
            }
            exp >>= 1;
            if exp > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
}

/// Univariate polynomial in the formal deformation parameter `q` with
/// rational coefficients. Index `i` of `coeffs` holds the coefficient of
/// `q^i`; trailing zeros are always stripped, so the zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPolynomial {
    coeffs: Vec<Rational>,
}

impl QPolynomial {
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate `q`.
    pub fn q() -> Self {
        Self::monomial(1)
    }

    /// `q^k` with unit coefficient.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = Rational::one();
        QPolynomial { coeffs }
    }

    /// Polynomial with integer coefficients `counts[i]` on `q^i`; the usual
    /// shape of a generating function over a statistic.
    pub fn from_counts(counts: &[i64]) -> Self {
        Self::from_i64_coeffs(counts)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    fn add_impl(&self, rhs: &Self, sign: i64) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let s = Rational::from_integer(sign.into());
        let coeffs = (0..len)
            .map(|i| self.coeff(i) + rhs.coeff(i) * &s)
            .collect();
        Self::from_coeffs(coeffs)
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    /// Coefficients rendered as strings, lowest power first.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Debug for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPolynomial({self})")
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match i {
                0 => {}
                1 => f.write_str("q")?,
                _ => write!(f, "q^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Zero for QPolynomial {
    fn zero() -> Self {
        QPolynomial { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for QPolynomial {
    fn one() -> Self {
        Self::monomial(0)
    }
}

impl Add for QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: QPolynomial) -> QPolynomial {
        self.add_impl(&rhs, 1)
    }
}

impl<'a> Add<&'a QPolynomial> for &'a QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        self.add_impl(rhs, 1)
    }
}

impl Sub for QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: QPolynomial) -> QPolynomial {
        self.add_impl(&rhs, -1)
    }
}

impl<'a> Sub<&'a QPolynomial> for &'a QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        self.add_impl(rhs, -1)
    }
}

impl Mul for QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: QPolynomial) -> QPolynomial {
        self.mul_impl(&rhs)
    }
}

impl<'a> Mul<&'a QPolynomial> for &'a QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        self.mul_impl(rhs)
    }
}

impl Neg for QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        Self::from_coeffs(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl AddAssign for QPolynomial {
    fn add_assign(&mut self, rhs: QPolynomial) {
        *self = self.add_impl(&rhs, 1);
    }
}

impl SubAssign for QPolynomial {
    fn sub_assign(&mut self, rhs: QPolynomial) {
        *self = self.add_impl(&rhs, -1);
    }
}

impl Scalar for QPolynomial {
    fn from_i64(n: i64) -> Self {
        Self::constant(Rational::from_integer(n.into()))
    }

    fn from_rational(r: &Rational) -> Self {
        Self::constant(r.clone())
    }

    fn to_f64(&self) -> Option<f64> {
        match self.coeffs.len() {
            0 => Some(0.0),
            1 => self.coeffs[0].to_f64(),
            _ => None,
        }
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn pow(&self, exp: u32) -> Self {
        // q^k is by far the common case; skip the multiplications.
        if self.coeffs.len() == 2 && self.coeffs[0].is_zero() && self.coeffs[1].is_one() {
            return Self::monomial(exp as usize);
        }
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

/// Which scalar ring a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarMode {
    /// Generic `q`: coefficients are [`QPolynomial`]s.
    ExactPolynomial,
    /// Floating point at a fixed `q` with `|q| < 1`.
    Float(f64),
}

impl ScalarMode {
    pub fn float(q: f64) -> Result<Self> {
        let mode = ScalarMode::Float(q);
        mode.validate()?;
        Ok(mode)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarMode::ExactPolynomial => Ok(()),
            ScalarMode::Float(q) if q.is_finite() && q.abs() < 1.0 => Ok(()),
            ScalarMode::Float(q) => Err(QfockError::Domain(format!(
                "q = {q} is outside the open interval (-1, 1); the q-Gram form degenerates"
            ))),
        }
    }

    pub fn q_value(&self) -> Option<f64> {
        match *self {
            ScalarMode::ExactPolynomial => None,
            ScalarMode::Float(q) => Some(q),
        }
    }
}

/// Sum of `q^{stat}` over a list of statistic values, as a polynomial.
pub fn generating_polynomial<I: IntoIterator<Item = usize>>(stats: I) -> QPolynomial {
    let mut counts: Vec<i64> = Vec::new();
    for s in stats {
        if counts.len() <= s {
            counts.resize(s + 1, 0);
        }
        counts[s] += 1;
    }
    QPolynomial::from_counts(&counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> QPolynomial {
        QPolynomial::from_i64_coeffs(c)
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(p(&[1, 1]) * p(&[1, -1]), p(&[1, 0, -1]));
        assert_eq!(p(&[3, 0, 2]) + QPolynomial::zero(), p(&[3, 0, 2]));
        assert_eq!(QPolynomial::q() * QPolynomial::q(), QPolynomial::monomial(2));
        assert_eq!(p(&[1, 2]) - p(&[1, 2]), QPolynomial::zero());
        assert!(p(&[0, 0, 0]).coeffs().is_empty());
    }

    #[test]
    fn evaluation() {
        assert_eq!(p(&[1, 1]).eval(0.5), 1.5);
        assert_eq!(QPolynomial::monomial(3).eval(-1.0), -1.0);
        assert_eq!(p(&[7, 3, 2]).eval(0.0), 7.0);
        assert_eq!(p(&[1, 1]).eval_exact(&rational(1, 3)), rational(4, 3));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[2, 1]).to_string(), "2 + q");
        assert_eq!(p(&[1, 0, -1]).to_string(), "1 - q^2");
        assert_eq!(p(&[0, -1]).to_string(), "-q");
        assert_eq!(QPolynomial::zero().to_string(), "0");
        assert_eq!(
            QPolynomial::from_coeffs(vec![rational(1, 2), rational(-3, 4)]).to_string(),
            "1/2 - 3/4*q"
        );
    }

    #[test]
    fn float_mode_rejects_degenerate_q() {
        assert!(ScalarMode::float(1.0).is_err());
        assert!(ScalarMode::float(-1.0).is_err());
        assert!(ScalarMode::float(0.99).is_ok());
        assert!(ScalarMode::float(f64::NAN).is_err());
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let a = p(&[1, -2, 1]);
        assert_eq!(a.pow(3), a.clone() * a.clone() * a);
        assert_eq!(QPolynomial::q().pow(5), QPolynomial::monomial(5));
        assert_eq!(0.5f64.pow(3), 0.125);
    }

    fn poly() -> impl Strategy<Value = QPolynomial> {
        prop::collection::vec((-20i64..20, 1i64..6), 0..6).prop_map(|cs| {
            QPolynomial::from_coeffs(cs.into_iter().map(|(n, d)| rational(n, d)).collect())
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in poly(), b in poly(), c in poly()) {
            prop_assert_eq!((&a * &b) * c.clone(), a.clone() * (&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn eval_is_multiplicative(a in poly(), b in poly(), x in -0.99f64..0.99) {
            let lhs = (&a * &b).eval(x);
            let rhs = a.eval(x) * b.eval(x);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
        }
    }
}
