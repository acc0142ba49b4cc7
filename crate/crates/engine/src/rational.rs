//! Exact rational numbers, the carrier for every plausibility value.
//!
//! All arithmetic in this crate is exact: values are kept in canonical
//! lowest terms with a positive denominator, so structural equality of two
//! `Rational`s coincides with mathematical equality. This is what makes
//! equivalence-classing of circumstances decidable without any tolerance
//! parameter.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number in canonical lowest terms.
///
/// Backed by an arbitrary-precision ratio; the canonical form (positive
/// denominator, gcd of numerator and denominator equal to one) is maintained
/// by every operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`. Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "rational denominator must be nonzero");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Builds `numer / denom` from big integers. Panics if `denom` is zero.
    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "rational denominator must be nonzero");
        Rational(BigRational::new(numer, denom))
    }

    pub fn from_integer(value: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Numerator in lowest terms; carries the sign.
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator in lowest terms; always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Reciprocal. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Renders the value in decimal with `sig` significant digits,
    /// rounding half away from zero. Display-only: the `p/q` form is the
    /// authoritative rendering.
    pub fn to_decimal(&self, sig: usize) -> String {
        assert!(sig > 0);
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let p = self.0.numer().magnitude().clone();
        let q = self.0.denom().magnitude().clone();

        // floor(log10(p/q)): estimate from digit counts, then correct.
        let e0 = p.to_string().len() as i64 - q.to_string().len() as i64;
        let e = {
            let (lhs, rhs) = if e0 >= 0 {
                (p.clone(), &q * pow10(e0 as u64))
            } else {
                (&p * pow10((-e0) as u64), q.clone())
            };
            if lhs >= rhs {
                e0
            } else {
                e0 - 1
            }
        };

        let mut e = e;
        let mut digits = Self::round_scaled(&p, &q, sig as i64 - 1 - e);
        if digits.to_string().len() > sig {
            // Rounding carried into an extra digit (e.g. 0.999… -> 1.00…).
            e += 1;
            digits = Self::round_scaled(&p, &q, sig as i64 - 1 - e);
        }
        let ds = digits.to_string();
        debug_assert_eq!(ds.len(), sig);

        let body = if e < 0 {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), ds)
        } else if (e + 1) as usize >= sig {
            format!("{}{}", ds, "0".repeat((e + 1) as usize - sig))
        } else {
            format!("{}.{}", &ds[..(e + 1) as usize], &ds[(e + 1) as usize..])
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    // round_half_up(p * 10^s / q), s may be negative.
    fn round_scaled(p: &BigUint, q: &BigUint, s: i64) -> BigUint {
        let (num, den) = if s >= 0 {
            (p * pow10(s as u64), q.clone())
        } else {
            (p.clone(), q * pow10((-s) as u64))
        };
        (num * 2u8 + &den) / (den * 2u8)
    }
}

fn pow10(exp: u64) -> BigUint {
    BigUint::from(10u8).pow(exp as u32)
}

impl fmt::Display for Rational {
    /// `p/q` in lowest terms; integers print without the denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Error from parsing a `p/q` literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal: {}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `INT` or `INT/POSINT`, e.g. `3`, `-1`, `1/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let numer = parse_int(num_str, true).ok_or_else(err)?;
        let denom = match den_str {
            Some(d) => {
                let d = parse_int(d, false).ok_or_else(err)?;
                if d.is_zero() || d.sign() == Sign::Minus {
                    return Err(err());
                }
                d
            }
            None => BigInt::one(),
        };
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

fn parse_int(s: &str, allow_sign: bool) -> Option<BigInt> {
    let body = if allow_sign {
        s.strip_prefix(['+', '-']).unwrap_or(s)
    } else {
        s
    };
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<BigInt>().ok()
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(self.0 / rhs.0)
    }
}

impl Div for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero rational");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}
