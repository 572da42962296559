//! Exact number types shared by the whole crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Int = BigInt;
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal {0:?} (expected p/q or an integer)")]
pub struct ParseRationalError(pub String);

/// Parses `p/q`, `p`, or `-p/q`. The denominator must be positive.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if !den.is_positive() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_int(n: &Int) -> Rational {
    Rational::from_integer(n.clone())
}

pub fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

pub fn is_integral(q: &Rational) -> bool {
    q.is_integer()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Canonical text form: `p/q` in lowest terms, or just `p` for integers.
pub fn fmt_rational(q: &Rational) -> String {
    q.to_string()
}
