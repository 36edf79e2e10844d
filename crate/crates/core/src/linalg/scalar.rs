use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Coefficient field for matrices, functionals and brackets.
///
/// Implemented by [`Scalar`] (exact rationals) and [`SymScalar`](super::SymScalar)
/// (rational functions in the generic dual coordinates). Arithmetic is by
/// value; callers clone where they need to keep an operand.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_scalar(q: &Scalar) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseScalarError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

impl Scalar {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "rational with zero denominator");
        Scalar(BigRational::new(numer.into(), denom))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Scalar(BigRational::from_integer(n.into()))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Scalar(r)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Scalar {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Scalar {
        Scalar(self.0.recip())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        let mut acc = Scalar::one_value();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }

    fn one_value() -> Scalar {
        Scalar(BigRational::one())
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    fn one() -> Self {
        Scalar::one_value()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn from_scalar(q: &Scalar) -> Self {
        q.clone()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigInt> for Scalar {
    fn from(n: BigInt) -> Self {
        Scalar::from_integer(n)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.0.is_zero(), "division by zero rational");
        Scalar(self.0 / rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `"p"` or `"p/q"` with optional surrounding whitespace and sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        let invalid = || ParseScalarError::Invalid(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| invalid())?;
        let den: BigInt = den.parse().map_err(|_| invalid())?;
        if den.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(s.to_string()));
        }
        Ok(Scalar(BigRational::new(num, den)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma-separated list of rational literals, e.g. `"1,-1,1/2,0"`.
pub fn parse_scalar_list(s: &str) -> Result<Vec<Scalar>, ParseScalarError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_sign() {
        let q = Scalar::new(6, -4);
        assert_eq!(q.to_string(), "-3/2");
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(Scalar::new(4, 2).to_string(), "2");
    }

    #[test]
    fn parse_literals() {
        assert_eq!("1/2".parse::<Scalar>().unwrap(), Scalar::new(1, 2));
        assert_eq!(" -7 ".parse::<Scalar>().unwrap(), Scalar::from(-7));
        assert_eq!("3/-6".parse::<Scalar>().unwrap(), Scalar::new(-1, 2));
        assert!(matches!(
            "1/0".parse::<Scalar>(),
            Err(ParseScalarError::ZeroDenominator(_))
        ));
        assert!("x".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
    }

    #[test]
    fn list_parsing() {
        let v = parse_scalar_list("1,-1,1/2,0").unwrap();
        assert_eq!(
            v,
            vec![Scalar::from(1), Scalar::from(-1), Scalar::new(1, 2), Scalar::zero()]
        );
    }

    #[test]
    fn serde_as_string() {
        let json = serde_json::to_string(&Scalar::new(-3, 9)).unwrap();
        assert_eq!(json, "\"-1/3\"");
        let back: Scalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Scalar::new(-1, 3));
    }
}
