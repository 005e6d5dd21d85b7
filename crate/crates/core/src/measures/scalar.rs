use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{HyplabError, Result};

/// Coefficients with magnitude at or below this are treated as zero in float mode.
pub const FLOAT_ZERO: f64 = 1e-15;

/// Default relative tolerance for float comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A number tagged with its arithmetic mode.
///
/// Mixed arithmetic always degrades to `Float`; nothing ever converts back.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn big_int(n: BigInt) -> Self {
        Scalar::Exact(BigRational::from_integer(n))
    }

    /// `num/den` in lowest terms. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(v: f64) -> Self {
        Scalar::Float(v)
    }

    /// Parses `"3"`, `"-2/5"` exactly, or any float literal in float mode.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad_number(s))?;
            let d: BigInt = d.trim().parse().map_err(|_| bad_number(s))?;
            if d.is_zero() {
                return Err(HyplabError::InvalidParam(format!("zero denominator in {s:?}")));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Scalar::big_int(n));
        }
        let v: f64 = s.parse().map_err(|_| bad_number(s))?;
        if !v.is_finite() {
            return Err(bad_number(s));
        }
        Ok(Scalar::Float(v))
    }

    pub fn from_parts(num: &str, den: &str) -> Result<Self> {
        Scalar::parse(&format!("{num}/{den}"))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(v) => *v,
        }
    }

    /// Exact zero, or a float within [`FLOAT_ZERO`] of zero.
    pub fn is_negligible(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(v) => v.abs() <= FLOAT_ZERO,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(v) => *v > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(v) => *v < 0.0,
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_negligible() {
            return Err(HyplabError::Domain("reciprocal of zero".into()));
        }
        Ok(match self {
            Scalar::Exact(r) => Scalar::Exact(r.recip()),
            Scalar::Float(v) => Scalar::Float(1.0 / v),
        })
    }

    /// Integer power; exact inputs stay exact.
    pub fn powi(&self, e: i32) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(num_traits::pow::Pow::pow(r, e)),
            Scalar::Float(v) => Scalar::Float(v.powi(e)),
        }
    }

    /// Real power. Stays exact when the exponent is an integer.
    pub fn powf(&self, e: f64) -> Self {
        if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 && self.is_exact() {
            return self.powi(e as i32);
        }
        Scalar::Float(self.to_f64().powf(e))
    }

    pub fn sqrt_f64(&self) -> f64 {
        self.to_f64().sqrt()
    }

    pub fn max(self, other: Self) -> Self {
        if other.partial_cmp(&self) == Some(Ordering::Greater) {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other.partial_cmp(&self) == Some(Ordering::Less) {
            other
        } else {
            self
        }
    }

    /// `self > other`, exactly when both are exact, else with relative tolerance `tol`.
    pub fn exceeds(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a > b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                a - b > tol * a.abs().max(b.abs())
            }
        }
    }

    /// Equality, exact when both are exact, else relative tolerance `tol`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
            }
        }
    }

    /// Numerator and denominator strings; floats render through their exact binary value.
    pub fn num_den(&self) -> Option<(String, String)> {
        self.as_rational()
            .map(|r| (r.numer().to_string(), r.denom().to_string()))
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
        items.into_iter().fold(Scalar::zero(), |acc, x| &acc + x)
    }
}

fn bad_number(s: &str) -> HyplabError {
    HyplabError::InvalidParam(format!("not a number: {s:?}"))
}

/// Float value of a rational, robust to huge numerators and denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("exact", &self.is_exact())?;
        if let Some((n, d)) = self.num_den() {
            m.serialize_entry("num", &n)?;
            m.serialize_entry("den", &d)?;
        }
        m.serialize_entry("value", &self.to_f64())?;
        m.end()
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero; use [`Scalar::recip`] for a checked path.
    fn div(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_reduced() {
        let s = Scalar::ratio(6, -4);
        let r = s.as_rational().unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn mixed_arithmetic_degrades_to_float() {
        let a = Scalar::ratio(1, 2);
        let b = Scalar::float(0.25);
        assert_eq!(&a + &b, Scalar::Float(0.75));
        assert!((&a * &a).is_exact());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Scalar::parse("2/4").unwrap(), Scalar::ratio(1, 2));
        assert_eq!(Scalar::parse("7").unwrap(), Scalar::int(7));
        assert_eq!(Scalar::parse("0.5").unwrap(), Scalar::Float(0.5));
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("x").is_err());
    }

    #[test]
    fn comparisons() {
        assert!(Scalar::ratio(11, 3).exceeds(&Scalar::int(1), 0.0));
        assert!(!Scalar::ratio(11, 3).exceeds(&Scalar::int(4), 0.0));
        assert!(!Scalar::Float(1.0 + 1e-12).exceeds(&Scalar::int(1), 1e-9));
        assert!(Scalar::Float(1.0 + 1e-6).exceeds(&Scalar::int(1), 1e-9));
    }

    #[test]
    fn huge_rational_to_float() {
        let big = num_traits::pow::Pow::pow(BigInt::from(10), 400u32);
        let r = BigRational::new(big.clone() * BigInt::from(3), big);
        assert!((rational_to_f64(&r) - 3.0).abs() < 1e-12);
    }
}
