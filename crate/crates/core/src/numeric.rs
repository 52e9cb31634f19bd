//! Exact scalars: arbitrary-precision rationals and their extension by `+inf`.
//!
//! Rationals are `num_rational::BigRational`, which is always kept in canonical
//! form (positive denominator, coprime parts). The textual form is `a/b` or a
//! bare integer `a`; decimals are rejected rather than rounded.

use std::fmt;
use std::ops::Sub;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A value that is either finite or `+inf`.
///
/// The derived order places every `Finite` value below `Infinite`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

pub type ExtendedRational = Extended<Rational>;

impl<T> Extended<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl<T> From<Option<T>> for Extended<T> {
    fn from(v: Option<T>) -> Self {
        v.map_or(Extended::Infinite, Extended::Finite)
    }
}

impl<T: Clone + Zero> Extended<T>
where
    for<'a> &'a T: Sub<&'a T, Output = T>,
{
    /// `self - other` with `inf - inf = 0`; `finite - inf` is an error.
    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Ok(Extended::Finite(a - b)),
            (Extended::Infinite, Extended::Infinite) => Ok(Extended::Finite(T::zero())),
            (Extended::Infinite, Extended::Finite(_)) => Ok(Extended::Infinite),
            (Extended::Finite(_), Extended::Infinite) => Err(Error::FiniteMinusInfinity),
        }
    }
}

impl ExtendedRational {
    pub fn zero() -> Self {
        Extended::Finite(Rational::zero())
    }

    /// `|self - other|` under the bottleneck convention `inf - inf = 0`.
    pub fn abs_diff(&self, other: &Self) -> Self {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite((a - b).abs()),
            (Extended::Infinite, Extended::Infinite) => Self::zero(),
            _ => Extended::Infinite,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => v.fmt(f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_extended(s)
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_extended(&text).map_err(serde::de::Error::custom)
    }
}

/// Canonical rational `num/den`.
pub fn normalize(num: BigInt, den: BigInt) -> Result<Rational> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(num, den))
}

/// Shorthand for small literals, mostly in tests and examples.
pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(num.into(), den.into())
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(value.into())
}

fn parse_unsigned(digits: &str, whole: &str) -> Result<BigInt> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidNumber(whole.to_string()));
    }
    digits
        .parse::<BigInt>()
        .map_err(|_| Error::InvalidNumber(whole.to_string()))
}

/// Parses `a/b` (sign only on `a`) or a bare integer `a`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (negative, body) = match text.as_bytes().first() {
        Some(b'-') => (true, &text[1..]),
        Some(b'+') => (false, &text[1..]),
        _ => (false, text),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (parse_unsigned(n, text)?, parse_unsigned(d, text)?),
        None => (parse_unsigned(body, text)?, BigInt::from(1)),
    };
    let num = if negative { -num } else { num };
    normalize(num, den).map_err(|e| match e {
        Error::DivisionByZero => Error::DivisionByZero,
        _ => Error::InvalidNumber(text.to_string()),
    })
}

/// Like [`parse_rational`], additionally accepting `inf`.
pub fn parse_extended(text: &str) -> Result<ExtendedRational> {
    match text.trim() {
        "inf" | "+inf" => Ok(Extended::Infinite),
        other => parse_rational(other).map(Extended::Finite),
    }
}

/// Lossy conversion for human-facing output only.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_reduces_and_fixes_sign() {
        let r = normalize(2.into(), 4.into()).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (1.into(), 2.into()));
        let r = normalize((-3).into(), (-6).into()).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (1.into(), 2.into()));
        let r = normalize(0.into(), 7.into()).unwrap();
        assert_eq!((r.numer().clone(), r.denom().clone()), (0.into(), 1.into()));
        assert_eq!(normalize(1.into(), 0.into()), Err(Error::DivisionByZero));
    }

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("+2/3").unwrap(), ratio(2, 3));
        assert_eq!(parse_extended("inf").unwrap(), Extended::Infinite);
    }

    #[test]
    fn parse_rejects_decimals_and_bad_signs() {
        for bad in ["0.5", "1e3", "1/-2", "", "/2", "1/", "--1", "abc", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad} should be rejected");
        }
        assert_eq!(parse_rational("1/0"), Err(Error::DivisionByZero));
    }

    #[test]
    fn infinity_conventions() {
        let inf = ExtendedRational::Infinite;
        let one = Extended::Finite(int(1));
        assert!(inf > one);
        assert_eq!(inf.checked_sub(&inf).unwrap(), ExtendedRational::zero());
        assert_eq!(inf.checked_sub(&one).unwrap(), inf);
        assert_eq!(one.checked_sub(&inf), Err(Error::FiniteMinusInfinity));
        assert_eq!(inf.abs_diff(&inf), ExtendedRational::zero());
        assert_eq!(one.abs_diff(&inf), inf);
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(ratio(4, 2).to_string(), "2");
        assert_eq!(ratio(-1, 2).to_string(), "-1/2");
        assert_eq!(ExtendedRational::Infinite.to_string(), "inf");
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..200).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            let sign = (&a - &b).signum();
            let expected = if sign.is_positive() {
                std::cmp::Ordering::Greater
            } else if sign.is_negative() {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Equal
            };
            prop_assert_eq!(a.cmp(&b), expected);
        }

        #[test]
        fn text_round_trip(a in arb_rational(), infinite in any::<bool>()) {
            let value = if infinite { Extended::Infinite } else { Extended::Finite(a) };
            prop_assert_eq!(parse_extended(&value.to_string()).unwrap(), value);
        }
    }
}
