//! Exact rational helpers: rounding primitives, string forms, and serde
//! adapters.
//!
//! Rationals travel as `p/q` strings. Parsing also accepts plain integers and
//! finite decimals (`9.65`); [`format_rational`] prefers a decimal when the
//! expansion terminates and is meant for human-facing text only.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn int(n: u64) -> BigInt {
    BigInt::from(n)
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn floor(x: &BigRational) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn ceil(x: &BigRational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Nearest integer with halves rounded up: the unique `r` with
/// `x - 1/2 < r <= x + 1/2`.
pub fn round_nearest(x: &BigRational) -> BigInt {
    // floor(x + 1/2) = floor((2p + q) / 2q)
    let two = BigInt::from(2);
    (x.numer() * &two + x.denom()).div_floor(&(x.denom() * two))
}

pub fn fractional_part(x: &BigRational) -> BigRational {
    x - BigRational::from_integer(floor(x))
}

/// Narrows a seat count. Seat counts are bounded by the house size, so this
/// only fails on a broken invariant.
pub(crate) fn seats_of(x: &BigInt) -> u64 {
    x.to_u64()
        .unwrap_or_else(|| panic!("seat count {x} out of range"))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::ParseRational(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole = whole.trim_start_matches(['-', '+']);
        if !whole.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = BigRational::new(digits, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// `p/q`, or a bare integer when the denominator is one.
pub fn format_fraction(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Terminating decimal when one exists, `p/q` otherwise.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    let mut den = x.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format_fraction(x);
    }
    let places = twos.max(fives);
    let scaled = x * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (whole, frac) = digits.split_at(digits.len() - places);
    let mut out = String::new();
    if x.is_negative() {
        out.push('-');
    }
    let _ = write!(out, "{whole}.{frac}");
    out
}

/// Serde adapter for [`BigRational`] as a string.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_fraction(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of [`BigRational`] values.
pub mod serde_rational_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(super::format_fraction))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| super::parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for non-negative integers of any size: JSON numbers when
/// they fit in `u64`, decimal strings beyond that. Both forms are accepted.
pub mod serde_bigint_vec {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Wire {
        Small(u64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            match x.to_u64() {
                Some(n) => seq.serialize_element(&n)?,
                None => seq.serialize_element(&x.to_string())?,
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Wire>::deserialize(d)?
            .into_iter()
            .map(|w| match w {
                Wire::Small(n) => Ok(BigInt::from(n)),
                Wire::Text(t) => t.trim().parse().map_err(serde::de::Error::custom),
            })
            .collect()
    }
}
