//! String encodings used at every serialization boundary.
//!
//! Rationals are written as `"num/den"` (always both parts), integers as plain
//! decimal strings. Parsing also accepts a bare integer for a rational.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{de, Deserialize, Deserializer, Serializer};

use super::Rational;
use crate::{Error, Result};

pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::invalid(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("bad integer {s:?}")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Int(i64),
    Str(String),
}

/// `#[serde(with = "rational")]`
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Int(n) => Ok(Rational::from_integer(n.into())),
            NumOrStr::Str(s) => parse_rational(&s).map_err(de::Error::custom),
        }
    }
}

/// `#[serde(with = "bigint")]`
pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Int(n) => Ok(n.into()),
            NumOrStr::Str(s) => parse_bigint(&s).map_err(de::Error::custom),
        }
    }
}

/// `#[serde(with = "bigint_vec")]`
pub mod bigint_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
        Vec::<NumOrStr>::deserialize(d)?
            .into_iter()
            .map(|v| match v {
                NumOrStr::Int(n) => Ok(n.into()),
                NumOrStr::Str(s) => parse_bigint(&s).map_err(de::Error::custom),
            })
            .collect()
    }
}

/// Serializes a value to JSON with object keys in sorted order.
///
/// `serde_json::Value` maps are ordered maps, so a round-trip through `Value`
/// yields a canonical key order.
pub fn to_canonical_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    serde_json::to_string_pretty(&v)
}
