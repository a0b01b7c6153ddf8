//! JSON helpers: big integers are written as decimal strings and read from
//! either strings (decimal or `0x` hex, optionally signed) or JSON numbers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Num;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serializer};

/// Parse a decimal or `0x`-prefixed hexadecimal integer with optional sign.
pub fn parse_int(text: &str) -> Option<BigInt> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let value = match body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        Some(hex) => BigInt::from_str_radix(hex, 16).ok()?,
        None => BigInt::from_str_radix(body, 10).ok()?,
    };
    if body.is_empty() || body.starts_with(['-', '+']) {
        return None;
    }
    Some(if neg { -value } else { value })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

struct IntVisitor;

impl Visitor<'_> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal/hex integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        Ok(Int(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int(v.into()))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        parse_int(v)
            .map(Int)
            .ok_or_else(|| E::custom(format!("invalid integer string {v:?}")))
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor)
    }
}

pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    Int::deserialize(d).map(|i| i.0)
}
