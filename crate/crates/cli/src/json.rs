//! Exact numbers in JSON and document parsing with JSON-pointer errors.
//!
//! Integers inside the 53-bit safe range are plain JSON numbers; larger ones
//! are decimal strings. Rationals are integers or `"p/q"` strings. Both
//! forms are accepted on input.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive};
use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use exoflop_core::arith::{Int, IntVector, Rat, RatVector};

const SAFE_BITS: u64 = 53;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct JInt(pub Int);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct JRat(pub Rat);

impl Serialize for JInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) if self.0.bits() <= SAFE_BITS => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = Int;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
        Ok(Int::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
        Ok(Int::from(v))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
        v.trim()
            .parse()
            .map_err(|_| E::custom(format!("`{v}` is not an integer")))
    }
}

impl<'de> Deserialize<'de> for JInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor).map(JInt)
    }
}

impl Serialize for JRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.denom().is_one() {
            JInt(self.0.numer().clone()).serialize(s)
        } else {
            s.serialize_str(&format!("{}/{}", self.0.numer(), self.0.denom()))
        }
    }
}

struct RatVisitor;

impl<'de> Visitor<'de> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a string `p/q`")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
        Ok(Rat::from_integer(Int::from(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
        Ok(Rat::from_integer(Int::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
        parse_rat(v).ok_or_else(|| E::custom(format!("`{v}` is not a rational number")))
    }
}

impl<'de> Deserialize<'de> for JRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(RatVisitor).map(JRat)
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: Int = q.trim().parse().ok()?;
            if q.is_positive() || q.is_negative() {
                Some(Rat::new(p.trim().parse().ok()?, q))
            } else {
                None
            }
        }
        None => Some(Rat::from_integer(s.parse().ok()?)),
    }
}

pub fn ints(v: &[JInt]) -> IntVector {
    v.iter().map(|x| x.0.clone()).collect()
}

pub fn rats(v: &[JRat]) -> RatVector {
    v.iter().map(|x| x.0.clone()).collect()
}

pub fn jints(v: &[Int]) -> Vec<JInt> {
    v.iter().cloned().map(JInt).collect()
}

pub fn jrats(v: &[Rat]) -> Vec<JRat> {
    v.iter().cloned().map(JRat).collect()
}

pub fn jint_rows(rows: &[IntVector]) -> Vec<Vec<JInt>> {
    rows.iter().map(|r| jints(r)).collect()
}

pub fn int_rows(rows: &[Vec<JInt>]) -> Vec<IntVector> {
    rows.iter().map(|r| ints(r)).collect()
}

/// A problem with an input document, located by a JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub pointer: String,
    pub message: String,
}

impl InputError {
    pub fn at(pointer: impl Into<String>, message: impl fmt::Display) -> InputError {
        InputError {
            pointer: pointer.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() {
            "/"
        } else {
            &self.pointer
        };
        write!(f, "{at}: {}", self.message)
    }
}

impl std::error::Error for InputError {}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// Parses `text`, reporting the location of the first failure.
pub fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T, InputError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let mut pointer = String::new();
        for seg in e.path().iter() {
            match seg {
                serde_path_to_error::Segment::Seq { index } => {
                    pointer.push_str(&format!("/{index}"))
                }
                serde_path_to_error::Segment::Map { key } => {
                    pointer.push_str(&format!("/{}", escape(key)))
                }
                serde_path_to_error::Segment::Enum { variant } => {
                    pointer.push_str(&format!("/{}", escape(variant)))
                }
                serde_path_to_error::Segment::Unknown => {}
            }
        }
        InputError::at(pointer, e.inner())
    })?;
    de.end().map_err(|e| InputError::at("", e))?;
    Ok(value)
}

pub fn read_document<T: DeserializeOwned>(path: &std::path::Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    parse_document(&text).map_err(|e| anyhow::Error::new(e).context(path.display().to_string()))
}
