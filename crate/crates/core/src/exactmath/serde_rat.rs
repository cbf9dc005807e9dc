//! Serde helpers encoding rationals as `"num/den"` strings.

use serde::de::Error;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rat, parse_rat, BigRat};

pub fn serialize<S: Serializer>(x: &BigRat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rat(x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRat, D::Error> {
    let s = String::deserialize(d)?;
    parse_rat(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
}

/// `[[shift, "weight"], ...]`.
pub mod shift_weights {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[(i64, BigRat)], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<(i64, String)> = v.iter().map(|(k, w)| (*k, format_rat(w))).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(i64, BigRat)>, D::Error> {
        Vec::<(i64, String)>::deserialize(d)?
            .into_iter()
            .map(|(k, w)| {
                parse_rat(&w)
                    .map(|w| (k, w))
                    .ok_or_else(|| D::Error::custom(format!("bad rational {w:?}")))
            })
            .collect()
    }
}

pub fn serialize_vec<S: Serializer>(v: &[BigRat], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rat))
}
