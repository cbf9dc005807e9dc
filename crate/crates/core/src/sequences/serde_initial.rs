//! `{"-1": "-1", "0": "-1"}` encoding of initial values.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::de::Error;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(m: &BTreeMap<i64, BigInt>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, BigInt>, D::Error> {
    let raw = BTreeMap::<String, String>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            let k: i64 = k.trim().parse().map_err(D::Error::custom)?;
            let v: BigInt = v.trim().parse().map_err(D::Error::custom)?;
            Ok((k, v))
        })
        .collect()
}
