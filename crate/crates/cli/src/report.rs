//! Deterministic JSON reports.
//!
//! Object keys are sorted, integers that fit in 64 bits are numbers and larger
//! ones are decimal strings, rationals are `"n/d"` strings. Timings never enter
//! the canonical text or the content hash.

use std::collections::BTreeMap;

use ffstark_core::ffield::Extension;
use ffstark_core::grpring::{QG, ZG};
use ffstark_core::places::{FactoredFunction, Place};
use ffstark_core::{BigInt, BigRational};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn rat(x: &BigRational) -> Value {
    json!(format!("{}/{}", x.numer(), x.denom()))
}

pub fn zg(x: &ZG) -> Value {
    Value::Array(x.coeffs().iter().map(int).collect())
}

pub fn qg(x: &QG) -> Value {
    Value::Array(x.coeffs().iter().map(rat).collect())
}

pub fn int_rows(rows: &[Vec<BigInt>]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(int).collect())).collect())
}

pub fn rat_rows(rows: &[Vec<BigRational>]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(rat).collect())).collect())
}

/// A place of `K`: `"inf"` or its non-leading coefficients as coordinate vectors
/// over `F_p` in the power basis of the constant field of `K`.
pub fn place_k(ext: &Extension, w: &Place) -> Value {
    match w {
        Place::Infinite => json!("inf"),
        Place::Finite(f) => Value::Array(f[..f.len() - 1].iter().map(|&c| json!(ext.field.coords(c))).collect()),
    }
}

pub fn function_k(ext: &Extension, u: &FactoredFunction) -> Value {
    json!({
        "constant": ext.field.coords(u.constant),
        "factors": u.factors.iter().map(|(p, e)| json!([place_k(ext, p), e])).collect::<Vec<_>>(),
    })
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
pub struct Report {
    body: Map<String, Value>,
    passed: bool,
    pub timings: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(body: Map<String, Value>, passed: bool) -> Self {
        Report { body, passed, timings: BTreeMap::new() }
    }

    pub fn passed(&self) -> bool {
        self.passed
    }

    pub fn body(&self) -> &Map<String, Value> {
        &self.body
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.body.get(key)
    }

    /// SHA-256 of the canonical text without the hash field.
    pub fn content_hash(&self) -> String {
        sha256_hex(&serde_json::to_string(&Value::Object(self.body.clone())).expect("serializable"))
    }

    fn with_hash(&self) -> Map<String, Value> {
        let mut m = self.body.clone();
        m.insert("content_hash".into(), json!(self.content_hash()));
        m
    }

    /// The bit-exact report text used for golden files.
    pub fn canonical(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.with_hash())).expect("serializable");
        s.push('\n');
        s
    }

    /// Canonical content plus a `timings_ms` section.
    pub fn with_timings(&self) -> String {
        let mut m = self.with_hash();
        m.insert("timings_ms".into(), json!(self.timings));
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_rationals() {
        assert_eq!(int(&BigInt::from(-3)), json!(-3));
        let big = BigInt::from(1u8) << 80;
        assert_eq!(int(&big), json!(big.to_string()));
        assert_eq!(rat(&BigRational::new(BigInt::from(2), BigInt::from(4))), json!("1/2"));
        assert_eq!(rat(&BigRational::from_integer(BigInt::from(5))), json!("5/1"));
    }

    #[test]
    fn hash_ignores_timings() {
        let mut m = Map::new();
        m.insert("b".into(), json!(1));
        m.insert("a".into(), json!([1, 2]));
        let mut r = Report::new(m, true);
        let before = r.canonical();
        r.timings.insert("theta".into(), 1.5);
        assert_eq!(r.canonical(), before);
        assert!(r.with_timings().contains("timings_ms"));
        assert!(before.find("\"a\"").unwrap() < before.find("\"b\"").unwrap());
    }
}
