//! JSON set specifications.
//!
//! ```json
//! {"kind": "intervals", "intervals": [["1", "10"], ["20", "30"]]}
//! {"kind": "explicit", "elements": ["3", "8"]}
//! {"kind": "family", "name": "pow2-blocks", "params": {"delta": "2/5"}, "bound": "1048576"}
//! ```
//!
//! Integers are decimal strings; plain JSON integers are accepted too.

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::density::RExponent;
use crate::error::{Error, Result};
use crate::families::{Family, FamilyConfig, FamilySpec, UnitFraction};
use crate::set::IntegerSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetSpec {
    Literal(IntegerSet),
    Family(FamilySpec),
}

fn err(msg: impl Into<String>) -> Error {
    Error::SetSpec(msg.into())
}

/// A non-negative integer given as a decimal string or a JSON integer.
pub fn parse_biguint(v: &Value) -> Result<BigUint> {
    match v {
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| err(format!("{s:?} is not a non-negative decimal integer"))),
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| err(format!("{n} is not a non-negative integer"))),
        other => Err(err(format!("expected an integer, got {other}"))),
    }
}

fn param_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(err(format!("expected a parameter value, got {other}"))),
    }
}

fn parse_family(name: &str, params: &Map<String, Value>) -> Result<Family> {
    let allowed: &[&str] = match name {
        "factorial-blocks" | "squarefree" | "remark26-blocks" => &[],
        "squared-seq" => &["a1", "r", "s"],
        "pow2-blocks" => &["delta"],
        "sparse-blocks" => &["j"],
        "mth-power-blocks" => &["m", "delta"],
        _ => return Err(err(format!("unknown family {name:?}"))),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(err(format!("family {name} has no parameter {k:?}")));
    }
    let get = |key: &str| -> Result<String> {
        params
            .get(key)
            .ok_or_else(|| err(format!("family {name} needs parameter {key:?}")))
            .and_then(param_text)
    };
    let bad = |key: &str, e: Error| err(format!("parameter {key}: {e}"));
    Ok(match name {
        "factorial-blocks" => Family::FactorialBlocks,
        "squarefree" => Family::Squarefree,
        "remark26-blocks" => Family::Remark26Blocks,
        "squared-seq" => Family::SquaredSeq {
            a1: parse_biguint(&Value::String(get("a1")?))?,
            r: get("r")?.parse::<RExponent>().map_err(|e| bad("r", e))?,
            s: get("s")?.parse::<RExponent>().map_err(|e| bad("s", e))?,
        },
        "pow2-blocks" => Family::Pow2Blocks {
            delta: get("delta")?.parse::<UnitFraction>().map_err(|e| bad("delta", e))?,
        },
        "sparse-blocks" => Family::SparseBlocks {
            j: get("j")?.trim().parse().map_err(|_| err("parameter j must be an integer"))?,
        },
        "mth-power-blocks" => Family::MthPowerBlocks {
            m: get("m")?.trim().parse().map_err(|_| err("parameter m must be an integer"))?,
            delta: get("delta")?.parse::<UnitFraction>().map_err(|e| bad("delta", e))?,
        },
        _ => unreachable!(),
    })
}

impl SetSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| err("set spec must be a JSON object"))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| err("set spec needs a string field \"kind\""))?;
        match kind {
            "intervals" => {
                let list = obj
                    .get("intervals")
                    .and_then(Value::as_array)
                    .ok_or_else(|| err("\"intervals\" must be an array"))?;
                let pairs = list
                    .iter()
                    .map(|p| match p.as_array().map(Vec::as_slice) {
                        Some([lo, hi]) => Ok((parse_biguint(lo)?, parse_biguint(hi)?)),
                        _ => Err(err(format!("interval {p} must be a [lo, hi] pair"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SetSpec::Literal(IntegerSet::from_pairs(pairs)?))
            }
            "explicit" => {
                let list = obj
                    .get("elements")
                    .and_then(Value::as_array)
                    .ok_or_else(|| err("\"elements\" must be an array"))?;
                let elems = list.iter().map(parse_biguint).collect::<Result<Vec<_>>>()?;
                Ok(SetSpec::Literal(IntegerSet::from_elements(elems)?))
            }
            "family" => {
                let name = obj
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| err("family spec needs a string field \"name\""))?;
                let empty = Map::new();
                let params = match obj.get("params") {
                    None | Some(Value::Null) => &empty,
                    Some(Value::Object(m)) => m,
                    Some(_) => return Err(err("\"params\" must be an object")),
                };
                let bound = parse_biguint(obj.get("bound").ok_or_else(|| err("family spec needs \"bound\""))?)?;
                Ok(SetSpec::Family(FamilySpec::new(parse_family(name, params)?, bound)))
            }
            other => Err(err(format!("unknown set kind {other:?}"))),
        }
    }

    pub fn resolve(&self, cfg: &FamilyConfig) -> Result<IntegerSet> {
        match self {
            SetSpec::Literal(s) => Ok(s.clone()),
            SetSpec::Family(f) => f.generate(cfg),
        }
    }

    /// The family bound, if any; commands use it as their default horizon.
    pub fn bound(&self) -> Option<&BigUint> {
        match self {
            SetSpec::Family(f) => Some(&f.bound),
            SetSpec::Literal(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            SetSpec::Literal(s) => set_to_json(s),
            SetSpec::Family(f) => {
                let params: Map<String, Value> = f
                    .family
                    .params()
                    .into_iter()
                    .map(|(k, v)| (k.to_string(), Value::String(v)))
                    .collect();
                json!({
                    "kind": "family",
                    "name": f.family.name(),
                    "params": params,
                    "bound": f.bound.to_string(),
                })
            }
        }
    }
}

/// An interval-kind set spec for `set`, with its provenance if known.
pub fn set_to_json(set: &IntegerSet) -> Value {
    let intervals: Vec<Value> = set
        .intervals()
        .iter()
        .map(|iv| json!([iv.lo().to_string(), iv.hi().to_string()]))
        .collect();
    let mut obj = Map::new();
    obj.insert("kind".into(), json!("intervals"));
    obj.insert("intervals".into(), Value::Array(intervals));
    if let Some(p) = set.provenance() {
        obj.insert("provenance".into(), json!(p));
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<IntegerSet> {
        SetSpec::parse(text)?.resolve(&FamilyConfig::default())
    }

    #[test]
    fn literal_specs() {
        let s = resolve(r#"{"kind":"intervals","intervals":[["5","16"],["1","3"],[4,4]]}"#).unwrap();
        assert_eq!(s.to_u64_intervals().unwrap(), vec![(1, 16)]);
        let s = resolve(r#"{"kind":"explicit","elements":["3","8",9]}"#).unwrap();
        assert_eq!(s.to_u64_intervals().unwrap(), vec![(3, 3), (8, 9)]);
        let huge = "340282366920938463463374607431768211456";
        let s = resolve(&format!(r#"{{"kind":"intervals","intervals":[["1","{huge}"]]}}"#)).unwrap();
        assert_eq!(s.max().unwrap().to_string(), huge);
    }

    #[test]
    fn family_specs() {
        let s = resolve(r#"{"kind":"family","name":"pow2-blocks","params":{"delta":"2/5"},"bound":"2000"}"#).unwrap();
        assert!(s.member(&BigUint::from(1351u32)));
        assert!(!s.member(&BigUint::from(1352u32)));
        let s = resolve(r#"{"kind":"family","name":"squarefree","bound":"10"}"#).unwrap();
        assert_eq!(s.to_u64_intervals().unwrap(), vec![(1, 3), (5, 7), (10, 10)]);
        let s = resolve(r#"{"kind":"family","name":"squared-seq","params":{"a1":"2","r":"1/2","s":"1"},"bound":"100"}"#)
            .unwrap();
        assert_eq!(s.to_u64_intervals().unwrap(), vec![(4, 9), (16, 25)]);
        let s = resolve(r#"{"kind":"family","name":"mth-power-blocks","params":{"m":2,"delta":"1/5"},"bound":"200"}"#)
            .unwrap();
        assert!(s.member(&BigUint::from(104u32)));
        let s = resolve(r#"{"kind":"family","name":"sparse-blocks","params":{"j":"2"},"bound":"200"}"#).unwrap();
        assert_eq!(s.to_u64_intervals().unwrap(), vec![(2, 4), (65, 130)]);
    }

    #[test]
    fn round_trip() {
        for text in [
            r#"{"kind":"family","name":"pow2-blocks","params":{"delta":"2/5"},"bound":"18446744073709551616"}"#,
            r#"{"kind":"family","name":"factorial-blocks","bound":"1000"}"#,
            r#"{"kind":"intervals","intervals":[["2","4"],["9","9"]]}"#,
        ] {
            let spec = SetSpec::parse(text).unwrap();
            let again = SetSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(spec, again);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            "[]",
            "not json",
            r#"{"kind":"cloud"}"#,
            r#"{"kind":"intervals","intervals":[["0","3"]]}"#,
            r#"{"kind":"intervals","intervals":[["5","3"]]}"#,
            r#"{"kind":"intervals","intervals":[["-1","3"]]}"#,
            r#"{"kind":"intervals","intervals":[["1"]]}"#,
            r#"{"kind":"explicit","elements":[0]}"#,
            r#"{"kind":"family","name":"pow2-blocks","params":{"delta":"1"},"bound":"10"}"#,
            r#"{"kind":"family","name":"pow2-blocks","params":{},"bound":"10"}"#,
            r#"{"kind":"family","name":"pow2-blocks","params":{"delta":"1/2","x":"1"},"bound":"10"}"#,
            r#"{"kind":"family","name":"nope","bound":"10"}"#,
            r#"{"kind":"family","name":"squarefree"}"#,
        ] {
            assert!(resolve(text).is_err(), "{text}");
        }
    }
}
