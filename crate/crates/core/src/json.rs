//! JSON wire format for measures.
//!
//! ```json
//! {"weights": [[2, "1/2"], [5, "1/2"]]}
//! {"weights": [[0, "1/2"]], "tail": {"kind": "geometric", "start": 1, "ratio": "1/2"}}
//! ```
//!
//! Rationals are always `"num/den"` strings. Output is canonical, so
//! serialize → parse → serialize is the identity.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measure::{CountableDist, DistOverDist};
use crate::rat::Rat;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistWire {
    weights: Vec<(u64, Rat)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailWire {
    kind: String,
    start: u64,
    ratio: Rat,
}

pub fn dist_to_value(d: &CountableDist) -> Value {
    let wire = DistWire {
        weights: d.entries().to_vec(),
        tail: d.tail().map(|t| TailWire {
            kind: "geometric".into(),
            start: t.start(),
            ratio: t.ratio().clone(),
        }),
    };
    serde_json::to_value(wire).expect("serializable")
}

pub fn dist_from_value(v: &Value) -> Result<CountableDist> {
    let wire: DistWire = serde_json::from_value(v.clone())?;
    match wire.tail {
        None => CountableDist::from_weights(wire.weights),
        Some(t) if t.kind == "geometric" => {
            CountableDist::with_geometric_tail(wire.weights, t.start, t.ratio)
        }
        Some(t) => Err(Error::Parse(format!("unknown tail kind {:?}", t.kind))),
    }
}

pub fn dist_to_string(d: &CountableDist) -> String {
    dist_to_value(d).to_string()
}

pub fn dist_from_str(s: &str) -> Result<CountableDist> {
    dist_from_value(&serde_json::from_str(s)?)
}

/// `{"outer": [[<dist>, "w"], ...]}`.
pub fn dist_over_dist_to_value(q: &DistOverDist) -> Value {
    let outer: Vec<Value> = q
        .entries()
        .iter()
        .map(|(d, w)| Value::Array(vec![dist_to_value(d), Value::String(w.to_wire())]))
        .collect();
    serde_json::json!({ "outer": outer })
}

pub fn dist_over_dist_from_value(v: &Value) -> Result<DistOverDist> {
    let outer = v
        .get("outer")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected {\"outer\": [...]}".into()))?;
    let mut pairs = Vec::with_capacity(outer.len());
    for entry in outer {
        match entry.as_array().map(Vec::as_slice) {
            Some([d, Value::String(w)]) => pairs.push((dist_from_value(d)?, w.parse()?)),
            _ => return Err(Error::Parse(format!("bad outer entry {entry}"))),
        }
    }
    DistOverDist::new(pairs)
}
