//! JSON expression evaluator shared by the CLI and the C ABI.
//!
//! An expression is an object with an `"op"` field:
//!
//! | op | fields | result |
//! |----|--------|--------|
//! | `dirac` | `i` | distribution |
//! | `normalize` | `dist` | distribution (validated, canonical) |
//! | `eps_N`, `min_support` | `dist`, optional `cap` | index |
//! | `ev` | `dist`, `set` | rational |
//! | `pushforward` | `dist`, `map` (sequence table of naturals) | distribution |
//! | `join` | `q` (`{"outer": [[dist, w], ...]}`) | distribution |
//! | `convex_combine` | `dist`, `family` (`{"0": dist, ...}`) | distribution |
//! | `affine_sum` | `space`, `dist`, `seq` | carrier element |
//! | `algebra` | `algebra`, `dist` (`[[point, w], ...]`) | carrier element |
//! | `l2_to_l1`, `amp_min_support` | `amp` | distribution / index |
//! | `amp_combine` | `amp`, `family`, `set` | rational |
//! | `phi_formula` | `i`, `n` | table |
//! | `iso` | `direction` (`"fwd"`/`"bwd"`), `x` | element |
//! | `j` | `x` | 0 or 1 |
//!
//! Sets are `"all"`, `{"finite": [..]}`, `{"cofinite": [..]}` or `{"below": n}`.

use serde_json::{json, Map, Value};

use crate::algebras::builtin_algebra;
use crate::amplitudes::{amp_combine, amp_min_support, l2_to_l1, AmpDist};
use crate::error::{Error, Result};
use crate::json::{dist_from_value, dist_over_dist_from_value, dist_to_value};
use crate::measure::{join, CountableDist, FinDist, IndexSet, DEFAULT_ENUMERATION_CAP};
use crate::rat::Rat;
use crate::scvx::{builtin_space, iso_delta2_interval, rinf_j_map, Carrier, IsoDirection, SeqMap};
use crate::stdspace::phi_formula;

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
}

fn nat(obj: &Map<String, Value>, name: &str) -> Result<u64> {
    field(obj, name)?.as_u64().ok_or_else(|| Error::Parse(format!("{name:?} must be a natural number")))
}

pub fn parse_set(v: &Value) -> Result<IndexSet> {
    let list = |v: &Value| -> Result<Vec<u64>> {
        v.as_array()
            .and_then(|a| a.iter().map(Value::as_u64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| Error::Parse(format!("expected a list of indices, got {v}")))
    };
    match v {
        Value::String(s) if s == "all" => Ok(IndexSet::all()),
        Value::Object(o) if o.len() == 1 => {
            let (k, v) = o.iter().next().expect("one entry");
            match k.as_str() {
                "finite" => Ok(IndexSet::finite(list(v)?)),
                "cofinite" => Ok(IndexSet::Cofinite(list(v)?.into_iter().collect())),
                "below" => Ok(IndexSet::below(v.as_u64().ok_or_else(|| Error::Parse("below needs n".into()))?)),
                _ => Err(Error::Parse(format!("unknown set shape {k:?}"))),
            }
        }
        _ => Err(Error::Parse(format!("unknown set {v}"))),
    }
}

/// `{"0": dist, "1": dist, ...}`.
pub fn parse_family(v: &Value) -> Result<Vec<(u64, CountableDist)>> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("family must be an object".into()))?;
    obj.iter()
        .map(|(k, d)| {
            let i = k.parse().map_err(|_| Error::Parse(format!("bad family index {k:?}")))?;
            Ok((i, dist_from_value(d)?))
        })
        .collect()
}

fn lookup(family: &[(u64, CountableDist)]) -> impl Fn(u64) -> Option<CountableDist> + '_ {
    move |j| family.iter().find(|(i, _)| *i == j).map(|(_, d)| d.clone())
}

/// Evaluates one expression document.
pub fn eval_value(v: &Value) -> Result<Value> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("expression must be an object".into()))?;
    let op = field(obj, "op")?.as_str().ok_or_else(|| Error::Parse("\"op\" must be a string".into()))?;
    let dist = || dist_from_value(field(obj, "dist")?);
    let amp = || AmpDist::from_json(field(obj, "amp")?);
    Ok(match op {
        "dirac" => dist_to_value(&CountableDist::dirac(nat(obj, "i")?)),
        "normalize" => dist_to_value(&dist()?),
        "eps_N" | "min_support" => {
            let cap = obj.get("cap").map(|_| nat(obj, "cap")).transpose()?.unwrap_or(DEFAULT_ENUMERATION_CAP);
            json!(dist()?.min_support(cap)?)
        }
        "ev" => json!(dist()?.ev(&parse_set(field(obj, "set")?)?)?.to_wire()),
        "pushforward" => {
            let map = SeqMap::from_json(&Carrier::Nat, field(obj, "map")?)?;
            dist_to_value(&dist()?.pushforward(|i| map.get(i).ok().and_then(|x| x.as_nat()))?)
        }
        "join" => dist_to_value(&join(&dist_over_dist_from_value(field(obj, "q")?)?)?),
        "convex_combine" => {
            let family = parse_family(field(obj, "family")?)?;
            dist_to_value(&dist()?.convex_combine(lookup(&family))?)
        }
        "affine_sum" => {
            let space = builtin_space(field(obj, "space")?.as_str().unwrap_or_default())?;
            let seq = SeqMap::from_json(&space.carrier(), field(obj, "seq")?)?;
            space.affine_sum(&dist()?, &seq)?.to_json()
        }
        "algebra" => {
            let alg = builtin_algebra(field(obj, "algebra")?.as_str().unwrap_or_default())?;
            let carrier = alg.space().carrier();
            let rows = field(obj, "dist")?.as_array().ok_or_else(|| Error::Parse("dist must be a list".into()))?;
            let mut pairs = Vec::with_capacity(rows.len());
            for row in rows {
                match row.as_array().map(Vec::as_slice) {
                    Some([x, Value::String(w)]) => pairs.push((carrier.parse_point(x)?, w.parse::<Rat>()?)),
                    _ => return Err(Error::Parse(format!("bad entry {row}"))),
                }
            }
            alg.apply(&FinDist::from_pairs(pairs)?)?.to_json()
        }
        "l2_to_l1" => dist_to_value(&l2_to_l1(&amp()?)),
        "amp_min_support" => json!(amp_min_support(&amp()?)),
        "amp_combine" => {
            let family = parse_family(field(obj, "family")?)?;
            json!(amp_combine(&amp()?, lookup(&family), &parse_set(field(obj, "set")?)?)?.to_wire())
        }
        "phi_formula" => json!(phi_formula(nat(obj, "i")?, nat(obj, "n")?)?),
        "iso" => {
            let (direction, carrier) = match field(obj, "direction")?.as_str() {
                Some("fwd") => (IsoDirection::SimplexToInterval, Carrier::Simplex(Some(2))),
                Some("bwd") => (IsoDirection::IntervalToSimplex, Carrier::UnitInterval),
                _ => return Err(Error::Parse("direction must be \"fwd\" or \"bwd\"".into())),
            };
            iso_delta2_interval(direction, &carrier.parse_point(field(obj, "x")?)?)?.to_json()
        }
        "j" => rinf_j_map(&Carrier::ExtReal.parse_point(field(obj, "x")?)?)?.to_json(),
        other => return Err(Error::Parse(format!("unknown op {other:?}"))),
    })
}

pub fn eval_str(s: &str) -> Result<Value> {
    eval_value(&serde_json::from_str(s)?)
}
