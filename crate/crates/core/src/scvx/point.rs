//! Carrier elements, carriers and sequences into them.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::json;
use crate::measure::CountableDist;
use crate::rat::Rat;

/// The three points of the coequalizer space `{0̲, u̲, 1̲}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Coeq {
    Zero,
    U,
    One,
}

impl Coeq {
    pub const ALL: [Coeq; 3] = [Coeq::Zero, Coeq::U, Coeq::One];

    fn wire(self) -> &'static str {
        match self {
            Coeq::Zero => "0_",
            Coeq::U => "u_",
            Coeq::One => "1_",
        }
    }
}

/// An element of some built-in carrier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Point {
    Nat(u64),
    Rat(Rat),
    /// The adjoined point of the extended reals.
    Inf,
    Dist(CountableDist),
    Coeq(Coeq),
}

impl Point {
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Point::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Point::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_dist(&self) -> Option<&CountableDist> {
        match self {
            Point::Dist(d) => Some(d),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Point::Nat(n) => json!(n),
            Point::Rat(r) => json!(r.to_wire()),
            Point::Inf => json!("inf"),
            Point::Dist(d) => json::dist_to_value(d),
            Point::Coeq(c) => json!(c.wire()),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(n) => write!(f, "{n}"),
            Point::Rat(r) => write!(f, "{r}"),
            Point::Inf => write!(f, "inf"),
            Point::Dist(d) => write!(f, "{}", json::dist_to_value(d)),
            Point::Coeq(c) => write!(f, "{}", c.wire()),
        }
    }
}

/// Element universe of a space.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Carrier {
    /// ℕ.
    Nat,
    /// `{0, ..., k-1}`.
    Finite(u64),
    /// `[0,1] ∩ ℚ`.
    UnitInterval,
    /// `ℚ ∪ {∞}`.
    ExtReal,
    /// Measures on `{0..n-1}`, or on all of ℕ when `None`.
    Simplex(Option<u64>),
    Coeq3,
}

impl Carrier {
    pub fn contains(&self, x: &Point) -> bool {
        match (self, x) {
            (Carrier::Nat, Point::Nat(_)) => true,
            (Carrier::Finite(k), Point::Nat(n)) => n < k,
            (Carrier::UnitInterval, Point::Rat(r)) => r.in_unit_interval(),
            (Carrier::ExtReal, Point::Rat(_) | Point::Inf) => true,
            (Carrier::Simplex(None), Point::Dist(_)) => true,
            (Carrier::Simplex(Some(n)), Point::Dist(d)) => {
                d.is_finite() && d.support().all(|i| i < *n)
            }
            (Carrier::Coeq3, Point::Coeq(_)) => true,
            _ => false,
        }
    }

    pub fn check(&self, x: &Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfCarrier(x.to_string()))
        }
    }

    /// Reads a JSON value as an element of this carrier.
    pub fn parse_point(&self, v: &Value) -> Result<Point> {
        let p = match (self, v) {
            (Carrier::Nat | Carrier::Finite(_), Value::Number(n)) => Point::Nat(
                n.as_u64().ok_or_else(|| Error::Parse(format!("not a natural number: {n}")))?,
            ),
            (Carrier::ExtReal, Value::String(s)) if s == "inf" => Point::Inf,
            (Carrier::UnitInterval | Carrier::ExtReal, Value::String(s)) => Point::Rat(s.parse()?),
            (Carrier::UnitInterval | Carrier::ExtReal, Value::Number(n)) => Point::Rat(
                n.as_i64()
                    .map(Rat::from_int)
                    .ok_or_else(|| Error::Parse(format!("not an exact rational: {n}")))?,
            ),
            (Carrier::Simplex(_), Value::Object(_)) => Point::Dist(json::dist_from_value(v)?),
            (Carrier::Coeq3, Value::String(s)) => Point::Coeq(
                Coeq::ALL
                    .into_iter()
                    .find(|c| c.wire() == s)
                    .ok_or_else(|| Error::Parse(format!("not a coequalizer point: {s:?}")))?,
            ),
            _ => return Err(Error::Parse(format!("{v} is not a {self:?} element"))),
        };
        self.check(&p)?;
        Ok(p)
    }

    /// Representative elements used by the law harness.
    pub fn samples(&self) -> Vec<Point> {
        let r = |n, d| Point::Rat(Rat::new(n, d));
        match self {
            Carrier::Nat => (0..6).map(Point::Nat).collect(),
            Carrier::Finite(k) => (0..*k).map(Point::Nat).collect(),
            Carrier::UnitInterval => {
                vec![r(0, 1), r(1, 1), r(1, 2), r(1, 3), r(3, 4), r(1, 7)]
            }
            Carrier::ExtReal => vec![r(-2, 1), r(0, 1), r(1, 2), r(3, 1), Point::Inf],
            Carrier::Simplex(bound) => {
                let top = bound.unwrap_or(4).max(1);
                let mut out: Vec<Point> =
                    (0..top.min(3)).map(|i| Point::Dist(CountableDist::dirac(i))).collect();
                if top >= 2 {
                    out.push(Point::Dist(
                        CountableDist::from_weights([(0, Rat::new(1, 2)), (1, Rat::new(1, 2))])
                            .expect("valid"),
                    ));
                    out.push(Point::Dist(
                        CountableDist::from_weights([(0, Rat::new(1, 3)), (top - 1, Rat::new(2, 3))])
                            .expect("valid"),
                    ));
                }
                out
            }
            Carrier::Coeq3 => Coeq::ALL.into_iter().map(Point::Coeq).collect(),
        }
    }
}

/// Rule for the indices a [`SeqMap`] table does not list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DefaultRule {
    /// `i ↦ i`.
    Identity,
    /// `i ↦ δ_i`.
    Dirac,
    Constant(Point),
    /// `i ↦ scale · ratio^i`.
    Geometric { scale: Rat, ratio: Rat },
}

impl DefaultRule {
    pub fn at(&self, i: u64) -> Point {
        match self {
            DefaultRule::Identity => Point::Nat(i),
            DefaultRule::Dirac => Point::Dist(CountableDist::dirac(i)),
            DefaultRule::Constant(p) => p.clone(),
            DefaultRule::Geometric { scale, ratio } => {
                Point::Rat(scale * crate::measure::pow_u64(ratio, i))
            }
        }
    }

    fn to_json(&self) -> Value {
        match self {
            DefaultRule::Identity => json!("identity"),
            DefaultRule::Dirac => json!("dirac"),
            DefaultRule::Constant(p) => json!({ "const": p.to_json() }),
            DefaultRule::Geometric { scale, ratio } => {
                json!({ "geometric": { "scale": scale.to_wire(), "ratio": ratio.to_wire() } })
            }
        }
    }

    fn from_json(carrier: &Carrier, v: &Value) -> Result<Self> {
        match v {
            Value::String(s) if s == "identity" => Ok(DefaultRule::Identity),
            Value::String(s) if s == "dirac" => Ok(DefaultRule::Dirac),
            Value::Object(m) if m.len() == 1 && m.contains_key("const") => {
                Ok(DefaultRule::Constant(carrier.parse_point(&m["const"])?))
            }
            Value::Object(m) if m.len() == 1 && m.contains_key("geometric") => {
                let g = &m["geometric"];
                let field = |k: &str| -> Result<Rat> {
                    g.get(k)
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Parse(format!("geometric rule needs {k:?}")))?
                        .parse()
                };
                Ok(DefaultRule::Geometric { scale: field("scale")?, ratio: field("ratio")? })
            }
            _ => Err(Error::Parse(format!("unknown default rule {v}"))),
        }
    }
}

/// A sequence `ℕ → A`: an explicit table plus an optional rule for the rest.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SeqMap {
    table: BTreeMap<u64, Point>,
    default: Option<DefaultRule>,
}

impl SeqMap {
    pub fn new(table: BTreeMap<u64, Point>, default: Option<DefaultRule>) -> Self {
        SeqMap { table, default }
    }

    /// `a_i = values[i]`, undefined past the end.
    pub fn from_values(values: impl IntoIterator<Item = Point>) -> Self {
        SeqMap { table: values.into_iter().enumerate().map(|(i, p)| (i as u64, p)).collect(), default: None }
    }

    pub fn from_nats(values: &[u64]) -> Self {
        Self::from_values(values.iter().map(|&n| Point::Nat(n)))
    }

    pub fn identity() -> Self {
        SeqMap { table: BTreeMap::new(), default: Some(DefaultRule::Identity) }
    }

    pub fn dirac() -> Self {
        SeqMap { table: BTreeMap::new(), default: Some(DefaultRule::Dirac) }
    }

    pub fn constant(p: Point) -> Self {
        SeqMap { table: BTreeMap::new(), default: Some(DefaultRule::Constant(p)) }
    }

    pub fn rule(rule: DefaultRule) -> Self {
        SeqMap { table: BTreeMap::new(), default: Some(rule) }
    }

    pub fn with_default(mut self, rule: DefaultRule) -> Self {
        self.default = Some(rule);
        self
    }

    pub fn get(&self, i: u64) -> Result<Point> {
        if let Some(p) = self.table.get(&i) {
            return Ok(p.clone());
        }
        self.default.as_ref().map(|r| r.at(i)).ok_or(Error::PartialSequence(i))
    }

    pub fn default_rule(&self) -> Option<&DefaultRule> {
        self.default.as_ref()
    }

    /// One past the largest tabulated index.
    pub fn table_end(&self) -> u64 {
        self.table.keys().next_back().map_or(0, |k| k + 1)
    }

    /// Pointwise image `i ↦ f(a_i)` over the indices `0..n`.
    pub fn map_prefix(&self, n: u64, f: impl Fn(&Point) -> Result<Point>) -> Result<SeqMap> {
        let mut table = BTreeMap::new();
        for i in 0..n {
            table.insert(i, f(&self.get(i)?)?);
        }
        Ok(SeqMap { table, default: None })
    }

    /// `{"0": v, "1": v, "default": rule}`.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (i, p) in &self.table {
            m.insert(i.to_string(), p.to_json());
        }
        if let Some(r) = &self.default {
            m.insert("default".into(), r.to_json());
        }
        Value::Object(m)
    }

    pub fn from_json(carrier: &Carrier, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("sequence must be an object".into()))?;
        let mut seq = SeqMap::default();
        for (k, val) in obj {
            if k == "default" {
                seq.default = Some(DefaultRule::from_json(carrier, val)?);
            } else {
                let i: u64 = k.parse().map_err(|_| Error::Parse(format!("bad sequence key {k:?}")))?;
                seq.table.insert(i, carrier.parse_point(val)?);
            }
        }
        Ok(seq)
    }
}
