//! Super convex spaces: a carrier plus a structure map evaluating countable
//! affine sums `Σ p_i a_i`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::json::dist_to_value;
use crate::measure::{CountableDist, DEFAULT_ENUMERATION_CAP};
use crate::rat::Rat;
use crate::report::Verdict;

use super::point::{Carrier, Coeq, DefaultRule, Point, SeqMap};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeTag {
    Discrete,
    Geometric,
    Mixed,
}

pub type StructureFn = dyn Fn(&CountableDist, &SeqMap) -> Result<Point> + Send + Sync;

/// A carrier with its structure map and declared type.
#[derive(Clone)]
pub struct SpaceHandle {
    name: String,
    carrier: Carrier,
    tag: TypeTag,
    structure: Arc<StructureFn>,
}

impl fmt::Debug for SpaceHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceHandle")
            .field("name", &self.name)
            .field("carrier", &self.carrier)
            .field("tag", &self.tag)
            .finish_non_exhaustive()
    }
}

/// Names accepted by [`builtin_space`]; `k` is any positive integer.
pub const BUILTIN_SPACES: [&str; 9] = [
    "N_min",
    "n_min(k)",
    "two_min",
    "two_max",
    "delta_n(k)",
    "delta_N",
    "unit_interval",
    "r_inf",
    "coeq3",
];

impl SpaceHandle {
    /// A space with a caller-supplied structure map. Nothing is assumed
    /// about it; use the axiom checkers.
    pub fn custom(
        name: impl Into<String>,
        carrier: Carrier,
        tag: TypeTag,
        structure: impl Fn(&CountableDist, &SeqMap) -> Result<Point> + Send + Sync + 'static,
    ) -> Self {
        SpaceHandle { name: name.into(), carrier, tag, structure: Arc::new(structure) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn tag(&self) -> TypeTag {
        self.tag
    }

    /// `Σ p_i a_i` in this space.
    pub fn affine_sum(&self, p: &CountableDist, a: &SeqMap) -> Result<Point> {
        (self.structure)(p, a)
    }

    /// `(1-r)·x + r·y`.
    pub fn binary_sum(&self, r: &Rat, x: &Point, y: &Point) -> Result<Point> {
        let p = CountableDist::from_weights([(0, Rat::one() - r), (1, r.clone())])?;
        self.affine_sum(&p, &SeqMap::from_values([x.clone(), y.clone()]))
    }
}

/// Looks up a built-in space by name, e.g. `"n_min(3)"` or `"r_inf"`.
pub fn builtin_space(name: &str) -> Result<SpaceHandle> {
    let unknown = || Error::UnknownSpace(name.to_string());
    let param = |prefix: &str| -> Option<u64> {
        name.strip_prefix(prefix)?.strip_suffix(')')?.trim().parse().ok().filter(|k| *k > 0)
    };
    let h = |carrier, tag, f: Box<StructureFn>| SpaceHandle {
        name: name.to_string(),
        carrier,
        tag,
        structure: Arc::from(f),
    };
    Ok(match name {
        "N_min" => h(Carrier::Nat, TypeTag::Discrete, Box::new(|p, a| order_sum(Carrier::Nat, false, p, a))),
        "two_min" => h(Carrier::Finite(2), TypeTag::Discrete, Box::new(|p, a| order_sum(Carrier::Finite(2), false, p, a))),
        "two_max" => h(Carrier::Finite(2), TypeTag::Discrete, Box::new(|p, a| order_sum(Carrier::Finite(2), true, p, a))),
        "delta_N" => h(Carrier::Simplex(None), TypeTag::Geometric, Box::new(|p, a| simplex_sum(Carrier::Simplex(None), p, a))),
        "unit_interval" => h(Carrier::UnitInterval, TypeTag::Geometric, Box::new(|p, a| linear_sum(Carrier::UnitInterval, p, a))),
        "r_inf" => h(Carrier::ExtReal, TypeTag::Mixed, Box::new(|p, a| linear_sum(Carrier::ExtReal, p, a))),
        "coeq3" => h(Carrier::Coeq3, TypeTag::Discrete, Box::new(coeq_sum)),
        _ => {
            if let Some(k) = param("n_min(") {
                let c = Carrier::Finite(k);
                h(c, TypeTag::Discrete, Box::new(move |p, a| order_sum(c, false, p, a)))
            } else if let Some(k) = param("delta_n(") {
                let c = Carrier::Simplex(Some(k));
                h(c, TypeTag::Geometric, Box::new(move |p, a| simplex_sum(c, p, a)))
            } else {
                return Err(unknown());
            }
        }
    })
}

/// The built-in spaces with small parameters, as used by the law suites.
pub fn standard_spaces() -> Vec<SpaceHandle> {
    ["N_min", "n_min(3)", "two_min", "two_max", "delta_n(2)", "delta_n(3)", "delta_N", "unit_interval", "r_inf", "coeq3"]
        .into_iter()
        .map(|n| builtin_space(n).expect("builtin"))
        .collect()
}

/// Geometric remainder of a tail-backed sum: weights `first · ratio^k` at
/// indices `from + k`, values given by `rule`.
struct Rest {
    from: u64,
    first: Rat,
    ratio: Rat,
    rule: DefaultRule,
}

type Terms = (Vec<(Rat, Point)>, Option<Rest>);

/// Terms of `Σ p_i a_i` with positive weight: an explicit finite list and,
/// for tail-backed `p`, the remainder past every tabulated index of `a`.
fn terms(carrier: Carrier, p: &CountableDist, a: &SeqMap) -> Result<Terms> {
    let mut explicit = Vec::new();
    let mut push = |i: u64, w: Rat| -> Result<()> {
        let x = a.get(i)?;
        carrier.check(&x)?;
        explicit.push((w, x));
        Ok(())
    };
    for (i, w) in p.entries() {
        push(*i, w.clone())?;
    }
    let Some(tail) = p.tail() else {
        return Ok((explicit, None));
    };
    let from = tail.start().max(a.table_end());
    if from - tail.start() > DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded(DEFAULT_ENUMERATION_CAP));
    }
    for i in tail.start()..from {
        push(i, tail.weight_at(i))?;
    }
    let rule = a.default_rule().cloned().ok_or(Error::PartialSequence(from))?;
    let rest = Rest { from, first: tail.weight_at(from), ratio: tail.ratio().clone(), rule };
    Ok((explicit, Some(rest)))
}

/// Min (or max) of the values carrying positive weight: the structure of
/// `ℕ_min`, `𝕟` and both two-point spaces.
fn order_sum(carrier: Carrier, use_max: bool, p: &CountableDist, a: &SeqMap) -> Result<Point> {
    let (explicit, rest) = terms(carrier, p, a)?;
    let mut values: Vec<u64> = explicit.iter().filter_map(|(_, x)| x.as_nat()).collect();
    if let Some(rest) = rest {
        match &rest.rule {
            DefaultRule::Constant(c) => {
                carrier.check(c)?;
                values.extend(c.as_nat());
            }
            // Identity is increasing, so its least value on the remainder is at `from`.
            DefaultRule::Identity if carrier == Carrier::Nat && !use_max => values.push(rest.from),
            DefaultRule::Identity => {
                return Err(Error::OutOfCarrier(format!("unbounded identity tail from {}", rest.from)))
            }
            other => return Err(Error::OutOfCarrier(format!("{other:?} tail"))),
        }
    }
    let pick = if use_max { values.into_iter().max() } else { values.into_iter().min() };
    Ok(Point::Nat(pick.expect("positive mass somewhere")))
}

/// Weighted sum in `[0,1]` or in `ℚ ∪ {∞}`. In the extended reals a term
/// `∞` with positive weight, or a divergent remainder, gives `∞`.
fn linear_sum(carrier: Carrier, p: &CountableDist, a: &SeqMap) -> Result<Point> {
    let (explicit, rest) = terms(carrier, p, a)?;
    let mut acc = Rat::zero();
    for (w, x) in &explicit {
        match x {
            Point::Inf => return Ok(Point::Inf),
            Point::Rat(r) => acc = acc + w * r,
            _ => unreachable!("carrier checked"),
        }
    }
    if let Some(rest) = rest {
        let (scale, growth) = match &rest.rule {
            DefaultRule::Constant(Point::Inf) => return Ok(Point::Inf),
            DefaultRule::Constant(Point::Rat(c)) => (c.clone(), Rat::one()),
            DefaultRule::Geometric { scale, ratio } => (scale.clone(), ratio.clone()),
            other => return Err(Error::OutOfCarrier(format!("{other:?} tail"))),
        };
        // Remainder is Σ_k first·ρ^k · scale·g^(from+k).
        let lead = &scale * crate::measure::pow_u64(&growth, rest.from);
        let q = &rest.ratio * &growth;
        if carrier == Carrier::UnitInterval {
            let stays = lead.in_unit_interval() && !growth.is_negative() && growth <= Rat::one();
            if !stays {
                return Err(Error::OutOfCarrier(format!("tail {scale}·{growth}^i leaves [0,1]")));
            }
        }
        if lead.is_zero() {
            // all remaining terms vanish
        } else if q.abs() >= Rat::one() {
            return Ok(Point::Inf);
        } else {
            acc = acc + &rest.first * &lead / (Rat::one() - q);
        }
    }
    Ok(Point::Rat(acc))
}

/// Convex combination of measures.
fn simplex_sum(carrier: Carrier, p: &CountableDist, a: &SeqMap) -> Result<Point> {
    if !p.is_finite() {
        return Err(Error::TailUnsupported);
    }
    let mut family = Vec::new();
    for i in p.support() {
        let x = a.get(i)?;
        carrier.check(&x)?;
        family.push((i, x.as_dist().cloned().expect("carrier checked")));
    }
    let mixed = p.convex_combine(|j| family.iter().find(|(i, _)| *i == j).map(|(_, d)| d.clone()))?;
    Ok(Point::Dist(mixed))
}

/// A single value stays; any mixture of two or more distinct values is `u̲`.
fn coeq_sum(p: &CountableDist, a: &SeqMap) -> Result<Point> {
    let (explicit, rest) = terms(Carrier::Coeq3, p, a)?;
    let mut values: BTreeSet<Point> = explicit.into_iter().map(|(_, x)| x).collect();
    if let Some(rest) = rest {
        match rest.rule {
            DefaultRule::Constant(c) => {
                Carrier::Coeq3.check(&c)?;
                values.insert(c);
            }
            other => return Err(Error::OutOfCarrier(format!("{other:?} tail"))),
        }
    }
    Ok(if values.len() == 1 { values.pop_first().expect("nonempty") } else { Point::Coeq(Coeq::U) })
}

/// `Σ a dδ_j = a_j`.
pub fn check_axiom1(space: &SpaceHandle, a: &SeqMap, j: u64) -> Verdict {
    let lhs = space.affine_sum(&CountableDist::dirac(j), a);
    let rhs = a.get(j);
    Verdict::equal(&lhs, &rhs, "axiom 1: sum against a Dirac measure", || {
        json!({ "space": space.name(), "j": j, "lhs": show(&lhs), "rhs": show(&rhs) })
    })
}

/// `Σ_j p_j (Σ_i Q^j_i a_i) = Σ_i (Σ_j p_j Q^j_i) a_i`, the right-hand
/// measure formed with [`CountableDist::convex_combine`].
pub fn check_axiom2(
    space: &SpaceHandle,
    p: &CountableDist,
    family: impl Fn(u64) -> Option<CountableDist>,
    a: &SeqMap,
) -> Result<Verdict> {
    if !p.is_finite() {
        return Err(Error::TailUnsupported);
    }
    let mut inner = std::collections::BTreeMap::new();
    for j in p.support() {
        let q = family(j).ok_or(Error::PartialFamily(j))?;
        inner.insert(j, (q.clone(), space.affine_sum(&q, a)));
    }
    let mut table = std::collections::BTreeMap::new();
    for (j, (_, v)) in &inner {
        match v {
            Ok(x) => {
                table.insert(*j, x.clone());
            }
            Err(e) => {
                return Ok(Verdict::Fail(crate::report::Witness::new(
                    "axiom 2: inner sum failed",
                    json!({ "space": space.name(), "j": j, "error": e.to_string() }),
                )))
            }
        }
    }
    let lhs = space.affine_sum(p, &SeqMap::new(table, None));
    let mixed = p.convex_combine(|j| inner.get(&j).map(|(q, _)| q.clone()))?;
    let rhs = space.affine_sum(&mixed, a);
    Ok(Verdict::equal(&lhs, &rhs, "axiom 2: iterated sum differs from sum against the mixture", || {
        json!({
            "space": space.name(),
            "p": dist_to_value(p),
            "mixture": dist_to_value(&mixed),
            "lhs": show(&lhs),
            "rhs": show(&rhs),
        })
    }))
}

pub(crate) fn show(r: &Result<Point>) -> serde_json::Value {
    match r {
        Ok(p) => p.to_json(),
        Err(e) => json!({ "error": e.to_string() }),
    }
}
