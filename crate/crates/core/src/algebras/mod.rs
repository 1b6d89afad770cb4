//! Barycenter maps `G(A) → A` for the built-in spaces.
//!
//! Each algebra acts on finitely supported distributions over its carrier.
//! The typed functions (`eps_nat`, `eps_two_min`, ...) are the same maps on
//! their natural input types.

pub mod laws;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{join, CountableDist, DistOverDist, FinDist, DEFAULT_ENUMERATION_CAP};
use crate::rat::Rat;
use crate::scvx::{builtin_space, Carrier, Coeq, Point, SpaceHandle};

pub use laws::*;

pub type ActionFn = dyn Fn(&FinDist<Point>) -> Result<Point> + Send + Sync;

/// A barycenter map packaged with its space and the carrier points the law
/// suites sample.
#[derive(Clone)]
pub struct AlgebraHandle {
    name: String,
    space: SpaceHandle,
    action: Arc<ActionFn>,
    samples: Vec<Point>,
}

impl fmt::Debug for AlgebraHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraHandle({} on {})", self.name, self.space.name())
    }
}

impl AlgebraHandle {
    pub fn custom(
        name: impl Into<String>,
        space: SpaceHandle,
        samples: Vec<Point>,
        action: impl Fn(&FinDist<Point>) -> Result<Point> + Send + Sync + 'static,
    ) -> Self {
        AlgebraHandle { name: name.into(), space, action: Arc::new(action), samples }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &SpaceHandle {
        &self.space
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn apply(&self, p: &FinDist<Point>) -> Result<Point> {
        let carrier = self.space.carrier();
        for x in p.support() {
            carrier.check(x)?;
        }
        (self.action)(p)
    }
}

/// Names accepted by [`builtin_algebra`].
pub const BUILTIN_ALGEBRAS: [&str; 8] =
    ["eps_N", "eps_n(k)", "eps_two_min", "eps_two_max", "eps_interval", "eps_rinf", "eps_coeq3", "eps_free"];

/// The algebras exercised by the default law suite.
pub fn standard_algebras() -> Vec<AlgebraHandle> {
    ["eps_N", "eps_n(3)", "eps_two_min", "eps_two_max", "eps_interval", "eps_rinf", "eps_coeq3", "eps_free"]
        .into_iter()
        .map(|n| builtin_algebra(n).expect("builtin"))
        .collect()
}

fn nats(p: &FinDist<Point>) -> impl Iterator<Item = u64> + '_ {
    p.support().filter_map(Point::as_nat)
}

pub fn builtin_algebra(name: &str) -> Result<AlgebraHandle> {
    let space = |s: &str| builtin_space(s).expect("builtin");
    let alg = |space: SpaceHandle, action: Box<ActionFn>| {
        let samples = space.carrier().samples();
        AlgebraHandle { name: name.to_string(), space, action: Arc::from(action), samples }
    };
    let min_nat = |p: &FinDist<Point>| Ok(Point::Nat(nats(p).min().expect("nonempty")));
    Ok(match name {
        "eps_N" => {
            let mut a = alg(space("N_min"), Box::new(min_nat));
            a.samples = (0..=20).map(Point::Nat).collect();
            a
        }
        "eps_two_min" => alg(space("two_min"), Box::new(|p| Ok(Point::Nat(eps_two_min(&to_nat_dist(p))?)))),
        "eps_two_max" => alg(space("two_max"), Box::new(|p| Ok(Point::Nat(eps_two_max(&to_nat_dist(p))?)))),
        "eps_interval" => alg(
            space("unit_interval"),
            Box::new(|p| {
                let q = p.try_map(|x| x.as_rat().cloned().ok_or_else(|| Error::OutOfCarrier(x.to_string())))?;
                Ok(Point::Rat(eps_interval(&q)?))
            }),
        ),
        "eps_rinf" => alg(space("r_inf"), Box::new(eps_rinf)),
        "eps_coeq3" => alg(
            space("coeq3"),
            Box::new(|p| {
                let q = p.try_map(|x| match x {
                    Point::Coeq(c) => Ok(*c),
                    _ => Err(Error::OutOfCarrier(x.to_string())),
                })?;
                Ok(Point::Coeq(eps_coeq3(&q)))
            }),
        ),
        "eps_free" => alg(
            space("delta_N"),
            Box::new(|p| {
                let q = p.try_map(|x| x.as_dist().cloned().ok_or_else(|| Error::OutOfCarrier(x.to_string())))?;
                Ok(Point::Dist(join(&DistOverDist::new(q.iter().map(|(d, w)| (d.clone(), w.clone())))?)?))
            }),
        ),
        _ => {
            let k = name
                .strip_prefix("eps_n(")
                .and_then(|s| s.strip_suffix(')'))
                .and_then(|s| s.trim().parse::<u64>().ok())
                .filter(|k| *k > 0)
                .ok_or_else(|| Error::UnknownAlgebra(name.to_string()))?;
            alg(space(&format!("n_min({k})")), Box::new(move |p| Ok(Point::Nat(eps_n(k, &to_nat_dist(p))?))))
        }
    })
}

fn to_nat_dist(p: &FinDist<Point>) -> FinDist<u64> {
    // Carrier membership is checked by `AlgebraHandle::apply`.
    p.map(|x| x.as_nat().expect("natural carrier"))
}

/// `ε_ℕ(p) = min {i | p_i > 0}`.
pub fn eps_nat(p: &CountableDist) -> Result<u64> {
    eps_nat_with_cap(p, DEFAULT_ENUMERATION_CAP)
}

pub fn eps_nat_with_cap(p: &CountableDist, cap: u64) -> Result<u64> {
    p.min_support(cap)
}

/// `ε_𝕟` on `{0..k-1}`.
pub fn eps_n(k: u64, p: &FinDist<u64>) -> Result<u64> {
    if let Some(bad) = p.support().find(|i| **i >= k) {
        return Err(Error::OutOfCarrier(format!("{bad} is not below {k}")));
    }
    Ok(*p.support().next().expect("nonempty"))
}

fn check_two(p: &FinDist<u64>) -> Result<()> {
    match p.support().find(|i| **i > 1) {
        Some(bad) => Err(Error::OutOfCarrier(format!("{bad} is not in {{0,1}}"))),
        None => Ok(()),
    }
}

/// `(1-r)δ₀ + rδ₁ ↦ 1` iff `r = 1`.
pub fn eps_two_min(p: &FinDist<u64>) -> Result<u64> {
    check_two(p)?;
    Ok(u64::from(p.weight(&1).is_one()))
}

/// `(1-r)δ₀ + rδ₁ ↦ 1` iff `r > 0`.
pub fn eps_two_max(p: &FinDist<u64>) -> Result<u64> {
    check_two(p)?;
    Ok(u64::from(p.weight(&1).is_positive()))
}

/// Expectation on `[0,1]`.
pub fn eps_interval(p: &FinDist<Rat>) -> Result<Rat> {
    if let Some(bad) = p.support().find(|x| !x.in_unit_interval()) {
        return Err(Error::OutOfCarrier(bad.to_string()));
    }
    Ok(p.iter().map(|(x, w)| x * w).sum())
}

/// Expectation on `ℚ ∪ {∞}`; `∞` with positive weight absorbs.
pub fn eps_rinf(p: &FinDist<Point>) -> Result<Point> {
    let mut acc = Rat::zero();
    let mut infinite = false;
    for (x, w) in p.iter() {
        match x {
            Point::Inf => infinite = true,
            Point::Rat(r) => acc = acc + r * w,
            other => return Err(Error::OutOfCarrier(other.to_string())),
        }
    }
    Ok(if infinite { Point::Inf } else { Point::Rat(acc) })
}

/// Barycenter of the three-point coequalizer space: a single point stays,
/// anything spread over two or more points lands on `u̲`.
pub fn eps_coeq3(p: &FinDist<Coeq>) -> Coeq {
    let mut support = p.support();
    match (support.next(), support.next()) {
        (Some(c), None) => *c,
        _ => Coeq::U,
    }
}

/// `(1-r)·0̲ + r·1̲`: `0̲` iff `r = 0`, `1̲` iff `r = 1`, else `u̲`.
pub fn eps_coeq3_binary(r: &Rat) -> Result<Coeq> {
    if !r.in_unit_interval() {
        return Err(Error::OutOfCarrier(r.to_string()));
    }
    let pairs = [(Coeq::Zero, Rat::one() - r), (Coeq::One, r.clone())];
    Ok(eps_coeq3(&FinDist::from_pairs(pairs)?))
}

/// The free algebra is the monad multiplication.
pub fn eps_free(q: &DistOverDist) -> Result<CountableDist> {
    join(q)
}

/// `Carrier` of an algebra, for callers that only hold the name.
pub fn algebra_carrier(name: &str) -> Result<Carrier> {
    Ok(builtin_algebra(name)?.space().carrier())
}
