//! Probability measures on the natural numbers and the Giry monad on them.
//!
//! [`CountableDist`] is a measure on ℕ in canonical form: a strictly
//! increasing list of `(index, weight)` pairs with positive exact weights,
//! optionally followed by a geometric tail carrying the remaining mass. Two
//! canonical values are equal exactly when they denote the same measure, so
//! every law in the crate is checked with `==`.
//!
//! [`FinDist`] is the finitely supported measure over an arbitrary ordered
//! carrier; it is what the barycenter algebras consume.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Default number of indices [`CountableDist::min_support`] may scan.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Geometric continuation of a measure: weights `first * ratio^(i - start)`
/// for every `i >= start`. `first` is fixed by the mass the prefix leaves.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GeometricTail {
    start: u64,
    ratio: Rat,
    first: Rat,
}

impl GeometricTail {
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn ratio(&self) -> &Rat {
        &self.ratio
    }

    /// Weight at `start`.
    pub fn first(&self) -> &Rat {
        &self.first
    }

    pub fn weight_at(&self, i: u64) -> Rat {
        if i < self.start {
            return Rat::zero();
        }
        &self.first * pow_u64(&self.ratio, i - self.start)
    }

    /// Mass carried by indices `>= from`.
    pub fn mass_from(&self, from: u64) -> Rat {
        let from = from.max(self.start);
        self.weight_at(from) / (Rat::one() - &self.ratio)
    }
}

pub(crate) fn pow_u64(base: &Rat, exp: u64) -> Rat {
    let mut acc = Rat::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// A probability measure on ℕ.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CountableDist {
    weights: Vec<(u64, Rat)>,
    tail: Option<GeometricTail>,
}

/// Subsets of ℕ that [`CountableDist::ev`] understands.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IndexSet {
    Finite(BTreeSet<u64>),
    /// Everything except the listed indices.
    Cofinite(BTreeSet<u64>),
    /// `{ i | i mod modulus ∈ residues }`.
    Periodic { modulus: u64, residues: BTreeSet<u64> },
}

impl IndexSet {
    pub fn all() -> Self {
        IndexSet::Cofinite(BTreeSet::new())
    }

    /// `{0, 1, ..., n-1}`.
    pub fn below(n: u64) -> Self {
        IndexSet::Finite((0..n).collect())
    }

    pub fn finite(items: impl IntoIterator<Item = u64>) -> Self {
        IndexSet::Finite(items.into_iter().collect())
    }

    pub fn contains(&self, i: u64) -> bool {
        match self {
            IndexSet::Finite(s) => s.contains(&i),
            IndexSet::Cofinite(s) => !s.contains(&i),
            IndexSet::Periodic { modulus, residues } => {
                *modulus > 0 && residues.contains(&(i % modulus))
            }
        }
    }
}

fn validate_prefix(pairs: impl IntoIterator<Item = (u64, Rat)>) -> Result<Vec<(u64, Rat)>> {
    let mut seen = BTreeMap::new();
    for (i, w) in pairs {
        if w.is_negative() {
            return Err(Error::NegativeWeight { index: i, weight: w });
        }
        if seen.insert(i, w).is_some() {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(seen.into_iter().filter(|(_, w)| !w.is_zero()).collect())
}

impl CountableDist {
    pub fn dirac(i: u64) -> Self {
        CountableDist { weights: vec![(i, Rat::one())], tail: None }
    }

    /// Builds a finitely supported measure. Zero weights are dropped and the
    /// entries sorted; the total must be exactly one.
    pub fn from_weights(pairs: impl IntoIterator<Item = (u64, Rat)>) -> Result<Self> {
        let weights = validate_prefix(pairs)?;
        let mass: Rat = weights.iter().map(|(_, w)| w).sum();
        if !mass.is_one() {
            return Err(Error::MassNotOne(mass));
        }
        Ok(CountableDist { weights, tail: None })
    }

    /// Finite prefix plus a geometric tail from `start` with common ratio
    /// `ratio ∈ (0,1)`. The tail carries exactly the mass the prefix leaves.
    pub fn with_geometric_tail(
        prefix: impl IntoIterator<Item = (u64, Rat)>,
        start: u64,
        ratio: Rat,
    ) -> Result<Self> {
        let weights = validate_prefix(prefix)?;
        if !ratio.is_positive() || ratio >= Rat::one() {
            return Err(Error::InvalidTail(format!("ratio {ratio} not in (0,1)")));
        }
        if let Some((last, _)) = weights.last() {
            if *last >= start {
                return Err(Error::InvalidTail(format!(
                    "tail start {start} does not follow prefix index {last}"
                )));
            }
        }
        let mass: Rat = weights.iter().map(|(_, w)| w).sum();
        if mass >= Rat::one() {
            return Err(Error::MassNotOne(mass));
        }
        let first = (Rat::one() - mass) * (Rat::one() - &ratio);
        Ok(CountableDist { weights, tail: Some(GeometricTail { start, ratio, first }) })
    }

    /// The explicit `(index, weight)` entries, strictly increasing.
    pub fn entries(&self) -> &[(u64, Rat)] {
        &self.weights
    }

    pub fn tail(&self) -> Option<&GeometricTail> {
        self.tail.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    pub fn weight(&self, i: u64) -> Rat {
        if let Ok(pos) = self.weights.binary_search_by_key(&i, |(j, _)| *j) {
            return self.weights[pos].1.clone();
        }
        self.tail.as_ref().map_or_else(Rat::zero, |t| t.weight_at(i))
    }

    /// Support indices of a finite measure.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.weights.iter().map(|(i, _)| *i)
    }

    /// Certified bound on the mass strictly beyond index `n`.
    pub fn mass_beyond(&self, n: u64) -> Rat {
        let explicit: Rat = self.weights.iter().filter(|(i, _)| *i > n).map(|(_, w)| w).sum();
        let tail = self.tail.as_ref().map_or_else(Rat::zero, |t| t.mass_from(n + 1));
        explicit + tail
    }

    /// `Σ_{i ∈ W} p_i`.
    pub fn ev(&self, set: &IndexSet) -> Result<Rat> {
        let explicit = || -> Rat {
            self.weights.iter().filter(|(i, _)| set.contains(*i)).map(|(_, w)| w).sum()
        };
        let Some(tail) = &self.tail else {
            return Ok(explicit());
        };
        match set {
            IndexSet::Finite(s) => {
                Ok(explicit() + s.iter().map(|i| tail.weight_at(*i)).sum::<Rat>())
            }
            IndexSet::Cofinite(s) => {
                Ok(Rat::one() - self.ev(&IndexSet::Finite(s.clone()))?)
            }
            IndexSet::Periodic { .. } => Err(Error::UnsupportedSetShape),
        }
    }

    /// Least index with positive weight.
    pub fn min_support(&self, cap: u64) -> Result<u64> {
        if let Some((i, _)) = self.weights.first() {
            return Ok(*i);
        }
        match &self.tail {
            // Tail weights are positive from `start` on, so scanning stops there.
            Some(t) if t.start < cap => Ok(t.start),
            Some(_) => Err(Error::EnumerationCapExceeded(cap)),
            None => unreachable!("canonical measure has nonempty support"),
        }
    }

    /// Image measure along `f`; colliding indices have their weights summed.
    pub fn pushforward(&self, f: impl Fn(u64) -> Option<u64>) -> Result<Self> {
        if self.tail.is_some() {
            return Err(Error::TailUnsupported);
        }
        let mut acc: BTreeMap<u64, Rat> = BTreeMap::new();
        for (i, w) in &self.weights {
            let j = f(*i).ok_or(Error::PartialMap(*i))?;
            let slot = acc.entry(j).or_insert_with(Rat::zero);
            *slot = &*slot + w;
        }
        Ok(CountableDist { weights: acc.into_iter().collect(), tail: None })
    }

    /// `Σ_j p_j · family(j)`.
    pub fn convex_combine(&self, family: impl Fn(u64) -> Option<CountableDist>) -> Result<Self> {
        if self.tail.is_some() {
            return Err(Error::TailUnsupported);
        }
        let mut outer = Vec::with_capacity(self.weights.len());
        for (j, w) in &self.weights {
            let q = family(*j).ok_or(Error::PartialFamily(*j))?;
            outer.push((q, w.clone()));
        }
        join(&DistOverDist::new(outer)?)
    }

    pub fn to_fin(&self) -> Result<FinDist<u64>> {
        if self.tail.is_some() {
            return Err(Error::TailUnsupported);
        }
        Ok(FinDist { weights: self.weights.iter().cloned().collect() })
    }

    pub fn from_fin(d: &FinDist<u64>) -> Self {
        CountableDist {
            weights: d.weights.iter().map(|(i, w)| (*i, w.clone())).collect(),
            tail: None,
        }
    }
}

/// A finitely supported measure over measures on ℕ, as a list of
/// `(measure, weight)` pairs. Repeated measures are allowed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistOverDist {
    outer: Vec<(CountableDist, Rat)>,
}

impl DistOverDist {
    pub fn new(pairs: impl IntoIterator<Item = (CountableDist, Rat)>) -> Result<Self> {
        let mut outer = Vec::new();
        let mut mass = Rat::zero();
        for (k, (d, w)) in pairs.into_iter().enumerate() {
            if w.is_negative() {
                return Err(Error::NegativeWeight { index: k as u64, weight: w });
            }
            if w.is_zero() {
                continue;
            }
            mass = mass + &w;
            outer.push((d, w));
        }
        if !mass.is_one() {
            return Err(Error::MassNotOne(mass));
        }
        Ok(DistOverDist { outer })
    }

    pub fn entries(&self) -> &[(CountableDist, Rat)] {
        &self.outer
    }

    /// The same measure as a [`FinDist`] keyed by canonical inner measures.
    pub fn to_fin(&self) -> FinDist<CountableDist> {
        FinDist::from_pairs_unchecked(self.outer.iter().cloned())
    }
}

/// Monad multiplication: `k ↦ Σ_j outer_j · (inner_j)_k`.
pub fn join(q: &DistOverDist) -> Result<CountableDist> {
    let mut acc: BTreeMap<u64, Rat> = BTreeMap::new();
    for (inner, w) in &q.outer {
        if inner.tail.is_some() {
            return Err(Error::TailUnsupported);
        }
        for (k, v) in &inner.weights {
            let slot = acc.entry(*k).or_insert_with(Rat::zero);
            *slot = &*slot + &(w * v);
        }
    }
    Ok(CountableDist { weights: acc.into_iter().collect(), tail: None })
}

/// Finitely supported probability measure on an ordered carrier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FinDist<T: Ord> {
    weights: BTreeMap<T, Rat>,
}

impl<T: Ord + Clone> FinDist<T> {
    pub fn dirac(x: T) -> Self {
        FinDist { weights: BTreeMap::from([(x, Rat::one())]) }
    }

    /// Repeated points have their weights summed, zero weights dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (T, Rat)>) -> Result<Self> {
        let mut weights: BTreeMap<T, Rat> = BTreeMap::new();
        for (k, (x, w)) in pairs.into_iter().enumerate() {
            if w.is_negative() {
                return Err(Error::NegativeWeight { index: k as u64, weight: w });
            }
            let slot = weights.entry(x).or_insert_with(Rat::zero);
            *slot = &*slot + &w;
        }
        weights.retain(|_, w| !w.is_zero());
        let mass: Rat = weights.values().sum();
        if !mass.is_one() {
            return Err(Error::MassNotOne(mass));
        }
        Ok(FinDist { weights })
    }

    /// Caller guarantees positive weights summing to one.
    pub(crate) fn from_pairs_unchecked(pairs: impl IntoIterator<Item = (T, Rat)>) -> Self {
        let mut weights: BTreeMap<T, Rat> = BTreeMap::new();
        for (x, w) in pairs {
            let slot = weights.entry(x).or_insert_with(Rat::zero);
            *slot = &*slot + &w;
        }
        weights.retain(|_, w| !w.is_zero());
        FinDist { weights }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rat)> {
        self.weights.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.weights.keys()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, x: &T) -> Rat {
        self.weights.get(x).cloned().unwrap_or_else(Rat::zero)
    }

    /// Pushforward along `f`.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> FinDist<U> {
        FinDist::from_pairs_unchecked(self.weights.iter().map(|(x, w)| (f(x), w.clone())))
    }

    pub fn try_map<U: Ord + Clone>(&self, f: impl Fn(&T) -> Result<U>) -> Result<FinDist<U>> {
        let mut pairs = Vec::with_capacity(self.weights.len());
        for (x, w) in &self.weights {
            pairs.push((f(x)?, w.clone()));
        }
        Ok(FinDist::from_pairs_unchecked(pairs))
    }
}

impl<T: Ord + Clone> FinDist<FinDist<T>> {
    /// Monad multiplication over an arbitrary carrier.
    pub fn flatten(&self) -> FinDist<T> {
        FinDist::from_pairs_unchecked(
            self.weights
                .iter()
                .flat_map(|(inner, w)| inner.weights.iter().map(move |(x, v)| (x.clone(), w * v))),
        )
    }
}
