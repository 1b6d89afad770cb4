//! ℓ₂-normalized amplitude families over ℕ with complex rational entries.
//!
//! Evaluation squares moduli: an amplitude family `p` weighs index `i` by
//! `p_i p_i*`, so everything observable factors through [`l2_to_l1`].

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::CaseRng;
use crate::measure::{CountableDist, IndexSet};
use crate::rat::Rat;

/// `re + im·i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        CRat { re, im }
    }

    pub fn real(re: Rat) -> Self {
        CRat { re, im: Rat::zero() }
    }

    pub fn i() -> Self {
        CRat { re: Rat::zero(), im: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat { re: self.re.clone(), im: -&self.im }
    }

    /// `z z*`.
    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Mul<&CRat> for &CRat {
    type Output = CRat;

    fn mul(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

/// Unit-modulus complex rationals used as phases.
pub fn unit_phases() -> Vec<CRat> {
    let c = |a: i64, b: i64, d: i64| CRat::new(Rat::new(a, d), Rat::new(b, d));
    vec![c(1, 0, 1), c(-1, 0, 1), c(0, 1, 1), c(0, -1, 1), c(3, 4, 5), c(4, -3, 5), c(-5, 12, 13), c(8, 15, 17)]
}

/// Pairs `(a, b)` of nonnegative rationals with `a² + b² = 1`, both nonzero.
pub fn pythagorean_splits() -> Vec<(Rat, Rat)> {
    [(3, 4, 5), (4, 3, 5), (5, 12, 13), (8, 15, 17)]
        .into_iter()
        .map(|(a, b, c)| (Rat::new(a, c), Rat::new(b, c)))
        .collect()
}

/// An amplitude family with `Σ |p_i|² = 1` exactly.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AmpDist {
    amps: Vec<(u64, CRat)>,
}

impl AmpDist {
    pub fn from_amplitudes(pairs: impl IntoIterator<Item = (u64, CRat)>) -> Result<Self> {
        let mut amps: Vec<(u64, CRat)> = pairs.into_iter().collect();
        amps.sort_by_key(|(i, _)| *i);
        if let Some(w) = amps.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateIndex(w[0].0));
        }
        amps.retain(|(_, z)| !z.is_zero());
        let norm: Rat = amps.iter().map(|(_, z)| z.norm_sq()).sum();
        if !norm.is_one() {
            return Err(Error::NormNotOne(norm));
        }
        Ok(AmpDist { amps })
    }

    pub fn entries(&self) -> &[(u64, CRat)] {
        &self.amps
    }

    /// Multiplies the amplitude at each index by `phase(i)`.
    pub fn with_phases(&self, phase: impl Fn(u64) -> CRat) -> Result<Self> {
        Self::from_amplitudes(self.amps.iter().map(|(i, z)| (*i, z * &phase(*i))))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self.amps.iter().map(|(i, z)| json!([i, z.re.to_wire(), z.im.to_wire()])).collect();
        json!({ "amplitudes": rows })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::Parse(format!("not an amplitude document: {v}"));
        let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(bad)?;
        let rows = obj.get("amplitudes").and_then(Value::as_array).ok_or_else(bad)?;
        let mut pairs = Vec::with_capacity(rows.len());
        for row in rows {
            let [i, re, im] = row.as_array().map(Vec::as_slice).ok_or_else(bad)? else {
                return Err(bad());
            };
            let i = i.as_u64().ok_or_else(bad)?;
            let re: Rat = re.as_str().ok_or_else(bad)?.parse()?;
            let im: Rat = im.as_str().ok_or_else(bad)?.parse()?;
            pairs.push((i, CRat::new(re, im)));
        }
        Self::from_amplitudes(pairs)
    }
}

/// The measure `i ↦ |p_i|²`.
pub fn l2_to_l1(p: &AmpDist) -> CountableDist {
    CountableDist::from_weights(p.amps.iter().map(|(i, z)| (*i, z.norm_sq()))).expect("ℓ₂ normalized")
}

/// `(Σ p_i P_i)(U) = Σ |p_i|² P_i(U)`.
pub fn amp_combine(p: &AmpDist, family: impl Fn(u64) -> Option<CountableDist>, u: &IndexSet) -> Result<Rat> {
    let mut acc = Rat::zero();
    for (i, z) in &p.amps {
        let q = family(*i).ok_or(Error::PartialFamily(*i))?;
        acc = acc + z.norm_sq() * q.ev(u)?;
    }
    Ok(acc)
}

/// Least index with nonzero amplitude.
pub fn amp_min_support(p: &AmpDist) -> u64 {
    p.amps[0].0
}

/// Deterministic amplitude families: single entries at `0..4`, then every
/// Pythagorean split of one entry into two (indices `i < j` in `0..4`),
/// then a split of the second part again onto a third index, each with
/// phases drawn cyclically from [`unit_phases`].
pub fn amp_grid() -> Vec<AmpDist> {
    let phases = unit_phases();
    let splits = pythagorean_splits();
    let mut out: Vec<AmpDist> = (0..4).map(|i| AmpDist { amps: vec![(i, CRat::real(Rat::one()))] }).collect();
    let mut k = 0;
    let mut next_phase = || {
        k += 1;
        phases[k % phases.len()].clone()
    };
    for i in 0..4u64 {
        for j in i + 1..4 {
            for (a, b) in &splits {
                let za = &CRat::real(a.clone()) * &next_phase();
                let zb = &CRat::real(b.clone()) * &next_phase();
                out.push(AmpDist::from_amplitudes([(i, za), (j, zb.clone())]).expect("normalized"));
                for l in j + 1..4 {
                    let (c, d) = &splits[(i + j + l) as usize % splits.len()];
                    let zc = &zb * &CRat::real(c.clone());
                    let zd = &(&zb * &CRat::real(d.clone())) * &next_phase();
                    let za = &CRat::real(a.clone()) * &next_phase();
                    out.push(AmpDist::from_amplitudes([(i, za), (j, zc), (l, zd)]).expect("normalized"));
                }
            }
        }
    }
    out
}

/// A random normalized amplitude family over `0..=max_index`, built by
/// repeatedly splitting one entry with a Pythagorean pair and a phase.
pub fn random_amp(rng: &mut CaseRng, max_index: u64, max_support: usize) -> AmpDist {
    let phases = unit_phases();
    let splits = pythagorean_splits();
    let size = rng.random_range(1..=max_support.min(max_index as usize + 1));
    let mut indices: BTreeSet<u64> = BTreeSet::new();
    while indices.len() < size {
        indices.insert(rng.random_range(0..=max_index));
    }
    let indices: Vec<u64> = indices.into_iter().collect();
    let mut amps: Vec<CRat> = vec![phases[rng.random_range(0..phases.len())].clone()];
    while amps.len() < size {
        let k = rng.random_range(0..amps.len());
        let (a, b) = &splits[rng.random_range(0..splits.len())];
        let z = amps[k].clone();
        amps[k] = &z * &CRat::real(a.clone());
        let phase = &phases[rng.random_range(0..phases.len())];
        amps.push(&(&z * &CRat::real(b.clone())) * phase);
    }
    AmpDist::from_amplitudes(indices.into_iter().zip(amps)).expect("normalized by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn c(re: Rat, im: Rat) -> CRat {
        CRat::new(re, im)
    }

    #[test]
    fn normalization() {
        let p = AmpDist::from_amplitudes([(0, CRat::real(rat!(3, 5))), (1, c(rat!(0), rat!(4, 5)))]).unwrap();
        assert_eq!(p.entries().len(), 2);
        assert!(AmpDist::from_amplitudes([(0, CRat::real(rat!(1)))]).is_ok());
        let half = CRat::real(rat!(1, 2));
        assert_eq!(
            AmpDist::from_amplitudes([(0, half.clone()), (1, half.clone())]),
            Err(Error::NormNotOne(rat!(1, 2)))
        );
        assert_eq!(AmpDist::from_amplitudes([(0, half.clone()), (0, half)]), Err(Error::DuplicateIndex(0)));
        let z = AmpDist::from_amplitudes([(0, CRat::real(rat!(1))), (4, CRat::default())]).unwrap();
        assert_eq!(z.entries().len(), 1);
    }

    #[test]
    fn combine_and_min() {
        let p = AmpDist::from_amplitudes([(0, CRat::real(rat!(3, 5))), (1, CRat::real(rat!(4, 5)))]).unwrap();
        let fam = |i| Some(CountableDist::dirac(i));
        assert_eq!(amp_combine(&p, fam, &IndexSet::finite([1])), Ok(rat!(16, 25)));
        assert_eq!(amp_combine(&p, fam, &IndexSet::all()), Ok(rat!(1)));
        assert_eq!(amp_combine(&p, |_| None, &IndexSet::all()), Err(Error::PartialFamily(0)));
        assert_eq!(
            l2_to_l1(&p),
            CountableDist::from_weights([(0, rat!(9, 25)), (1, rat!(16, 25))]).unwrap()
        );
        assert_eq!(amp_min_support(&AmpDist::from_amplitudes([(2, CRat::i())]).unwrap()), 2);
        let q = AmpDist::from_amplitudes([(0, CRat::real(rat!(3, 5))), (4, CRat::real(rat!(4, 5)))]).unwrap();
        assert_eq!(amp_min_support(&q), 0);
        assert_eq!(l2_to_l1(&AmpDist::from_amplitudes([(7, CRat::real(rat!(1)))]).unwrap()), CountableDist::dirac(7));
    }

    #[test]
    fn phase_invariance() {
        let p = AmpDist::from_amplitudes([(0, CRat::real(rat!(3, 5))), (1, CRat::real(rat!(4, 5)))]).unwrap();
        let rotated = p.with_phases(|_| CRat::i()).unwrap();
        assert_ne!(rotated, p);
        assert_eq!(l2_to_l1(&rotated), l2_to_l1(&p));
        assert!(unit_phases().iter().all(|z| z.norm_sq().is_one()));
    }

    #[test]
    fn json_round_trip() {
        let p = AmpDist::from_amplitudes([(0, CRat::real(rat!(3, 5))), (1, c(rat!(0), rat!(-4, 5)))]).unwrap();
        let v = p.to_json();
        assert_eq!(v, json!({"amplitudes": [[0, "3/5", "0/1"], [1, "0/1", "-4/5"]]}));
        assert_eq!(AmpDist::from_json(&v).unwrap(), p);
        assert!(matches!(AmpDist::from_json(&json!({"amplitudes": [[0, 1, 0]]})), Err(Error::Parse(_))));
    }

    #[test]
    fn generators_are_normalized() {
        let g = amp_grid();
        assert!(g.len() > 30);
        let mut rng = crate::grid::rng(2);
        for _ in 0..50 {
            let p = random_amp(&mut rng, 6, 4);
            assert!(AmpDist::from_amplitudes(p.entries().to_vec()).is_ok());
        }
    }
}
