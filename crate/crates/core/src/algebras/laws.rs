//! Algebra laws and the factorization corollaries for `ε_ℕ`.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::grid;
use crate::json::{dist_over_dist_to_value, dist_to_value};
use crate::measure::{CountableDist, DistOverDist, FinDist};
use crate::rat::Rat;
use crate::report::{LawReport, Verdict, Witness};
use crate::scvx::{monotone_oracle, subset_min_witness, AffineMap, Point, SeqMap};

use super::{eps_nat, AlgebraHandle};

fn show(r: &Result<Point>) -> serde_json::Value {
    match r {
        Ok(p) => p.to_json(),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn fin_to_value(p: &FinDist<Point>) -> serde_json::Value {
    p.iter().map(|(x, w)| json!([x.to_json(), w.to_wire()])).collect()
}

/// `action(δ_a) = a` for each sample.
pub fn check_unit_law(alg: &AlgebraHandle, samples: &[Point]) -> LawReport {
    let mut report = LawReport::for_algebra("unit", alg.name());
    for a in samples {
        let got = alg.apply(&FinDist::dirac(a.clone()));
        report.record(Verdict::equal(&got, &Ok(a.clone()), "action of a Dirac measure is not its point", || {
            json!({ "a": a.to_json(), "got": show(&got) })
        }));
    }
    report
}

/// `action(G(action)(Q)) = action(μ(Q))`.
pub fn check_assoc_law(alg: &AlgebraHandle, q: &FinDist<FinDist<Point>>) -> Verdict {
    let lhs = q.try_map(|p| alg.apply(p)).and_then(|pushed| alg.apply(&pushed));
    let rhs = alg.apply(&q.flatten());
    Verdict::equal(&lhs, &rhs, "action after pushforward differs from action after flattening", || {
        json!({
            "Q": q.iter().map(|(p, w)| json!([fin_to_value(p), w.to_wire()])).collect::<Vec<_>>(),
            "lhs": show(&lhs),
            "rhs": show(&rhs),
        })
    })
}

/// Affineness of the action, with the right-hand side evaluated by the
/// space's structure map: `action(Σ p_j P_j) = Σ p_j action(P_j)`.
pub fn check_affine_law(alg: &AlgebraHandle, p: &CountableDist, family: &[FinDist<Point>]) -> Result<Verdict> {
    let mut mixed: BTreeMap<Point, Rat> = BTreeMap::new();
    let mut images = Vec::new();
    for (j, w) in p.entries() {
        let pj = family.get(*j as usize).ok_or(Error::PartialFamily(*j))?;
        for (x, v) in pj.iter() {
            let cur = mixed.remove(x).unwrap_or_default();
            mixed.insert(x.clone(), cur + w * v);
        }
        images.push((*j, alg.apply(pj)?));
    }
    let mixed = FinDist::from_pairs(mixed)?;
    let lhs = alg.apply(&mixed);
    let rhs = alg.space().affine_sum(p, &SeqMap::new(images.into_iter().collect(), None));
    Ok(Verdict::equal(&lhs, &rhs, "action does not preserve affine sums", || {
        json!({ "p": dist_to_value(p), "mixture": fin_to_value(&mixed), "lhs": show(&lhs), "rhs": show(&rhs) })
    }))
}

/// Largest inner pool the associativity and affineness cases draw from.
pub const MAX_POOL: usize = 40;

/// Inner distributions used by the law suites: Diracs on samples and every
/// grid mixture of two samples, thinned evenly to at most [`MAX_POOL`].
pub fn one_level_pool(alg: &AlgebraHandle, den_bound: u64) -> Vec<FinDist<Point>> {
    let full = grid::two_level(alg.samples(), den_bound);
    if full.len() <= MAX_POOL {
        return full;
    }
    (0..MAX_POOL).map(|k| full[k * full.len() / MAX_POOL].clone()).collect()
}

/// Unit, associativity (over the two-level grid) and affineness for one
/// algebra. Affineness pairs each grid `p` with deterministic rotations
/// through the pool, then `random_cases` seeded draws.
pub fn algebra_law_reports(alg: &AlgebraHandle, den_bound: u64, random_cases: usize, seed: u64) -> Vec<LawReport> {
    let unit = check_unit_law(alg, alg.samples());
    let pool = one_level_pool(alg, den_bound);

    let mut assoc = LawReport::for_algebra("associativity", alg.name());
    for q in grid::two_level(&pool, den_bound) {
        assoc.record(check_assoc_law(alg, &q));
    }

    let mut affine = LawReport::for_algebra("affineness", alg.name());
    let mut run = |p: &CountableDist, family: &[FinDist<Point>]| match check_affine_law(alg, p, family) {
        Ok(v) => affine.record(v),
        Err(e) => affine.fail(Witness::new("affineness case errored", json!({ "error": e.to_string() }))),
    };
    let n = pool.len();
    for p in grid::grid_dists_on(&grid::GRID_INDICES, den_bound) {
        for offset in 0..n {
            let family: Vec<_> = (0..4).map(|j| pool[(offset + 7 * j) % n].clone()).collect();
            run(&p, &family);
        }
    }
    let mut rng = grid::rng(seed);
    for _ in 0..random_cases {
        let p = grid::random_dist(&mut rng, 5, 4);
        let family: Vec<_> = (0..6).map(|_| pool[rand::Rng::random_range(&mut rng, 0..n)].clone()).collect();
        run(&p, &family);
    }
    vec![unit, assoc, affine]
}

/// `ε_ℕ(μ(Q))`: mixture weights `k ↦ Σ_j q_j P^j_k` summed directly, then
/// the least index with positive mass.
pub fn emq_route(q: &DistOverDist) -> Result<u64> {
    let mut mass: BTreeMap<u64, Rat> = BTreeMap::new();
    for (inner, w) in q.entries() {
        if !inner.is_finite() {
            return Err(Error::TailUnsupported);
        }
        for (k, v) in inner.entries() {
            let cur = mass.remove(k).unwrap_or_default();
            mass.insert(*k, cur + w * v);
        }
    }
    Ok(*mass.iter().find(|(_, m)| m.is_positive()).expect("positive mass").0)
}

/// `ε_ℕ(G(ε_ℕ)(Q))`: the image measure `k ↦ Q(ε_ℕ⁻¹(k))`, then its least
/// index with positive mass.
pub fn ege_route(q: &DistOverDist) -> Result<u64> {
    let mut image: BTreeMap<u64, Rat> = BTreeMap::new();
    for (inner, w) in q.entries() {
        let k = eps_nat(inner)?;
        let cur = image.remove(&k).unwrap_or_default();
        image.insert(k, cur + w);
    }
    Ok(*image.keys().next().expect("nonempty"))
}

pub fn check_eps_nat_assoc(q: &DistOverDist) -> Verdict {
    let (lhs, rhs) = (emq_route(q), ege_route(q));
    Verdict::equal(&lhs, &rhs, "the two associativity routes for the minimum disagree", || {
        json!({ "Q": dist_over_dist_to_value(q), "emQ": format!("{lhs:?}"), "eGe": format!("{rhs:?}") })
    })
}

/// Recovers `φ` with `m = φ ∘ ε_ℕ` from the Dirac table of `m` on `0..n`.
/// Fails with `NotAffine` if the table is not min-preserving or if `m`
/// disagrees with `φ ∘ ε_ℕ` on a grid measure supported in range.
pub fn factor_through_eps(m: &AffineMap, n: u64) -> Result<SeqMap> {
    let mut table = Vec::new();
    for i in 0..n {
        let v = m.apply(&Point::Dist(CountableDist::dirac(i)))?;
        table.push(v.as_nat().ok_or_else(|| Error::OutOfCarrier(v.to_string()))?);
    }
    if let Some(s) = subset_min_witness(&table) {
        return Err(Error::NotAffine(format!("Dirac table {table:?} does not preserve the minimum of {s:?}")));
    }
    debug_assert!(monotone_oracle(&table));
    let indices: Vec<u64> = (0..n.min(5)).collect();
    for p in grid::grid_dists_on(&indices, grid::GRID_DENOMINATOR) {
        let direct = m.apply(&Point::Dist(p.clone()))?;
        let factored = Point::Nat(table[eps_nat(&p)? as usize]);
        if direct != factored {
            return Err(Error::NotAffine(format!(
                "m({}) = {direct} but the factorization gives {factored}",
                dist_to_value(&p)
            )));
        }
    }
    Ok(SeqMap::from_nats(&table))
}

/// `φ(ε_ℕ(p)) = ε_ℕ(φ_* p)`.
pub fn check_phi_commutes(phi: &SeqMap, p: &CountableDist) -> Verdict {
    let at = |i: u64| phi.get(i).ok().and_then(|x| x.as_nat());
    let lhs = eps_nat(p).and_then(|k| at(k).ok_or(Error::PartialMap(k)));
    let rhs = p.pushforward(at).and_then(|q| eps_nat(&q));
    Verdict::equal(&lhs, &rhs, "collapse does not commute with the minimum", || {
        json!({ "phi": phi.to_json(), "p": dist_to_value(p), "lhs": format!("{lhs:?}"), "rhs": format!("{rhs:?}") })
    })
}

/// `ε_ℕ(φ_* p) = min {φ(i) | p_i > 0}` for a permutation `φ` of `0..n`.
pub fn check_permutation_min(phi: &[u64], p: &CountableDist) -> Result<Verdict> {
    let n = phi.len();
    let mut seen = vec![false; n];
    for &v in phi {
        if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::NotPermutation(n));
        }
    }
    if let Some(i) = p.support().find(|i| *i as usize >= n) {
        return Err(Error::IndexOutOfRange { index: i, size: n as u64 });
    }
    let lhs = eps_nat(&p.pushforward(|i| phi.get(i as usize).copied())?)?;
    let rhs = p.support().map(|i| phi[i as usize]).min().expect("nonempty");
    Ok(Verdict::equal(&lhs, &rhs, "minimum of the permuted support differs", || {
        json!({ "phi": phi, "p": dist_to_value(p), "lhs": lhs, "rhs": rhs })
    }))
}

/// Every permutation of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u64>> {
    fn go(rest: &mut Vec<u64>, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            cur.push(v);
            go(rest, cur, out);
            cur.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n as u64).collect(), &mut Vec::new(), &mut out);
    out
}

/// `ε_𝟐(p) = sw(ε_𝟚(sw_* p))` for `p` on `{0,1}`.
pub fn check_swap_conjugation(p: &FinDist<u64>) -> Result<Verdict> {
    let sw = |i: &u64| 1 - *i;
    let lhs = super::eps_two_max(p)?;
    let rhs = sw(&super::eps_two_min(&p.map(sw))?);
    Ok(Verdict::equal(&lhs, &rhs, "swap conjugation fails", || {
        json!({ "p": p.iter().map(|(i, w)| json!([i, w.to_wire()])).collect::<Vec<_>>(), "lhs": lhs, "rhs": rhs })
    }))
}
