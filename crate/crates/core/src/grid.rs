//! Exhaustive and seeded-random case generators for the law harness.
//!
//! The weight grid with denominator bound `D` is `{k/d : 1 ≤ k ≤ d ≤ D}`;
//! for `D = 4` that is `{1/4, 1/3, 1/2, 2/3, 3/4, 1}`. Grid distributions
//! put grid weights on a subset of `{0, 1, 2, 3}` and sum to exactly one.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{CountableDist, DistOverDist, FinDist};
use crate::rat::Rat;

pub type CaseRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CaseRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Support indices of the standard grid.
pub const GRID_INDICES: [u64; 4] = [0, 1, 2, 3];

/// Default denominator bound.
pub const GRID_DENOMINATOR: u64 = 4;

pub fn grid_weights(den_bound: u64) -> Vec<Rat> {
    let mut out: Vec<Rat> = (1..=den_bound as i64)
        .flat_map(|d| (1..=d).map(move |k| Rat::new(k, d)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// All grid distributions over nonempty subsets of `indices`. Subsets come
/// in order of size, then lexicographically; within a subset the uniform
/// weighting (when on the grid) comes first.
pub fn grid_dists_on(indices: &[u64], den_bound: u64) -> Vec<CountableDist> {
    let weights = grid_weights(den_bound);
    let mut out = Vec::new();
    for size in 1..=indices.len() {
        for subset in subsets_of_size(indices, size) {
            let mut tuples = Vec::new();
            weight_tuples(&weights, size, &mut Vec::new(), &Rat::zero(), &mut tuples);
            let uniform = Rat::new(1, size as i64);
            if let Some(pos) = tuples.iter().position(|t| t.iter().all(|w| *w == uniform)) {
                let u = tuples.remove(pos);
                tuples.insert(0, u);
            }
            for t in tuples {
                let pairs = subset.iter().copied().zip(t);
                out.push(CountableDist::from_weights(pairs).expect("grid tuple sums to one"));
            }
        }
    }
    out
}

/// [`grid_dists_on`] over `{0..3}` with the default denominator bound.
pub fn standard_grid() -> Vec<CountableDist> {
    grid_dists_on(&GRID_INDICES, GRID_DENOMINATOR)
}

fn subsets_of_size(items: &[u64], size: usize) -> Vec<Vec<u64>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if items.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (k, first) in items.iter().enumerate() {
        for mut rest in subsets_of_size(&items[k + 1..], size - 1) {
            rest.insert(0, *first);
            out.push(rest);
        }
    }
    out
}

fn weight_tuples(weights: &[Rat], size: usize, cur: &mut Vec<Rat>, mass: &Rat, out: &mut Vec<Vec<Rat>>) {
    if cur.len() == size {
        if mass.is_one() {
            out.push(cur.clone());
        }
        return;
    }
    for w in weights {
        let m = mass + w;
        if m > Rat::one() {
            continue;
        }
        cur.push(w.clone());
        weight_tuples(weights, size, cur, &m, out);
        cur.pop();
    }
}

/// Two-level grid over `pool`: every `δ_P`, and every `(1-r)δ_P + rδ_Q` for
/// distinct `P, Q` in `pool` with `(1-r, r)` a grid weighting.
pub fn two_level<T: Ord + Clone>(pool: &[T], den_bound: u64) -> Vec<FinDist<T>> {
    let weights = grid_weights(den_bound);
    let mut pairs = Vec::new();
    weight_tuples(&weights, 2, &mut Vec::new(), &Rat::zero(), &mut pairs);
    let mut out: Vec<FinDist<T>> = pool.iter().cloned().map(FinDist::dirac).collect();
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            if a == b {
                continue;
            }
            for t in &pairs {
                out.push(FinDist::from_pairs_unchecked([(a.clone(), t[0].clone()), (b.clone(), t[1].clone())]));
            }
        }
    }
    out
}

/// Random positive weights with the given number of entries, summing to one.
pub fn random_weights(rng: &mut CaseRng, n: usize, max_num: i64) -> Vec<Rat> {
    let raw: Vec<i64> = (0..n).map(|_| rng.random_range(1..=max_num)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|k| Rat::new(k, total)).collect()
}

/// A random finitely supported measure with support inside `0..=max_index`.
pub fn random_dist(rng: &mut CaseRng, max_index: u64, max_support: usize) -> CountableDist {
    let mut indices: Vec<u64> = (0..=max_index).collect();
    indices.shuffle(rng);
    let size = rng.random_range(1..=max_support.min(indices.len()));
    let weights = random_weights(rng, size, 6);
    CountableDist::from_weights(indices.into_iter().take(size).zip(weights)).expect("normalized")
}

/// A random measure over two-level support drawn from `pool`.
pub fn random_two_level(rng: &mut CaseRng, pool: &[CountableDist], max_support: usize) -> DistOverDist {
    let size = rng.random_range(1..=max_support);
    let weights = random_weights(rng, size, 6);
    let pairs = weights.into_iter().map(|w| (pool[rng.random_range(0..pool.len())].clone(), w));
    DistOverDist::new(pairs.collect::<Vec<_>>()).expect("normalized")
}
