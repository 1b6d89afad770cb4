//! Finite oracle for countably affine endomaps of `ℕ_min`.
//!
//! The min-structure only sees the support of a measure, so a map `f` is
//! affine on `{0..n-1}` exactly when `f(min S) = min f(S)` for every nonempty
//! subset `S`. [`affine_iff_monotone`] checks that this agrees with plain
//! monotonicity over every endofunction of a small set.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `n` for which the `n^n` enumeration is allowed by default.
pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 5;

/// `i < j ⇒ f(i) ≤ f(j)`.
pub fn monotone_oracle(f: &[u64]) -> bool {
    f.windows(2).all(|w| w[0] <= w[1])
}

/// First nonempty `S ⊆ {0..n-1}` (as a bitmask, in increasing order) with
/// `f(min S) ≠ min f(S)`.
pub fn subset_min_witness(f: &[u64]) -> Option<Vec<usize>> {
    let n = f.len();
    for mask in 1u64..(1u64 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let lo = members[0];
        let min_image = members.iter().map(|&i| f[i]).min().expect("nonempty");
        if f[lo] != min_image {
            return Some(members);
        }
    }
    None
}

/// Every monotone map `{0..n-1} → {0..m-1}` in lexicographic order.
pub fn monotone_maps(n: usize, m: u64) -> Vec<Vec<u64>> {
    fn go(n: usize, m: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().copied().unwrap_or(0);
        for v in lo..m {
            cur.push(v);
            go(n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut Vec::new(), &mut out);
    out
}

/// Every endofunction of `{0..n-1}`, lexicographic.
pub fn all_endofunctions(n: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (n as u64).pow(n as u32);
    (0..total).map(move |mut code| {
        let mut f = vec![0u64; n];
        for slot in f.iter_mut().rev() {
            *slot = code % n as u64;
            code /= n as u64;
        }
        f
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub f: Vec<u64>,
    pub monotone: bool,
    pub subset_witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NsReport {
    pub n: usize,
    pub functions: u64,
    pub monotone_count: u64,
    pub discrepancies: Vec<Discrepancy>,
}

/// Checks monotone ⟺ subset-min-preserving over all `n^n` maps.
pub fn affine_iff_monotone(n: usize, bound: usize) -> Result<NsReport> {
    if n > bound {
        return Err(Error::BoundExceeded { got: n, limit: bound });
    }
    let mut report = NsReport { n, functions: 0, monotone_count: 0, discrepancies: Vec::new() };
    for f in all_endofunctions(n) {
        report.functions += 1;
        let monotone = monotone_oracle(&f);
        let witness = subset_min_witness(&f);
        if monotone {
            report.monotone_count += 1;
        }
        if monotone != witness.is_none() {
            report.discrepancies.push(Discrepancy { f, monotone, subset_witness: witness });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(monotone_oracle(&[0, 0, 2]));
        assert_eq!(subset_min_witness(&[0, 0, 2]), None);
        assert!(!monotone_oracle(&[1, 0]));
        assert_eq!(subset_min_witness(&[1, 0]), Some(vec![0, 1]));
        let r = affine_iff_monotone(1, 5).unwrap();
        assert_eq!((r.functions, r.monotone_count), (1, 1));
    }

    #[test]
    fn bound_enforced() {
        assert_eq!(affine_iff_monotone(6, 5), Err(Error::BoundExceeded { got: 6, limit: 5 }));
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(all_endofunctions(3).count(), 27);
        assert_eq!(monotone_maps(5, 5).len(), 126);
        assert!(monotone_maps(4, 3).iter().all(|f| monotone_oracle(f)));
    }
}
