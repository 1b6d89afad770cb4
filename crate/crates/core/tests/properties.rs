//! Invariants over generated finite distributions.

use std::collections::BTreeMap;

use girylab::algebras::{check_permutation_min, emq_route, ege_route};
use girylab::amplitudes::{amp_combine, l2_to_l1, unit_phases, AmpDist, CRat};
use girylab::json::{dist_from_str, dist_to_string};
use girylab::measure::{join, CountableDist, DistOverDist, IndexSet};
use girylab::rat::Rat;
use girylab::scvx::monotone_oracle;
use girylab::stdspace::{refinement_reports, RefinementTree};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

/// Positive integer weights on distinct indices, normalized.
fn dist(max_index: u64, max_support: usize) -> impl Strategy<Value = CountableDist> {
    prop::collection::btree_map(0..=max_index, 1i64..=12, 1..=max_support).prop_map(|m| {
        let total: i64 = m.values().sum();
        CountableDist::from_weights(m.into_iter().map(|(i, w)| (i, Rat::new(w, total)))).unwrap()
    })
}

fn two_level() -> impl Strategy<Value = DistOverDist> {
    prop::collection::vec((dist(8, 4), 1i64..=6), 1..=4).prop_map(|v| {
        let total: i64 = v.iter().map(|(_, w)| w).sum();
        DistOverDist::new(v.into_iter().map(|(d, w)| (d, Rat::new(w, total)))).unwrap()
    })
}

fn table(len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..10, len)
}

fn subset() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..12, 0..6)
}

fn total(p: &CountableDist) -> Rat {
    p.entries().iter().map(|(_, w)| w).sum()
}

proptest! {
    #[test]
    fn normalized_and_canonical(p in dist(20, 6)) {
        prop_assert!(total(&p).is_one());
        prop_assert!(p.entries().windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(p.entries().iter().all(|(_, w)| w.is_positive()));
    }

    #[test]
    fn pushforward_functorial(p in dist(9, 5), f in table(10), g in table(10)) {
        let at = |t: &Vec<u64>, i: u64| t.get(i as usize).copied();
        let lhs = p.pushforward(|i| at(&f, i).and_then(|k| at(&g, k))).unwrap();
        let rhs = p.pushforward(|i| at(&f, i)).unwrap().pushforward(|i| at(&g, i)).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(total(&lhs).is_one());
        prop_assert_eq!(p.pushforward(Some).unwrap(), p);
    }

    #[test]
    fn join_units(p in dist(9, 5)) {
        prop_assert_eq!(join(&DistOverDist::new([(p.clone(), Rat::one())]).unwrap()).unwrap(), p.clone());
        prop_assert_eq!(p.convex_combine(|j| Some(CountableDist::dirac(j))).unwrap(), p);
    }

    #[test]
    fn convex_combine_is_join(p in dist(4, 5), fam in prop::collection::vec(dist(8, 3), 5)) {
        let lhs = p.convex_combine(|j| fam.get(j as usize).cloned()).unwrap();
        let q = DistOverDist::new(p.entries().iter().map(|(j, w)| (fam[*j as usize].clone(), w.clone()))).unwrap();
        prop_assert_eq!(lhs, join(&q).unwrap());
    }

    #[test]
    fn join_then_min_agrees_with_min_of_mins(q in two_level()) {
        prop_assert_eq!(emq_route(&q).unwrap(), ege_route(&q).unwrap());
    }

    #[test]
    fn ev_additive(p in dist(11, 6), a in subset(), b in subset()) {
        let b: Vec<u64> = b.into_iter().filter(|i| !a.contains(i)).collect();
        let both: Vec<u64> = a.iter().chain(&b).copied().collect();
        let lhs = p.ev(&IndexSet::finite(both)).unwrap();
        let rhs = p.ev(&IndexSet::finite(a.clone())).unwrap() + p.ev(&IndexSet::finite(b)).unwrap();
        prop_assert_eq!(lhs, rhs);
        let comp = p.ev(&IndexSet::Cofinite(a.iter().copied().collect())).unwrap();
        prop_assert!((comp + p.ev(&IndexSet::finite(a)).unwrap()).is_one());
    }

    #[test]
    fn min_support_is_first_positive(p in dist(30, 6)) {
        let first = (0..=30).find(|&i| p.weight(i).is_positive()).unwrap();
        prop_assert_eq!(p.min_support(1_000_000).unwrap(), first);
    }

    #[test]
    fn monotone_maps_preserve_min(f in prop::collection::vec(0u64..6, 6), p in dist(5, 4)) {
        let mut sorted = f.clone();
        sorted.sort();
        prop_assert!(monotone_oracle(&sorted));
        let image = p.pushforward(|i| sorted.get(i as usize).copied()).unwrap();
        prop_assert_eq!(image.min_support(100).unwrap(), sorted[p.min_support(100).unwrap() as usize]);
    }

    #[test]
    fn permutations_commute_with_min(perm in Just((0u64..6).collect::<Vec<_>>()).prop_shuffle(), p in dist(5, 4)) {
        prop_assert!(check_permutation_min(&perm, &p).unwrap().is_pass());
    }

    #[test]
    fn distribution_json_round_trip(p in dist(1000, 8)) {
        let s = dist_to_string(&p);
        prop_assert_eq!(dist_to_string(&dist_from_str(&s).unwrap()), s);
    }

    #[test]
    fn tail_json_round_trip(start in 0u64..20, num in 1i64..9) {
        let prefix: Vec<(u64, Rat)> = (0..start).map(|i| (i, Rat::new(1, 2).pow(i as i32 + 1))).collect();
        let ratio = Rat::new(num, 10);
        if let Ok(p) = CountableDist::with_geometric_tail(prefix, start, ratio) {
            let s = dist_to_string(&p);
            prop_assert_eq!(dist_to_string(&dist_from_str(&s).unwrap()), s);
            prop_assert!(p.ev(&IndexSet::all()).unwrap().is_one());
        }
    }
}

/// Two-point amplitudes `a/c`, `b/c` from a Pythagorean triple, each
/// rotated by a rational unit phase.
fn pythagorean_amp() -> impl Strategy<Value = AmpDist> {
    let triples = [(3i64, 4i64, 5i64), (5, 12, 13), (8, 15, 17), (7, 24, 25)];
    (0..triples.len(), 0u64..6, 1u64..6, 0usize..8, 0usize..8).prop_map(move |(t, i, gap, ph_a, ph_b)| {
        let (a, b, c) = triples[t];
        let phases = unit_phases();
        let za = &CRat::real(Rat::new(a, c)) * &phases[ph_a];
        let zb = &CRat::real(Rat::new(b, c)) * &phases[ph_b];
        AmpDist::from_amplitudes([(i, za), (i + gap, zb)]).unwrap()
    })
}

proptest! {
    #[test]
    fn amplitudes_phase_invariant(p in pythagorean_amp(), shift in 0usize..8) {
        let phases = unit_phases();
        let rotated = p.with_phases(|i| phases[(i as usize + shift) % phases.len()].clone()).unwrap();
        prop_assert_eq!(l2_to_l1(&rotated), l2_to_l1(&p));
        prop_assert!(total(&l2_to_l1(&p)).is_one());
    }

    #[test]
    fn amp_combine_factors(p in pythagorean_amp(), fam in prop::collection::vec(dist(6, 3), 12), set in subset()) {
        let f = |j: u64| fam.get(j as usize).cloned();
        let u = IndexSet::finite(set);
        let lhs = amp_combine(&p, f, &u).unwrap();
        let rhs = l2_to_l1(&p).convex_combine(f).unwrap().ev(&u).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn amplitude_json_round_trip(p in pythagorean_amp()) {
        let s = p.to_json().to_string();
        let back = AmpDist::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        prop_assert_eq!(back.to_json().to_string(), s);
    }

    #[test]
    fn scripted_trees_satisfy_every_check(n in 1usize..=8, cuts in prop::collection::vec((0usize..8, 1usize..8), 0..5)) {
        let pts: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let mut t = RefinementTree::trivial(pts.iter().cloned()).unwrap();
        for (atom, cut) in cuts {
            let top = t.level(t.depth()).unwrap();
            let atom = atom % top.len();
            let members: Vec<String> = top[atom].iter().cloned().collect();
            if members.len() < 2 {
                continue;
            }
            let cut = 1 + cut % (members.len() - 1);
            t = t.refine(atom, &members[..cut], &members[cut..]).unwrap();
        }
        prop_assert!(refinement_reports(&t).iter().all(|r| r.passed()));
        let back = RefinementTree::from_json(&t.to_json()).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn strategies_cover_several_supports() {
    // Sanity check on the generator itself.
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let mut sizes = BTreeMap::new();
    for _ in 0..200 {
        let p = dist(20, 6).new_tree(&mut runner).unwrap().current();
        *sizes.entry(p.entries().len()).or_insert(0) += 1;
    }
    assert!(sizes.len() >= 4, "{sizes:?}");
}
