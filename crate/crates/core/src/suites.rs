//! Named law suites, their configuration and reports.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebras::{
    algebra_law_reports, builtin_algebra, check_eps_nat_assoc, check_permutation_min, check_phi_commutes,
    check_swap_conjugation, eps_nat_with_cap, factor_through_eps, permutations, standard_algebras,
};
use crate::amplitudes::{amp_combine, amp_grid, amp_min_support, l2_to_l1, random_amp, unit_phases, AmpDist, CRat};
use crate::error::{Error, Result};
use crate::grid::{self, CaseRng};
use crate::json::{dist_from_value, dist_over_dist_from_value, dist_over_dist_to_value, dist_to_value};
use crate::measure::{join, CountableDist, DistOverDist, FinDist, IndexSet, DEFAULT_ENUMERATION_CAP};
use crate::rat::Rat;
use crate::report::{LawReport, Verdict, Witness};
use crate::scvx::{
    affine_case, affine_iff_monotone, builtin_space, check_axiom1, check_axiom2, check_transform_compose,
    classify_probe, dg_constancy_check, epi_cancellation, is_affine, iso_delta2_interval, iso_map, j_map,
    monotone_maps, sample_sequences, seq_to_affine, standard_spaces, AffineMap, Budget, DefaultRule, DgOutcome,
    IsoDirection, Point, SeqMap, SpaceHandle, TypeTag, DEFAULT_EXHAUSTIVE_BOUND,
};
use crate::scvx::space::show;
use crate::stdspace::{point_names, random_script, refinement_reports, RefinementTree};

/// Suite names, in report order.
pub const SUITES: [&str; 9] = [
    "algebra-laws",
    "amplitude",
    "monad-laws",
    "ns-equivalence",
    "permutation-min",
    "phi-commutes",
    "refinement",
    "round-trip",
    "scvx-axioms",
];

fn default_grid() -> u64 {
    grid::GRID_DENOMINATOR
}
fn default_random() -> usize {
    1000
}
fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}
fn default_n() -> usize {
    DEFAULT_EXHAUSTIVE_BOUND
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Empty means every suite.
    #[serde(default)]
    pub suites: Vec<String>,
    /// Denominator bound of the weight grid.
    #[serde(default = "default_grid")]
    pub grid: u64,
    #[serde(default = "default_random")]
    pub random_cases: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub enumeration_cap: u64,
    /// Size for the exhaustive endofunction and monotone-map suites.
    #[serde(default = "default_n")]
    pub n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: Vec::new(),
            grid: default_grid(),
            random_cases: default_random(),
            seed: 0,
            enumeration_cap: default_cap(),
            n: default_n(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
            return Err(Error::UnknownSuite(bad.clone()));
        }
        if self.grid == 0 || self.enumeration_cap == 0 || self.n == 0 {
            return Err(Error::BadConfig("grid, enumeration_cap and n must be positive".into()));
        }
        if self.n > DEFAULT_EXHAUSTIVE_BOUND {
            return Err(Error::BoundExceeded { got: self.n, limit: DEFAULT_EXHAUSTIVE_BOUND });
        }
        Ok(())
    }

    /// Selected suites, deduplicated, in report order.
    pub fn selected(&self) -> Vec<&'static str> {
        SUITES.into_iter().filter(|s| self.suites.is_empty() || self.suites.iter().any(|x| x == s)).collect()
    }

    fn budget(&self) -> Budget {
        Budget { sequences: 64, random_cases: self.random_cases.min(200), seed: self.seed }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: u64,
    pub failures: u64,
    pub laws: Vec<LawReport>,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn law(&self, name: &str) -> Option<&LawReport> {
        self.laws.iter().find(|l| l.law == name)
    }
}

/// Runs every selected suite in parallel; reports come back sorted by name.
pub fn run_suites(cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    cfg.validate()?;
    let mut reports = cfg.selected().into_par_iter().map(|s| run_suite(s, cfg)).collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.suite.cmp(&b.suite));
    Ok(reports)
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let laws = match name {
        "monad-laws" => monad_laws(cfg)?,
        "scvx-axioms" => scvx_axioms(cfg)?,
        "algebra-laws" => algebra_laws(cfg)?,
        "ns-equivalence" => ns_equivalence(cfg)?,
        "phi-commutes" => phi_commutes(cfg)?,
        "permutation-min" => permutation_min(cfg)?,
        "refinement" => refinement(cfg)?,
        "amplitude" => amplitude(cfg)?,
        "round-trip" => round_trip(cfg)?,
        _ => return Err(Error::UnknownSuite(name.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: cfg.seed,
        cases: laws.iter().map(|l| l.cases).sum(),
        failures: laws.iter().map(|l| l.failure_count).sum(),
        laws,
        wall_ms: started.elapsed().as_millis() as u64,
    })
}

fn record_result(report: &mut LawReport, r: Result<Verdict>) {
    match r {
        Ok(v) => report.record(v),
        Err(e) => report.fail(Witness::new("case errored", json!({ "error": e.to_string() }))),
    }
}

fn same<T: PartialEq>(lhs: &T, rhs: &T, msg: &str, data: impl FnOnce() -> serde_json::Value) -> Verdict {
    Verdict::equal(lhs, rhs, msg, data)
}

fn suite_grid(cfg: &SuiteConfig) -> Vec<CountableDist> {
    grid::grid_dists_on(&grid::GRID_INDICES, cfg.grid)
}

/// Pool for two- and three-level cases: an evenly spaced selection of the grid.
fn sparse_pool(g: &[CountableDist], size: usize) -> Vec<CountableDist> {
    let step = (g.len() / size).max(1);
    g.iter().step_by(step).take(size).cloned().collect()
}

fn monad_laws(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let g = suite_grid(cfg);
    let mut rng = grid::rng(cfg.seed);
    let mut ps = g.clone();
    ps.extend((0..cfg.random_cases).map(|_| grid::random_dist(&mut rng, 7, 5)));

    let mut left_unit = LawReport::new("join-of-dirac");
    let mut right_unit = LawReport::new("join-of-dirac-family");
    let mut norm = LawReport::new("normalization");
    for p in &ps {
        let lhs = DistOverDist::new([(p.clone(), Rat::one())]).and_then(|q| join(&q));
        left_unit.record(same(&lhs, &Ok(p.clone()), "join of a point mass", || json!({ "p": dist_to_value(p) })));
        let rhs = p.convex_combine(|j| Some(CountableDist::dirac(j)));
        right_unit.record(same(&rhs, &Ok(p.clone()), "join over Diracs", || json!({ "p": dist_to_value(p) })));
        let total: Rat = p.entries().iter().map(|(_, w)| w).sum();
        let ev = p.ev(&IndexSet::all());
        norm.record(same(&(total.is_one(), ev), &(true, Ok(Rat::one())), "mass is not one", || {
            json!({ "p": dist_to_value(p) })
        }));
    }

    // μ∘μ = μ∘G(μ) on three-level grid values and random ones.
    let mut assoc = LawReport::new("join-associativity");
    let pool1 = sparse_pool(&g, 9);
    let pool2: Vec<FinDist<CountableDist>> = grid::two_level(&pool1, cfg.grid).into_iter().take(60).collect();
    let mut triples = grid::two_level(&pool2, cfg.grid);
    for _ in 0..cfg.random_cases {
        let size = rng.random_range(1..=3);
        let w = grid::random_weights(&mut rng, size, 5);
        let inner: Vec<_> = (0..size)
            .map(|_| {
                let q = grid::random_two_level(&mut rng, &g, 3);
                q.to_fin()
            })
            .collect();
        triples.push(FinDist::from_pairs(inner.into_iter().zip(w))?);
    }
    for t in &triples {
        let lhs = DistOverDist::new(t.flatten().iter().map(|(d, w)| (d.clone(), w.clone()))).and_then(|q| join(&q));
        let rhs = t
            .try_map(|inner| join(&DistOverDist::new(inner.iter().map(|(d, w)| (d.clone(), w.clone())))?))
            .and_then(|outer| join(&DistOverDist::new(outer.iter().map(|(d, w)| (d.clone(), w.clone())))?));
        assoc.record(same(&lhs, &rhs, "join is not associative", || json!({ "lhs": format!("{lhs:?}"), "rhs": format!("{rhs:?}") })));
    }

    let mut agree = LawReport::new("convex-combine-equals-join");
    let fams = sparse_pool(&g, 12);
    for (k, p) in ps.iter().enumerate() {
        let fam = |j: u64| Some(fams[(k + 5 * j as usize) % fams.len()].clone());
        let lhs = p.convex_combine(fam);
        let rhs = DistOverDist::new(p.entries().iter().map(|(j, w)| (fam(*j).expect("total"), w.clone())))
            .and_then(|q| join(&q));
        agree.record(same(&lhs, &rhs, "convex_combine differs from join", || json!({ "p": dist_to_value(p) })));
    }

    let mut functor = LawReport::new("pushforward-functoriality");
    for p in &ps {
        let f: Vec<u64> = (0..8).map(|_| rng.random_range(0..8)).collect();
        let h: Vec<u64> = (0..8).map(|_| rng.random_range(0..8)).collect();
        let at = |t: &Vec<u64>, i: u64| t.get(i as usize).copied();
        let lhs = p.pushforward(|i| at(&f, i).and_then(|k| at(&h, k)));
        let rhs = p.pushforward(|i| at(&f, i)).and_then(|q| q.pushforward(|i| at(&h, i)));
        functor.record(same(&lhs, &rhs, "pushforward is not functorial", || json!({ "p": dist_to_value(p), "f": f, "g": h })));
        functor.record(same(&p.pushforward(Some), &Ok(p.clone()), "identity pushforward", || json!({ "p": dist_to_value(p) })));
    }

    let mut additive = LawReport::new("ev-additivity");
    for p in &g {
        for code in 0..81u32 {
            // Each of 0..3 goes to W1, W2 or neither.
            let (mut w1, mut w2) = (Vec::new(), Vec::new());
            for i in 0..4u64 {
                match code / 3u32.pow(i as u32) % 3 {
                    1 => w1.push(i),
                    2 => w2.push(i),
                    _ => {}
                }
            }
            let both: Vec<u64> = w1.iter().chain(&w2).copied().collect();
            let lhs = p.ev(&IndexSet::finite(both));
            let rhs = p.ev(&IndexSet::finite(w1.clone())).and_then(|a| Ok(a + p.ev(&IndexSet::finite(w2.clone()))?));
            additive.record(same(&lhs, &rhs, "ev is not additive", || json!({ "p": dist_to_value(p), "W1": w1, "W2": w2 })));
        }
    }

    let mut tails = LawReport::new("tail-min-support");
    for start in [0u64, 1, 4, 50] {
        for ratio in [Rat::new(1, 2), Rat::new(1, 3), Rat::new(3, 4)] {
            let p = CountableDist::with_geometric_tail([], start, ratio)?;
            let got = eps_nat_with_cap(&p, cfg.enumeration_cap);
            let want = if start < cfg.enumeration_cap {
                Ok(start)
            } else {
                Err(Error::EnumerationCapExceeded(cfg.enumeration_cap))
            };
            tails.record(same(&got, &want, "tail min_support", || json!({ "p": dist_to_value(&p) })));
            let mass = p.ev(&IndexSet::all());
            tails.record(same(&mass, &Ok(Rat::one()), "tail mass", || json!({ "p": dist_to_value(&p) })));
        }
    }

    Ok(vec![left_unit, right_unit, norm, assoc, agree, functor, additive, tails])
}

/// Inner measures for the exhaustive Axiom 2 core.
fn axiom2_pool() -> Vec<CountableDist> {
    let h = Rat::new(1, 2);
    let t = Rat::new(1, 3);
    vec![
        CountableDist::dirac(0),
        CountableDist::dirac(2),
        CountableDist::from_weights([(0, h.clone()), (1, h.clone())]).expect("valid"),
        CountableDist::from_weights([(1, t.clone()), (3, Rat::one() - &t)]).expect("valid"),
        CountableDist::from_weights([(2, h.clone()), (3, h)]).expect("valid"),
        CountableDist::from_weights([(0, t.clone()), (1, t.clone()), (3, t)]).expect("valid"),
    ]
}

fn random_seq(rng: &mut CaseRng, samples: &[Point], len: usize) -> SeqMap {
    SeqMap::from_values((0..len).map(|_| samples[rng.random_range(0..samples.len())].clone()))
}

fn axiom_reports(space: &SpaceHandle, cfg: &SuiteConfig) -> Vec<LawReport> {
    let samples = space.carrier().samples();
    let mut a1 = LawReport::new(format!("axiom1:{}", space.name()));
    for a in sample_sequences(&samples, 64) {
        for j in 0..4 {
            a1.record(check_axiom1(space, &a, j));
        }
    }
    let mut a2 = LawReport::new(format!("axiom2:{}", space.name()));
    let pool = axiom2_pool();
    let seqs = sample_sequences(&samples, 2);
    for p in suite_grid(cfg) {
        let support: Vec<u64> = p.support().collect();
        let combos = pool.len().pow(support.len() as u32);
        for code in 0..combos {
            let choice = |j: u64| {
                let pos = support.iter().position(|s| *s == j)?;
                Some(pool[code / pool.len().pow(pos as u32) % pool.len()].clone())
            };
            for a in &seqs {
                record_result(&mut a2, check_axiom2(space, &p, choice, a));
            }
        }
    }
    let mut rng = grid::rng(cfg.seed ^ 0xa2);
    for _ in 0..cfg.random_cases {
        let p = grid::random_dist(&mut rng, 5, 4);
        let fam: Vec<CountableDist> = (0..6).map(|_| grid::random_dist(&mut rng, 5, 3)).collect();
        let a = random_seq(&mut rng, &samples, 6);
        record_result(&mut a2, check_axiom2(space, &p, |j| fam.get(j as usize).cloned(), &a));
    }
    vec![a1, a2]
}

/// The divergent instance: `p_i = 2^-(i+1)`, `r_i = 2^(i+1)`.
pub fn divergent_instance() -> (CountableDist, SeqMap) {
    let p = CountableDist::with_geometric_tail([], 0, Rat::new(1, 2)).expect("valid tail");
    let r = SeqMap::rule(DefaultRule::Geometric { scale: Rat::from_int(2), ratio: Rat::from_int(2) });
    (p, r)
}

/// `j` on the divergent instance: `j(Σ p_i r_i)` against `Σ p_i j(r_i)` in
/// the min-structure two-point space, where the sequence `j ∘ r` is the
/// constant 1 because every `r_i` is finite.
pub fn j_on_divergent_instance() -> Verdict {
    let (p, r) = divergent_instance();
    let j = j_map();
    let lhs = j.source().affine_sum(&p, &r).and_then(|x| j.apply(&x));
    let images = SeqMap::constant(Point::Nat(1));
    let rhs = j.target().affine_sum(&p, &images);
    same(&lhs, &rhs, "j does not preserve the divergent sum", || {
        json!({ "p": dist_to_value(&p), "r": r.to_json(), "lhs": show(&lhs), "rhs": show(&rhs) })
    })
}

fn scvx_axioms(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let spaces = standard_spaces();
    let mut laws: Vec<LawReport> = spaces.par_iter().flat_map(|s| axiom_reports(s, cfg)).collect();
    let budget = cfg.budget();

    let mut classify = LawReport::new("type-classification");
    for s in &spaces {
        let r = classify_probe(s, &budget)?;
        classify.record(same(&r.observed, &r.declared, "observed type differs from declared", || {
            json!({ "space": r.space, "report": serde_json::to_value(&r).unwrap_or_default() })
        }));
    }

    let mut compose = LawReport::new("transform-compose");
    let pool = axiom2_pool();
    let mut rng = grid::rng(cfg.seed ^ 0xc0);
    for s in spaces.iter().filter(|s| s.name() != "delta_N") {
        let samples = s.carrier().samples();
        for _ in 0..cfg.random_cases.clamp(1, 50) {
            let q: Vec<CountableDist> = (0..4).map(|_| pool[rng.random_range(0..pool.len())].clone()).collect();
            let a = random_seq(&mut rng, &samples, 4);
            record_result(&mut compose, check_transform_compose(&q, &a, s));
        }
    }

    let mut maps = LawReport::new("builtin-maps-affine");
    let sw = AffineMap::from_table(
        "sw",
        builtin_space("two_max")?,
        builtin_space("two_min")?,
        vec![(Point::Nat(0), Point::Nat(1)), (Point::Nat(1), Point::Nat(0))],
    );
    let eps = seq_to_affine(SeqMap::identity(), builtin_space("N_min")?);
    for m in [sw, iso_map(IsoDirection::SimplexToInterval), iso_map(IsoDirection::IntervalToSimplex), j_map(), eps] {
        maps.record(is_affine(&m, &budget).verdict);
    }
    for x in [Rat::zero(), Rat::new(1, 7), Rat::new(1, 3), Rat::one()] {
        let back = iso_delta2_interval(IsoDirection::IntervalToSimplex, &Point::Rat(x.clone()))
            .and_then(|d| iso_delta2_interval(IsoDirection::SimplexToInterval, &d));
        maps.record(same(&back, &Ok(Point::Rat(x.clone())), "iso round trip", || json!({ "x": x.to_wire() })));
    }

    let mut dg = LawReport::new("discrete-to-geometric-constant");
    for src in spaces.iter().filter(|s| s.tag() == TypeTag::Discrete) {
        for tgt in spaces.iter().filter(|s| s.tag() == TypeTag::Geometric) {
            let value = tgt.carrier().samples().swap_remove(1);
            let c = AffineMap::new("const", src.clone(), tgt.clone(), move |_| Ok(value.clone()));
            let got = dg_constancy_check(&c, &Budget { random_cases: 20, ..budget.clone() })?;
            dg.record(same(&got, &DgOutcome::Constant, "constant map rejected", || json!({ "source": src.name(), "target": tgt.name() })));
        }
    }

    let mut epi = LawReport::new("epi-cancellation");
    let nmin = builtin_space("N_min")?;
    let tables: Vec<Vec<u64>> = monotone_maps(3, 3).into_iter().chain([vec![2, 0, 1], vec![1, 1, 0]]).collect();
    for f in &tables {
        for g in &tables {
            let mk = |t: &Vec<u64>| {
                let t = t.clone();
                AffineMap::new("table", nmin.clone(), nmin.clone(), move |x| {
                    let i = x.as_nat().unwrap_or(0) as usize;
                    Ok(Point::Nat(*t.get(i).unwrap_or(&0)))
                })
            };
            let (_, v) = epi_cancellation(&mk(f), &mk(g), 3)?;
            epi.record(v);
        }
    }

    let mut divergence = LawReport::new("rinf-divergent-sum");
    let (p, r) = divergent_instance();
    let got = builtin_space("r_inf")?.affine_sum(&p, &r);
    divergence.record(same(&got, &Ok(Point::Inf), "divergent sum is not infinite", || json!({ "got": show(&got) })));
    let mut j_div = LawReport::new("j-affine-on-divergent-sum");
    j_div.record(j_on_divergent_instance());
    // The finite-prefix cases of the same instance are ordinary affine sums.
    let j = j_map();
    for n in 1..=6u64 {
        let prefix = CountableDist::from_weights(
            (0..n).map(|i| (i, if i + 1 < n { Rat::new(1, 2).pow(i as i32 + 1) } else { Rat::new(1, 2).pow(i as i32) })),
        )?;
        j_div.record(affine_case(&j, &prefix, &SeqMap::from_values((0..n).map(|i| Point::Rat(Rat::from_int(2).pow(i as i32 + 1))))));
    }

    laws.extend([classify, compose, maps, dg, epi, divergence, j_div]);
    Ok(laws)
}

fn algebra_laws(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let mut laws: Vec<LawReport> = standard_algebras()
        .par_iter()
        .flat_map(|a| algebra_law_reports(a, cfg.grid, cfg.random_cases.min(300), cfg.seed))
        .collect();

    let g = suite_grid(cfg);
    let mut routes = LawReport::for_algebra("emq-vs-ege", "eps_N");
    for q in grid::two_level(&g, cfg.grid) {
        let q = DistOverDist::new(q.iter().map(|(d, w)| (d.clone(), w.clone())))?;
        routes.record(check_eps_nat_assoc(&q));
    }
    let mut rng = grid::rng(cfg.seed ^ 0xe9);
    for _ in 0..cfg.random_cases {
        routes.record(check_eps_nat_assoc(&grid::random_two_level(&mut rng, &g, 4)));
    }

    let mut free = LawReport::for_algebra("free-equals-join", "eps_free");
    let alg = builtin_algebra("eps_free")?;
    for q in grid::two_level(&sparse_pool(&g, 12), cfg.grid) {
        let qd = DistOverDist::new(q.iter().map(|(d, w)| (d.clone(), w.clone())))?;
        let lhs = alg.apply(&q.map(|d| Point::Dist(d.clone())));
        let rhs = join(&qd).map(Point::Dist);
        free.record(same(&lhs, &rhs, "free algebra differs from join", || dist_over_dist_to_value(&qd)));
    }

    let mut swap = LawReport::new("swap-conjugation");
    for p in grid::grid_dists_on(&[0, 1], cfg.grid) {
        record_result(&mut swap, p.to_fin().and_then(|p| check_swap_conjugation(&p)));
    }

    laws.extend([routes, free, swap]);
    Ok(laws)
}

fn ns_equivalence(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let report = affine_iff_monotone(cfg.n, DEFAULT_EXHAUSTIVE_BOUND)?;
    let mut equiv = LawReport::new("monotone-iff-min-preserving");
    equiv.cases = report.functions;
    for d in &report.discrepancies {
        equiv.fail(Witness::new("monotonicity and min-preservation disagree", serde_json::to_value(d)?));
        equiv.cases -= 1;
    }
    let mut count = LawReport::new("monotone-count-binomial");
    let n = cfg.n as u64;
    let expected = binomial(2 * n - 1, n);
    count.record(same(&report.monotone_count, &expected, "monotone count differs from C(2n-1, n)", || {
        json!({ "n": n, "counted": report.monotone_count, "expected": expected })
    }));
    let listed = monotone_maps(cfg.n, n).len() as u64;
    count.record(same(&listed, &expected, "monotone enumeration size", || json!({ "listed": listed })));
    Ok(vec![equiv, count])
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn phi_commutes(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let nmin = builtin_space("N_min")?;
    let mut factor = LawReport::new("factorization");
    for n in 1..=cfg.n {
        for u in monotone_maps(n, n as u64) {
            let m = seq_to_affine(SeqMap::from_nats(&u), nmin.clone());
            let got = factor_through_eps(&m, n as u64);
            factor.record(same(&got, &Ok(SeqMap::from_nats(&u)), "factorization did not recover the table", || {
                json!({ "u": u, "got": format!("{got:?}") })
            }));
        }
    }
    let mut commute = LawReport::new("phi-commutes");
    let g = suite_grid(cfg);
    for phi in monotone_maps(cfg.n, cfg.n as u64) {
        let phi = SeqMap::from_nats(&phi);
        for p in &g {
            commute.record(check_phi_commutes(&phi, p));
        }
    }
    Ok(vec![factor, commute])
}

fn permutation_min(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let mut law = LawReport::new("permutation-min");
    for phi in permutations(4) {
        for p in suite_grid(cfg) {
            record_result(&mut law, check_permutation_min(&phi, &p));
        }
    }
    Ok(vec![law])
}

/// The seeded trees of the refinement suite: for each point-set size
/// `1..=8`, several random split scripts of depth up to 6.
pub fn refinement_trees(seed: u64) -> Result<Vec<RefinementTree>> {
    let mut rng = grid::rng(seed ^ 0x7e);
    let mut out = Vec::new();
    for size in 1..=8 {
        let pts = point_names(size);
        for depth in 1..=6 {
            for _ in 0..3 {
                let mut t = RefinementTree::trivial(pts.iter().cloned())?;
                for s in random_script(&mut rng, &pts, depth)? {
                    t = t.apply(&s)?;
                }
                out.push(t);
            }
        }
    }
    Ok(out)
}

fn refinement(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let trees = refinement_trees(cfg.seed)?;
    let mut merged: Vec<LawReport> = Vec::new();
    for reports in trees.par_iter().map(refinement_reports).collect::<Vec<_>>() {
        for r in reports {
            match merged.iter_mut().find(|m| m.law == r.law) {
                Some(m) => m.merge(r),
                None => merged.push(r),
            }
        }
    }
    Ok(merged)
}

fn amplitude(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let mut amps = amp_grid();
    let mut rng = grid::rng(cfg.seed ^ 0xa3);
    amps.extend((0..cfg.random_cases).map(|_| random_amp(&mut rng, 6, 4)));
    let phases = unit_phases();

    let mut norm = LawReport::new("l2-normalization");
    for p in &amps {
        let again = AmpDist::from_amplitudes(p.entries().to_vec());
        norm.record(same(&again, &Ok(p.clone()), "normalized family rejected", || p.to_json()));
        let doubled = AmpDist::from_amplitudes(p.entries().iter().map(|(i, z)| (*i, z * &CRat::real(Rat::from_int(2)))));
        norm.record(same(&doubled, &Err(Error::NormNotOne(Rat::from_int(4))), "scaled family accepted", || p.to_json()));
    }

    let mut phase = LawReport::new("phase-invariance");
    for p in &amps {
        for shift in 0..phases.len() {
            let rotated = p.with_phases(|i| phases[(i as usize + shift) % phases.len()].clone())?;
            phase.record(same(&l2_to_l1(&rotated), &l2_to_l1(p), "phase changed the weights", || rotated.to_json()));
        }
    }

    let mut factor = LawReport::new("combine-factors-through-l1");
    let mut min = LawReport::new("amp-min-support");
    let fams = sparse_pool(&suite_grid(cfg), 10);
    let sets = [
        IndexSet::finite([]),
        IndexSet::finite([0]),
        IndexSet::finite([1, 3]),
        IndexSet::below(3),
        IndexSet::all(),
        IndexSet::Cofinite([2].into()),
    ];
    for (k, p) in amps.iter().enumerate() {
        let fam = |j: u64| Some(fams[(k + 3 * j as usize) % fams.len()].clone());
        for u in &sets {
            let lhs = amp_combine(p, fam, u);
            let rhs = l2_to_l1(p).convex_combine(fam).and_then(|m| m.ev(u));
            factor.record(same(&lhs, &rhs, "amplitude evaluation does not factor", || json!({ "p": p.to_json() })));
        }
        let l1 = l2_to_l1(p);
        min.record(same(&Ok(amp_min_support(p)), &l1.min_support(cfg.enumeration_cap), "min support", || p.to_json()));
    }

    // Axioms for the ℕ_min structure with ℓ₂-derived weights.
    let mut axioms = LawReport::new("axioms-after-l2-reduction");
    let nmin = builtin_space("N_min")?;
    let pool = axiom2_pool();
    for (k, p) in amps.iter().enumerate().take(400) {
        let w = l2_to_l1(p);
        axioms.record(check_axiom1(&nmin, &SeqMap::identity(), amp_min_support(p)));
        let fam = |j: u64| Some(pool[(k + j as usize) % pool.len()].clone());
        record_result(&mut axioms, check_axiom2(&nmin, &w, fam, &SeqMap::identity()));
    }
    Ok(vec![norm, phase, factor, min, axioms])
}

fn round_trip(cfg: &SuiteConfig) -> Result<Vec<LawReport>> {
    let g = suite_grid(cfg);
    let mut rng = grid::rng(cfg.seed ^ 0x57);

    let mut dists = LawReport::new("distribution-json");
    let mut all = g.clone();
    all.extend((0..cfg.random_cases).map(|_| grid::random_dist(&mut rng, 40, 6)));
    for (start, ratio) in [(0, Rat::new(1, 2)), (3, Rat::new(2, 3)), (7, Rat::new(1, 9))] {
        let prefix: Vec<(u64, Rat)> = (0..start).map(|i| (i, Rat::new(1, 4 << i))).collect();
        all.push(CountableDist::with_geometric_tail(prefix, start, ratio)?);
    }
    for d in &all {
        let s1 = dist_to_value(d).to_string();
        let s2 = serde_json::from_str(&s1).map_err(Error::from).and_then(|v| dist_from_value(&v)).map(|d| dist_to_value(&d).to_string());
        dists.record(same(&s2, &Ok(s1.clone()), "distribution JSON does not round-trip", || json!({ "json": s1 })));
    }
    for q in grid::two_level(&sparse_pool(&g, 8), cfg.grid) {
        let q = DistOverDist::new(q.iter().map(|(d, w)| (d.clone(), w.clone())))?;
        let s1 = dist_over_dist_to_value(&q).to_string();
        let s2 = serde_json::from_str(&s1).map_err(Error::from).and_then(|v| dist_over_dist_from_value(&v)).map(|q| dist_over_dist_to_value(&q).to_string());
        dists.record(same(&s2, &Ok(s1.clone()), "two-level JSON does not round-trip", || json!({ "json": s1 })));
    }

    let mut amps = LawReport::new("amplitude-json");
    let mut list = amp_grid();
    list.extend((0..cfg.random_cases).map(|_| random_amp(&mut rng, 6, 4)));
    for p in &list {
        let s1 = p.to_json().to_string();
        let s2 = serde_json::from_str(&s1).map_err(Error::from).and_then(|v| AmpDist::from_json(&v)).map(|p| p.to_json().to_string());
        amps.record(same(&s2, &Ok(s1.clone()), "amplitude JSON does not round-trip", || json!({ "json": s1 })));
    }

    let mut trees = LawReport::new("tree-json");
    for t in refinement_trees(cfg.seed)? {
        let s1 = t.to_json().to_string();
        let s2 = serde_json::from_str(&s1).map_err(Error::from).and_then(|v| RefinementTree::from_json(&v)).map(|t| t.to_json().to_string());
        trees.record(same(&s2, &Ok(s1.clone()), "tree JSON does not round-trip", || json!({ "json": s1 })));
    }
    Ok(vec![dists, amps, trees])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let cfg = SuiteConfig { suites: vec!["nosuch".into()], ..Default::default() };
        assert_eq!(cfg.validate(), Err(Error::UnknownSuite("nosuch".into())));
        let cfg = SuiteConfig { grid: 0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(Error::BadConfig(_))));
        let cfg: SuiteConfig = serde_json::from_str(r#"{"suites": ["refinement"], "seed": 3}"#).unwrap();
        assert_eq!(cfg.random_cases, 1000);
        assert_eq!(cfg.selected(), vec!["refinement"]);
        assert_eq!(SuiteConfig::default().selected().len(), SUITES.len());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(9, 5), 126);
        assert_eq!(binomial(7, 4), 35);
        assert_eq!(binomial(1, 1), 1);
    }

    #[test]
    fn ns_suite_counts() {
        let cfg = SuiteConfig { n: 4, ..Default::default() };
        let r = run_suite("ns-equivalence", &cfg).unwrap();
        assert_eq!(r.law("monotone-iff-min-preserving").unwrap().cases, 256);
        assert!(r.passed());
    }

    #[test]
    fn j_fails_on_divergent_instance() {
        let v = j_on_divergent_instance();
        let w = v.witness().expect("known failure");
        assert_eq!(w.data["lhs"], json!(0));
        assert_eq!(w.data["rhs"], json!(1));
    }
}
