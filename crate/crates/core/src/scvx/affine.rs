//! Countably affine maps and budgeted checkers for them.
//!
//! Affineness quantifies over all measures and all sequences, so it is
//! checked rather than proven: an exhaustive core (every grid measure on
//! `{0..3}` against every length-4 sequence of carrier samples, up to a
//! budget) followed by seeded random cases.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid;
use crate::json::dist_to_value;
use crate::measure::CountableDist;
use crate::rat::Rat;
use crate::report::{Verdict, Witness};

use super::point::{Carrier, Point, SeqMap};
use super::space::{builtin_space, show, SpaceHandle, TypeTag};

pub type ActionFn = dyn Fn(&Point) -> Result<Point> + Send + Sync;

/// A function between spaces, claimed to preserve affine sums.
#[derive(Clone)]
pub struct AffineMap {
    name: String,
    source: SpaceHandle,
    target: SpaceHandle,
    action: Arc<ActionFn>,
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineMap({}: {} -> {})", self.name, self.source.name(), self.target.name())
    }
}

impl AffineMap {
    pub fn new(
        name: impl Into<String>,
        source: SpaceHandle,
        target: SpaceHandle,
        action: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> Self {
        AffineMap { name: name.into(), source, target, action: Arc::new(action) }
    }

    /// A map given pointwise on a finite carrier.
    pub fn from_table(name: impl Into<String>, source: SpaceHandle, target: SpaceHandle, table: Vec<(Point, Point)>) -> Self {
        Self::new(name, source, target, move |x| {
            table
                .iter()
                .find(|(k, _)| k == x)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::OutOfCarrier(x.to_string()))
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &SpaceHandle {
        &self.source
    }

    pub fn target(&self) -> &SpaceHandle {
        &self.target
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.source.carrier().check(x)?;
        (self.action)(x)
    }
}

/// Size limits for the budgeted checkers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Cap on the number of length-4 sample sequences in the exhaustive core.
    pub sequences: usize,
    pub random_cases: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { sequences: 256, random_cases: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinenessReport {
    pub map: String,
    pub cases: u64,
    pub verdict: Verdict,
}

/// Test sequences over `samples`: first `a_i = samples[i mod s]`, then the
/// remaining length-4 tuples in lexicographic order, up to `limit` total.
pub fn sample_sequences(samples: &[Point], limit: usize) -> Vec<SeqMap> {
    let s = samples.len();
    let cyclic: Vec<usize> = (0..4).map(|i| i % s).collect();
    let mut out = vec![SeqMap::from_values(cyclic.iter().map(|&k| samples[k].clone()))];
    let total = s.pow(4);
    for code in 0..total {
        if out.len() >= limit {
            break;
        }
        let idx: Vec<usize> = (0..4).map(|pos| code / s.pow(3 - pos as u32) % s).collect();
        if idx != cyclic {
            out.push(SeqMap::from_values(idx.iter().map(|&k| samples[k].clone())));
        }
    }
    out
}

pub(crate) fn random_sequence(rng: &mut grid::CaseRng, samples: &[Point], len: usize) -> SeqMap {
    SeqMap::from_values((0..len).map(|_| samples[rng.random_range(0..samples.len())].clone()))
}

/// `m(Σ p_i a_i) = Σ p_i m(a_i)` for one `(p, a)`.
pub fn affine_case(m: &AffineMap, p: &CountableDist, a: &SeqMap) -> Verdict {
    let lhs = m.source.affine_sum(p, a).and_then(|x| m.apply(&x));
    let rhs = a.map_prefix(a.table_end(), |x| m.apply(x)).and_then(|ma| m.target.affine_sum(p, &ma));
    let ok = matches!((&lhs, &rhs), (Ok(l), Ok(r)) if l == r);
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail(Witness::new(
            format!("{} does not preserve the affine sum", m.name),
            json!({ "p": dist_to_value(p), "a": a.to_json(), "lhs": show(&lhs), "rhs": show(&rhs) }),
        ))
    }
}

/// Budgeted affineness check; stops at the first counterexample.
pub fn is_affine(m: &AffineMap, budget: &Budget) -> AffinenessReport {
    let samples = m.source.carrier().samples();
    let grid = grid::standard_grid();
    let mut cases = 0;
    let done = |cases, verdict| AffinenessReport { map: m.name.clone(), cases, verdict };
    for a in sample_sequences(&samples, budget.sequences) {
        for p in &grid {
            cases += 1;
            let v = affine_case(m, p, &a);
            if !v.is_pass() {
                return done(cases, v);
            }
        }
    }
    let mut rng = grid::rng(budget.seed);
    for _ in 0..budget.random_cases {
        let p = grid::random_dist(&mut rng, 7, 4);
        let a = random_sequence(&mut rng, &samples, 8);
        cases += 1;
        let v = affine_case(m, &p, &a);
        if !v.is_pass() {
            return done(cases, v);
        }
    }
    done(cases, Verdict::Pass)
}

/// `⟨a⟩: Δ_ℕ → A`, the affine map sending `δ_i` to `a_i`.
pub fn seq_to_affine(a: SeqMap, target: SpaceHandle) -> AffineMap {
    let source = builtin_space("delta_N").expect("builtin");
    let t = target.clone();
    AffineMap::new(format!("<a> into {}", target.name()), source, target, move |x| {
        let p = x.as_dist().ok_or_else(|| Error::OutOfCarrier(x.to_string()))?;
        t.affine_sum(p, &a)
    })
}

/// `b_i = Σ_j Q^i_j a_j`, so that `⟨a⟩ ∘ ⟨Q⟩ = ⟨b⟩`.
pub fn transform_compose(q: &[CountableDist], a: &SeqMap, target: &SpaceHandle) -> Result<SeqMap> {
    let values = q.iter().map(|qi| target.affine_sum(qi, a)).collect::<Result<Vec<_>>>()?;
    Ok(SeqMap::from_values(values))
}

/// Checks `⟨a⟩(⟨Q⟩(p)) = ⟨b⟩(p)` for `p` a Dirac measure at every index of
/// `q` and for every grid measure supported inside `q`'s index range.
pub fn check_transform_compose(q: &[CountableDist], a: &SeqMap, target: &SpaceHandle) -> Result<Verdict> {
    let b = transform_compose(q, a, target)?;
    let delta = builtin_space("delta_N").expect("builtin");
    let qseq = SeqMap::from_values(q.iter().cloned().map(Point::Dist));
    let n = q.len() as u64;
    let probes = (0..n)
        .map(CountableDist::dirac)
        .chain(grid::standard_grid().into_iter().filter(|p| p.support().all(|i| i < n)));
    for p in probes {
        let moved = delta.affine_sum(&p, &qseq)?;
        let lhs = target.affine_sum(moved.as_dist().expect("simplex point"), a);
        let rhs = target.affine_sum(&p, &b);
        if lhs != rhs {
            return Ok(Verdict::Fail(Witness::new(
                "<a> after <Q> differs from <b>",
                json!({ "p": dist_to_value(&p), "lhs": show(&lhs), "rhs": show(&rhs) }),
            )));
        }
    }
    Ok(Verdict::Pass)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub space: String,
    pub declared: TypeTag,
    pub observed: TypeTag,
    pub consistent: bool,
    /// A sequence on which interior sums vary (refutes discrete type).
    pub nonconstant: Option<Witness>,
    /// Two weights giving the same binary sum of distinct points (refutes
    /// embedding in a vector space).
    pub noninjective: Option<Witness>,
}

/// Probes the discrete/geometric/mixed trichotomy on samples.
///
/// Discrete: for each fixed sequence the sum over strictly positive
/// weightings is constant. Geometric: `r ↦ (1-r)x + ry` is injective on
/// `(0,1)` for distinct `x, y`, as it must be inside a vector space.
/// Neither ⇒ mixed.
pub fn classify_probe(space: &SpaceHandle, budget: &Budget) -> Result<ClassifyReport> {
    let samples = space.carrier().samples();
    let mut rng = grid::rng(budget.seed);
    let mut interior: Vec<CountableDist> =
        grid::standard_grid().into_iter().filter(|p| p.entries().len() == 4).collect();
    for _ in 0..budget.random_cases.clamp(1, 64) {
        let w = grid::random_weights(&mut rng, 4, 9);
        interior.push(CountableDist::from_weights((0..4).zip(w))?);
    }
    let mut nonconstant = None;
    'outer: for a in sample_sequences(&samples, budget.sequences) {
        let first = space.affine_sum(&interior[0], &a)?;
        for p in &interior[1..] {
            let v = space.affine_sum(p, &a)?;
            if v != first {
                nonconstant = Some(Witness::new(
                    "interior sums vary",
                    json!({
                        "a": a.to_json(),
                        "p1": dist_to_value(&interior[0]), "v1": first.to_json(),
                        "p2": dist_to_value(p), "v2": v.to_json(),
                    }),
                ));
                break 'outer;
            }
        }
    }
    let mut weights: Vec<Rat> = grid::grid_weights(4).into_iter().filter(|r| !r.is_one()).collect();
    for _ in 0..budget.random_cases.clamp(1, 64) {
        let d = rng.random_range(2..=12i64);
        weights.push(Rat::new(rng.random_range(1..d), d));
    }
    weights.sort();
    weights.dedup();
    let mut noninjective = None;
    'pairs: for (i, x) in samples.iter().enumerate() {
        for y in &samples[i + 1..] {
            let mut seen: Vec<(Rat, Point)> = Vec::new();
            for r in &weights {
                let v = space.binary_sum(r, x, y)?;
                if let Some((r0, _)) = seen.iter().find(|(_, v0)| *v0 == v) {
                    noninjective = Some(Witness::new(
                        "distinct weights give the same binary sum",
                        json!({ "x": x.to_json(), "y": y.to_json(), "r1": r0.to_wire(), "r2": r.to_wire(), "value": v.to_json() }),
                    ));
                    break 'pairs;
                }
                seen.push((r.clone(), v));
            }
        }
    }
    let observed = match (&nonconstant, &noninjective) {
        (None, _) => TypeTag::Discrete,
        (Some(_), None) => TypeTag::Geometric,
        (Some(_), Some(_)) => TypeTag::Mixed,
    };
    Ok(ClassifyReport {
        space: space.name().to_string(),
        declared: space.tag(),
        observed,
        consistent: observed == space.tag(),
        nonconstant,
        noninjective,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum DgOutcome {
    /// Affine on the budget and constant on the samples.
    Constant,
    /// Fails affineness, so it is not a morphism at all.
    NotAffine(Witness),
    /// Passes the budgeted affineness suite yet is not constant.
    Counterexample(Witness),
}

/// Maps from a discrete-type space to a geometric-type space that pass
/// affineness must be constant.
pub fn dg_constancy_check(m: &AffineMap, budget: &Budget) -> Result<DgOutcome> {
    if m.source.tag() != TypeTag::Discrete || m.target.tag() != TypeTag::Geometric {
        return Err(Error::TypeMismatch(format!(
            "expected discrete source and geometric target, got {:?} -> {:?}",
            m.source.tag(),
            m.target.tag()
        )));
    }
    let report = is_affine(m, budget);
    if let Verdict::Fail(w) = report.verdict {
        return Ok(DgOutcome::NotAffine(w));
    }
    let samples = m.source.carrier().samples();
    let first = m.apply(&samples[0])?;
    for x in &samples[1..] {
        let v = m.apply(x)?;
        if v != first {
            return Ok(DgOutcome::Counterexample(Witness::new(
                "affine map from discrete to geometric space is not constant",
                json!({ "x1": samples[0].to_json(), "m1": first.to_json(), "x2": x.to_json(), "m2": v.to_json() }),
            )));
        }
    }
    Ok(DgOutcome::Constant)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IsoDirection {
    /// `(1-r)δ₀ + rδ₁ ↦ r`.
    SimplexToInterval,
    /// `r ↦ (1-r)δ₀ + rδ₁`.
    IntervalToSimplex,
}

/// The isomorphism `Δ₂ ≅ [0,1]` and its inverse.
pub fn iso_delta2_interval(direction: IsoDirection, x: &Point) -> Result<Point> {
    let out = || Error::OutOfCarrier(x.to_string());
    match direction {
        IsoDirection::SimplexToInterval => {
            if !Carrier::Simplex(Some(2)).contains(x) {
                return Err(out());
            }
            Ok(Point::Rat(x.as_dist().ok_or_else(out)?.weight(1)))
        }
        IsoDirection::IntervalToSimplex => {
            let r = x.as_rat().filter(|r| r.in_unit_interval()).ok_or_else(out)?;
            let d = CountableDist::from_weights([(0, Rat::one() - r), (1, r.clone())])?;
            Ok(Point::Dist(d))
        }
    }
}

pub fn iso_map(direction: IsoDirection) -> AffineMap {
    let simplex = builtin_space("delta_n(2)").expect("builtin");
    let interval = builtin_space("unit_interval").expect("builtin");
    let f = move |x: &Point| iso_delta2_interval(direction, x);
    match direction {
        IsoDirection::SimplexToInterval => AffineMap::new("delta2->[0,1]", simplex, interval, f),
        IsoDirection::IntervalToSimplex => AffineMap::new("[0,1]->delta2", interval, simplex, f),
    }
}

/// `j(u) = 1` for finite `u`, `j(∞) = 0`.
pub fn rinf_j_map(x: &Point) -> Result<Point> {
    match x {
        Point::Rat(_) => Ok(Point::Nat(1)),
        Point::Inf => Ok(Point::Nat(0)),
        _ => Err(Error::OutOfCarrier(x.to_string())),
    }
}

/// [`rinf_j_map`] as a map `ℝ_∞ → 𝟚` (min structure).
pub fn j_map() -> AffineMap {
    AffineMap::new(
        "j",
        builtin_space("r_inf").expect("builtin"),
        builtin_space("two_min").expect("builtin"),
        rinf_j_map,
    )
}

/// Cancellation of `ε_ℕ` on the right: if `f(ε(δ_i)) = g(ε(δ_i))` for
/// `i < range` then `f = g` on `0..range`. Returns whether the hypothesis
/// held and the verdict on the conclusion.
pub fn epi_cancellation(f: &AffineMap, g: &AffineMap, range: u64) -> Result<(bool, Verdict)> {
    for i in 0..range {
        let k = CountableDist::dirac(i).min_support(crate::measure::DEFAULT_ENUMERATION_CAP)?;
        if f.apply(&Point::Nat(k))? != g.apply(&Point::Nat(k))? {
            return Ok((false, Verdict::Pass));
        }
    }
    for i in 0..range {
        let (a, b) = (f.apply(&Point::Nat(i))?, g.apply(&Point::Nat(i))?);
        if a != b {
            return Ok((true, Verdict::Fail(Witness::new(
                "maps agree after the barycenter but differ on a point",
                json!({ "i": i, "f": a.to_json(), "g": b.to_json() }),
            ))));
        }
    }
    Ok((true, Verdict::Pass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use crate::scvx::space::standard_spaces;

    fn nat_map(name: &str, f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> AffineMap {
        let n = builtin_space("N_min").unwrap();
        AffineMap::new(name, n.clone(), n, move |x| Ok(Point::Nat(f(x.as_nat().unwrap()))))
    }

    #[test]
    fn swap_two_max_to_two_min_is_affine() {
        let sw = AffineMap::from_table(
            "sw",
            builtin_space("two_max").unwrap(),
            builtin_space("two_min").unwrap(),
            vec![(Point::Nat(0), Point::Nat(1)), (Point::Nat(1), Point::Nat(0))],
        );
        assert!(is_affine(&sw, &Budget::default()).verdict.is_pass());
    }

    #[test]
    fn parity_on_n_min_fails_with_expected_witness() {
        let report = is_affine(&nat_map("mod2", |i| i % 2), &Budget::default());
        let w = report.verdict.witness().expect("not affine");
        assert_eq!(w.data["p"], json!({"weights": [[1, "1/2"], [2, "1/2"]]}));
        assert_eq!(w.data["lhs"], json!(1));
        assert_eq!(w.data["rhs"], json!(0));
        // i ↦ i² is monotone and passes.
        assert!(is_affine(&nat_map("sq", |i| i * i), &Budget::default()).verdict.is_pass());
    }

    #[test]
    fn identity_is_affine_everywhere() {
        for s in standard_spaces() {
            let id = AffineMap::new("id", s.clone(), s.clone(), |x| Ok(x.clone()));
            let budget = Budget { sequences: 64, random_cases: 50, seed: 1 };
            let r = is_affine(&id, &budget);
            assert!(r.verdict.is_pass(), "{}: {:?}", s.name(), r.verdict);
        }
    }

    #[test]
    fn seq_to_affine_examples() {
        let eps = seq_to_affine(SeqMap::identity(), builtin_space("N_min").unwrap());
        let p = CountableDist::from_weights([(2, rat!(1, 2)), (5, rat!(1, 2))]).unwrap();
        assert_eq!(eps.apply(&Point::Dist(p.clone())), Ok(Point::Nat(2)));
        let id = seq_to_affine(SeqMap::dirac(), builtin_space("delta_N").unwrap());
        assert_eq!(id.apply(&Point::Dist(p.clone())), Ok(Point::Dist(p.clone())));
        let c = seq_to_affine(SeqMap::constant(Point::Nat(7)), builtin_space("N_min").unwrap());
        assert_eq!(c.apply(&Point::Dist(p)), Ok(Point::Nat(7)));
        assert!(is_affine(&eps, &Budget { sequences: 8, random_cases: 20, seed: 0 }).verdict.is_pass());
    }

    #[test]
    fn transform_compose_examples() {
        let unit = builtin_space("unit_interval").unwrap();
        let a = SeqMap::from_values([Point::Rat(rat!(0)), Point::Rat(rat!(1))]);
        let diracs: Vec<_> = (0..2).map(CountableDist::dirac).collect();
        assert_eq!(transform_compose(&diracs, &a, &unit).unwrap(), a);
        let q0 = CountableDist::from_weights([(0, rat!(1, 2)), (1, rat!(1, 2))]).unwrap();
        let b = transform_compose(&[q0.clone(), CountableDist::dirac(1)], &a, &unit).unwrap();
        assert_eq!(b.get(0), Ok(Point::Rat(rat!(1, 2))));
        let consts = vec![CountableDist::dirac(0); 3];
        let b = transform_compose(&consts, &a, &unit).unwrap();
        assert!((0..3).all(|i| b.get(i) == a.get(0)));
        assert!(check_transform_compose(&[q0, CountableDist::dirac(1)], &a, &unit).unwrap().is_pass());
    }

    #[test]
    fn classification_matches_declared_tags() {
        let budget = Budget { sequences: 64, random_cases: 16, seed: 3 };
        for s in standard_spaces() {
            let r = classify_probe(&s, &budget).unwrap();
            assert!(r.consistent, "{}: {r:?}", s.name());
        }
        let r = classify_probe(&builtin_space("unit_interval").unwrap(), &budget).unwrap();
        assert_eq!(r.observed, TypeTag::Geometric);
        let r = classify_probe(&builtin_space("r_inf").unwrap(), &budget).unwrap();
        assert_eq!(r.observed, TypeTag::Mixed);
        assert_eq!(r.noninjective.unwrap().data["value"], json!("inf"));
    }

    #[test]
    fn dg_constancy() {
        let two = builtin_space("two_min").unwrap();
        let unit = builtin_space("unit_interval").unwrap();
        let half = Point::Rat(rat!(1, 2));
        let c = AffineMap::new("const", two.clone(), unit.clone(), move |_| Ok(half.clone()));
        assert_eq!(dg_constancy_check(&c, &Budget::default()).unwrap(), DgOutcome::Constant);

        let incl = AffineMap::from_table(
            "incl",
            two,
            unit,
            vec![(Point::Nat(0), Point::Rat(rat!(0))), (Point::Nat(1), Point::Rat(rat!(1)))],
        );
        match dg_constancy_check(&incl, &Budget::default()).unwrap() {
            DgOutcome::NotAffine(w) => {
                assert_eq!(w.data["p"], json!({"weights": [[0, "1/2"], [1, "1/2"]]}));
                assert_eq!(w.data["lhs"], json!("0/1"));
                assert_eq!(w.data["rhs"], json!("1/2"));
            }
            other => panic!("{other:?}"),
        }

        let nmin = builtin_space("N_min").unwrap();
        let delta = builtin_space("delta_N").unwrap();
        let c = AffineMap::new("const", nmin, delta, |_| Ok(Point::Dist(CountableDist::dirac(2))));
        assert_eq!(dg_constancy_check(&c, &Budget::default()).unwrap(), DgOutcome::Constant);
    }

    #[test]
    fn iso_examples() {
        use IsoDirection::*;
        let p = CountableDist::from_weights([(0, rat!(2, 3)), (1, rat!(1, 3))]).unwrap();
        assert_eq!(iso_delta2_interval(SimplexToInterval, &Point::Dist(p)), Ok(Point::Rat(rat!(1, 3))));
        assert_eq!(
            iso_delta2_interval(IntervalToSimplex, &Point::Rat(rat!(0))),
            Ok(Point::Dist(CountableDist::dirac(0)))
        );
        for x in [rat!(0), rat!(1, 7), rat!(1)] {
            let back = iso_delta2_interval(IntervalToSimplex, &Point::Rat(x.clone())).unwrap();
            assert_eq!(iso_delta2_interval(SimplexToInterval, &back), Ok(Point::Rat(x)));
        }
        assert!(iso_delta2_interval(IntervalToSimplex, &Point::Rat(rat!(3, 2))).is_err());
        assert!(iso_delta2_interval(SimplexToInterval, &Point::Dist(CountableDist::dirac(2))).is_err());
        for dir in [SimplexToInterval, IntervalToSimplex] {
            assert!(is_affine(&iso_map(dir), &Budget::default()).verdict.is_pass());
        }
    }

    #[test]
    fn j_map_examples() {
        assert_eq!(rinf_j_map(&Point::Rat(rat!(5, 2))), Ok(Point::Nat(1)));
        assert_eq!(rinf_j_map(&Point::Inf), Ok(Point::Nat(0)));
        assert!(is_affine(&j_map(), &Budget::default()).verdict.is_pass());
    }

    #[test]
    fn epi_cancellation_holds_for_samples() {
        let f = nat_map("f", |i| i / 2);
        let g = nat_map("g", |i| i / 2);
        assert_eq!(epi_cancellation(&f, &g, 10).unwrap(), (true, Verdict::Pass));
        let h = nat_map("h", |i| i);
        assert!(!epi_cancellation(&f, &h, 10).unwrap().0);
    }
}
