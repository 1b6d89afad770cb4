//! Finite-depth partition refinement: levels of atoms over a finite point
//! set, each obtained from the last by splitting one atom in two, with the
//! collapse map recording how new atom indices fold back onto old ones.
//!
//! Levels are numbered from 1. Level 1 is the single atom `X`; level `n`
//! has `n` atoms. When atom `i` splits, its parts take indices `i` and
//! `i + 1` and every later atom shifts up by one.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::CaseRng;
use crate::report::{LawReport, Verdict, Witness};
use crate::scvx::monotone_oracle;

pub type Atom = BTreeSet<String>;

/// One refinement step as written in tree files and scripts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Split {
    pub atom: usize,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementTree {
    points: Vec<String>,
    levels: Vec<Vec<Atom>>,
    /// `collapses[n - 1]` maps level `n + 1` atom indices to level `n`.
    collapses: Vec<Vec<u64>>,
    splits: Vec<Split>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeWire {
    points: Vec<String>,
    #[serde(default)]
    splits: Vec<Split>,
}

/// The collapse for splitting atom `i` of an `n`-atom level, as a table on
/// `{0..n}`: `k ↦ k` for `k ≤ i`, `i+1 ↦ i`, `k ↦ k-1` beyond.
pub fn phi_formula(i: u64, n: u64) -> Result<Vec<u64>> {
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, size: n });
    }
    let table: Vec<u64> = (0..=n).map(|k| if k <= i { k } else { k - 1 }).collect();
    debug_assert!(monotone_oracle(&table));
    Ok(table)
}

impl RefinementTree {
    /// The depth-1 tree on `points`.
    pub fn trivial(points: impl IntoIterator<Item = impl Into<String>>) -> Result<Self> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(Error::EmptyPart);
        }
        let all: Atom = points.iter().cloned().collect();
        if all.len() != points.len() {
            return Err(Error::NotAPartition("repeated point".into()));
        }
        Ok(RefinementTree { points, levels: vec![vec![all]], collapses: Vec::new(), splits: Vec::new() })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn splits(&self) -> &[Split] {
        &self.splits
    }

    fn level_index(&self, n: usize) -> Result<usize> {
        if n == 0 || n > self.depth() {
            return Err(Error::IndexOutOfRange { index: n as u64, size: self.depth() as u64 });
        }
        Ok(n - 1)
    }

    /// Atoms of level `n` in index order.
    pub fn level(&self, n: usize) -> Result<&[Atom]> {
        Ok(&self.levels[self.level_index(n)?])
    }

    /// Collapse from level `n + 1` to level `n`.
    pub fn collapse(&self, n: usize) -> Result<&[u64]> {
        self.level_index(n + 1)?;
        Ok(&self.collapses[n - 1])
    }

    /// Replaces the recorded collapse from level `n + 1` to `n`, leaving the
    /// atoms alone. Useful for exercising [`check_refinement_diagram`].
    pub fn with_collapse(mut self, n: usize, table: Vec<u64>) -> Result<Self> {
        self.level_index(n + 1)?;
        self.collapses[n - 1] = table;
        Ok(self)
    }

    /// Splits atom `atom` of the deepest level into `left` and `right`.
    pub fn refine(&self, atom: usize, left: &[String], right: &[String]) -> Result<Self> {
        let top = self.levels.last().expect("at least one level");
        let target = top.get(atom).ok_or(Error::IndexOutOfRange { index: atom as u64, size: top.len() as u64 })?;
        if left.is_empty() || right.is_empty() {
            return Err(Error::EmptyPart);
        }
        let l: Atom = left.iter().cloned().collect();
        let r: Atom = right.iter().cloned().collect();
        if l.len() != left.len() || r.len() != right.len() || !l.is_disjoint(&r) {
            return Err(Error::NotAPartition("parts overlap or repeat a point".into()));
        }
        let union: Atom = l.union(&r).cloned().collect();
        if &union != target {
            return Err(Error::NotAPartition(format!("parts do not cover atom {atom} exactly")));
        }
        let mut next = top[..atom].to_vec();
        next.push(l);
        next.push(r);
        next.extend_from_slice(&top[atom + 1..]);
        let mut out = self.clone();
        out.collapses.push(phi_formula(atom as u64, top.len() as u64)?);
        out.levels.push(next);
        out.splits.push(Split { atom, left: left.to_vec(), right: right.to_vec() });
        Ok(out)
    }

    pub fn apply(&self, split: &Split) -> Result<Self> {
        self.refine(split.atom, &split.left, &split.right)
    }

    /// Index of the atom of level `n` containing `x`.
    pub fn atoms_map(&self, n: usize, x: &str) -> Result<u64> {
        let level = self.level(n)?;
        level
            .iter()
            .position(|a| a.contains(x))
            .map(|k| k as u64)
            .ok_or_else(|| Error::UnknownPoint(x.to_string()))
    }

    /// The collapse from level `to` down to level `from` (`from ≤ to`), as
    /// the composite of the per-level collapses.
    pub fn composite_collapse(&self, from: usize, to: usize) -> Result<Vec<u64>> {
        self.level_index(from)?;
        self.level_index(to)?;
        if from > to {
            return Err(Error::IndexOutOfRange { index: from as u64, size: to as u64 });
        }
        let mut table: Vec<u64> = (0..to as u64).collect();
        for n in (from..to).rev() {
            let phi = &self.collapses[n - 1];
            for v in table.iter_mut() {
                *v = phi[*v as usize];
            }
        }
        Ok(table)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "points": self.points, "splits": self.splits })
    }

    /// Replays the splits of a tree document.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let wire: TreeWire = serde_json::from_value(v.clone())?;
        let mut tree = Self::trivial(wire.points)?;
        for s in &wire.splits {
            tree = tree.apply(s)?;
        }
        Ok(tree)
    }
}

/// `φ(Atoms_{n+1}(x)) = Atoms_n(x)`. Vacuous at the deepest level.
pub fn check_refinement_diagram(tree: &RefinementTree, n: usize, x: &str) -> Result<Verdict> {
    let here = tree.atoms_map(n, x)?;
    if n == tree.depth() {
        return Ok(Verdict::Pass);
    }
    let below = tree.atoms_map(n + 1, x)?;
    let phi = tree.collapse(n)?;
    let image = phi.get(below as usize).copied();
    Ok(Verdict::equal(&image, &Some(here), "collapse square does not commute", || {
        json!({ "level": n, "point": x, "deeper_atom": below, "collapsed": image, "atom": here })
    }))
}

/// One chosen atom index per level, starting at level 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomChain(pub Vec<usize>);

/// Intersection of a decreasing chain of atoms; errors with `BrokenChain(n)`
/// when the atom at level `n` is not inside the one above it.
pub fn chain_intersection(tree: &RefinementTree, chain: &AtomChain) -> Result<Atom> {
    if chain.0.is_empty() || chain.0.len() > tree.depth() {
        return Err(Error::IndexOutOfRange { index: chain.0.len() as u64, size: tree.depth() as u64 });
    }
    let mut acc: Option<Atom> = None;
    for (k, &i) in chain.0.iter().enumerate() {
        let level = tree.level(k + 1)?;
        let atom = level.get(i).ok_or(Error::IndexOutOfRange { index: i as u64, size: level.len() as u64 })?;
        if let Some(prev) = &acc {
            if !atom.is_subset(prev) {
                return Err(Error::BrokenChain(k + 1));
            }
        }
        acc = Some(match acc {
            None => atom.clone(),
            Some(prev) => prev.intersection(atom).cloned().collect(),
        });
    }
    Ok(acc.expect("nonempty chain"))
}

/// Every full-depth decreasing chain: one per atom of the deepest level.
pub fn all_chains(tree: &RefinementTree) -> Vec<AtomChain> {
    let deepest = tree.levels.last().expect("nonempty");
    deepest
        .iter()
        .map(|atom| {
            let x = atom.iter().next().expect("atoms are nonempty");
            AtomChain((1..=tree.depth()).map(|n| tree.atoms_map(n, x).expect("point of the tree") as usize).collect())
        })
        .collect()
}

/// All `2^k` unions of the `k` atoms of level `n`, by bitmask.
pub fn field_of_level(tree: &RefinementTree, n: usize) -> Result<Vec<Atom>> {
    let atoms = tree.level(n)?;
    Ok((0u64..1 << atoms.len())
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .flat_map(|(_, a)| a.iter().cloned())
                .collect()
        })
        .collect())
}

/// Closure of a family of subsets of `points` under complement and union.
pub fn field_is_closed(field: &[Atom], points: &[String]) -> bool {
    let all: Atom = points.iter().cloned().collect();
    let members: BTreeSet<&Atom> = field.iter().collect();
    field.iter().all(|u| {
        let complement: Atom = all.difference(u).cloned().collect();
        members.contains(&complement)
            && field.iter().all(|v| members.contains(&u.union(v).cloned().collect::<Atom>()))
    })
}

/// Every check of the refinement suite on one tree.
pub fn refinement_reports(tree: &RefinementTree) -> Vec<LawReport> {
    let mut squares = LawReport::new("refinement-square");
    for n in 1..=tree.depth() {
        for x in tree.points() {
            match check_refinement_diagram(tree, n, x) {
                Ok(v) => squares.record(v),
                Err(e) => squares.fail(Witness::new("square check errored", json!({ "error": e.to_string() }))),
            }
        }
    }

    let mut fields = LawReport::new("field-closure");
    for n in 1..=tree.depth() {
        let field = field_of_level(tree, n).expect("level exists");
        let distinct: BTreeSet<&Atom> = field.iter().collect();
        let ok = distinct.len() == 1 << n && field_is_closed(&field, tree.points());
        fields.record(Verdict::equal(&ok, &true, "field is not a closed family of 2^n sets", || {
            json!({ "level": n, "size": distinct.len() })
        }));
    }

    let mut collapses = LawReport::new("composite-collapse-monotone");
    for from in 1..=tree.depth() {
        for to in from..=tree.depth() {
            let table = tree.composite_collapse(from, to).expect("levels exist");
            collapses.record(Verdict::equal(&monotone_oracle(&table), &true, "composite collapse not monotone", || {
                json!({ "from": from, "to": to, "table": table })
            }));
        }
    }

    let mut chains = LawReport::new("chain-intersection");
    for chain in all_chains(tree) {
        let got = chain_intersection(tree, &chain);
        let ok = matches!(&got, Ok(s) if !s.is_empty());
        chains.record(Verdict::equal(&ok, &true, "decreasing chain has empty intersection", || {
            json!({ "chain": chain.0, "result": format!("{got:?}") })
        }));
    }
    vec![squares, fields, collapses, chains]
}

/// A random split script of `depth - 1` steps over `points`, always
/// choosing an atom with at least two points. Stops early if none remain.
pub fn random_script(rng: &mut CaseRng, points: &[String], depth: usize) -> Result<Vec<Split>> {
    let mut tree = RefinementTree::trivial(points.iter().cloned())?;
    let mut script = Vec::new();
    while tree.depth() < depth {
        let top = tree.level(tree.depth())?;
        let splittable: Vec<usize> = (0..top.len()).filter(|&i| top[i].len() >= 2).collect();
        let Some(&atom) = splittable.get(rng.random_range(0..splittable.len().max(1))) else {
            break;
        };
        let mut members: Vec<String> = top[atom].iter().cloned().collect();
        members.shuffle(rng);
        let cut = rng.random_range(1..members.len());
        let right = members.split_off(cut);
        members.sort();
        let mut right = right;
        right.sort();
        let split = Split { atom, left: members, right };
        tree = tree.apply(&split)?;
        script.push(split);
    }
    Ok(script)
}

/// Point names `x0, x1, ...`.
pub fn point_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(items: &[&str]) -> Vec<String> {
        items.iter().map(|x| x.to_string()).collect()
    }

    fn abc() -> RefinementTree {
        RefinementTree::trivial(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_formula(0, 2), Ok(vec![0, 0, 1]));
        assert_eq!(phi_formula(3, 4), Ok(vec![0, 1, 2, 3, 3]));
        assert_eq!(phi_formula(2, 2), Err(Error::IndexOutOfRange { index: 2, size: 2 }));
        let (f, g) = (phi_formula(1, 3).unwrap(), phi_formula(0, 4).unwrap());
        let comp: Vec<u64> = g.iter().map(|&k| f[k as usize]).collect();
        assert!(monotone_oracle(&comp));
    }

    #[test]
    fn refine_examples() {
        let t2 = abc().refine(0, &s(&["a"]), &s(&["b", "c"])).unwrap();
        assert_eq!(t2.level(2).unwrap().len(), 2);
        let t3 = t2.refine(1, &s(&["b"]), &s(&["c"])).unwrap();
        assert_eq!(t3.depth(), 3);
        assert_eq!(t3.collapse(2), Ok(&[0, 1, 1][..]));
        assert_eq!(field_of_level(&t3, 3).unwrap().len(), 8);
        assert_eq!(abc().refine(0, &[], &s(&["a", "b", "c"])), Err(Error::EmptyPart));
        assert!(matches!(abc().refine(0, &s(&["a"]), &s(&["b"])), Err(Error::NotAPartition(_))));
        assert!(matches!(abc().refine(0, &s(&["a", "b"]), &s(&["b", "c"])), Err(Error::NotAPartition(_))));
    }

    #[test]
    fn fields() {
        let t = abc();
        let f1 = field_of_level(&t, 1).unwrap();
        assert_eq!(f1, vec![Atom::new(), s(&["a", "b", "c"]).into_iter().collect()]);
        let t2 = t.refine(0, &s(&["a"]), &s(&["b", "c"])).unwrap();
        let f2 = field_of_level(&t2, 2).unwrap();
        assert_eq!(f2.len(), 4);
        assert!(field_is_closed(&f2, t2.points()));
        assert!(!field_is_closed(&f2[..3], t2.points()));
    }

    #[test]
    fn diagrams() {
        let t = abc().refine(0, &s(&["a"]), &s(&["b", "c"])).unwrap().refine(1, &s(&["b"]), &s(&["c"])).unwrap();
        for n in 1..=3 {
            for x in ["a", "b", "c"] {
                assert!(check_refinement_diagram(&t, n, x).unwrap().is_pass());
            }
        }
        assert!(check_refinement_diagram(&abc(), 1, "a").unwrap().is_pass());
        assert_eq!(check_refinement_diagram(&t, 1, "z"), Err(Error::UnknownPoint("z".into())));
        let bad = t.clone().with_collapse(2, vec![0, 0, 1]).unwrap();
        let v = check_refinement_diagram(&bad, 2, "b").unwrap();
        assert_eq!(v.witness().unwrap().data["point"], json!("b"));
        assert!(refinement_reports(&t).iter().all(LawReport::passed));
    }

    #[test]
    fn chains() {
        let t = abc().refine(0, &s(&["a"]), &s(&["b", "c"])).unwrap().refine(1, &s(&["b"]), &s(&["c"])).unwrap();
        let got = chain_intersection(&t, &AtomChain(vec![0, 1, 2])).unwrap();
        assert_eq!(got, s(&["c"]).into_iter().collect());
        assert_eq!(chain_intersection(&abc(), &AtomChain(vec![0])).unwrap().len(), 3);
        assert_eq!(chain_intersection(&t, &AtomChain(vec![0, 0, 2])), Err(Error::BrokenChain(3)));
        assert_eq!(all_chains(&t).len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let t = abc().refine(0, &s(&["a"]), &s(&["b", "c"])).unwrap();
        let v = t.to_json();
        assert_eq!(v, json!({"points": ["a", "b", "c"], "splits": [{"atom": 0, "left": ["a"], "right": ["b", "c"]}]}));
        assert_eq!(RefinementTree::from_json(&v).unwrap(), t);
        assert!(matches!(RefinementTree::from_json(&json!({"points": 3})), Err(Error::Parse(_))));
    }

    #[test]
    fn random_scripts_build_valid_trees() {
        let mut rng = crate::grid::rng(11);
        for _ in 0..20 {
            let pts = point_names(rng.random_range(1..=8));
            let script = random_script(&mut rng, &pts, 6).unwrap();
            let mut t = RefinementTree::trivial(pts.iter().cloned()).unwrap();
            for sp in &script {
                t = t.apply(sp).unwrap();
            }
            assert_eq!(t.depth(), pts.len().min(6));
            assert!(refinement_reports(&t).iter().all(LawReport::passed));
        }
    }
}
