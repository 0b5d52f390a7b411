//! Finite generalized metrics on k-multisets.
//!
//! A [`HMetricTable`] stores one value per multiset of size `k` drawn from a
//! [`PointSet`]. Values are addressed through canonical [`KMultiset`] keys, so
//! symmetry under permutation of the arguments holds by construction; raw
//! tuple imports that disagree on a multiset are rejected.

mod axioms;
mod builders;
mod io;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use axioms::{
    check_axiom, check_axiom_with, classify, classify_with, Axiom, AxiomReport, CheckOptions, Classification, Family,
    Relation, Witness, DEFAULT_CHECK_BUDGET,
};
pub use builders::{
    build_counterexample_k, build_counterexample_k_enriched, build_counterexample_n, build_example_binary,
    build_example_platforms, build_max_diameter, smallest_prime_factor, triangle_area_table,
};
pub use io::{TableEntry, TableFile};

/// Distinct, ordered point labels. Index order is the total order used for
/// canonical multiset keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl PointSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    /// Points labelled `prefix1, prefix2, …, prefix{n}`.
    pub fn numbered(prefix: &str, n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }
}

/// Canonical key of a k-multiset: point indices sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KMultiset(Vec<usize>);

impl KMultiset {
    /// Canonicalizes raw indices. No range check; see [`HMetricTable::key`].
    pub fn from_indices(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        Self(v)
    }

    /// `count` copies of each `(point, count)` pair.
    pub fn from_counts(parts: &[(usize, usize)]) -> Self {
        let mut v = Vec::new();
        for &(p, c) in parts {
            v.extend(std::iter::repeat_n(p, c));
        }
        Self::from_indices(v)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Distinct elements in ascending order.
    pub fn elements(&self) -> Vec<usize> {
        let mut e = self.0.clone();
        e.dedup();
        e
    }

    pub fn distinct_count(&self) -> usize {
        1 + self.0.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// `(point, multiplicity)` pairs in ascending point order.
    pub fn counts(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn labelled(&self, points: &PointSet) -> Vec<String> {
        self.0.iter().map(|&i| points.label(i).to_string()).collect()
    }

    pub fn display<'a>(&'a self, points: &'a PointSet) -> impl fmt::Display + 'a {
        DisplayMultiset { m: self, points }
    }
}

struct DisplayMultiset<'a> {
    m: &'a KMultiset,
    points: &'a PointSet,
}

impl fmt::Display for DisplayMultiset<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, &p) in self.m.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.points.label(p))?;
        }
        write!(f, ")")
    }
}

/// Ranks multisets of size `k` over `n` points in colex order of the
/// associated strictly increasing sequence `x_i + i`.
#[derive(Clone, Debug)]
struct MultisetIndex {
    // binom[a][b] = C(a, b) for a < n + k, b ≤ k
    binom: Vec<Vec<u128>>,
    total: usize,
}

impl MultisetIndex {
    fn new(n: usize, k: usize) -> Result<Self> {
        let rows = n + k;
        let mut binom = vec![vec![0u128; k + 1]; rows + 1];
        for a in 0..=rows {
            binom[a][0] = 1;
            for b in 1..=k.min(a) {
                binom[a][b] = binom[a - 1][b - 1].saturating_add(binom[a - 1][b]);
            }
        }
        let total = binom[n + k - 1][k];
        let total = usize::try_from(total).ok().filter(|&t| t <= (1usize << 40)).ok_or(Error::BudgetExceeded {
            what: "table size",
            needed: total,
            budget: 1u128 << 40,
        })?;
        Ok(Self { binom, total })
    }

    fn rank(&self, sorted: &[usize]) -> usize {
        let mut r: u128 = 0;
        for (i, &x) in sorted.iter().enumerate() {
            r += self.binom[x + i][i + 1];
        }
        r as usize
    }
}

/// Lexicographic enumeration of all k-multisets over `n` points.
pub fn multisets(n: usize, k: usize) -> impl Iterator<Item = KMultiset> {
    let mut cur: Option<Vec<usize>> = if n == 0 { None } else { Some(vec![0; k]) };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] + 1 < n {
                let v = next[i] + 1;
                for x in next.iter_mut().skip(i) {
                    *x = v;
                }
                cur = Some(next);
                break;
            }
        }
        Some(KMultiset(out))
    })
}

/// A generalized distance function `d : V^k → [0, ∞)` stored on canonical
/// multisets.
#[derive(Clone, Debug)]
pub struct HMetricTable {
    k: usize,
    points: PointSet,
    index: MultisetIndex,
    values: Vec<f64>,
}

impl HMetricTable {
    /// Builds a table by evaluating `f` on every canonical multiset.
    ///
    /// Fails if any value is negative or non-finite, or if a constant
    /// multiset maps to a non-zero value.
    pub fn from_fn<F>(k: usize, points: PointSet, mut f: F) -> Result<Self>
    where
        F: FnMut(&KMultiset) -> f64,
    {
        if k < 2 {
            return Err(Error::Parameter(format!("arity k must be at least 2, got {k}")));
        }
        let index = MultisetIndex::new(points.len(), k)?;
        let mut values = vec![0.0; index.total];
        for m in multisets(points.len(), k) {
            let r = index.rank(m.entries());
            values[r] = f(&m);
        }
        let table = Self { k, points, index, values };
        table.validate()?;
        Ok(table)
    }

    /// Builds a table from (possibly non-canonical) tuples. Every multiset
    /// must be covered; permutations of one multiset must agree exactly.
    pub fn from_entries<I>(k: usize, points: PointSet, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if k < 2 {
            return Err(Error::Parameter(format!("arity k must be at least 2, got {k}")));
        }
        let index = MultisetIndex::new(points.len(), k)?;
        let mut values: Vec<Option<f64>> = vec![None; index.total];
        for (tuple, d) in entries {
            if tuple.len() != k {
                return Err(Error::WrongArity { expected: k, got: tuple.len() });
            }
            if let Some(&bad) = tuple.iter().find(|&&p| p >= points.len()) {
                return Err(Error::PointOutOfRange(bad));
            }
            let key = KMultiset::from_indices(tuple);
            let r = index.rank(key.entries());
            match values[r] {
                Some(prev) if prev != d => {
                    return Err(Error::ConflictingEntries {
                        multiset: key.display(&points).to_string(),
                        first: prev,
                        second: d,
                    })
                }
                _ => values[r] = Some(d),
            }
        }
        let mut dense = vec![0.0; index.total];
        for m in multisets(points.len(), k) {
            let r = index.rank(m.entries());
            dense[r] = values[r]
                .ok_or_else(|| Error::InvalidTable(format!("missing entry for multiset {}", m.display(&points))))?;
        }
        let table = Self { k, points, index, values: dense };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        for m in self.multisets() {
            let v = self.get(&m);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidTable(format!(
                    "d{} = {v} is not a non-negative real",
                    m.display(&self.points)
                )));
            }
            if m.is_constant() && v != 0.0 {
                return Err(Error::InvalidTable(format!(
                    "constant multiset {} has non-zero value {v}",
                    m.display(&self.points)
                )));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Number of stored multisets, `C(n + k - 1, k)`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Canonical key for a tuple of labels.
    pub fn canonical_key<S: AsRef<str>>(&self, tuple: &[S]) -> Result<KMultiset> {
        canonical_key(&self.points, self.k, tuple)
    }

    /// Canonical key for a tuple of point indices.
    pub fn key(&self, tuple: &[usize]) -> Result<KMultiset> {
        if tuple.len() != self.k {
            return Err(Error::WrongArity { expected: self.k, got: tuple.len() });
        }
        if let Some(&bad) = tuple.iter().find(|&&p| p >= self.n()) {
            return Err(Error::PointOutOfRange(bad));
        }
        Ok(KMultiset::from_indices(tuple.to_vec()))
    }

    /// Value of a canonical multiset. Panics on a key of the wrong shape.
    pub fn get(&self, m: &KMultiset) -> f64 {
        debug_assert_eq!(m.len(), self.k);
        self.values[self.index.rank(m.entries())]
    }

    /// Value of an arbitrary index tuple (any order).
    pub fn distance(&self, tuple: &[usize]) -> Result<f64> {
        Ok(self.get(&self.key(tuple)?))
    }

    /// Value of a label tuple (any order).
    pub fn lookup<S: AsRef<str>>(&self, tuple: &[S]) -> Result<f64> {
        Ok(self.get(&self.canonical_key(tuple)?))
    }

    pub fn multisets(&self) -> impl Iterator<Item = KMultiset> {
        multisets(self.n(), self.k)
    }

    /// A copy with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Parameter(format!("scale factor must be positive, got {factor}")));
        }
        let mut t = self.clone();
        for v in &mut t.values {
            *v *= factor;
        }
        Ok(t)
    }

    /// A copy with `f` applied to every non-constant value.
    pub fn map_values<F: FnMut(&KMultiset, f64) -> f64>(&self, mut f: F) -> Result<Self> {
        Self::from_fn(self.k, self.points.clone(), |m| {
            let v = self.get(m);
            if m.is_constant() {
                v
            } else {
                f(m, v)
            }
        })
    }
}

/// Canonical key for a tuple of point labels: sorted by point order, so every
/// permutation maps to the same key.
pub fn canonical_key<S: AsRef<str>>(points: &PointSet, k: usize, tuple: &[S]) -> Result<KMultiset> {
    if tuple.len() != k {
        return Err(Error::WrongArity { expected: k, got: tuple.len() });
    }
    let idx = tuple.iter().map(|s| points.index_of(s.as_ref())).collect::<Result<Vec<_>>>()?;
    Ok(KMultiset::from_indices(idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> PointSet {
        PointSet::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn canonical_key_sorts() {
        let p = abc();
        let key = |t: &[&str]| canonical_key(&p, 4, t).unwrap().labelled(&p);
        assert_eq!(key(&["b", "a", "a", "c"]), ["a", "a", "b", "c"]);
        assert_eq!(key(&["a", "a", "a", "a"]), ["a", "a", "a", "a"]);
        assert_eq!(key(&["c", "b", "c", "b"]), ["b", "b", "c", "c"]);
    }

    #[test]
    fn canonical_key_errors() {
        let p = abc();
        assert!(matches!(canonical_key(&p, 4, &["a", "b"]), Err(Error::WrongArity { expected: 4, got: 2 })));
        assert!(matches!(canonical_key(&p, 2, &["a", "z"]), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn point_set_rejects_duplicates() {
        assert!(matches!(PointSet::new(["a", "a"]), Err(Error::DuplicateLabel(_))));
        assert!(matches!(PointSet::new(Vec::<String>::new()), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn multiset_enumeration_is_complete_and_ranked_densely() {
        for (n, k) in [(1, 3), (2, 4), (3, 4), (5, 3), (4, 6)] {
            let all: Vec<_> = multisets(n, k).collect();
            let idx = MultisetIndex::new(n, k).unwrap();
            assert_eq!(all.len(), idx.total);
            let mut ranks: Vec<_> = all.iter().map(|m| idx.rank(m.entries())).collect();
            ranks.sort_unstable();
            assert_eq!(ranks, (0..idx.total).collect::<Vec<_>>());
            assert!(all.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
        }
    }

    #[test]
    fn import_rejects_conflicting_permutations() {
        let p = PointSet::new(["a", "b"]).unwrap();
        let entries = vec![(vec![0, 0], 0.0), (vec![1, 1], 0.0), (vec![0, 1], 1.0), (vec![1, 0], 2.0)];
        assert!(matches!(HMetricTable::from_entries(2, p, entries), Err(Error::ConflictingEntries { .. })));
    }

    #[test]
    fn import_requires_full_coverage_and_zero_diagonal() {
        let p = PointSet::new(["a", "b"]).unwrap();
        let missing = vec![(vec![0, 0], 0.0), (vec![0, 1], 1.0)];
        assert!(matches!(HMetricTable::from_entries(2, p.clone(), missing), Err(Error::InvalidTable(_))));
        let diag = vec![(vec![0, 0], 0.5), (vec![1, 1], 0.0), (vec![0, 1], 1.0)];
        assert!(HMetricTable::from_entries(2, p, diag).is_err());
    }

    #[test]
    fn permutation_lookups_agree() {
        let t = build_example_platforms();
        let p = t.points().clone();
        for m in t.multisets() {
            let mut labels = m.labelled(&p);
            let v = t.get(&m);
            labels.reverse();
            assert_eq!(t.lookup(&labels).unwrap(), v);
            labels.rotate_left(1);
            assert_eq!(t.lookup(&labels).unwrap(), v);
        }
    }
}
