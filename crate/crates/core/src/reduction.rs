//! Pairwise metric induced by an H-metric, and the sandwich bound
//! `(1/k³) · Σ_{i<j} d₂(v_i, v_j) ≤ d_H(v_1, …, v_k) ≤ Σ_{i<j} d₂(v_i, v_j)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmetrics::{check_axiom, Axiom, HMetricTable, KMultiset, PointSet};
use crate::tol;

/// A symmetric distance on a finite point set, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseMetric {
    points: PointSet,
    d: Vec<f64>,
}

impl PairwiseMetric {
    /// Builds from `f(u, v)` evaluated for `u < v` and validates the result.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(points: PointSet, mut f: F) -> Result<Self> {
        let n = points.len();
        let mut d = vec![0.0; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let x = f(u, v);
                d[u * n + v] = x;
                d[v * n + u] = x;
            }
        }
        let m = Self { points, d };
        m.validate()?;
        Ok(m)
    }

    /// Euclidean distances between labelled coordinate vectors `p1, p2, …`.
    pub fn euclidean(coords: &[Vec<f64>]) -> Result<Self> {
        let points = PointSet::numbered("p", coords.len())?;
        Self::from_fn(points, |u, v| {
            coords[u].iter().zip(&coords[v]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.d[u * self.n() + v]
    }

    /// Distance between two labelled points.
    pub fn distance(&self, u: &str, v: &str) -> Result<f64> {
        Ok(self.get(self.points.index_of(u)?, self.points.index_of(v)?))
    }

    /// Smallest and largest distance between distinct points, if `n ≥ 2`.
    pub fn extent(&self) -> Option<(f64, f64)> {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for u in 0..n {
            for v in u + 1..n {
                lo = lo.min(self.get(u, v));
                hi = hi.max(self.get(u, v));
            }
        }
        (n >= 2).then_some((lo, hi))
    }

    /// Checks finiteness, positivity off the diagonal and the triangle
    /// inequality (within tolerance).
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        for u in 0..n {
            for v in 0..n {
                let x = self.get(u, v);
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::InvalidMetric(format!("d({u},{v}) = {x}")));
                }
                if u != v && !tol::is_positive(x) {
                    return Err(Error::InvalidMetric(format!(
                        "distinct points {} and {} at distance {x}",
                        self.points.label(u),
                        self.points.label(v)
                    )));
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    let (l, r) = (self.get(u, w), self.get(u, v) + self.get(v, w));
                    if !tol::leq(l, r) {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails: d({0},{2}) = {l} > d({0},{1}) + d({1},{2}) = {r}",
                            self.points.label(u),
                            self.points.label(v),
                            self.points.label(w)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Σ_{i<j} d(v_i, v_j)` over the entries of a multiset.
    pub fn pair_sum(&self, m: &KMultiset) -> f64 {
        let e = m.entries();
        let mut s = 0.0;
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                s += self.get(e[i], e[j]);
            }
        }
        s
    }

    pub fn to_file(&self) -> PairwiseFile {
        let n = self.n();
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push(PairEntry {
                    u: self.points.label(u).to_string(),
                    v: self.points.label(v).to_string(),
                    d: self.get(u, v),
                });
            }
        }
        PairwiseFile { points: self.points.labels().to_vec(), pairs }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<PairwiseFile>(s)?.into_metric()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub u: String,
    pub v: String,
    pub d: f64,
}

/// `{ "points": [...], "pairs": [{ "u": s, "v": s, "d": number }] }`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseFile {
    pub points: Vec<String>,
    pub pairs: Vec<PairEntry>,
}

impl PairwiseFile {
    pub fn into_metric(self) -> Result<PairwiseMetric> {
        let points = PointSet::new(self.points)?;
        let n = points.len();
        let mut d: Vec<Option<f64>> = vec![None; n * n];
        for e in &self.pairs {
            let (u, v) = (points.index_of(&e.u)?, points.index_of(&e.v)?);
            if u == v {
                if e.d != 0.0 {
                    return Err(Error::InvalidMetric(format!("d({0},{0}) = {1}", e.u, e.d)));
                }
                continue;
            }
            for idx in [u * n + v, v * n + u] {
                match d[idx] {
                    Some(prev) if prev != e.d => {
                        return Err(Error::InvalidMetric(format!(
                            "conflicting values for ({}, {}): {prev} vs {}",
                            e.u, e.v, e.d
                        )))
                    }
                    _ => d[idx] = Some(e.d),
                }
            }
        }
        let mut missing = None;
        let m = PairwiseMetric::from_fn(points.clone(), |u, v| {
            d[u * n + v].unwrap_or_else(|| {
                missing.get_or_insert((u, v));
                0.0
            })
        });
        if let Some((u, v)) = missing {
            return Err(Error::InvalidMetric(format!("missing pair ({}, {})", points.label(u), points.label(v))));
        }
        m
    }
}

/// `d₂(u, v) = d_H(u, v, …, v) + d_H(v, u, …, u)`.
///
/// The table must satisfy the four H-metric axioms; the output is validated
/// as a metric.
pub fn induce_pairwise(table: &HMetricTable) -> Result<PairwiseMetric> {
    for axiom in [Axiom::OD, Axiom::SH, Axiom::DeltaH] {
        let r = check_axiom(table, axiom)?;
        if let Some(w) = r.witness {
            return Err(Error::NotHMetric(format!("{axiom} fails: {}", w.describe(table.points()))));
        }
    }
    induce_unchecked(table)
}

/// [`induce_pairwise`] without the axiom gate. The result is still validated.
pub fn induce_unchecked(table: &HMetricTable) -> Result<PairwiseMetric> {
    let k = table.k();
    PairwiseMetric::from_fn(table.points().clone(), |u, v| {
        let uv = KMultiset::from_counts(&[(u, 1), (v, k - 1)]);
        let vu = KMultiset::from_counts(&[(v, 1), (u, k - 1)]);
        table.get(&uv) + table.get(&vu)
    })
}

/// Extreme ratios of `d_H` to the pairwise sum over all non-constant multisets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub k: usize,
    pub c_l: f64,
    pub c_u: f64,
    /// Smallest `d_H / Σ d₂`; the lower bound asks for at least `c_l`.
    pub worst_lower_ratio: f64,
    /// Largest `d_H / Σ d₂`; the upper bound asks for at most `c_u`.
    pub worst_upper_ratio: f64,
    pub lower_witness: Option<Vec<String>>,
    pub upper_witness: Option<Vec<String>>,
    pub multisets_checked: usize,
}

/// Checks `c_l · Σ d₂ ≤ d_H ≤ c_u · Σ d₂` with `c_l = 1/k³`, `c_u = 1` on every
/// multiset.
pub fn verify_sandwich(table: &HMetricTable, pairwise: &PairwiseMetric) -> Result<SandwichReport> {
    if table.points() != pairwise.points() {
        return Err(Error::Parameter("table and pairwise metric use different point sets".into()));
    }
    let k = table.k();
    let c_l = 1.0 / (k as f64).powi(3);
    let c_u = 1.0;
    let mut rep = SandwichReport {
        k,
        c_l,
        c_u,
        worst_lower_ratio: f64::INFINITY,
        worst_upper_ratio: 0.0,
        lower_witness: None,
        upper_witness: None,
        multisets_checked: 0,
    };
    for m in table.multisets() {
        let dh = table.get(&m);
        let s = pairwise.pair_sum(&m);
        rep.multisets_checked += 1;
        let labels = || m.labelled(table.points());
        if !tol::leq(c_l * s, dh) {
            return Err(Error::SandwichViolation {
                multiset: m.display(table.points()).to_string(),
                detail: format!("lower bound {c_l}·{s} > d_H = {dh}"),
            });
        }
        if !tol::leq(dh, c_u * s) {
            return Err(Error::SandwichViolation {
                multiset: m.display(table.points()).to_string(),
                detail: format!("d_H = {dh} > upper bound {s}"),
            });
        }
        if m.is_constant() {
            continue;
        }
        let ratio = dh / s;
        if ratio < rep.worst_lower_ratio {
            rep.worst_lower_ratio = ratio;
            rep.lower_witness = Some(labels());
        }
        if ratio > rep.worst_upper_ratio {
            rep.worst_upper_ratio = ratio;
            rep.upper_witness = Some(labels());
        }
    }
    if rep.lower_witness.is_none() {
        rep.worst_lower_ratio = f64::NAN;
        rep.worst_upper_ratio = f64::NAN;
    }
    Ok(rep)
}
