//! Named example and counterexample tables.

use super::{HMetricTable, KMultiset, PointSet};
use crate::error::{Error, Result};
use crate::reduction::PairwiseMetric;

/// Four players on three platforms `a`, `b`, `c` (k = 4).
///
/// A multiset costs the length of the shortest path joining its platforms
/// (`ab = ac = 1`, `bc = 1/2`) plus a penalty of 1 if some platform hosts
/// exactly one player.
pub fn build_example_platforms() -> HMetricTable {
    let points = PointSet::new(["a", "b", "c"]).expect("static labels");
    let pair = |u: usize, v: usize| if u + v == 3 { 0.5 } else { 1.0 };
    HMetricTable::from_fn(4, points, |m| {
        let e = m.elements();
        let span = match e.len() {
            1 => 0.0,
            2 => pair(e[0], e[1]),
            _ => 1.5,
        };
        let single = m.counts().iter().any(|&(_, c)| c == 1);
        span + if single { 1.0 } else { 0.0 }
    })
    .expect("valid by construction")
}

/// Two points `a`, `b` with `d(aaab) = d(aabb) = 1` and `d(abbb) = 2` (k = 4).
pub fn build_example_binary() -> HMetricTable {
    let points = PointSet::new(["a", "b"]).expect("static labels");
    HMetricTable::from_fn(4, points, |m| match m.counts().as_slice() {
        [_] => 0.0,
        [(0, 1), _] => 2.0,
        _ => 1.0,
    })
    .expect("valid by construction")
}

/// `d(S)` is the largest pairwise `base` distance among the members of `S`.
pub fn build_max_diameter(base: &PairwiseMetric, k: usize) -> Result<HMetricTable> {
    base.validate()?;
    HMetricTable::from_fn(k, base.points().clone(), |m| {
        let e = m.elements();
        let mut best = 0.0f64;
        for (i, &u) in e.iter().enumerate() {
            for &v in &e[i + 1..] {
                best = best.max(base.get(u, v));
            }
        }
        best
    })
}

fn check_eps(eps: f64, upper: f64) -> Result<()> {
    if eps > 0.0 && eps < upper {
        Ok(())
    } else {
        Err(Error::Parameter(format!("eps must lie in (0, {upper}), got {eps}")))
    }
}

/// `k + 1` points; `ε` on multisets of `k` distinct points, 1 on every other
/// non-constant multiset.
pub fn build_counterexample_n(k: usize, eps: f64) -> Result<HMetricTable> {
    if k < 4 {
        return Err(Error::Parameter(format!("n-metric counterexample needs k >= 4, got {k}")));
    }
    check_eps(eps, 1.0)?;
    let points = PointSet::numbered("v", k + 1)?;
    HMetricTable::from_fn(k, points, |m| match m.distinct_count() {
        1 => 0.0,
        c if c == k => eps,
        _ => 1.0,
    })
}

/// Points `a`, `b`, `c`; `ε` on `a^f b^(k−f)` and `b^(k−f) c^f` with
/// `f = ⌊k/2⌋`, 1 on every other non-constant multiset.
pub fn build_counterexample_k(k: usize, eps: f64) -> Result<HMetricTable> {
    if k < 5 {
        return Err(Error::Parameter(format!("K-metric counterexample needs k >= 5, got {k}")));
    }
    check_eps(eps, 1.0)?;
    let points = PointSet::new(["a", "b", "c"])?;
    let f = k / 2;
    let low = [KMultiset::from_counts(&[(0, f), (1, k - f)]), KMultiset::from_counts(&[(1, k - f), (2, f)])];
    HMetricTable::from_fn(k, points, |m| {
        if m.is_constant() {
            0.0
        } else if low.contains(m) {
            eps
        } else {
            1.0
        }
    })
}

/// Smallest prime factor of `k ≥ 2`.
pub fn smallest_prime_factor(k: usize) -> usize {
    assert!(k >= 2, "smallest_prime_factor needs k >= 2");
    (2..).take_while(|p| p * p <= k).find(|p| k.is_multiple_of(*p)).unwrap_or(k)
}

/// Points `a`, `b`; `ε` on `a^j b^(k−j)` whenever the smallest prime factor
/// `p` of `k` divides `j`, 1 on every other non-constant multiset.
///
/// On two points the split triangle inequality amounts to subadditivity of
/// the value in either count, which this pattern satisfies. For prime `k` no
/// non-trivial multiple of `p` exists and the factor between values on the
/// same element set cannot exceed `k − 1` without breaking that inequality,
/// so only composite `k ≥ 6` is accepted.
pub fn build_counterexample_k_enriched(k: usize, eps: f64) -> Result<HMetricTable> {
    if k < 5 {
        return Err(Error::Parameter(format!("enriched counterexample needs k >= 5, got {k}")));
    }
    let p = smallest_prime_factor(k);
    if p == k {
        return Err(Error::Parameter(format!("enriched counterexample needs composite k, got prime {k}")));
    }
    check_eps(eps, 1.0 / (k as f64 - 1.0))?;
    let points = PointSet::new(["a", "b"])?;
    HMetricTable::from_fn(k, points, |m| {
        let a = m.entries().iter().filter(|&&x| x == 0).count();
        if m.is_constant() {
            0.0
        } else if a % p == 0 {
            eps
        } else {
            1.0
        }
    })
}

/// Area of the triangle spanned by three planar points (k = 3).
pub fn triangle_area_table(coords: &[(f64, f64)]) -> Result<HMetricTable> {
    let points = PointSet::numbered("p", coords.len())?;
    HMetricTable::from_fn(3, points, |m| {
        let [a, b, c] = [0, 1, 2].map(|i| coords[m.entries()[i]]);
        0.5 * ((b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1)).abs()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn platform_values() {
        let t = build_example_platforms();
        assert_eq!(t.lookup(&["b", "b", "c", "c"]).unwrap(), 0.5);
        assert_eq!(t.lookup(&["a", "a", "b", "c"]).unwrap(), 2.5);
        assert_eq!(t.lookup(&["a", "a", "a", "a"]).unwrap(), 0.0);
        assert_eq!(t.lookup(&["c", "b", "b", "b"]).unwrap(), 1.5);
        assert_eq!(t.lookup(&["b", "a", "a", "a"]).unwrap(), 2.0);
        assert_eq!(t.lookup(&["a", "a", "c", "c"]).unwrap(), 1.0);
        assert_eq!(t.lookup(&["a", "b", "c", "c"]).unwrap(), 2.5);
    }

    #[test]
    fn binary_values() {
        let t = build_example_binary();
        assert_eq!(t.lookup(&["a", "a", "a", "b"]).unwrap(), 1.0);
        assert_eq!(t.lookup(&["a", "a", "b", "b"]).unwrap(), 1.0);
        assert_eq!(t.lookup(&["a", "b", "b", "b"]).unwrap(), 2.0);
        assert_eq!(t.lookup(&["b", "b", "b", "b"]).unwrap(), 0.0);
    }

    #[test]
    fn counterexample_parameters() {
        assert!(build_counterexample_n(3, 0.1).is_err());
        assert!(build_counterexample_n(4, 1.0).is_err());
        assert!(build_counterexample_k(4, 0.1).is_err());
        assert!(build_counterexample_k(5, 0.0).is_err());
        assert!(build_counterexample_k_enriched(7, 0.1).is_err());
        assert!(build_counterexample_k_enriched(6, 0.2).is_err());
        assert!(build_counterexample_k_enriched(6, 0.1).is_ok());
    }

    #[test]
    fn counterexample_values() {
        let n = build_counterexample_n(4, 0.1).unwrap();
        assert_eq!(n.lookup(&["v1", "v2", "v3", "v4"]).unwrap(), 0.1);
        assert_eq!(n.lookup(&["v1", "v1", "v3", "v4"]).unwrap(), 1.0);
        let k = build_counterexample_k(7, 0.1).unwrap();
        assert_eq!(k.lookup(&["a", "a", "a", "b", "b", "b", "b"]).unwrap(), 0.1);
        assert_eq!(k.lookup(&["c", "c", "c", "b", "b", "b", "b"]).unwrap(), 0.1);
        assert_eq!(k.lookup(&["a", "a", "a", "c", "c", "c", "b"]).unwrap(), 1.0);
        let e = build_counterexample_k_enriched(6, 0.1).unwrap();
        assert_eq!(e.lookup(&["a", "a", "b", "b", "b", "b"]).unwrap(), 0.1);
        assert_eq!(e.lookup(&["a", "a", "a", "a", "b", "b"]).unwrap(), 0.1);
        assert_eq!(e.lookup(&["a", "b", "b", "b", "b", "b"]).unwrap(), 1.0);
    }

    #[test]
    fn smallest_prime_factors() {
        let got: Vec<_> = [2, 4, 6, 9, 15, 25, 49, 7, 11].map(smallest_prime_factor).to_vec();
        assert_eq!(got, [2, 2, 2, 3, 3, 5, 7, 7, 11]);
    }

    #[test]
    fn triangle_area() {
        let t = triangle_area_table(&[(0.0, 0.0), (1.0, 0.0), (0.0, 2.0)]).unwrap();
        assert_eq!(t.lookup(&["p1", "p2", "p3"]).unwrap(), 1.0);
        assert_eq!(t.lookup(&["p1", "p1", "p3"]).unwrap(), 0.0);
    }
}
