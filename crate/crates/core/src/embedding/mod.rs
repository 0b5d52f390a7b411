//! Tree embeddings of pairwise metrics.
//!
//! [`frt_embed`] draws a 2-HST that dominates the input metric;
//! [`TreeMetric::contract_height`] removes unary chains without changing any
//! leaf-to-leaf distance; [`measure_distortion`] averages stretch over seeds.

mod frt;
mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduction::PairwiseMetric;

pub use frt::{frt_embed, frt_embed_with, FrtParams};
pub use tree::{LeafEntry, NodeEntry, TreeFile, TreeMetric, Weight};

/// Unary-chain contraction; see [`TreeMetric::contract_height`].
pub fn contract_height(tree: &TreeMetric) -> TreeMetric {
    tree.contract_height()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStretch {
    pub u: String,
    pub v: String,
    pub d: f64,
    pub mean_tree_d: f64,
    pub stretch: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedStats {
    pub n: usize,
    pub seeds: Vec<u64>,
    pub pairs: Vec<PairStretch>,
    /// Mean over pairs of the per-pair mean stretch.
    pub mean_stretch: f64,
    /// Largest per-pair mean stretch.
    pub max_stretch: f64,
    /// Largest stretch of a single pair in a single tree.
    pub max_single_stretch: f64,
    /// Pairs (over all seeds) whose tree distance fell below the metric distance.
    pub dominance_violations: usize,
    /// Pairs (over all seeds) whose distance changed under contraction.
    pub contraction_mismatches: usize,
    pub max_height_before: usize,
    pub max_height_after: usize,
}

struct SeedResult {
    tree_d: Vec<f64>,
    violations: usize,
    mismatches: usize,
    height_before: usize,
    height_after: usize,
}

/// Embeds `metric` once per seed (in parallel) and aggregates per-pair
/// stretch `tree_d / d` on the contracted trees.
pub fn measure_distortion(metric: &PairwiseMetric, seeds: &[u64]) -> Result<EmbedStats> {
    if seeds.is_empty() {
        return Err(Error::Parameter("at least one seed is required".into()));
    }
    let n = metric.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            let raw = frt_embed(metric, seed)?;
            let tree = raw.contract_height();
            let mut r = SeedResult {
                tree_d: Vec::with_capacity(pairs.len()),
                violations: 0,
                mismatches: 0,
                height_before: raw.height(),
                height_after: tree.height(),
            };
            for &(u, v) in &pairs {
                let dt = tree.tree_distance(u, v);
                if dt < metric.get(u, v) {
                    r.violations += 1;
                }
                if dt != raw.tree_distance(u, v) {
                    r.mismatches += 1;
                }
                r.tree_d.push(dt);
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sums = vec![0.0; pairs.len()];
    let mut max_single = 0.0f64;
    for r in &runs {
        for (i, &dt) in r.tree_d.iter().enumerate() {
            sums[i] += dt;
            let (u, v) = pairs[i];
            max_single = max_single.max(dt / metric.get(u, v));
        }
    }
    let trials = seeds.len() as f64;
    let points = metric.points();
    let pair_stats: Vec<PairStretch> = pairs
        .iter()
        .zip(&sums)
        .map(|(&(u, v), &s)| {
            let d = metric.get(u, v);
            let mean = s / trials;
            PairStretch {
                u: points.label(u).to_string(),
                v: points.label(v).to_string(),
                d,
                mean_tree_d: mean,
                stretch: mean / d,
            }
        })
        .collect();
    let (mean_stretch, max_stretch) = if pair_stats.is_empty() {
        (1.0, 1.0)
    } else {
        (
            pair_stats.iter().map(|p| p.stretch).sum::<f64>() / pair_stats.len() as f64,
            pair_stats.iter().map(|p| p.stretch).fold(0.0, f64::max),
        )
    };
    Ok(EmbedStats {
        n,
        seeds: seeds.to_vec(),
        pairs: pair_stats,
        mean_stretch,
        max_stretch,
        max_single_stretch: if pairs.is_empty() { 1.0 } else { max_single },
        dominance_violations: runs.iter().map(|r| r.violations).sum(),
        contraction_mismatches: runs.iter().map(|r| r.mismatches).sum(),
        max_height_before: runs.iter().map(|r| r.height_before).max().unwrap_or(0),
        max_height_after: runs.iter().map(|r| r.height_after).max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmetrics::PointSet;

    fn path_tree() -> TreeMetric {
        // root(0) -4- x(1) -2- leaf(2) ; root -1- leaf(3)
        let points = PointSet::new(["p", "q"]).unwrap();
        TreeMetric::new(
            points,
            vec![None, Some(0), Some(1), Some(0)],
            vec![f64::INFINITY, 4.0, 2.0, 1.0],
            &[(2, 0), (3, 1)],
        )
        .unwrap()
    }

    #[test]
    fn contraction_merges_chain() {
        let t = path_tree();
        let c = contract_height(&t);
        assert_eq!(c.node_count(), 3);
        let leaf = c.leaf_of(0);
        assert_eq!(c.weight(leaf), 6.0);
        assert_eq!(c.parent(leaf), Some(c.root()));
        assert_eq!(c.tree_distance(0, 1), 7.0);
        assert_eq!(t.tree_distance(0, 1), 7.0);
        assert_eq!(contract_height(&c), c);
    }

    #[test]
    fn branching_tree_unchanged() {
        let points = PointSet::new(["p", "q"]).unwrap();
        let t = TreeMetric::new(points, vec![None, Some(0), Some(0)], vec![f64::INFINITY, 1.0, 1.0], &[(1, 0), (2, 1)])
            .unwrap();
        assert_eq!(t.contract_height(), t);
        assert_eq!(t.tree_distance(0, 1), 2.0);
        assert_eq!(t.tree_distance(1, 1), 0.0);
    }

    #[test]
    fn internal_host_gets_zero_weight_leaf() {
        let points = PointSet::new(["p", "q", "r"]).unwrap();
        let t = TreeMetric::new(
            points,
            vec![None, Some(0), Some(0)],
            vec![f64::INFINITY, 1.0, 2.0],
            &[(0, 0), (1, 1), (2, 2)],
        )
        .unwrap();
        let aux = t.leaf_of(0);
        assert!(t.is_aux(aux));
        assert_eq!(t.weight(aux), 0.0);
        assert_eq!(t.tree_distance(0, 1), 1.0);
        assert_eq!(t.tree_distance(1, 2), 3.0);
    }

    #[test]
    fn invalid_trees_rejected() {
        let p = || PointSet::new(["p", "q"]).unwrap();
        let inf = f64::INFINITY;
        assert!(TreeMetric::new(p(), vec![None, None], vec![inf, inf], &[(0, 0), (1, 1)]).is_err());
        assert!(TreeMetric::new(p(), vec![None, Some(0), Some(0)], vec![inf, 0.0, 1.0], &[(1, 0), (2, 1)]).is_err());
        assert!(TreeMetric::new(p(), vec![None, Some(0), Some(0)], vec![inf, 1.0, 1.0], &[(1, 0)]).is_err());
        assert!(TreeMetric::new(p(), vec![None, Some(2), Some(1)], vec![inf, 1.0, 1.0], &[(1, 0), (2, 1)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = path_tree();
        let json = t.to_json().unwrap();
        assert!(json.contains("\"inf\""));
        assert_eq!(TreeMetric::from_json(&json).unwrap(), t);
    }

    #[test]
    fn distortion_is_deterministic() {
        let m = PairwiseMetric::euclidean(&[vec![0.0], vec![1.0], vec![3.0], vec![7.5]]).unwrap();
        let seeds: Vec<u64> = (0..20).collect();
        let a = measure_distortion(&m, &seeds).unwrap();
        assert_eq!(a, measure_distortion(&m, &seeds).unwrap());
        assert_eq!(a.dominance_violations, 0);
        assert_eq!(a.contraction_mismatches, 0);
        assert!(a.mean_stretch >= 1.0);
    }
}
