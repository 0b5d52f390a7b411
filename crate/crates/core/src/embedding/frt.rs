use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TreeMetric;
use crate::error::{Error, Result};
use crate::reduction::PairwiseMetric;

/// Bits kept in the radius multiplier, so that sums of tree weights stay exact.
const BETA_BITS: i32 = 20;

/// Random draws of one embedding: the center order and the radius multiplier.
#[derive(Clone, Debug, PartialEq)]
pub struct FrtParams {
    pub order: Vec<usize>,
    pub beta: f64,
}

impl FrtParams {
    pub fn sample(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let u: f64 = rng.gen_range(0.0..1.0);
        let scale = f64::from(1 << BETA_BITS);
        let beta = ((2f64.powf(u) * scale).floor() / scale).clamp(1.0, 2.0 - 1.0 / scale);
        Self { order, beta }
    }
}

/// Embeds `metric` into a 2-HST by hierarchical ball carving.
///
/// Distances are first scaled by a power of two so the smallest one lies in
/// `[1, 2)`. The root cluster holds every point at level
/// `L = max(1, ⌈log₂ diam⌉)`; each level-`i` cluster is split by assigning
/// every member to the first center (in random order) within `β·2^(i−1)`.
/// The edge above a level-`i` cluster weighs `β·2^i`, rescaled back.
pub fn frt_embed(metric: &PairwiseMetric, seed: u64) -> Result<TreeMetric> {
    let params = FrtParams::sample(metric.n(), seed);
    frt_embed_with(metric, &params)
}

pub fn frt_embed_with(metric: &PairwiseMetric, params: &FrtParams) -> Result<TreeMetric> {
    metric.validate()?;
    let n = metric.n();
    let Some((min_d, max_d)) = metric.extent() else {
        return TreeMetric::singleton(metric.points().clone());
    };
    if !(1.0..2.0).contains(&params.beta) || params.order.len() != n {
        return Err(Error::Parameter("malformed embedding parameters".into()));
    }
    let shift = min_d.log2().floor() as i32;
    let scale = 2f64.powi(-shift);
    let d = |u: usize, v: usize| metric.get(u, v) * scale;
    let diam = max_d * scale;
    let top = (diam.log2().ceil() as i32).max(1);
    let beta = params.beta;

    let mut parent: Vec<Option<usize>> = vec![None];
    let mut weight = vec![f64::INFINITY];
    let mut hosts = Vec::with_capacity(n);
    let mut clusters: Vec<(usize, Vec<usize>)> = vec![(0, (0..n).collect())];
    for level in (0..top).rev() {
        let radius = beta * 2f64.powi(level - 1);
        let w = beta * 2f64.powi(level) / scale;
        let mut next = Vec::new();
        for (node, members) in &clusters {
            let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
            for &x in members {
                let rank = params
                    .order
                    .iter()
                    .position(|&c| d(x, c) <= radius)
                    .expect("a point is within any radius of itself");
                match parts.iter_mut().find(|(r, _)| *r == rank) {
                    Some((_, m)) => m.push(x),
                    None => parts.push((rank, vec![x])),
                }
            }
            parts.sort_by_key(|(r, _)| *r);
            for (_, m) in parts {
                let id = parent.len();
                parent.push(Some(*node));
                weight.push(w);
                if level == 0 {
                    debug_assert_eq!(m.len(), 1);
                    hosts.push((id, m[0]));
                }
                next.push((id, m));
            }
        }
        clusters = next;
    }
    TreeMetric::new(metric.points().clone(), parent, weight, &hosts)
}
