//! Randomized request distributions against which no online algorithm has a
//! bounded competitive ratio, one per generalized-metric family.
//!
//! Phase `i` (1-based) starts at time `i − 1` with pattern `P1`. The sequence
//! stops after phase `i` with probability `1/(r − i + 1)`, in which case
//! pattern `P2` arrives `τ` after `P1`. The stopping phase is uniform on
//! `1..=r`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmetrics::{
    build_counterexample_k, build_counterexample_k_enriched, build_counterexample_n, smallest_prime_factor,
    HMetricTable, KMultiset, PointSet,
};
use crate::request::TimedRequest;

/// Default near-zero value of the two-element multisets in the D-metric table.
pub const DEFAULT_DELTA: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    TwoMetric,
    DMetric,
    NMetric,
    KMetric,
    KEnriched,
}

impl Construction {
    pub const ALL: [Construction; 5] = [
        Construction::TwoMetric,
        Construction::DMetric,
        Construction::NMetric,
        Construction::KMetric,
        Construction::KEnriched,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::TwoMetric => "two_metric",
            Construction::DMetric => "d_metric",
            Construction::NMetric => "n_metric",
            Construction::KMetric => "k_metric",
            Construction::KEnriched => "k_enriched",
        }
    }

    /// Arity used when none is given.
    pub fn default_k(self) -> usize {
        match self {
            Construction::TwoMetric | Construction::DMetric => 3,
            Construction::NMetric => 4,
            Construction::KMetric => 5,
            Construction::KEnriched => 6,
        }
    }

    fn check_k(self, k: usize) -> Result<()> {
        let ok = match self {
            Construction::TwoMetric | Construction::DMetric => k == 3,
            Construction::NMetric => k >= 4,
            Construction::KMetric => k >= 5,
            Construction::KEnriched => k >= 5 && smallest_prime_factor(k) != k,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("{} does not support k = {k}", self.name())))
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown construction {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub construction: Construction,
    pub r: usize,
    pub tau: f64,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
}

impl AdversaryConfig {
    /// `k` defaults per construction, `ε = 0.01`, `δ` = [`DEFAULT_DELTA`].
    pub fn new(construction: Construction, r: usize, tau: f64, seed: u64) -> Self {
        Self { construction, r, tau, k: construction.default_k(), eps: 0.01, delta: DEFAULT_DELTA, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 1 {
            return Err(Error::Parameter("r must be at least 1".into()));
        }
        if !(self.tau > 0.0 && self.tau < 1.0 / 3.0) {
            return Err(Error::Parameter(format!("tau must lie in (0, 1/3), got {}", self.tau)));
        }
        self.construction.check_k(self.k)?;
        if self.construction == Construction::DMetric && !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::Parameter(format!("delta must lie in (0, 1/2), got {}", self.delta)));
        }
        Ok(())
    }
}

/// Space cost of the first pattern alone, the second alone, and the cheapest
/// split of their union into two groups of `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternCosts {
    pub p1: f64,
    pub p2: f64,
    pub combined: f64,
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub config: AdversaryConfig,
    pub table: HMetricTable,
    pub requests: Vec<TimedRequest>,
    /// 1-based phase after which the second pattern arrives.
    pub termination_phase: usize,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
}

/// Three points; 1 on the multiset of three distinct points, 0 elsewhere.
fn two_metric_table() -> Result<HMetricTable> {
    let points = PointSet::numbered("v", 3)?;
    HMetricTable::from_fn(3, points, |m| if m.distinct_count() == 3 { 1.0 } else { 0.0 })
}

/// As [`two_metric_table`] with `δ` on multisets of two distinct points.
fn d_metric_table(delta: f64) -> Result<HMetricTable> {
    let points = PointSet::numbered("v", 3)?;
    HMetricTable::from_fn(3, points, |m| match m.distinct_count() {
        1 => 0.0,
        2 => delta,
        _ => 1.0,
    })
}

/// Table and the two patterns (point indices) of a construction.
pub fn construction_instance(
    construction: Construction,
    k: usize,
    eps: f64,
    delta: f64,
) -> Result<(HMetricTable, Vec<usize>, Vec<usize>)> {
    construction.check_k(k)?;
    let rep = |p: usize, c: usize| std::iter::repeat_n(p, c);
    Ok(match construction {
        Construction::TwoMetric => (two_metric_table()?, vec![0, 0, 0], vec![0, 1, 2]),
        Construction::DMetric => (d_metric_table(delta)?, vec![0, 0, 0], vec![0, 1, 2]),
        Construction::NMetric => {
            let p2 = (2..k).chain([k, k]).collect();
            (build_counterexample_n(k, eps)?, (0..k).collect(), p2)
        }
        Construction::KMetric => {
            let f = k / 2;
            let p2 = rep(0, f).chain(rep(2, f)).chain(rep(1, k - 2 * f)).collect();
            (build_counterexample_k(k, eps)?, vec![1; k], p2)
        }
        Construction::KEnriched => {
            let p = smallest_prime_factor(k);
            let p2 = rep(0, 2 * p).chain(rep(1, k - 2 * p)).collect();
            (build_counterexample_k_enriched(k, eps)?, vec![1; k], p2)
        }
    })
}

/// Cheapest split of the union of two `k`-patterns into two `k`-groups.
pub fn best_split(table: &HMetricTable, p1: &[usize], p2: &[usize]) -> f64 {
    let k = table.k();
    let mut avail = vec![0usize; table.n()];
    for &p in p1.iter().chain(p2) {
        avail[p] += 1;
    }
    fn rec(table: &HMetricTable, avail: &[usize], point: usize, left: usize, pick: &mut Vec<usize>, best: &mut f64) {
        if left == 0 {
            let mut rest = Vec::new();
            for (p, &c) in avail.iter().enumerate() {
                let used = pick.iter().filter(|&&x| x == p).count();
                rest.extend(std::iter::repeat_n(p, c - used));
            }
            let cost = table.get(&KMultiset::from_indices(pick.clone())) + table.get(&KMultiset::from_indices(rest));
            *best = best.min(cost);
            return;
        }
        if point == avail.len() {
            return;
        }
        for c in 0..=avail[point].min(left) {
            pick.extend(std::iter::repeat_n(point, c));
            rec(table, avail, point + 1, left - c, pick, best);
            pick.truncate(pick.len() - c);
        }
    }
    let mut best = f64::INFINITY;
    rec(table, &avail, 0, k, &mut Vec::new(), &mut best);
    best
}

/// Space costs the construction's argument relies on, read off its table.
pub fn pattern_costs(construction: Construction, k: usize, eps: f64, delta: f64) -> Result<PatternCosts> {
    let (table, p1, p2) = construction_instance(construction, k, eps, delta)?;
    Ok(PatternCosts {
        p1: table.get(&KMultiset::from_indices(p1.clone())),
        p2: table.get(&KMultiset::from_indices(p2.clone())),
        combined: best_split(&table, &p1, &p2),
    })
}

/// Offline optimum of a sequence stopping after phase `t`: earlier first
/// patterns are matched on arrival, and the last phase either matches both
/// patterns separately or holds the first for `τ` and splits the union.
pub fn predicted_opt(costs: &PatternCosts, k: usize, tau: f64, termination_phase: usize) -> f64 {
    let earlier = termination_phase.saturating_sub(1) as f64 * costs.p1;
    earlier + (costs.p1 + costs.p2).min(k as f64 * tau + costs.combined)
}

/// Samples the stopping phase with the Bernoulli chain and materializes the
/// whole sequence.
pub fn generate(config: &AdversaryConfig) -> Result<GeneratedInstance> {
    config.validate()?;
    let (table, p1, p2) = construction_instance(config.construction, config.k, config.eps, config.delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut requests = Vec::new();
    let mut id = 0u64;
    let mut push = |requests: &mut Vec<TimedRequest>, pattern: &[usize], t: f64| {
        for &p in pattern {
            requests.push(TimedRequest::new(id, p, t));
            id += 1;
        }
    };
    let mut termination_phase = config.r;
    for i in 1..=config.r {
        let start = (i - 1) as f64;
        push(&mut requests, &p1, start);
        if rng.gen_bool(1.0 / (config.r - i + 1) as f64) {
            termination_phase = i;
            push(&mut requests, &p2, start + config.tau);
            break;
        }
    }
    Ok(GeneratedInstance { config: config.clone(), table, requests, termination_phase, p1, p2 })
}

/// Concatenates `reps` independent sequences (seeds `seed, seed + 1, …`),
/// each starting one time unit after the previous one ends. Returns the
/// requests and the stopping phase of every block.
pub fn generate_repeated(config: &AdversaryConfig, reps: usize) -> Result<(GeneratedInstance, Vec<usize>)> {
    if reps < 1 {
        return Err(Error::Parameter("repetition count must be at least 1".into()));
    }
    let mut first: Option<GeneratedInstance> = None;
    let mut phases = Vec::with_capacity(reps);
    let mut offset = 0.0;
    let mut requests = Vec::new();
    for b in 0..reps {
        let cfg = AdversaryConfig { seed: config.seed.wrapping_add(b as u64), ..config.clone() };
        let inst = generate(&cfg)?;
        let base = requests.len() as u64;
        requests.extend(inst.requests.iter().map(|r| TimedRequest::new(base + r.id, r.point, r.arrival + offset)));
        offset += inst.termination_phase as f64;
        phases.push(inst.termination_phase);
        first.get_or_insert(inst);
    }
    let mut inst = first.expect("reps >= 1");
    inst.requests = requests;
    Ok((inst, phases))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r1_two_metric_shape() {
        let g = generate(&AdversaryConfig::new(Construction::TwoMetric, 1, 0.25, 3)).unwrap();
        assert_eq!(g.termination_phase, 1);
        let pts: Vec<_> = g.requests.iter().map(|r| (r.point, r.arrival)).collect();
        assert_eq!(pts, [(0, 0.0), (0, 0.0), (0, 0.0), (0, 0.25), (1, 0.25), (2, 0.25)]);
    }

    #[test]
    fn n_metric_patterns() {
        let (_, p1, p2) = construction_instance(Construction::NMetric, 4, 0.01, DEFAULT_DELTA).unwrap();
        assert_eq!(p1, [0, 1, 2, 3]);
        assert_eq!(p2, [2, 3, 4, 4]);
    }

    #[test]
    fn costs() {
        let c = pattern_costs(Construction::TwoMetric, 3, 0.01, DEFAULT_DELTA).unwrap();
        assert_eq!((c.p1, c.p2, c.combined), (0.0, 1.0, 0.0));
        let c = pattern_costs(Construction::NMetric, 5, 0.01, DEFAULT_DELTA).unwrap();
        assert_eq!((c.p1, c.p2, c.combined), (0.01, 1.0, 0.02));
        let c = pattern_costs(Construction::KMetric, 7, 0.01, DEFAULT_DELTA).unwrap();
        assert_eq!((c.p1, c.p2, c.combined), (0.0, 1.0, 0.02));
        let c = pattern_costs(Construction::KEnriched, 6, 0.01, DEFAULT_DELTA).unwrap();
        assert_eq!((c.p1, c.p2), (0.0, 0.01));
    }

    #[test]
    fn config_checks() {
        let mut c = AdversaryConfig::new(Construction::TwoMetric, 4, 0.25, 0);
        c.tau = 0.4;
        assert!(generate(&c).is_err());
        c.tau = 0.1;
        c.k = 4;
        assert!(generate(&c).is_err());
        let mut c = AdversaryConfig::new(Construction::KEnriched, 4, 0.1, 0);
        c.k = 7;
        assert!(generate(&c).is_err());
        assert_eq!("K-Enriched".parse::<Construction>().unwrap(), Construction::KEnriched);
    }

    #[test]
    fn repetitions_are_offset() {
        let c = AdversaryConfig::new(Construction::TwoMetric, 3, 0.1, 9);
        let (inst, phases) = generate_repeated(&c, 3).unwrap();
        let total: usize = phases.iter().map(|t| 3 * (t + 1)).sum();
        assert_eq!(inst.requests.len(), total);
        assert!(inst.requests.windows(2).all(|w| w[0].arrival <= w[1].arrival));
    }
}
