//! Exact offline optimum for small instances, and exact expected cost of
//! deterministic strategies against the phase-termination distribution.

use serde::{Deserialize, Serialize};

use crate::adversary::PatternCosts;
use crate::error::{Error, Result};
use crate::gmetrics::{HMetricTable, KMultiset};
use crate::request::TimedRequest;

/// Default cap on search nodes explored by [`opt_offline`].
pub const DEFAULT_OPT_BUDGET: u128 = 10_000_000;

/// Largest phase count accepted by [`lb_min_over_strategies`].
pub const MAX_STRATEGY_PHASES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptGroup {
    pub requests: Vec<u64>,
    /// Latest arrival among the members.
    pub time: f64,
    pub space: f64,
    pub wait: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptSolution {
    pub groups: Vec<OptGroup>,
    pub space: f64,
    pub time: f64,
    pub total: f64,
    pub nodes_explored: u64,
}

struct Search<'a, F> {
    reqs: Vec<TimedRequest>,
    k: usize,
    cost: &'a F,
    used: Vec<bool>,
    stack: Vec<Vec<usize>>,
    partial: f64,
    best: f64,
    best_groups: Vec<Vec<usize>>,
    nodes: u64,
    budget: u128,
}

impl<F: Fn(&KMultiset) -> f64> Search<'_, F> {
    fn same_key(&self, a: usize, b: usize) -> bool {
        self.reqs[a].point == self.reqs[b].point && self.reqs[a].arrival == self.reqs[b].arrival
    }

    fn group_cost(&self, g: &[usize]) -> f64 {
        let latest = g.iter().map(|&i| self.reqs[i].arrival).fold(f64::NEG_INFINITY, f64::max);
        let wait: f64 = g.iter().map(|&i| latest - self.reqs[i].arrival).sum();
        let space = (self.cost)(&KMultiset::from_indices(g.iter().map(|&i| self.reqs[i].point).collect()));
        space + wait
    }

    fn dfs(&mut self) -> Result<()> {
        let Some(anchor) = self.used.iter().position(|&u| !u) else {
            if self.partial < self.best {
                self.best = self.partial;
                self.best_groups = self.stack.clone();
            }
            return Ok(());
        };
        self.used[anchor] = true;
        let mut group = vec![anchor];
        self.choose(anchor + 1, &mut group)?;
        self.used[anchor] = false;
        Ok(())
    }

    /// Extends `group` with unused requests from `from` on. Among requests
    /// sharing point and arrival only the first unused one may start a run of
    /// picks, which skips permutations of interchangeable requests.
    fn choose(&mut self, from: usize, group: &mut Vec<usize>) -> Result<()> {
        if group.len() == self.k {
            self.nodes += 1;
            if u128::from(self.nodes) > self.budget {
                return Err(Error::BudgetExceeded {
                    what: "offline optimum search",
                    needed: u128::from(self.nodes),
                    budget: self.budget,
                });
            }
            let c = self.group_cost(group);
            if self.partial + c >= self.best {
                return Ok(());
            }
            self.partial += c;
            self.stack.push(group.clone());
            self.dfs()?;
            self.stack.pop();
            self.partial -= c;
            return Ok(());
        }
        let mut prev: Option<usize> = None;
        for i in from..self.reqs.len() {
            if self.used[i] {
                continue;
            }
            if prev.is_some_and(|p| self.same_key(p, i)) {
                continue;
            }
            prev = Some(i);
            self.used[i] = true;
            group.push(i);
            self.choose(i + 1, group)?;
            group.pop();
            self.used[i] = false;
        }
        Ok(())
    }
}

/// Minimum-cost partition of `requests` into groups of `k`, each matched at
/// its latest arrival and charged `space_cost` of its locations plus the
/// waiting time of its members.
///
/// Exhaustive branch and bound: the oldest unplaced request anchors each new
/// group; interchangeable requests (same point and arrival) are not permuted;
/// a branch is cut once its partial cost reaches the best complete cost. The
/// search starts from the chronological grouping. At most `budget` complete
/// groups are evaluated.
pub fn opt_offline<F>(space_cost: F, requests: &[TimedRequest], k: usize, budget: u128) -> Result<OptSolution>
where
    F: Fn(&KMultiset) -> f64,
{
    if k < 1 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    if !requests.len().is_multiple_of(k) {
        return Err(Error::InvalidRequest(format!("{} requests cannot be split into groups of {k}", requests.len())));
    }
    let mut reqs = requests.to_vec();
    reqs.sort_by(|a, b| a.arrival.total_cmp(&b.arrival).then(a.point.cmp(&b.point)).then(a.id.cmp(&b.id)));
    let mut s = Search {
        k,
        cost: &space_cost,
        used: vec![false; reqs.len()],
        stack: Vec::new(),
        partial: 0.0,
        best: f64::INFINITY,
        best_groups: Vec::new(),
        nodes: 0,
        budget,
        reqs,
    };
    let greedy: Vec<Vec<usize>> = (0..s.reqs.len()).collect::<Vec<_>>().chunks(k).map(<[usize]>::to_vec).collect();
    s.best = greedy.iter().map(|g| s.group_cost(g)).sum();
    s.best_groups = greedy;
    s.dfs()?;

    let mut groups = Vec::with_capacity(s.best_groups.len());
    let (mut space, mut time) = (0.0, 0.0);
    for g in &s.best_groups {
        let latest = g.iter().map(|&i| s.reqs[i].arrival).fold(f64::NEG_INFINITY, f64::max);
        let wait: f64 = g.iter().map(|&i| latest - s.reqs[i].arrival).sum();
        let sp = space_cost(&KMultiset::from_indices(g.iter().map(|&i| s.reqs[i].point).collect()));
        space += sp;
        time += wait;
        groups.push(OptGroup { requests: g.iter().map(|&i| s.reqs[i].id).collect(), time: latest, space: sp, wait });
    }
    Ok(OptSolution { groups, space, time, total: space + time, nodes_explored: s.nodes })
}

/// [`opt_offline`] with space cost read from a table; request points index
/// the table's point set.
pub fn opt_offline_table(table: &HMetricTable, requests: &[TimedRequest], budget: u128) -> Result<OptSolution> {
    if let Some(r) = requests.iter().find(|r| r.point >= table.n()) {
        return Err(Error::PointOutOfRange(r.point));
    }
    opt_offline(|m| table.get(m), requests, table.k(), budget)
}

/// Wait-or-match decision per phase: `b_i = 1` waits `τ` before matching the
/// first pattern of phase `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyVector {
    pub b: Vec<bool>,
}

impl StrategyVector {
    pub fn new(b: Vec<bool>) -> Self {
        Self { b }
    }

    /// Bit `i` of the vector is bit `r − 1 − i` of `mask`.
    pub fn from_mask(mask: u64, r: usize) -> Self {
        Self { b: (0..r).map(|i| mask >> (r - 1 - i) & 1 == 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn bits(&self) -> String {
        self.b.iter().map(|&x| if x { '1' } else { '0' }).collect()
    }
}

/// Exact expected cost of `strategy` when the sequence ends after phase `t`
/// with probability `1/r` for each `t ∈ 1..=r`.
///
/// A phase that does not end costs `c₁` if matched at once and `k·τ + c₁`
/// after waiting. The final phase costs `c₁ + c₂` if its first pattern was
/// already matched, and `k·τ + c_comb` if it waited and the two patterns are
/// matched together.
pub fn lb_expected_cost(strategy: &StrategyVector, tau: f64, k: usize, costs: &PatternCosts) -> Result<f64> {
    let r = strategy.len();
    if r == 0 {
        return Err(Error::Parameter("strategy must cover at least one phase".into()));
    }
    let wait = k as f64 * tau;
    let mut total = 0.0;
    let mut prefix = 0.0;
    for &b in &strategy.b {
        let end = if b { wait + costs.combined } else { costs.p1 + costs.p2 };
        total += prefix + end;
        prefix += if b { wait + costs.p1 } else { costs.p1 };
    }
    Ok(total / r as f64)
}

/// Minimum of [`lb_expected_cost`] over all `2^r` strategies, with the
/// lexicographically smallest minimizer.
pub fn lb_min_over_strategies(r: usize, tau: f64, k: usize, costs: &PatternCosts) -> Result<(f64, StrategyVector)> {
    if r == 0 {
        return Err(Error::Parameter("r must be at least 1".into()));
    }
    if r > MAX_STRATEGY_PHASES {
        return Err(Error::BudgetExceeded {
            what: "strategy enumeration",
            needed: 1u128 << r,
            budget: 1u128 << MAX_STRATEGY_PHASES,
        });
    }
    let mut best = f64::INFINITY;
    let mut arg = 0u64;
    for mask in 0..(1u64 << r) {
        let e = lb_expected_cost(&StrategyVector::from_mask(mask, r), tau, k, costs)?;
        if e < best {
            best = e;
            arg = mask;
        }
    }
    Ok((best, StrategyVector::from_mask(arg, r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmetrics::build_example_binary;

    fn tr(id: u64, point: usize, arrival: f64) -> TimedRequest {
        TimedRequest::new(id, point, arrival)
    }

    #[test]
    fn colocated_requests_cost_nothing() {
        let rs: Vec<_> = (0..4).map(|i| tr(i, 0, 0.0)).collect();
        let s = opt_offline_table(&build_example_binary(), &rs, DEFAULT_OPT_BUDGET).unwrap();
        assert_eq!(s.total, 0.0);
    }

    #[test]
    fn single_partition_binary() {
        let rs = [tr(0, 0, 0.0), tr(1, 0, 0.0), tr(2, 0, 0.0), tr(3, 1, 0.0)];
        let s = opt_offline_table(&build_example_binary(), &rs, DEFAULT_OPT_BUDGET).unwrap();
        assert_eq!(s.total, 1.0);
        assert_eq!(s.groups.len(), 1);
    }

    /// Plain enumeration of all partitions, no pruning or deduplication.
    fn naive(cost: &dyn Fn(&KMultiset) -> f64, rs: &[TimedRequest], k: usize) -> f64 {
        fn rec(cost: &dyn Fn(&KMultiset) -> f64, rs: &[TimedRequest], left: Vec<usize>, k: usize) -> f64 {
            if left.is_empty() {
                return 0.0;
            }
            let a = left[0];
            let rest = &left[1..];
            let mut best = f64::INFINITY;
            let n = rest.len();
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != k - 1 {
                    continue;
                }
                let mut g = vec![a];
                let mut others = Vec::new();
                for (j, &x) in rest.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        g.push(x);
                    } else {
                        others.push(x);
                    }
                }
                let latest = g.iter().map(|&i| rs[i].arrival).fold(f64::NEG_INFINITY, f64::max);
                let c = cost(&KMultiset::from_indices(g.iter().map(|&i| rs[i].point).collect()))
                    + g.iter().map(|&i| latest - rs[i].arrival).sum::<f64>();
                best = best.min(c + rec(cost, rs, others, k));
            }
            best
        }
        rec(cost, rs, (0..rs.len()).collect(), k)
    }

    #[test]
    fn matches_naive_enumeration() {
        let t = crate::gmetrics::build_example_platforms();
        let mut state = 7u64;
        for trial in 0..30 {
            let rs: Vec<_> = (0..8)
                .map(|i| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let p = (state >> 33) as usize % 3;
                    let a = ((state >> 40) % 4) as f64 * 0.5;
                    tr(i, p, a)
                })
                .collect();
            let fast = opt_offline_table(&t, &rs, DEFAULT_OPT_BUDGET).unwrap().total;
            let slow = naive(&|m| t.get(m), &rs, 4);
            assert!((fast - slow).abs() < 1e-12, "trial {trial}: {fast} vs {slow}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let rs: Vec<_> = (0..12).map(|i| tr(i, (i % 3) as usize, i as f64 * 0.01)).collect();
        let t = crate::gmetrics::build_example_platforms();
        assert!(opt_offline_table(&t, &rs, 5).unwrap_err().is_budget());
    }

    #[test]
    fn rejects_non_multiple() {
        let rs = [tr(0, 0, 0.0)];
        assert!(opt_offline_table(&build_example_binary(), &rs, 10).is_err());
    }

    #[test]
    fn strategy_masks() {
        assert_eq!(StrategyVector::from_mask(0b1000, 4).bits(), "1000");
        assert_eq!(StrategyVector::from_mask(0b0011, 4).bits(), "0011");
    }
}
