//! Event-driven timer algorithm for k-way matching with delays on a tree.
//!
//! Every non-root node `v` owns a timer `τ_v` for the edge to its parent. A
//! timer runs while it is active and the number of open requests below `v`
//! is not a multiple of `k`; on reaching the next multiple of `w_v` it turns
//! inactive and pauses. `k` open requests whose leaf paths up to a common
//! node `u` are all inactive are matched across `u`, which re-activates
//! (consumes) those timers without changing their values. `k` open requests
//! on a single leaf are matched at once.
//!
//! Within one instant the simulator processes, in order: arrivals, same-leaf
//! matches, inactivations, then matches across internal nodes scanned
//! deepest first (ties by node id) until none fires.

mod audit;
mod support;

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::embedding::TreeMetric;
use crate::error::{Error, Result};
use crate::gmetrics::{HMetricTable, KMultiset};
use crate::request::TimedRequest;

pub use audit::{audit_trace, AuditReport, NodeDiagnostic, PhaseAudit};
pub use support::compute_supporting_sets;

/// A request on a tree leaf.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: u64,
    pub leaf: usize,
    pub arrival: f64,
}

impl Request {
    /// Places a point request on the leaf hosting its point.
    pub fn on_tree(tree: &TreeMetric, r: &TimedRequest) -> Result<Self> {
        if r.point >= tree.points().len() {
            return Err(Error::PointOutOfRange(r.point));
        }
        Ok(Self { id: r.id, leaf: tree.leaf_of(r.point), arrival: r.arrival })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimerStatus {
    Active,
    Inactive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimerState {
    pub value: f64,
    pub status: TimerStatus,
    pub consumed_count: u64,
    pub inactivations: u64,
}

impl TimerState {
    fn new() -> Self {
        Self { value: 0.0, status: TimerStatus::Active, consumed_count: 0, inactivations: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub requests: Vec<u64>,
    pub time: f64,
    pub lca: usize,
    /// Non-auxiliary nodes whose timers the match consumed.
    pub consumed: Vec<usize>,
    /// `Σ_{i<j}` tree distance between member leaves.
    pub space_tree: f64,
    /// Generalized distance of the member locations, when a table is given.
    pub space_metric: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Arrival { request: u64, leaf: usize },
    Inactivation { node: usize, value: f64 },
    Match { index: usize },
    Consumption { node: usize, value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Interval from a timer's (re-)activation to its next consumption.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub start: f64,
    /// `None` for a final phase that was never consumed.
    pub end: Option<f64>,
    /// Open requests below the node right after the phase began.
    pub open_at_start: usize,
    pub timer_start: f64,
    pub timer_end: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub k: usize,
    pub requests: usize,
    pub matches: usize,
    pub space_tree: f64,
    pub space_metric: Option<f64>,
    /// Waiting time of matched requests.
    pub time: f64,
    /// `space_tree + time`.
    pub total: f64,
    /// `space_metric + time`.
    pub total_metric: Option<f64>,
    /// Requests left open because their count is not a multiple of `k`; each
    /// would wait forever.
    pub unmatched: Vec<u64>,
    pub infinite_time_charge: bool,
    /// `Σ_v 𝒯_v` over all nodes, the root included.
    pub sum_timers: f64,
    /// `Σ_v 𝒯_v` over non-root nodes.
    pub sum_timers_non_root: f64,
    /// `k · Σ_{v≠root} 𝒯_v`, the space bound.
    pub space_bound: f64,
    /// `k · Σ_v 𝒯_v`, the time bound.
    pub time_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub k: usize,
    pub requests: Vec<Request>,
    pub events: Vec<Event>,
    pub matches: Vec<MatchRecord>,
    /// Final timer state `𝒯_v` per node.
    pub timers: Vec<TimerState>,
    /// Phases per node; empty for auxiliary nodes.
    pub phases: Vec<Vec<Phase>>,
    pub cost: CostReport,
}

impl SimulationTrace {
    /// Events as JSON lines.
    pub fn events_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }
}

fn due_slack(target: f64) -> f64 {
    1e-9 * target.abs().max(1.0)
}

/// Mutable state of one run. Exposed for step-wise inspection.
pub struct Simulator<'a> {
    tree: &'a TreeMetric,
    k: usize,
    requests: Vec<Request>,
    next_arrival: usize,
    now: f64,
    timers: Vec<TimerState>,
    count: Vec<usize>,
    open: Vec<Vec<usize>>,
    scan_order: Vec<usize>,
    events: Vec<Event>,
    matches: Vec<MatchRecord>,
    phases: Vec<Vec<Phase>>,
    table: Option<(&'a HMetricTable, Vec<usize>)>,
}

impl<'a> Simulator<'a> {
    pub fn new(tree: &'a TreeMetric, requests: &[Request], k: usize, table: Option<&'a HMetricTable>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Parameter(format!("k must be at least 2, got {k}")));
        }
        let nodes = tree.node_count();
        let mut seen = std::collections::HashSet::new();
        for r in requests {
            if r.leaf >= nodes || !tree.is_leaf(r.leaf) {
                return Err(Error::InvalidRequest(format!("request {} names non-leaf node {}", r.id, r.leaf)));
            }
            if !(r.arrival.is_finite() && r.arrival >= 0.0) {
                return Err(Error::InvalidRequest(format!("request {} has arrival {}", r.id, r.arrival)));
            }
            if !seen.insert(r.id) {
                return Err(Error::InvalidRequest(format!("duplicate request id {}", r.id)));
            }
        }
        let mut requests = requests.to_vec();
        requests.sort_by(|a, b| a.arrival.total_cmp(&b.arrival).then(a.id.cmp(&b.id)));
        let table = match table {
            None => None,
            Some(t) => {
                if t.k() != k {
                    return Err(Error::Parameter(format!("table arity {} differs from k = {k}", t.k())));
                }
                let map = tree.points().labels().iter().map(|l| t.points().index_of(l)).collect::<Result<Vec<_>>>()?;
                Some((t, map))
            }
        };
        let mut scan_order: Vec<usize> = (0..nodes).filter(|&v| !tree.is_leaf(v)).collect();
        scan_order.sort_by_key(|&v| (Reverse(tree.depth(v)), v));
        let phases = (0..nodes)
            .map(|v| {
                if tree.is_aux(v) {
                    Vec::new()
                } else {
                    vec![Phase { start: 0.0, end: None, open_at_start: 0, timer_start: 0.0, timer_end: 0.0 }]
                }
            })
            .collect();
        let mut timers = vec![TimerState::new(); nodes];
        for v in (0..nodes).filter(|&v| tree.is_aux(v)) {
            timers[v].status = TimerStatus::Inactive;
        }
        Ok(Self {
            tree,
            k,
            requests,
            next_arrival: 0,
            now: 0.0,
            timers,
            count: vec![0; nodes],
            open: vec![Vec::new(); nodes],
            scan_order,
            events: Vec::new(),
            matches: Vec::new(),
            phases,
            table,
        })
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn timer(&self, v: usize) -> &TimerState {
        &self.timers[v]
    }

    /// Open requests in the subtree of `v`.
    pub fn open_count(&self, v: usize) -> usize {
        self.count[v]
    }

    /// Open requests, oldest first.
    pub fn open_requests(&self) -> Vec<Request> {
        let mut out: Vec<usize> = self.open.iter().flatten().copied().collect();
        out.sort_unstable();
        out.into_iter().map(|i| self.requests[i]).collect()
    }

    pub fn matches(&self) -> &[MatchRecord] {
        &self.matches
    }

    /// Whether `τ_v` currently increases.
    pub fn is_running(&self, v: usize) -> bool {
        if self.tree.is_aux(v) {
            return false;
        }
        !self.count[v].is_multiple_of(self.k) && (v == self.tree.root() || self.timers[v].status == TimerStatus::Active)
    }

    fn target(&self, v: usize) -> f64 {
        (self.timers[v].inactivations + 1) as f64 * self.tree.weight(v)
    }

    /// Next instant at which something happens: an arrival, or a running
    /// timer reaching the next multiple of its edge weight. `None` when
    /// neither exists.
    pub fn next_event_time(&self) -> Option<f64> {
        let mut best = self.requests.get(self.next_arrival).map(|r| r.arrival);
        for v in 0..self.tree.node_count() {
            if v == self.tree.root() || !self.is_running(v) {
                continue;
            }
            let t = self.now + (self.target(v) - self.timers[v].value).max(0.0);
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
        best
    }

    /// `k` open requests below internal node `u` whose leaf paths up to `u`
    /// are entirely inactive, oldest first, or `None`.
    pub fn find_matchable_set(&self, u: usize) -> Option<Vec<usize>> {
        if self.tree.is_leaf(u) || self.count[u] < self.k {
            return None;
        }
        let mut found = Vec::new();
        let mut stack: Vec<usize> = self.tree.children(u).to_vec();
        while let Some(c) = stack.pop() {
            if self.timers[c].status != TimerStatus::Inactive {
                continue;
            }
            if self.tree.is_leaf(c) {
                found.extend_from_slice(&self.open[c]);
            } else {
                stack.extend_from_slice(self.tree.children(c));
            }
        }
        if found.len() < self.k {
            return None;
        }
        found.sort_unstable();
        found.truncate(self.k);
        Some(found)
    }

    fn advance_to(&mut self, t: f64) {
        let dt = t - self.now;
        if dt > 0.0 {
            for v in 0..self.tree.node_count() {
                if self.is_running(v) {
                    self.timers[v].value += dt;
                }
            }
        }
        self.now = self.now.max(t);
    }

    fn shift_counts(&mut self, leaf: usize, up: bool) {
        let mut v = Some(leaf);
        while let Some(x) = v {
            if up {
                self.count[x] += 1;
            } else {
                self.count[x] -= 1;
            }
            v = self.tree.parent(x);
        }
    }

    fn record_match(&mut self, members: Vec<usize>, lca: usize) {
        let now = self.now;
        for &i in &members {
            let leaf = self.requests[i].leaf;
            self.open[leaf].retain(|&j| j != i);
            self.shift_counts(leaf, false);
        }
        let mut consumed = Vec::new();
        for &i in &members {
            for v in self.tree.path_nodes(self.requests[i].leaf, lca) {
                if !self.tree.is_aux(v) && !consumed.contains(&v) {
                    consumed.push(v);
                }
            }
        }
        consumed.sort_unstable();
        let leaves: Vec<usize> = members.iter().map(|&i| self.requests[i].leaf).collect();
        let pts: Vec<usize> = leaves.iter().map(|&l| self.tree.leaf_point(l).expect("leaves host points")).collect();
        let mut space_tree = 0.0;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                space_tree += self.tree.tree_distance(pts[a], pts[b]);
            }
        }
        let space_metric =
            self.table.as_ref().map(|(t, map)| t.get(&KMultiset::from_indices(pts.iter().map(|&p| map[p]).collect())));
        let index = self.matches.len();
        self.matches.push(MatchRecord {
            requests: members.iter().map(|&i| self.requests[i].id).collect(),
            time: now,
            lca,
            consumed: consumed.clone(),
            space_tree,
            space_metric,
        });
        self.events.push(Event { time: now, kind: EventKind::Match { index } });
        for v in consumed {
            let value = self.timers[v].value;
            debug_assert_eq!(self.timers[v].status, TimerStatus::Inactive);
            self.timers[v].status = TimerStatus::Active;
            self.timers[v].consumed_count += 1;
            self.events.push(Event { time: now, kind: EventKind::Consumption { node: v, value } });
            let open_at_start = self.count[v];
            let ph = &mut self.phases[v];
            let last = ph.last_mut().expect("non-aux nodes have a phase");
            last.end = Some(now);
            last.timer_end = value;
            ph.push(Phase { start: now, end: None, open_at_start, timer_start: value, timer_end: value });
        }
    }

    /// Advances to the next event instant and processes it. Returns `false`
    /// when nothing is left to happen.
    pub fn step(&mut self) -> bool {
        let Some(t) = self.next_event_time() else {
            return false;
        };
        self.advance_to(t);
        let now = self.now;

        let mut touched = Vec::new();
        while let Some(r) = self.requests.get(self.next_arrival).copied() {
            if r.arrival > now {
                break;
            }
            let i = self.next_arrival;
            self.next_arrival += 1;
            self.open[r.leaf].push(i);
            self.shift_counts(r.leaf, true);
            self.events.push(Event { time: now, kind: EventKind::Arrival { request: r.id, leaf: r.leaf } });
            if !touched.contains(&r.leaf) {
                touched.push(r.leaf);
            }
        }

        touched.sort_unstable();
        for leaf in touched {
            while self.open[leaf].len() >= self.k {
                let members = self.open[leaf][..self.k].to_vec();
                self.record_match(members, leaf);
            }
        }

        for v in 0..self.tree.node_count() {
            if v == self.tree.root() || self.tree.is_aux(v) || self.timers[v].status != TimerStatus::Active {
                continue;
            }
            let target = self.target(v);
            if self.timers[v].value >= target - due_slack(target) {
                let tm = &mut self.timers[v];
                tm.value = target;
                tm.status = TimerStatus::Inactive;
                tm.inactivations += 1;
                self.events.push(Event { time: now, kind: EventKind::Inactivation { node: v, value: target } });
            }
        }

        'scan: loop {
            for idx in 0..self.scan_order.len() {
                let u = self.scan_order[idx];
                if let Some(members) = self.find_matchable_set(u) {
                    self.record_match(members, u);
                    continue 'scan;
                }
            }
            break;
        }
        true
    }

    /// Runs to completion and assembles the cost report and trace.
    pub fn run(mut self) -> (CostReport, SimulationTrace) {
        while self.step() {}
        self.finish()
    }

    fn finish(mut self) -> (CostReport, SimulationTrace) {
        for v in 0..self.tree.node_count() {
            let value = self.timers[v].value;
            if let Some(last) = self.phases[v].last_mut() {
                last.timer_end = value;
            }
        }
        let arrival: std::collections::HashMap<u64, f64> = self.requests.iter().map(|r| (r.id, r.arrival)).collect();
        let time: f64 = self.matches.iter().flat_map(|m| m.requests.iter().map(|id| m.time - arrival[id])).sum();
        let space_tree: f64 = self.matches.iter().map(|m| m.space_tree).sum();
        let space_metric =
            self.table.as_ref().map(|_| self.matches.iter().map(|m| m.space_metric.unwrap_or(0.0)).sum::<f64>());
        let unmatched: Vec<u64> = self.open_requests().iter().map(|r| r.id).collect();
        let root = self.tree.root();
        let sum_timers: f64 = self.timers.iter().map(|t| t.value).sum();
        let sum_timers_non_root = sum_timers - self.timers[root].value;
        let k = self.k;
        let cost = CostReport {
            k,
            requests: self.requests.len(),
            matches: self.matches.len(),
            space_tree,
            space_metric,
            time,
            total: space_tree + time,
            total_metric: space_metric.map(|s| s + time),
            infinite_time_charge: !unmatched.is_empty(),
            unmatched,
            sum_timers,
            sum_timers_non_root,
            space_bound: k as f64 * sum_timers_non_root,
            time_bound: k as f64 * sum_timers,
        };
        let trace = SimulationTrace {
            k,
            requests: self.requests,
            events: self.events,
            matches: self.matches,
            timers: self.timers,
            phases: self.phases,
            cost: cost.clone(),
        };
        (cost, trace)
    }
}

/// Runs the timer algorithm on `requests` over `tree`.
///
/// With a `table`, each match is also charged the generalized distance of
/// its member locations; the table's points are matched to the tree's by
/// label.
pub fn simulate(
    tree: &TreeMetric,
    requests: &[Request],
    k: usize,
    table: Option<&HMetricTable>,
) -> Result<(CostReport, SimulationTrace)> {
    Ok(Simulator::new(tree, requests, k, table)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmetrics::PointSet;

    fn star(wu: f64, wv: f64) -> TreeMetric {
        TreeMetric::new(
            PointSet::new(["u", "v"]).unwrap(),
            vec![None, Some(0), Some(0)],
            vec![f64::INFINITY, wu, wv],
            &[(1, 0), (2, 1)],
        )
        .unwrap()
    }

    fn req(id: u64, leaf: usize, t: f64) -> Request {
        Request { id, leaf, arrival: t }
    }

    #[test]
    fn same_leaf_batch() {
        let t = star(1.0, 1.0);
        let rs: Vec<_> = (0..3).map(|i| req(i, 1, 0.0)).collect();
        let (c, tr) = simulate(&t, &rs, 3, None).unwrap();
        assert_eq!(tr.matches.len(), 1);
        assert_eq!(tr.matches[0].time, 0.0);
        assert_eq!((c.space_tree, c.time), (0.0, 0.0));
    }

    #[test]
    fn star_equal_weights() {
        let t = star(1.0, 1.0);
        let rs = [req(0, 1, 0.0), req(1, 1, 0.0), req(2, 2, 0.0)];
        let (c, tr) = simulate(&t, &rs, 3, None).unwrap();
        assert_eq!(tr.matches.len(), 1);
        assert_eq!(tr.matches[0].time, 1.0);
        assert_eq!(tr.matches[0].lca, 0);
        assert_eq!(c.time, 3.0);
        assert_eq!(c.space_tree, 4.0);
        assert_eq!(tr.timers[1].value + tr.timers[2].value, 2.0);
    }

    #[test]
    fn star_unequal_weights() {
        let t = star(2.0, 1.0);
        let rs = [req(0, 1, 0.0), req(1, 2, 0.0), req(2, 2, 0.0)];
        let (c, tr) = simulate(&t, &rs, 3, None).unwrap();
        assert_eq!(tr.matches[0].time, 2.0);
        assert_eq!(c.time, 6.0);
        assert_eq!(c.space_tree, 6.0);
        assert_eq!(tr.timers[1].value, 2.0);
        assert_eq!(tr.timers[2].value, 1.0);
        assert_eq!(tr.timers[1].status, TimerStatus::Active);
        assert_eq!(tr.timers[2].status, TimerStatus::Active);
        assert_eq!(tr.timers[1].consumed_count, 1);
    }

    #[test]
    fn next_event_and_matchable_set() {
        let t = star(1.0, 1.0);
        let rs = [req(0, 1, 0.0), req(1, 1, 0.0), req(2, 2, 0.0), req(3, 1, 7.0), req(4, 1, 7.0), req(5, 1, 7.0)];
        let mut s = Simulator::new(&t, &rs, 3, None).unwrap();
        assert_eq!(s.next_event_time(), Some(0.0));
        assert!(s.step());
        assert_eq!(s.find_matchable_set(0), None);
        assert_eq!(s.next_event_time(), Some(1.0));
        s.advance_to(0.4);
        assert!((s.timer(1).value - 0.4).abs() < 1e-15);
        assert_eq!(s.next_event_time(), Some(1.0));
        assert!(s.step());
        assert_eq!(s.matches().len(), 1);
        assert_eq!(s.next_event_time(), Some(7.0));
    }

    #[test]
    fn leftover_requests_reported() {
        let t = star(1.0, 1.0);
        let rs = [req(0, 1, 0.0), req(1, 2, 0.5)];
        let (c, _) = simulate(&t, &rs, 3, None).unwrap();
        assert_eq!(c.unmatched, vec![0, 1]);
        assert!(c.infinite_time_charge);
    }

    #[test]
    fn rejects_bad_requests() {
        let t = star(1.0, 1.0);
        assert!(simulate(&t, &[req(0, 0, 0.0)], 3, None).is_err());
        assert!(simulate(&t, &[req(0, 1, -1.0)], 3, None).is_err());
        assert!(simulate(&t, &[req(0, 1, 0.0), req(0, 2, 0.0)], 3, None).is_err());
    }
}
