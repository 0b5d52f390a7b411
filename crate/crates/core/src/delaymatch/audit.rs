use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{EventKind, SimulationTrace, TimerStatus};
use crate::embedding::TreeMetric;
use crate::oracle::OptSolution;
use crate::tol;

/// Per-phase view of one node against an offline schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseAudit {
    pub node: usize,
    pub index: usize,
    pub start: f64,
    pub open_online: usize,
    pub open_offline: usize,
    /// `(|Ĉ_v| − |C_v|) mod k` at the phase start.
    pub j: usize,
    pub offline_match_on_top: bool,
    pub harmful: bool,
}

/// `𝒯_v` against the offline timer `𝒯̂_v` and offline tree space `σ̂_v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDiagnostic {
    pub node: usize,
    pub timer: f64,
    pub offline_timer: f64,
    pub offline_space: f64,
    /// `𝒯_v / (𝒯̂_v + σ̂_v)`; `None` when the denominator is 0.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub perfect_partition: bool,
    pub leaf_capacity: bool,
    pub max_leaf_open: usize,
    pub timer_soundness: bool,
    pub space_tree: f64,
    pub space_bound: f64,
    pub space_ok: bool,
    pub time: f64,
    pub time_bound: f64,
    pub time_ok: bool,
    /// `None` without an offline schedule.
    pub observation_ok: Option<bool>,
    pub harmful_runs: usize,
    pub phases: Vec<PhaseAudit>,
    pub diagnostics: Vec<NodeDiagnostic>,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Offline open count below a node as a step function of time: value after
/// all events at each breakpoint.
struct OfflineCount {
    times: Vec<f64>,
    counts: Vec<usize>,
}

impl OfflineCount {
    fn new(spans: &[(f64, f64)]) -> Self {
        let mut deltas: Vec<(f64, i64)> = Vec::with_capacity(spans.len() * 2);
        for &(a, m) in spans {
            deltas.push((a, 1));
            deltas.push((m, -1));
        }
        deltas.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut times = Vec::new();
        let mut counts = Vec::new();
        let mut c: i64 = 0;
        for (t, d) in deltas {
            c += d;
            if times.last() == Some(&t) {
                *counts.last_mut().unwrap() = c as usize;
            } else {
                times.push(t);
                counts.push(c as usize);
            }
        }
        Self { times, counts }
    }

    fn at(&self, t: f64) -> usize {
        match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            i => self.counts[i - 1],
        }
    }

    /// Time within `[a, b)` during which the count is not a multiple of `k`.
    fn running_time(&self, a: f64, b: f64, k: usize) -> f64 {
        let mut total = 0.0;
        for i in 0..self.times.len() {
            let lo = self.times[i].max(a);
            let hi = self.times.get(i + 1).copied().unwrap_or(f64::INFINITY).min(b);
            if hi > lo && !self.counts[i].is_multiple_of(k) {
                total += hi - lo;
            }
        }
        total
    }
}

/// Checks a completed trace.
///
/// Always: every request is matched exactly once in groups of `k` no earlier
/// than its arrival; no leaf holds `k` open requests once an instant has been
/// processed; inactivation values are positive multiples of the edge weight;
/// `space_tree ≤ k·Σ_{v≠root} 𝒯_v` and `time ≤ k·Σ_v 𝒯_v`.
///
/// With an offline schedule: every phase is classified by
/// `j = (|Ĉ_v| − |C_v|) mod k` at its start and by whether the schedule
/// matches across the edge above `v` during it. A phase is harmful if
/// `j ≠ 0` and no such match occurs. Along consecutive harmful phases with
/// no arrival below `v` between their starts, `|C_v| mod k` at phase starts
/// must not increase; an arrival starts a new run. Per-node ratios
/// `𝒯_v / (𝒯̂_v + σ̂_v)` are reported without a bound.
pub fn audit_trace(tree: &TreeMetric, trace: &SimulationTrace, opt: Option<&OptSolution>) -> AuditReport {
    let k = trace.k;
    let mut rep = AuditReport::default();
    let bad = |rep: &mut AuditReport, msg: String| rep.violations.push(msg);

    let arrival: HashMap<u64, f64> = trace.requests.iter().map(|r| (r.id, r.arrival)).collect();
    let leaf_of: HashMap<u64, usize> = trace.requests.iter().map(|r| (r.id, r.leaf)).collect();
    let mut seen = HashSet::new();
    rep.perfect_partition = true;
    for (i, m) in trace.matches.iter().enumerate() {
        let distinct: HashSet<_> = m.requests.iter().collect();
        if m.requests.len() != k || distinct.len() != k {
            rep.perfect_partition = false;
            bad(&mut rep, format!("match {i} has {} members", m.requests.len()));
        }
        for id in &m.requests {
            if !seen.insert(*id) {
                rep.perfect_partition = false;
                bad(&mut rep, format!("request {id} matched twice"));
            }
            match arrival.get(id) {
                Some(&a) if m.time >= a => {}
                _ => {
                    rep.perfect_partition = false;
                    bad(&mut rep, format!("match {i} precedes arrival of request {id}"));
                }
            }
        }
    }
    if seen.len() != trace.requests.len() {
        rep.perfect_partition = false;
        bad(&mut rep, format!("{} of {} requests matched", seen.len(), trace.requests.len()));
    }

    rep.leaf_capacity = true;
    let mut open = vec![0usize; tree.node_count()];
    let mut i = 0;
    while i < trace.events.len() {
        let t = trace.events[i].time;
        while i < trace.events.len() && trace.events[i].time == t {
            match &trace.events[i].kind {
                EventKind::Arrival { leaf, .. } => open[*leaf] += 1,
                EventKind::Match { index } => {
                    for id in &trace.matches[*index].requests {
                        open[leaf_of[id]] -= 1;
                    }
                }
                _ => {}
            }
            i += 1;
        }
        let peak = open.iter().copied().max().unwrap_or(0);
        rep.max_leaf_open = rep.max_leaf_open.max(peak);
        if peak >= k {
            rep.leaf_capacity = false;
            bad(&mut rep, format!("a leaf holds {peak} open requests after t = {t}"));
        }
    }

    rep.timer_soundness = true;
    let mut last_inactive = vec![0.0f64; tree.node_count()];
    let is_multiple = |v: usize, x: f64| {
        let w = tree.weight(v);
        let m = (x / w).round();
        m >= 1.0 && tol::approx_eq(x, m * w)
    };
    for e in &trace.events {
        if let EventKind::Inactivation { node, value } = e.kind {
            if !is_multiple(node, value) || value <= last_inactive[node] {
                rep.timer_soundness = false;
                bad(&mut rep, format!("node {node} inactivated at value {value}"));
            }
            last_inactive[node] = value;
        }
    }
    for (v, t) in trace.timers.iter().enumerate() {
        if t.status == TimerStatus::Inactive && !tree.is_aux(v) && !is_multiple(v, t.value) {
            rep.timer_soundness = false;
            bad(&mut rep, format!("node {v} ends inactive at value {}", t.value));
        }
    }

    let c = &trace.cost;
    rep.space_tree = c.space_tree;
    rep.space_bound = c.space_bound;
    rep.space_ok = tol::leq(c.space_tree, c.space_bound);
    if !rep.space_ok {
        bad(&mut rep, format!("space {} exceeds k·Σ𝒯 = {}", c.space_tree, c.space_bound));
    }
    rep.time = c.time;
    rep.time_bound = c.time_bound;
    rep.time_ok = tol::leq(c.time, c.time_bound);
    if !rep.time_ok {
        bad(&mut rep, format!("time {} exceeds k·Σ𝒯 = {}", c.time, c.time_bound));
    }

    if let Some(opt) = opt {
        offline_checks(tree, trace, opt, &leaf_of, &arrival, &mut rep);
    }
    rep
}

fn offline_checks(
    tree: &TreeMetric,
    trace: &SimulationTrace,
    opt: &OptSolution,
    leaf_of: &HashMap<u64, usize>,
    arrival: &HashMap<u64, f64>,
    rep: &mut AuditReport,
) {
    let k = trace.k;
    let root = tree.root();
    let mut ok = true;
    let mut arrivals_at: Vec<(usize, f64)> = trace.requests.iter().map(|r| (r.leaf, r.arrival)).collect();
    arrivals_at.sort_by(|a, b| a.1.total_cmp(&b.1));
    for v in 0..tree.node_count() {
        if v == root || tree.is_aux(v) {
            continue;
        }
        let below = |id: &u64| tree.is_ancestor(v, leaf_of[id]);
        let spans: Vec<(f64, f64)> = opt
            .groups
            .iter()
            .flat_map(|g| g.requests.iter().filter(|id| below(id)).map(move |id| (arrival[id], g.time)))
            .collect();
        let offline = OfflineCount::new(&spans);
        let on_top: Vec<f64> = opt
            .groups
            .iter()
            .filter(|g| {
                let inside = g.requests.iter().filter(|id| below(id)).count();
                inside > 0 && inside < g.requests.len()
            })
            .map(|g| g.time)
            .collect();

        let t_hat = offline.running_time(0.0, f64::INFINITY, k);
        let sigma_hat = on_top.len() as f64 * tree.weight(v);
        let timer = trace.timers[v].value;
        let denom = t_hat + sigma_hat;
        rep.diagnostics.push(NodeDiagnostic {
            node: v,
            timer,
            offline_timer: t_hat,
            offline_space: sigma_hat,
            ratio: (denom > 0.0).then(|| timer / denom),
        });

        let arrivals: Vec<f64> =
            arrivals_at.iter().filter(|(leaf, _)| tree.is_ancestor(v, *leaf)).map(|&(_, t)| t).collect();
        let arrived_between = |a: f64, b: f64| {
            let i = arrivals.partition_point(|&t| t <= a);
            i < arrivals.len() && arrivals[i] <= b
        };
        let mut run_prev: Option<(usize, f64)> = None;
        for (index, ph) in trace.phases[v].iter().enumerate() {
            let end = ph.end.unwrap_or(f64::INFINITY);
            let open_offline = offline.at(ph.start);
            let j = (open_offline % k + k - ph.open_at_start % k) % k;
            let offline_match_on_top = on_top.iter().any(|&t| t >= ph.start && t < end);
            let harmful = j != 0 && !offline_match_on_top;
            if harmful {
                let r = ph.open_at_start % k;
                match run_prev {
                    Some((_, since)) if arrived_between(since, ph.start) => rep.harmful_runs += 1,
                    None => rep.harmful_runs += 1,
                    Some((p, _)) if r > p => {
                        ok = false;
                        rep.violations.push(format!(
                            "node {v}: open count mod k rose from {p} to {r} across harmful phases ending at phase {index}"
                        ));
                    }
                    Some(_) => {}
                }
                run_prev = Some((r, ph.start));
            } else {
                run_prev = None;
            }
            rep.phases.push(PhaseAudit {
                node: v,
                index,
                start: ph.start,
                open_online: ph.open_at_start,
                open_offline,
                j,
                offline_match_on_top,
                harmful,
            });
        }
    }
    rep.observation_ok = Some(ok);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offline_count_steps() {
        let c = OfflineCount::new(&[(0.0, 2.0), (1.0, 2.0), (1.0, 3.0)]);
        assert_eq!(c.at(0.0), 1);
        assert_eq!(c.at(1.0), 3);
        assert_eq!(c.at(2.0), 1);
        assert_eq!(c.at(3.0), 0);
        // counts 1 on [0,1), 3 on [1,2), 1 on [2,3)
        assert_eq!(c.running_time(0.0, f64::INFINITY, 3), 2.0);
        assert_eq!(c.running_time(0.5, 2.5, 3), 1.0);
    }
}
