//! End-to-end pipeline and experiment sweeps.
//!
//! [`run_pipeline`] gates a table on the H-metric axioms, induces its pairwise
//! metric, embeds and contracts it, runs the timer algorithm and compares the
//! result with the offline optimum. The suites repeat this over seeds and
//! emit rows ready for CSV output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{self, AdversaryConfig, Construction, PatternCosts};
use crate::delaymatch::{audit_trace, simulate, AuditReport, Request, SimulationTrace};
use crate::embedding::{frt_embed, TreeMetric};
use crate::error::{Error, Result};
use crate::gmetrics::{build_max_diameter, HMetricTable};
use crate::oracle::{lb_min_over_strategies, opt_offline_table, OptSolution};
use crate::reduction::{induce_pairwise, verify_sandwich, PairwiseMetric, SandwichReport};
use crate::request::TimedRequest;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    pub requests: usize,
    pub alg_space_tree: f64,
    pub alg_space_metric: f64,
    pub alg_time: f64,
    /// Space in the input table plus waiting time.
    pub alg_total: f64,
    pub opt_space: Option<f64>,
    pub opt_time: Option<f64>,
    pub opt_total: Option<f64>,
    /// `alg_total / opt_total`; 1 when both are 0, absent without requests or
    /// without an optimum.
    pub ratio: Option<f64>,
    pub opt_budget_exceeded: bool,
    pub height_before: usize,
    pub height_after: usize,
    pub sum_timers: f64,
    pub space_bound: f64,
    pub time_bound: f64,
    pub audit_passed: bool,
    pub observation_ok: Option<bool>,
}

/// Every stage output of one pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub record: RatioRecord,
    pub pairwise: PairwiseMetric,
    pub sandwich: SandwichReport,
    pub tree: TreeMetric,
    pub trace: SimulationTrace,
    pub opt: Option<OptSolution>,
    pub audit: AuditReport,
}

/// Runs every stage on `requests` (points index the table's point set).
///
/// With `opt_budget = None` the offline optimum is skipped; if the search
/// exceeds the budget the ratio is omitted and flagged.
pub fn run_pipeline(
    table: &HMetricTable,
    requests: &[TimedRequest],
    seed: u64,
    opt_budget: Option<u128>,
) -> Result<PipelineRun> {
    let k = table.k();
    if !requests.len().is_multiple_of(k) {
        return Err(Error::InvalidRequest(format!("{} requests cannot be split into groups of {k}", requests.len())));
    }
    let pairwise = induce_pairwise(table)?;
    let sandwich = verify_sandwich(table, &pairwise)?;
    let raw = frt_embed(&pairwise, seed)?;
    let tree = raw.contract_height();
    let on_tree = requests.iter().map(|r| Request::on_tree(&tree, r)).collect::<Result<Vec<_>>>()?;
    let (cost, trace) = simulate(&tree, &on_tree, k, Some(table))?;

    let (opt, exceeded) = match opt_budget {
        None => (None, false),
        Some(b) => match opt_offline_table(table, requests, b) {
            Ok(s) => (Some(s), false),
            Err(e) if e.is_budget() => (None, true),
            Err(e) => return Err(e),
        },
    };
    let audit = audit_trace(&tree, &trace, opt.as_ref());

    let alg_space_metric = cost.space_metric.unwrap_or(f64::NAN);
    let alg_total = alg_space_metric + cost.time;
    let ratio = match &opt {
        _ if requests.is_empty() => None,
        None => None,
        Some(o) if o.total > 0.0 => Some(alg_total / o.total),
        Some(_) if alg_total == 0.0 => Some(1.0),
        Some(_) => Some(f64::INFINITY),
    };
    let record = RatioRecord {
        seed,
        n: table.n(),
        k,
        requests: requests.len(),
        alg_space_tree: cost.space_tree,
        alg_space_metric,
        alg_time: cost.time,
        alg_total,
        opt_space: opt.as_ref().map(|o| o.space),
        opt_time: opt.as_ref().map(|o| o.time),
        opt_total: opt.as_ref().map(|o| o.total),
        ratio,
        opt_budget_exceeded: exceeded,
        height_before: raw.height(),
        height_after: tree.height(),
        sum_timers: cost.sum_timers,
        space_bound: cost.space_bound,
        time_bound: cost.time_bound,
        audit_passed: audit.passed(),
        observation_ok: audit.observation_ok,
    };
    Ok(PipelineRun { record, pairwise, sandwich, tree, trace, opt, audit })
}

/// `count` requests at uniformly random points with rate-1 exponential gaps.
pub fn random_workload(n_points: usize, count: usize, rng: &mut impl Rng) -> Vec<TimedRequest> {
    let mut t = 0.0;
    (0..count)
        .map(|i| {
            let u: f64 = rng.gen();
            t += -(1.0 - u).ln();
            TimedRequest::new(i as u64, rng.gen_range(0..n_points), t)
        })
        .collect()
}

/// `n` uniform points in the unit square.
pub fn random_euclidean(n: usize, rng: &mut impl Rng) -> Result<PairwiseMetric> {
    let coords: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    PairwiseMetric::euclidean(&coords)
}

/// Max-diameter table over `n` random planar points and a random workload of
/// `count` requests, all drawn from `seed`.
pub fn random_instance(seed: u64, n: usize, k: usize, count: usize) -> Result<(HMetricTable, Vec<TimedRequest>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let base = random_euclidean(n, &mut rng)?;
    let table = build_max_diameter(&base, k)?;
    let reqs = random_workload(n, count, &mut rng);
    Ok((table, reqs))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub construction: Construction,
    pub k: usize,
    pub r: usize,
    pub tau: f64,
    pub eps: f64,
    pub cost_p1: f64,
    pub cost_p2: f64,
    pub cost_combined: f64,
    /// Smallest expected cost of a deterministic strategy.
    pub min_expected_cost: f64,
    pub argmin: String,
    /// Expected offline optimum over the stopping phase.
    pub opt_expected: f64,
    pub ratio: f64,
    /// Sampled sequences whose optimum was recomputed exhaustively.
    pub trials: usize,
    /// Largest gap between the recomputed and the predicted optimum.
    pub opt_max_abs_error: Option<f64>,
}

/// `1/max(r, 4)`, which keeps `τ < 1/3`.
pub fn default_tau(r: usize) -> f64 {
    1.0 / r.max(4) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub construction: Construction,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    /// `None` selects [`default_tau`] per `r`.
    pub tau: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub opt_budget: u128,
}

/// One row per `r`: the exact strategy minimum, the expected optimum and
/// their ratio, with the optimum recomputed on `trials` sampled sequences.
pub fn run_lowerbound_suite(params: &LowerBoundParams, rs: &[usize]) -> Result<Vec<LowerBoundRow>> {
    let costs: PatternCosts = adversary::pattern_costs(params.construction, params.k, params.eps, params.delta)?;
    rs.iter()
        .map(|&r| {
            let tau = params.tau.unwrap_or_else(|| default_tau(r));
            let cfg = AdversaryConfig {
                construction: params.construction,
                r,
                tau,
                k: params.k,
                eps: params.eps,
                delta: params.delta,
                seed: params.seed,
            };
            cfg.validate()?;
            let (min, arg) = lb_min_over_strategies(r, tau, params.k, &costs)?;
            let opt_expected =
                (1..=r).map(|t| adversary::predicted_opt(&costs, params.k, tau, t)).sum::<f64>() / r as f64;
            let errs = (0..params.trials as u64)
                .into_par_iter()
                .map(|i| {
                    let inst =
                        adversary::generate(&AdversaryConfig { seed: params.seed.wrapping_add(i), ..cfg.clone() })?;
                    let opt = opt_offline_table(&inst.table, &inst.requests, params.opt_budget)?;
                    let predicted = adversary::predicted_opt(&costs, params.k, tau, inst.termination_phase);
                    Ok((opt.total - predicted).abs())
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(LowerBoundRow {
                construction: params.construction,
                k: params.k,
                r,
                tau,
                eps: params.eps,
                cost_p1: costs.p1,
                cost_p2: costs.p2,
                cost_combined: costs.combined,
                min_expected_cost: min,
                argmin: arg.bits(),
                opt_expected,
                ratio: min / opt_expected,
                trials: params.trials,
                opt_max_abs_error: errs.into_iter().reduce(f64::max),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompetitiveParams {
    pub k: usize,
    pub requests: usize,
    pub seeds: Vec<u64>,
    pub opt_budget: u128,
    /// Multiplier of the `c·log₂ n` reference column.
    pub envelope_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompetitiveSummary {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub measured: usize,
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub envelope: f64,
    pub audits_passed: usize,
}

/// Runs [`run_pipeline`] on [`random_instance`]s for every `n` and seed.
/// Records are ordered by `(n, seed)` as listed.
pub fn run_competitive_suite(
    params: &CompetitiveParams,
    ns: &[usize],
) -> Result<(Vec<RatioRecord>, Vec<CompetitiveSummary>)> {
    let jobs: Vec<(usize, u64)> = ns.iter().flat_map(|&n| params.seeds.iter().map(move |&s| (n, s))).collect();
    let records = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let (table, reqs) = random_instance(seed, n, params.k, params.requests)?;
            Ok(run_pipeline(&table, &reqs, seed, Some(params.opt_budget))?.record)
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = ns
        .iter()
        .map(|&n| {
            let rows: Vec<&RatioRecord> = records.iter().filter(|r| r.n == n).collect();
            let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
            CompetitiveSummary {
                n,
                k: params.k,
                trials: rows.len(),
                measured: ratios.len(),
                mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
                max_ratio: ratios.iter().copied().reduce(f64::max),
                envelope: params.envelope_c * (n as f64).log2(),
                audits_passed: rows.iter().filter(|r| r.audit_passed).count(),
            }
        })
        .collect();
    Ok((records, summaries))
}
