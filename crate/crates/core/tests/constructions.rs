//! Named tables, lower-bound constructions and pipeline examples.

use kmpmd::adversary::{generate, pattern_costs, predicted_opt, AdversaryConfig, Construction, DEFAULT_DELTA};
use kmpmd::gmetrics::{
    build_counterexample_k_enriched, build_example_binary, build_example_platforms, check_axiom, classify, Axiom,
    Family, KMultiset,
};
use kmpmd::harness::{run_competitive_suite, run_lowerbound_suite, run_pipeline, CompetitiveParams, LowerBoundParams};
use kmpmd::oracle::{lb_min_over_strategies, opt_offline_table, DEFAULT_OPT_BUDGET};
use kmpmd::{Error, HMetricTable, PointSet, TimedRequest};

fn lookup(t: &HMetricTable, labels: &[&str]) -> f64 {
    t.lookup(labels).unwrap()
}

#[test]
fn platform_table_values() {
    let t = build_example_platforms();
    assert_eq!(lookup(&t, &["a", "a", "b", "b"]), 1.0);
    assert_eq!(lookup(&t, &["b", "b", "c", "c"]), 0.5);
    assert_eq!(lookup(&t, &["a", "a", "a", "b"]), 2.0);
    assert_eq!(lookup(&t, &["b", "c", "c", "c"]), 1.5);
    assert_eq!(lookup(&t, &["a", "a", "b", "c"]), 2.5);
    assert_eq!(lookup(&t, &["c", "c", "c", "c"]), 0.0);
}

#[test]
fn binary_table_is_h_metric() {
    let t = build_example_binary();
    assert_eq!(lookup(&t, &["a", "b", "b", "b"]), 2.0);
    assert_eq!(lookup(&t, &["a", "a", "b", "b"]), 1.0);
    assert!(classify(&t).unwrap().contains(Family::HMetric));
}

/// Two points, `ε` on `a^i b^(k−i)` exactly when `1 < i < ⌊(k−1)/2⌋` counts
/// either point.
fn literal_enriched(k: usize, eps: f64) -> HMetricTable {
    let hi = (k - 1) / 2;
    HMetricTable::from_fn(k, PointSet::new(["a", "b"]).unwrap(), |m| {
        let a = m.entries().iter().filter(|&&x| x == 0).count();
        let low = |i: usize| 1 < i && i < hi;
        if m.is_constant() {
            0.0
        } else if low(a) || low(k - a) {
            eps
        } else {
            1.0
        }
    })
    .unwrap()
}

#[test]
fn literal_enriched_table_breaks_split_triangle() {
    for k in [7, 9, 11] {
        let t = literal_enriched(k, 0.01);
        let r = check_axiom(&t, Axiom::DeltaH).unwrap();
        let w = r.witness.expect("violation expected");
        assert!(w.is_violated(&t));
    }
    // a⁴b³ costs 1 but splits into two ε-valued a²b⁵ halves
    let t = literal_enriched(7, 0.01);
    let whole = t.get(&KMultiset::from_counts(&[(0, 4), (1, 3)]));
    let half = t.get(&KMultiset::from_counts(&[(0, 2), (1, 5)]));
    assert!(whole > 2.0 * half);
}

#[test]
fn enriched_prime_arity_is_rejected() {
    assert!(matches!(build_counterexample_k_enriched(7, 0.01), Err(Error::Parameter(_))));
    assert!(build_counterexample_k_enriched(9, 0.01).is_ok());
}

#[test]
fn pattern_costs_per_construction() {
    let c = pattern_costs(Construction::TwoMetric, 3, 0.01, DEFAULT_DELTA).unwrap();
    assert_eq!((c.p1, c.p2, c.combined), (0.0, 1.0, 0.0));
    let c = pattern_costs(Construction::DMetric, 3, 0.01, 1e-3).unwrap();
    assert_eq!((c.p1, c.p2, c.combined), (0.0, 1.0, 2e-3));
    let c = pattern_costs(Construction::NMetric, 4, 0.01, DEFAULT_DELTA).unwrap();
    assert_eq!((c.p1, c.p2, c.combined), (0.01, 1.0, 0.02));
    let c = pattern_costs(Construction::KMetric, 5, 0.01, DEFAULT_DELTA).unwrap();
    assert_eq!((c.p1, c.p2, c.combined), (0.0, 1.0, 0.02));
    // the second pattern is already cheap, so waiting never pays off
    let c = pattern_costs(Construction::KEnriched, 6, 0.01, DEFAULT_DELTA).unwrap();
    assert_eq!((c.p1, c.p2), (0.0, 0.01));
    assert_eq!(predicted_opt(&c, 6, 0.1, 3), 0.01);
}

#[test]
fn generated_tables_have_claimed_families() {
    let cases = [
        (Construction::TwoMetric, Family::TwoMetric, None),
        (Construction::DMetric, Family::DMetric, None),
        (Construction::NMetric, Family::NMetric, Some(Family::KMetric)),
        (Construction::KMetric, Family::KMetric, Some(Family::HMetric)),
    ];
    for (construction, member, not_member) in cases {
        let g = generate(&AdversaryConfig::new(construction, 3, 0.1, 1)).unwrap();
        let c = classify(&g.table).unwrap();
        assert!(c.contains(member), "{construction} should be {member}");
        if let Some(f) = not_member {
            assert!(!c.contains(f), "{construction} should not be {f}");
        }
    }
    let g = generate(&AdversaryConfig::new(Construction::KEnriched, 3, 0.1, 1)).unwrap();
    let c = classify(&g.table).unwrap();
    assert!(c.report(Axiom::SHStar).unwrap().holds && c.report(Axiom::DeltaH).unwrap().holds);
    assert!(!c.report(Axiom::SH).unwrap().holds);
}

#[test]
fn optimum_matches_prediction_for_every_construction() {
    for construction in Construction::ALL {
        for seed in 0..8 {
            let cfg = AdversaryConfig::new(construction, 4, 0.05, seed);
            let g = generate(&cfg).unwrap();
            let costs = pattern_costs(construction, cfg.k, cfg.eps, cfg.delta).unwrap();
            let opt = opt_offline_table(&g.table, &g.requests, DEFAULT_OPT_BUDGET).unwrap();
            let want = predicted_opt(&costs, cfg.k, cfg.tau, g.termination_phase);
            assert!((opt.total - want).abs() < 1e-12, "{construction} seed {seed}: {} vs {want}", opt.total);
        }
    }
}

#[test]
fn single_phase_strategies() {
    let costs = pattern_costs(Construction::TwoMetric, 3, 0.01, DEFAULT_DELTA).unwrap();
    let (v, b) = lb_min_over_strategies(1, 0.1, 3, &costs).unwrap();
    assert!((v - 0.3f64.min(1.0)).abs() < 1e-12);
    assert_eq!(b.bits(), "1");
    assert!(lb_min_over_strategies(21, 0.01, 3, &costs).unwrap_err().is_budget());
}

#[test]
fn lowerbound_suite_grows_for_n_metric() {
    let params = LowerBoundParams {
        construction: Construction::NMetric,
        k: 4,
        eps: 0.01,
        delta: DEFAULT_DELTA,
        tau: None,
        trials: 4,
        seed: 0,
        opt_budget: DEFAULT_OPT_BUDGET,
    };
    let rows = run_lowerbound_suite(&params, &[4, 8, 12]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].ratio > w[0].ratio));
    assert!(rows.iter().all(|r| r.opt_max_abs_error.unwrap() < 1e-12));
    let trivial =
        run_lowerbound_suite(&LowerBoundParams { construction: Construction::TwoMetric, k: 3, ..params }, &[1])
            .unwrap();
    assert!(trivial[0].ratio.is_finite() && trivial[0].ratio >= 1.0);
}

#[test]
fn pipeline_on_platform_table() {
    let t = build_example_platforms();
    let reqs: Vec<TimedRequest> = [(0, 0.0), (1, 0.3), (2, 0.4), (1, 1.0), (0, 1.2), (0, 2.0), (2, 2.5), (1, 2.6)]
        .iter()
        .enumerate()
        .map(|(i, &(p, a))| TimedRequest::new(i as u64, p, a))
        .collect();
    let run = run_pipeline(&t, &reqs, 11, Some(DEFAULT_OPT_BUDGET)).unwrap();
    assert!(run.record.ratio.unwrap() >= 1.0);
    assert!(run.audit.passed());
    assert_eq!(run.record.requests, 8);
}

#[test]
fn pipeline_refuses_three_point_lower_bound_table() {
    let g = generate(&AdversaryConfig::new(Construction::TwoMetric, 1, 0.1, 0)).unwrap();
    let err = run_pipeline(&g.table, &g.requests, 0, None).unwrap_err();
    assert!(matches!(err, Error::NotHMetric(_)));
}

#[test]
fn competitive_suite_is_reproducible() {
    let params = CompetitiveParams {
        k: 3,
        requests: 9,
        seeds: (0..20).collect(),
        opt_budget: DEFAULT_OPT_BUDGET,
        envelope_c: 1.0,
    };
    let a = run_competitive_suite(&params, &[3, 4, 5, 6]).unwrap();
    let b = run_competitive_suite(&params, &[3, 4, 5, 6]).unwrap();
    assert_eq!(a, b);
    for r in &a.0 {
        assert!(r.ratio.is_some_and(f64::is_finite) && r.audit_passed, "{r:?}");
    }
    let keys: Vec<(usize, u64)> = a.0.iter().map(|r| (r.n, r.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn colocated_pair_has_ratio_one() {
    let m = kmpmd::PairwiseMetric::euclidean(&[vec![0.0], vec![1.0]]).unwrap();
    let t = kmpmd::gmetrics::build_max_diameter(&m, 3).unwrap();
    let reqs: Vec<_> = (0..3).map(|i| TimedRequest::new(i, 1, 0.5)).collect();
    let run = run_pipeline(&t, &reqs, 0, Some(DEFAULT_OPT_BUDGET)).unwrap();
    assert_eq!(run.record.ratio, Some(1.0));
}
