use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kmpmd::delaymatch::{simulate, Request};
use kmpmd::embedding::frt_embed;
use kmpmd::gmetrics::{build_max_diameter, classify};
use kmpmd::harness::{random_euclidean, random_instance, random_workload, run_pipeline};
use kmpmd::oracle::{opt_offline_table, DEFAULT_OPT_BUDGET};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_classify(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    for n in [3, 5, 7] {
        let m = random_euclidean(n, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let t = build_max_diameter(&m, 4).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &t, |b, t| b.iter(|| classify(black_box(t)).unwrap()));
    }
    g.finish();
}

fn bench_embed(c: &mut Criterion) {
    let mut g = c.benchmark_group("frt_embed");
    for n in [16, 64, 256] {
        let m = random_euclidean(n, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| frt_embed(black_box(m), 7).unwrap().contract_height())
        });
    }
    g.finish();
}

fn bench_simulate(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    for count in [300, 3000] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_euclidean(32, &mut rng).unwrap();
        let tree = frt_embed(&m, 5).unwrap().contract_height();
        let reqs: Vec<Request> =
            random_workload(32, count, &mut rng).iter().map(|r| Request::on_tree(&tree, r).unwrap()).collect();
        g.bench_with_input(BenchmarkId::from_parameter(count), &reqs, |b, reqs| {
            b.iter(|| simulate(&tree, black_box(reqs), 3, None).unwrap())
        });
    }
    g.finish();
}

fn bench_opt(c: &mut Criterion) {
    let mut g = c.benchmark_group("opt_offline");
    g.sample_size(10);
    for count in [6, 9, 12] {
        let (table, reqs) = random_instance(4, 5, 3, count).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(count), &reqs, |b, reqs| {
            b.iter(|| opt_offline_table(&table, black_box(reqs), DEFAULT_OPT_BUDGET).unwrap())
        });
    }
    g.finish();
}

fn bench_pipeline(c: &mut Criterion) {
    let (table, reqs) = random_instance(9, 5, 3, 9).unwrap();
    c.bench_function("run_pipeline/n5_k3_9", |b| {
        b.iter(|| run_pipeline(black_box(&table), black_box(&reqs), 0, Some(DEFAULT_OPT_BUDGET)).unwrap())
    });
}

criterion_group!(benches, bench_classify, bench_embed, bench_simulate, bench_opt, bench_pipeline);
criterion_main!(benches);
