use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tsdr_core::experiment::{score_method, Method, MethodSettings};
use tsdr_core::mave::{tmave_fit, MaveOptions};
use tsdr_core::metrics;
use tsdr_core::simulate::{generate, Scenario, ScenarioSpec};
use tsdr_core::sir::sir_fit;
use tsdr_core::transforms::normal_scores;

fn bench_sir_pipeline(c: &mut Criterion) {
    let data = generate(&ScenarioSpec::new(Scenario::Case4, 400, 1)).unwrap();
    c.bench_function("normal_scores n=400 p=10", |b| {
        b.iter(|| normal_scores(&data.x).unwrap())
    });
    let scores = normal_scores(&data.x).unwrap();
    c.bench_function("sir_fit n=400 p=10 H=10", |b| {
        b.iter(|| sir_fit(&scores, &data.y, 10).unwrap())
    });
    let fit = sir_fit(&scores, &data.y, 10).unwrap();
    let est = fit.leading_basis(2).unwrap();
    c.bench_function("vcc p=10 d=2", |b| {
        b.iter(|| metrics::vcc(&est, &data.true_basis).unwrap())
    });
}

fn bench_generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate n=400");
    for scenario in [Scenario::Case1, Scenario::Case4, Scenario::Case8] {
        group.bench_with_input(BenchmarkId::from_parameter(scenario), &scenario, |b, &s| {
            b.iter(|| generate(&ScenarioSpec::new(s, 400, 1)).unwrap())
        });
    }
    group.finish();
}

fn bench_tmave(c: &mut Criterion) {
    let data = generate(&ScenarioSpec::new(Scenario::Example2 { rho: 0.0 }, 100, 1)).unwrap();
    let mut group = c.benchmark_group("tmave");
    group.sample_size(10);
    group.bench_function("tmave_fit n=100 p=6 d=2", |b| {
        b.iter(|| tmave_fit(&data.x, &data.y, 2, 0.001, &MaveOptions::default()).unwrap())
    });
    group.bench_function("score t-sir replication n=100", |b| {
        b.iter(|| score_method(&data, Method::TSir, &MethodSettings::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_sir_pipeline, bench_generators, bench_tmave);
criterion_main!(benches);
