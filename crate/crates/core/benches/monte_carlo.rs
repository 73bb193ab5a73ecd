use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use reccalc::optstop::{t_f, t_p};
use reccalc::simulate::{self, MonteCarlo, Problem};

const TRIALS: u64 = 100_000;

fn runners() -> [(&'static str, MonteCarlo); 2] {
    [
        ("sequential", MonteCarlo::sequential(1)),
        ("parallel", MonteCarlo::new(1)),
    ]
}

fn bench_policies(c: &mut Criterion) {
    let mut group = c.benchmark_group("policy");
    group.sample_size(10);
    group.throughput(Throughput::Elements(TRIALS));
    for (problem, t, s) in [
        (Problem::FI, 30.0, t_f()),
        (Problem::HC, 10.0, t_p()),
        (Problem::FI, f64::INFINITY, t_f()),
    ] {
        for (name, mc) in runners() {
            let id = BenchmarkId::new(name, format!("{problem:?}/t={t}"));
            group.bench_with_input(id, &mc, |b, mc| {
                b.iter(|| simulate::estimate_policy(problem, black_box(t), s, TRIALS, mc).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_ks_sample(c: &mut Criterion) {
    let mut group = c.benchmark_group("eu_collect");
    group.sample_size(10);
    group.throughput(Throughput::Elements(TRIALS));
    for (name, mc) in runners() {
        group.bench_function(name, |b| {
            b.iter(|| {
                mc.collect(TRIALS, |rng| {
                    simulate::sample_eu(reccalc::recordlaw::EuKind::C, 3, rng).unwrap()
                })
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_policies, bench_ks_sample);
criterion_main!(benches);
