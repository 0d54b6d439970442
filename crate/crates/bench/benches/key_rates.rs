//! Hot-path timings at the crossover operating point, where every
//! distance scan spends most of its budget.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mpqkd::model::derive_channel;
use mpqkd::rates::{rate_ad, rate_devicelevel, rate_info};
use mpqkd::scan::optimize_mu;
use mpqkd::{Engine, SystemParams};

fn bench_engines(c: &mut Criterion) {
    let params = SystemParams::baseline(0.04).unwrap();
    let ch = derive_channel(&params, 482.0, 0.4).unwrap();

    c.bench_function("derive_channel at 482 km", |b| {
        b.iter(|| derive_channel(black_box(&params), black_box(482.0), black_box(0.4)).unwrap())
    });
    c.bench_function("rate_devicelevel", |b| {
        b.iter(|| rate_devicelevel(black_box(&ch), black_box(1.15)))
    });
    c.bench_function("rate_info", |b| {
        b.iter(|| rate_info(black_box(&ch), black_box(1.15)))
    });
    c.bench_function("rate_ad blocks 1..=3", |b| {
        b.iter(|| rate_ad(black_box(&ch), black_box(1.15), 1, 3).unwrap())
    });
    c.bench_function("optimize_mu for distillation at 482 km", |b| {
        b.iter(|| optimize_mu(black_box(&params), black_box(482.0), Engine::Ad, (1, 3)))
    });
}

criterion_group!(benches, bench_engines);
criterion_main!(benches);
