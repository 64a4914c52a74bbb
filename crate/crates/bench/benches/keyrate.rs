use criterion::{black_box, criterion_group, criterion_main, Criterion};

use psmdi::fock::{build_projected_state, oracle_moments};
use psmdi::studies::{figure, max_distance};
use psmdi::{secret_key_rate, Geometry};
use psmdi_bench::reference_pair;

fn single_rate(c: &mut Criterion) {
    let (base, one) = reference_pair(20.0);
    c.bench_function("secret_key_rate/k0", |b| b.iter(|| secret_key_rate(black_box(&base))));
    c.bench_function("secret_key_rate/k1", |b| b.iter(|| secret_key_rate(black_box(&one))));
}

fn thresholds(c: &mut Criterion) {
    let (base, _) = reference_pair(0.0);
    c.bench_function("max_distance/extreme-asym", |b| {
        b.iter(|| max_distance(black_box(&base), Geometry::ExtremeAsymmetric, 0.01))
    });
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("fock_oracle");
    for v in [3.0, 15.0, 60.0] {
        group.bench_function(format!("V={v}"), |b| {
            b.iter(|| {
                let state = build_projected_state(black_box(v), 0.9, 2, 1e-15).unwrap();
                oracle_moments(&state)
            })
        });
    }
    group.finish();
}

fn figures(c: &mut Criterion) {
    let mut group = c.benchmark_group("figure");
    group.sample_size(10);
    for name in ["fig7", "fig9"] {
        group.bench_function(name, |b| b.iter(|| figure(black_box(name), false)));
    }
    group.finish();
}

criterion_group!(benches, single_rate, thresholds, oracle, figures);
criterion_main!(benches);
