use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dq_core::graphs::{sorted_representatives, AdmissibleGraph, DEFAULT_GUARD};
use dq_core::par::Exec;
use dq_core::weights::{integrate_weight_with, vanishing_check_with};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn weights(c: &mut Criterion) {
    let mut group = c.benchmark_group("weight_integration");
    group.sample_size(10);
    let graphs = [
        ("wedge3", AdmissibleGraph::wedge(3)),
        ("n2nb2", sorted_representatives(2, 2, 4, DEFAULT_GUARD).unwrap().remove(5)),
    ];
    for (name, g) in &graphs {
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(*name, mode), &exec, |b, &exec| {
                b.iter(|| integrate_weight_with(black_box(g), 1 << 17, 42, exec).unwrap())
            });
        }
    }
    group.finish();

    let mut group = c.benchmark_group("vanishing");
    group.sample_size(10);
    for (mode, exec) in MODES {
        group.bench_function(mode, |b| {
            b.iter(|| vanishing_check_with(black_box([(0, 1), (1, 2), (2, 0)]), 1 << 17, 42, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, weights);
criterion_main!(benches);
