use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use knotforge::braid::{presentation, BraidWord};
use knotforge::catalog::{bundled, run_batch};
use knotforge::invariants::{signature_profile_with, SeifertMatrix};
use knotforge::repspace::{slice_search, Flavor};
use knotforge::{Exec, DEFAULT_PRECISION_BITS};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn torus(g: usize) -> SeifertMatrix {
    let rows: Vec<Vec<i64>> = (0..2 * g)
        .map(|i| (0..2 * g).map(|j| if i == j { -1 } else if j == i + 1 { 1 } else { 0 }).collect())
        .collect();
    SeifertMatrix::from_rows(&rows).unwrap()
}

fn profile(c: &mut Criterion) {
    let v = torus(3);
    let mut group = c.benchmark_group("signature_profile_T27_720");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| signature_profile_with(black_box(&v), 720, exec, DEFAULT_PRECISION_BITS).unwrap())
        });
    }
    group.finish();
}

fn batch(c: &mut Criterion) {
    let records = bundled();
    let mut group = c.benchmark_group("batch_bundled");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_batch(black_box(&records), exec))
        });
    }
    group.finish();
}

fn search(c: &mut Criterion) {
    let p = presentation(&BraidWord::parse("1 1 1", 2).unwrap());
    let tau = 3f64.sqrt() - 0.02;
    let mut group = c.benchmark_group("slice_search_trefoil_su2_64");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| slice_search(black_box(&p), tau, Flavor::Su2, 64, 0, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, profile, batch, search);
criterion_main!(benches);
