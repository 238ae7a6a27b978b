//! Parallel versus single-worker runs of the heavier kernels. Build with
//! `--no-default-features` to compare against the rayon-free fallback.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polylab_core::classify::{standard_target, Classifier};
use polylab_core::construct::*;
use polylab_core::hyperplane::enumerate_hyperplanes;
use polylab_core::par::with_jobs;
use polylab_core::search::{enumerate_epimorphisms, SearchOptions};
use polylab_core::validate::classify_polygon;

const MODES: [(&str, Option<usize>); 2] = [("sequential", Some(1)), ("parallel", None)];

fn epimorphisms(c: &mut Criterion) {
    let mut group = c.benchmark_group("epi_search");
    group.sample_size(10);
    let cases = [
        ("Q(4,3)->grid(2,2)", q4(3).unwrap(), grid(2, 2).unwrap()),
        ("H(2)->hexagon", split_cayley_hexagon(2).unwrap(), ordinary_polygon(6).unwrap()),
    ];
    let opts = SearchOptions { count_only: true, ..SearchOptions::default() };
    for (name, s, t) in cases {
        let (s, t) = (Arc::new(s), Arc::new(t));
        for (mode, jobs) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), &jobs, |b, &jobs| {
                b.iter(|| with_jobs(jobs, || enumerate_epimorphisms(&s, &t, &opts).unwrap().count))
            });
        }
    }
    group.finish();
}

fn generator(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonical_set");
    group.sample_size(10);
    let k = Classifier::new(Arc::new(split_cayley_hexagon(2).unwrap()), Arc::new(standard_target(6).unwrap())).unwrap();
    for (mode, jobs) in MODES {
        group.bench_function(BenchmarkId::new(mode, "H(2)"), |b| {
            b.iter(|| with_jobs(jobs, || k.canonical_set().unwrap().len()))
        });
    }
    group.finish();
}

fn validation_and_hyperplanes(c: &mut Criterion) {
    let mut group = c.benchmark_group("misc");
    let h3 = split_cayley_hexagon(3).unwrap();
    let q43 = q4(3).unwrap();
    for (mode, jobs) in MODES {
        group.bench_function(BenchmarkId::new(mode, "validate H(3)"), |b| {
            b.iter(|| with_jobs(jobs, || classify_polygon(black_box(&h3)).unwrap()))
        });
        group.bench_function(BenchmarkId::new(mode, "hyperplanes Q(4,3)"), |b| {
            b.iter(|| with_jobs(jobs, || enumerate_hyperplanes(black_box(&q43)).unwrap().len()))
        });
    }
    group.finish();
}

criterion_group!(benches, epimorphisms, generator, validation_and_hyperplanes);
criterion_main!(benches);
