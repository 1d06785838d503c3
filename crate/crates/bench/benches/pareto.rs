use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quadtune_core::pareto::non_dominated_sort;
use quadtune_core::{
    normalized_hypervolume, Archive, ArchiveConfig, Individual, ObjectiveVector, ParetoFront,
    RngStream,
};
use rand::Rng;

fn points(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RngStream::new(seed, 0).rng();
    (0..n)
        .map(|_| (0..4).map(|_| rng.gen::<f64>()).collect())
        .collect()
}

fn individuals(n: usize, seed: u64) -> Vec<Individual> {
    points(n, seed)
        .into_iter()
        .map(|p| {
            let cost = p.iter().sum();
            Individual::evaluated(Vec::new(), ObjectiveVector(p), cost)
        })
        .collect()
}

fn sorting(c: &mut Criterion) {
    let mut group = c.benchmark_group("non_dominated_sort");
    for n in [50, 100, 200] {
        let pts = points(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| non_dominated_sort(black_box(pts)))
        });
    }
    group.finish();
}

fn hypervolume(c: &mut Criterion) {
    let front =
        ParetoFront::from_objectives(points(100, 2).into_iter().map(ObjectiveVector).collect());
    c.bench_function("hypervolume_100", |b| {
        b.iter(|| normalized_hypervolume(black_box(&front)).unwrap())
    });
}

fn archive_update(c: &mut Criterion) {
    let batch = individuals(100, 3);
    c.bench_function("bounded_archive_update_100", |b| {
        b.iter(|| {
            let mut archive = Archive::bounded(ArchiveConfig::default());
            let mut rng = RngStream::new(4, 0).rng();
            archive.update(black_box(&batch), &mut rng);
            archive.len()
        })
    });
}

criterion_group!(benches, sorting, hypervolume, archive_update);
criterion_main!(benches);
