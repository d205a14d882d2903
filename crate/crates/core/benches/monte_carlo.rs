use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use semicircle_core::ensembles::{profile_constant, profile_smooth, EnsembleSpec};
use semicircle_core::exec::Exec;
use semicircle_core::graphs::{enumerate_canonical, graph_contribution_with};
use semicircle_core::interpolation::{default_z_grid, universality_gap_with, SeedPairing};
use semicircle_core::spectra::{averaged_esd_with, default_grid};

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample");
    for n in [256, 1024] {
        let spec = EnsembleSpec::dependent(profile_constant(n).unwrap(), 0.5, 7).unwrap();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &spec, |b, s| {
                b.iter(|| black_box(s.sample_with(exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn averaged_esd(c: &mut Criterion) {
    let mut group = c.benchmark_group("averaged_esd");
    group.sample_size(10);
    let grid = default_grid();
    let seeds: Vec<u64> = (0..8).collect();
    let spec = EnsembleSpec::gaussian(profile_smooth(128, 0.5).unwrap(), 0);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, 128), |b| {
            b.iter(|| black_box(averaged_esd_with(&spec, &seeds, &grid, exec).unwrap()))
        });
    }
    group.finish();
}

fn universality(c: &mut Criterion) {
    let mut group = c.benchmark_group("universality_gap");
    group.sample_size(10);
    let zs = default_z_grid();
    let seeds: Vec<u64> = (0..4).collect();
    let x = EnsembleSpec::rademacher(profile_constant(96).unwrap(), 0);
    let y = EnsembleSpec::gaussian(profile_constant(96).unwrap(), 0);
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, 96), |b| {
            b.iter(|| black_box(universality_gap_with(&x, &y, &zs, &seeds, SeedPairing::default(), exec).unwrap()))
        });
    }
    group.finish();
}

fn graph_sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph_contribution");
    let profile = profile_smooth(12, 0.5).unwrap();
    let graphs = enumerate_canonical(6).unwrap();
    for (name, exec) in STRATEGIES {
        group.bench_function(BenchmarkId::new(name, "k6_n12"), |b| {
            b.iter(|| {
                let total: f64 = graphs.iter().map(|g| graph_contribution_with(g, &profile, exec)).sum();
                black_box(total)
            })
        });
    }
    group.finish();
}

criterion_group!(benches, sampling, averaged_esd, universality, graph_sums);
criterion_main!(benches);
