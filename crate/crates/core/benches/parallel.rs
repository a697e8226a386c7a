use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use renyi_core::density::{self, DensityCoeffs};
use renyi_core::matrix::TruncatedMatrix;
use renyi_core::measure::{self, GridMeasure};
use renyi_core::simulator;
use renyi_core::Exec;

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn matrix_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("matrix_build_m160");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| TruncatedMatrix::build_with(black_box(160), 1.0, exec).unwrap())
        });
    }
    g.finish();
}

fn run_stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_stages_1e5x8");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| simulator::run_stages_with(black_box(1e5), 8, 3, exec))
        });
    }
    g.finish();
}

fn apply_v(c: &mut Criterion) {
    let f = DensityCoeffs::polynomial(&[0.6, -0.2, 0.05], 8);
    let mu = GridMeasure::from_density(&f, measure::DEFAULT_BINS).unwrap();
    let mut g = c.benchmark_group("apply_v_2e14");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| measure::apply_v_with(black_box(&mu), exec))
        });
    }
    g.finish();
}

fn steady_residual(c: &mut Criterion) {
    let f = DensityCoeffs::polynomial(&[0.6, -0.2, 0.05], density::DEFAULT_ORDER);
    let grid = density::chebyshev_grid(density::GRID_LOWER, 2.0, 4096);
    let mut g = c.benchmark_group("steady_residual_4096");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| density::steady_residual_with(black_box(&f), 0.23, &grid, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, matrix_build, run_stages, apply_v, steady_residual);
criterion_main!(benches);
