//! Parallel versus sequential execution of the heavy kernels.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dworklab::cy::preset_family;
use dworklab::hasse_witt::{beta_matrices, newton_polytope, Precision};
use dworklab::laurent::LaurentPoly;
use dworklab::par::Execution;
use dworklab::polytope::OpenSubset;
use dworklab::zeta::count_torus_points;
use std::hint::black_box;
use std::time::Duration;

const MODES: [(&str, Execution); 2] = [
    ("parallel", Execution::Parallel),
    ("sequential", Execution::Sequential),
];

fn bench_point_counts(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_torus_points");
    group
        .sample_size(10)
        .measurement_time(Duration::from_secs(5));
    let f = LaurentPoly::from_int_terms(
        2,
        &[(&[0, 0], 3), (&[1, 0], 1), (&[0, 1], 1), (&[-1, -1], 1)],
    );
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "p=7,s=3"), &f, |b, f| {
            b.iter(|| count_torus_points(black_box(f), 7, 3, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_beta_matrices(c: &mut Criterion) {
    let mut group = c.benchmark_group("beta_matrices");
    group
        .sample_size(10)
        .measurement_time(Duration::from_secs(5));
    let f = preset_family("simplicial", 3).unwrap().family();
    let mu = OpenSubset::full(&newton_polytope(&f).unwrap());
    let ms = [1u64, 5, 25];
    for (name, exec) in MODES {
        let prec = Precision::new(5, 2).with_t_order(25).with_exec(exec);
        group.bench_function(BenchmarkId::new(name, "simplicial n=3, p=5"), |b| {
            b.iter(|| beta_matrices(black_box(&f), &mu, &ms, prec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_point_counts, bench_beta_matrices);
criterion_main!(benches);
