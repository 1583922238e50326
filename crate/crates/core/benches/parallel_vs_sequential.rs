use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cpair_core::adapted::{compute_adapted_with, AdaptedOptions, CoverSetup};
use cpair_core::sweep::{run_sweep, SweepKind};
use cpair_core::{Execution, Multiplicity};

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for kind in [SweepKind::Oracle, SweepKind::Nc, SweepKind::Uniformization] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(kind.name(), format!("{exec:?}")), &exec, |b, &exec| {
                b.iter(|| run_sweep(kind, 64, 1, exec))
            });
        }
    }
    group.finish();
}

fn large_sheaf(c: &mut Criterion) {
    let setup = CoverSetup::diagonal(
        &[Multiplicity::Finite(2), Multiplicity::Finite(3), Multiplicity::Infinite, Multiplicity::ONE],
        &[4, 6, 2, 3],
    )
    .unwrap();
    let mut group = c.benchmark_group("compute_adapted_d4_n6_p2");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let opts = AdaptedOptions { exec, ..AdaptedOptions::default() };
        group.bench_function(format!("{exec:?}"), |b| b.iter(|| compute_adapted_with(&setup, 6, 2, &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sweeps, large_sheaf);
criterion_main!(benches);
