use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use photometrix::fisher::qfi_tfs_exact;
use photometrix::optimize::logspace;
use photometrix::protocol::{advantage_boundary, BoundaryOptions};
use photometrix::{Execution, LossChannel};

fn tfs8(c: &LossChannel) -> f64 {
    qfi_tfs_exact(4, c).value
}

fn boundary(c: &mut Criterion) {
    let mut group = c.benchmark_group("advantage_boundary");
    group.sample_size(10);
    for points in [8usize, 32] {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let opts =
                BoundaryOptions { gamma_t_ext: logspace(1e-3, 0.2, points), execution: exec, ..Default::default() };
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), points), &opts, |b, opts| {
                b.iter(|| advantage_boundary(8.0, black_box(1.0), &tfs8, opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, boundary);
criterion_main!(benches);
