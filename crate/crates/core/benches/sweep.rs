use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jcxy_core::parallel::with_workers;
use jcxy_core::{eigvals_symmetric, sweep, GeneratorPair, PhiGrid, SectorBlocks, Topology};

fn largest_block(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigensolve");
    for n in [6, 8, 10] {
        let pair = GeneratorPair::new(n, Topology::OpenNN, 1).unwrap();
        let blocks = SectorBlocks::new(&pair).unwrap();
        let idx = (0..blocks.sectors().len())
            .max_by_key(|&i| blocks.sectors()[i].dim())
            .unwrap();
        let block = blocks.block(idx, 0.6, 0.8);
        group.bench_with_input(
            BenchmarkId::new("largest_block", block.size()),
            &block,
            |b, m| b.iter(|| eigvals_symmetric(m).unwrap()),
        );
    }
    group.finish();
}

/// Same sweep on one worker and on the default pool.
fn sweep_workers(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    let pair = GeneratorPair::new(8, Topology::OpenNN, 1).unwrap();
    let grid = PhiGrid::uniform(61).unwrap();
    for (label, workers) in [("one_worker", Some(1)), ("default_pool", None)] {
        group.bench_function(BenchmarkId::new(label, "n8_61pts"), |b| {
            b.iter(|| with_workers(workers, || sweep(&pair, &grid).unwrap()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, largest_block, sweep_workers);
criterion_main!(benches);
