use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use hypercutoff::process::{run, ModelParams};
use hypercutoff::sampler::DegreeIndex;
use hypercutoff::{CardinalityLaw, Probabilities};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn filled(n: usize, rng: &mut ChaCha8Rng) -> DegreeIndex {
    let mut index = DegreeIndex::with_capacity(n);
    for _ in 0..n {
        index.push_vertex(rng.random_range(1..50));
    }
    index
}

fn sampler(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let index = filled(1_000_000, &mut rng);
    c.bench_function("select_rank/1e6 vertices", |b| {
        b.iter(|| index.select_rank(black_box(rng.random_range(1..=index.total_weight()))).unwrap())
    });
    c.bench_function("push+add+deactivate/1e4 ops", |b| {
        b.iter_batched(
            || (filled(10_000, &mut ChaCha8Rng::seed_from_u64(2)), ChaCha8Rng::seed_from_u64(3)),
            |(mut index, mut rng)| {
                for _ in 0..10_000 {
                    let v = index.sample(rng.random::<f64>()).unwrap();
                    if rng.random_bool(0.1) {
                        index.deactivate(v).unwrap();
                        index.push_vertex(1);
                    } else {
                        index.add_degree(v, 1).unwrap();
                    }
                }
                index
            },
            BatchSize::SmallInput,
        )
    });
}

fn process(c: &mut Criterion) {
    let params = ModelParams::new(
        Probabilities::new(1.0, 0.0, 0.0).unwrap(),
        CardinalityLaw::truncated_poisson(4.0).unwrap(),
        100_000,
    )
    .with_trace_stride(1_000);
    c.bench_function("run/1e5 steps, no deactivation", |b| b.iter(|| run(black_box(&params)).unwrap()));
}

criterion_group!(benches, sampler, process);
criterion_main!(benches);
