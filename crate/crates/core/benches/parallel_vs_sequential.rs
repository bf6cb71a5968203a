//! Compares the rayon-backed inner loops against the always-sequential
//! fallback on the two hot paths: the scoring pipeline over the fixture
//! corpus and the paired bootstrap.

use criterion::{criterion_group, criterion_main, Criterion};

use fcl_core::backends::stub::StubBackend;
use fcl_core::eval::{paired_bootstrap, ScoredItem};
use fcl_core::exec;
use fcl_core::fixtures::{fixture_dataset, fixture_spans};
use fcl_core::pipeline::{run_pipeline, MetricConfig, Scorers};

fn bench_pipeline(c: &mut Criterion) {
    let dataset = fixture_dataset();
    let spans = fixture_spans(&dataset).unwrap();
    let backend = StubBackend::new(3, None, 0.3);
    let config = MetricConfig::qe();
    let scorers = Scorers::default();
    let mut group = c.benchmark_group("pipeline");
    group.bench_function("parallel", |b| {
        b.iter(|| run_pipeline(&dataset, &spans, &backend, &backend, &config, &scorers).unwrap())
    });
    group.bench_function("sequential", |b| {
        // same per-pair work driven through the sequential map
        b.iter(|| {
            let indexed: Vec<usize> = (0..dataset.pairs.len()).collect();
            exec::map_slice_seq(&indexed, |&i| {
                let one = fcl_core::corpus::Dataset {
                    name: dataset.name.clone(),
                    pairs: vec![dataset.pairs[i].clone()],
                };
                run_pipeline(
                    &one,
                    &spans[i..=i],
                    &backend,
                    &backend,
                    &config,
                    &scorers,
                )
                .unwrap()
            })
        })
    });
    group.finish();
}

fn bootstrap_items(n: usize) -> Vec<ScoredItem> {
    (0..n)
        .map(|i| {
            ScoredItem::new(
                format!("i{i}"),
                (i % 7) as f64 / 6.0,
                u8::from(i % 3 != 0),
                format!("p{}", i / 4),
            )
        })
        .collect()
}

fn bench_bootstrap(c: &mut Criterion) {
    let a = bootstrap_items(400);
    let b_items: Vec<ScoredItem> = a
        .iter()
        .map(|i| ScoredItem {
            score: 1.0 - i.score,
            ..i.clone()
        })
        .collect();
    let mut group = c.benchmark_group("bootstrap");
    group.bench_function("parallel", |b| {
        b.iter(|| paired_bootstrap(&a, 0.5, &b_items, 0.5, 1000, 7).unwrap())
    });
    group.bench_function("sequential_equivalent", |b| {
        // the same resample loop through the sequential map
        b.iter(|| {
            exec::map_range_seq(1000, |r| {
                use rand::Rng;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(r as u64);
                let n = a.len();
                let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                idx.iter().map(|&i| a[i].score).sum::<f64>()
            })
        })
    });
    group.finish();
}

criterion_group!(benches, bench_pipeline, bench_bootstrap);
criterion_main!(benches);
