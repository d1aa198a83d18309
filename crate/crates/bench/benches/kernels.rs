use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use semgp::baselines::fast_nondominated_sort;
use semgp::engine::rng_streams;
use semgp::gp::{evaluate, full, PrimitiveSet};
use semgp::metrics::{hypervolume_2d, nondominated_indices, ORIGIN};
use semgp::moead::{moead_generation, MoeadParams, MoeadState, MoeadVariant};
use semgp::semantics::SemanticConfig;
use semgp::EvolutionParams;
use semgp_bench::{dataset, points};

fn bench_evaluate(c: &mut Criterion) {
    let data = dataset(30_000, 1);
    let ps = PrimitiveSet::standard(18);
    let tree = full(5, &ps, &mut ChaCha8Rng::seed_from_u64(2));
    c.bench_function("evaluate depth-5 tree on 30k cases", |b| {
        b.iter(|| evaluate(black_box(&tree), &data.features))
    });
}

fn bench_pareto(c: &mut Criterion) {
    let front_pts = points(500, 3);
    let front: Vec<[f64; 2]> = nondominated_indices(&front_pts).into_iter().map(|i| front_pts[i]).collect();
    c.bench_function("hypervolume of 500 random points", |b| {
        b.iter(|| hypervolume_2d(black_box(&front_pts), ORIGIN))
    });
    c.bench_function("hypervolume of a non-dominated front", |b| {
        b.iter(|| hypervolume_2d(black_box(&front), ORIGIN))
    });
    let pop = points(1000, 4);
    c.bench_function("fast non-dominated sort, 1000 points", |b| {
        b.iter(|| fast_nondominated_sort(black_box(&pop)))
    });
}

fn bench_moead(c: &mut Criterion) {
    let data = dataset(3000, 5);
    let ps = PrimitiveSet::standard(18);
    let mut group = c.benchmark_group("moead generation, pop 100, 3k cases");
    group.sample_size(10);
    for (name, variant) in [
        ("canonical", MoeadVariant::Canonical),
        ("ssc", MoeadVariant::Semantic(SemanticConfig::default())),
    ] {
        let params = MoeadParams {
            evolution: EvolutionParams {
                population_size: 100,
                ..Default::default()
            },
            variant,
            ..Default::default()
        };
        group.bench_function(name, |b| {
            b.iter_batched(
                || {
                    let (mut rng, aux) = rng_streams(6);
                    let state = MoeadState::initialize(&params, &ps, &data, &mut rng);
                    (state, rng, aux)
                },
                |(mut state, mut rng, mut aux)| {
                    moead_generation(&mut state, &params, &ps, &data, &mut rng, &mut aux);
                    state
                },
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, bench_evaluate, bench_pareto, bench_moead);
criterion_main!(benches);
