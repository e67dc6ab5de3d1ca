use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use osgp_bench::{poly10, rng, trees};
use osgp_core::engine::{evolve, OsParams};
use osgp_core::genops::{common_region, ptc2, single_point_mutation};
use osgp_core::interp::Evaluator;
use osgp_core::CrossoverKind;

fn evaluation(c: &mut Criterion) {
    let problem = poly10();
    let mut group = c.benchmark_group("fitness");
    for size in [25, 100, 400, 1600] {
        let pool = trees(&problem, size, 64, 1);
        let mut ev = Evaluator::new();
        let mut i = 0;
        group.bench_with_input(BenchmarkId::from_parameter(size), &pool, |b, pool| {
            b.iter(|| {
                i = (i + 1) % pool.len();
                ev.fitness(black_box(&pool[i]), &problem.dataset).unwrap()
            })
        });
    }
    group.finish();
}

fn crossovers(c: &mut Criterion) {
    let problem = poly10();
    let pool = trees(&problem, 40, 64, 2);
    let mut group = c.benchmark_group("crossover");
    for kind in CrossoverKind::ALL {
        let mut r = rng(3);
        let mut i = 0;
        group.bench_function(kind.name(), |b| {
            b.iter(|| {
                i = (i + 1) % (pool.len() - 1);
                kind.apply(black_box(&pool[i]), black_box(&pool[i + 1]), &mut r)
            })
        });
    }
    group.bench_function("common_region", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % (pool.len() - 1);
            common_region(black_box(&pool[i]), black_box(&pool[i + 1]))
        })
    });
    group.finish();
}

fn creation(c: &mut Criterion) {
    let problem = poly10();
    let mut r = rng(4);
    c.bench_function("ptc2/50", |b| b.iter(|| ptc2(&mut r, black_box(50), &problem.prims)));
    let pool = trees(&problem, 40, 64, 5);
    let mut i = 0;
    c.bench_function("mutation/40", |b| {
        b.iter(|| {
            i = (i + 1) % pool.len();
            single_point_mutation(black_box(&pool[i]), &mut r, &problem.prims)
        })
    });
}

fn short_run(c: &mut Criterion) {
    let problem = poly10();
    let params = OsParams {
        population_size: 100,
        mutation_rate: 0.15,
        crossover: CrossoverKind::Onepoint,
        max_selection_pressure: 200.0,
        max_evaluations: 5_000,
    };
    let mut group = c.benchmark_group("run");
    group.sample_size(10);
    group.bench_function("poly10_onepoint_5k", |b| {
        b.iter(|| evolve(&problem, &params, (3, 50), 1, &mut ()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, evaluation, crossovers, creation, short_run);
criterion_main!(benches);
