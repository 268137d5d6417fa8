use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use shadowlab_core::bodies::{generate_body, BodyParams};
use shadowlab_core::estimators::{estimate_n, reference_shadow, sample_stage_labels};
use shadowlab_core::geometry::{symmetry_group, TOL_GROUP};
use shadowlab_core::parallel::with_workers;
use shadowlab_core::sampling::RandomSource;
use shadowlab_core::strata::{stratify, TOL_SUBSPACE};

// 1 worker is the sequential baseline; 0 uses the global pool.
const WORKERS: [usize; 2] = [1, 0];

fn bench_estimate_n(c: &mut Criterion) {
    let cube = generate_body("cube", &BodyParams::dim(4)).unwrap();
    let src = RandomSource::new(1);
    let k2 = reference_shadow(&cube, &src, 0).unwrap();
    let mut group = c.benchmark_group("estimate_n");
    group.sample_size(10);
    for w in WORKERS {
        group.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, &w| {
            b.iter(|| with_workers(w, || estimate_n(&cube, &k2, 0.1, 2000, &src).unwrap()))
        });
    }
    group.finish();
}

fn bench_stage_labels(c: &mut Criterion) {
    let cube = generate_body("cube", &BodyParams::dim(5)).unwrap();
    let src = RandomSource::new(2);
    let mut group = c.benchmark_group("stage_labels");
    group.sample_size(10);
    for w in WORKERS {
        group.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, &w| {
            b.iter(|| with_workers(w, || sample_stage_labels(&cube, 3, 500, 0.1, &src).unwrap()))
        });
    }
    group.finish();
}

fn bench_stratify(c: &mut Criterion) {
    let cube = generate_body("cube", &BodyParams::dim(3)).unwrap();
    let g = symmetry_group(cube.as_polytope().unwrap(), TOL_GROUP).unwrap();
    let src = RandomSource::new(3);
    let mut group = c.benchmark_group("stratify");
    group.sample_size(10);
    for w in WORKERS {
        group.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, &w| {
            b.iter(|| with_workers(w, || stratify(&g, 3, 2000, &src, TOL_SUBSPACE).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_estimate_n, bench_stage_labels, bench_stratify);
criterion_main!(benches);
