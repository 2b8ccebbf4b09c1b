use cav_core::conjugate::{closure, conjugate, conjugate_fast, default_dual_grid};
use cav_core::quadab::{infconv_t3, verify_t3, DualGrids, QuadSetup};
use cav_core::{int, ExtReal, GridFn, LatticeGrid, RatLinMap};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn random_fn(dim: usize, half: i64, seed: u64) -> GridFn {
    let g = LatticeGrid::cube(dim, -half, half, int(1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..g.len())
        .map(|_| {
            if rng.gen_bool(0.1) {
                ExtReal::PosInf
            } else {
                ExtReal::from(rng.gen_range(-8.0..8.0))
            }
        })
        .collect();
    GridFn::new(g, vals, "f").unwrap()
}

fn quadratic(dim: usize, half: i64) -> GridFn {
    let g = LatticeGrid::cube(dim, -half, half, int(1)).unwrap();
    let vals = (0..g.len())
        .map(|i| ExtReal::from(g.point_f64(i).iter().map(|x| 0.5 * x * x).sum::<f64>()))
        .collect();
    GridFn::new(g, vals, "q").unwrap()
}

fn conjugates(c: &mut Criterion) {
    let mut group = c.benchmark_group("conjugate");
    for (dim, half) in [(1, 64), (2, 8), (2, 16), (3, 5)] {
        let f = random_fn(dim, half, 1);
        let dual = default_dual_grid(&f);
        let id = format!("{dim}d-{}", f.grid().len());
        group.bench_with_input(BenchmarkId::new("brute", &id), &f, |b, f| {
            b.iter(|| conjugate(black_box(f), &dual).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fast", &id), &f, |b, f| {
            b.iter(|| conjugate_fast(black_box(f), &dual).unwrap())
        });
    }
    group.finish();
}

fn closures(c: &mut Criterion) {
    let f = random_fn(2, 6, 2);
    c.bench_function("closure/2d-169", |b| b.iter(|| closure(black_box(&f)).unwrap()));
}

fn duality(c: &mut Criterion) {
    let f = quadratic(2, 4);
    let g = quadratic(2, 4);
    let id = RatLinMap::identity(1);
    let duals = DualGrids::bracketing(&f, 1, &g, 1).unwrap();
    let s = QuadSetup::new(f, 1, g, 1, id.clone(), id, duals).unwrap();
    c.bench_function("infconv_t3/81x81", |b| b.iter(|| infconv_t3(black_box(&s)).unwrap()));
    c.bench_function("verify_t3/81x81", |b| b.iter(|| verify_t3(black_box(&s), None).unwrap()));
}

criterion_group!(benches, conjugates, closures, duality);
criterion_main!(benches);
