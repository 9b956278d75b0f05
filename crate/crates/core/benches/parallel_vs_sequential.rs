//! Data-parallel kernels on one worker versus the default pool.
//!
//! Build with `--no-default-features` to time the sequential fallback instead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mdproj::dimension::sup_f;
use mdproj::measure::sample;
use mdproj::projection::{lp_criterion_integral, stripe_integral};
use mdproj::{MissingDigitsSpec, ProductMeasureSpec, DEFAULT_BUDGET};

fn cantor_squared() -> ProductMeasureSpec {
    ProductMeasureSpec::power(MissingDigitsSpec::simple(3, [0, 2]).unwrap(), 2).unwrap()
}

type Kernel = (&'static str, Box<dyn Fn() + Sync>);

fn kernels() -> Vec<Kernel> {
    let spec = cantor_squared();
    let cantor5 = MissingDigitsSpec::simple(5, [0, 1, 2, 3]).unwrap();
    let s1 = spec.clone();
    let s2 = spec.clone();
    vec![
        ("stripe_r81", Box::new(move || {
            black_box(stripe_integral(&s1, &[1.0, 0.0], 81.0, 1e-10, DEFAULT_BUDGET).unwrap());
        })),
        ("lp_r128", Box::new(move || {
            black_box(lp_criterion_integral(&s2, 2, 128, 1e-10, DEFAULT_BUDGET).unwrap());
        })),
        ("sup_f_h1e-4", Box::new(move || {
            black_box(sup_f(&cantor5, 1e-4, DEFAULT_BUDGET).unwrap());
        })),
        ("sample_1e5", Box::new(move || {
            black_box(sample(&spec, 30, 100_000, 1).unwrap());
        })),
    ]
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let workers = rayon::current_num_threads();
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, kernel) in kernels() {
        group.bench_function(BenchmarkId::new(name, "single"), |b| b.iter(|| single.install(&kernel)));
        group.bench_function(BenchmarkId::new(name, format!("pool-{workers}")), |b| b.iter(&kernel));
    }
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, kernel) in kernels() {
        group.bench_function(BenchmarkId::new(name, "sequential"), |b| b.iter(&kernel));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
