use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use qasdyn_core::iterator::{iterate_naive, Budget};
use qasdyn_core::poly::{gcd_with_cofactors, GcdRoute};
use qasdyn_core::projmap::HomogeneousMap;
use qasdyn_core::Polynomial;
use rayon::ThreadPoolBuilder;

fn zwt() -> (Polynomial, Polynomial, Polynomial) {
    (Polynomial::var(3, 0), Polynomial::var(3, 1), Polynomial::var(3, 2))
}

fn example_one() -> HomogeneousMap {
    let (z, w, t) = zwt();
    let s = &z.pow(2) + &w.pow(2);
    let two = BigInt::from(2);
    HomogeneousMap::new(vec![
        &(&t * &z).scale(&two) - &s,
        &(&t * &w).scale(&two) - &s,
        &(&t * &t).scale(&two) - &s,
    ])
    .unwrap()
}

fn example_three() -> HomogeneousMap {
    let (z, w, t) = zwt();
    let h = &(&(&z + &w) + &t).pow(2) * &(&(&z.pow(3) + &w.pow(3)) + &t.pow(3));
    let m = (&z.pow(3) * &w.pow(4)).scale(&BigInt::from(27));
    HomogeneousMap::new(vec![
        &(&h * &z.pow(2)) - &m,
        &(&h * &w.pow(2)) - &m,
        &(&h * &t.pow(2)) - &m,
    ])
    .unwrap()
}

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("sequential", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench_iterate(c: &mut Criterion) {
    let f = example_one();
    let mut g = c.benchmark_group("iterate_naive_ex1_h8");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| iterate_naive(&f, 8, Budget::default())))
        });
    }
    g.finish();
}

fn bench_compose_gcd(c: &mut Criterion) {
    let f = example_three();
    let composed = f.compose(&f).unwrap();
    let mut g = c.benchmark_group("ex3_second_iterate");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new("compose", name), |b| {
            b.iter(|| pool.install(|| f.compose(&f).unwrap()))
        });
        g.bench_function(BenchmarkId::new("gcd", name), |b| {
            b.iter(|| pool.install(|| gcd_with_cofactors(&composed, GcdRoute::Auto).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_iterate, bench_compose_gcd);
criterion_main!(benches);
