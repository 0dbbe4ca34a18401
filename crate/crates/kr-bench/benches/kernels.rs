//! Benchmarks for the kernels that dominate verification wall time:
//! group-ring binomial multiplication and division, the divisibility
//! pre-filter, orbit enumeration and small character products.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use kr_core::qsystem::coeff_c1_zero;
use kr_core::weylgrp::orbit;
use kr_core::{CartanType, CharCache, CharCombo, RootSystem, Weight};

fn f4() -> RootSystem {
    RootSystem::new(CartanType::parse("F4").unwrap()).unwrap()
}

fn bench_binomials(c: &mut Criterion) {
    let rs = f4();
    let cache = CharCache::new(rs.clone());
    let omega1 = Weight::from_coords(vec![1, 0, 0, 0]);
    let chi = cache.character(&omega1).unwrap();

    c.bench_function("mul_binomial_f4_adjoint", |b| {
        b.iter(|| chi.mul_binomial(&omega1, false))
    });

    let product = chi.mul_binomial(&omega1, false);
    c.bench_function("divide_binomial_roundtrip", |b| {
        b.iter(|| product.divide_binomial(&omega1, false).unwrap())
    });

    // The dominant cost in normalization is rejecting factors that do not
    // divide; the pre-filter must stay much cheaper than exact division.
    let num = coeff_c1_zero(&rs, 1).unwrap().num;
    let alpha = rs.positive_roots[5].clone();
    c.bench_function("divisible_hint_reject", |b| {
        b.iter(|| num.divisible_hint(&alpha, false))
    });
    c.bench_function("divide_binomial_reject", |b| {
        b.iter(|| num.divide_binomial(&alpha, false).is_none())
    });
}

fn bench_orbit(c: &mut Criterion) {
    let rs = f4();
    let omega2 = Weight::from_coords(vec![0, 1, 0, 0]);
    c.bench_function("weyl_orbit_96", |b| b.iter(|| orbit(&rs, &omega2).len()));
}

fn bench_characters(c: &mut Criterion) {
    let rs = f4();
    let omega4 = Weight::from_coords(vec![0, 0, 0, 1]);
    c.bench_function("character_product_26x26", |b| {
        b.iter_batched(
            || CharCache::new(rs.clone()),
            |cache| {
                let x = CharCombo::single(&omega4, 1);
                x.mul(&cache, &x).unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_binomials, bench_orbit, bench_characters);
criterion_main!(benches);
