#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;
use qasdyn_core::projmap::HomogeneousMap;
use qasdyn_core::{Monomial, Polynomial};

pub fn zwt() -> (Polynomial, Polynomial, Polynomial) {
    (Polynomial::var(3, 0), Polynomial::var(3, 1), Polynomial::var(3, 2))
}

pub fn example_one() -> HomogeneousMap {
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

/// `(z+w+t)^2 (z^3+w^3+t^3)`.
pub fn quintic() -> Polynomial {
    let (z, w, t) = zwt();
    let l = &(&z + &w) + &t;
    let c = &(&z.pow(3) + &w.pow(3)) + &t.pow(3);
    &l.pow(2) * &c
}

pub fn example_three() -> HomogeneousMap {
    let (z, w, t) = zwt();
    let h = quintic();
    let m = (&z.pow(3) * &w.pow(4)).scale(&BigInt::from(27));
    HomogeneousMap::new(vec![
        &(&h * &z.pow(2)) - &m,
        &(&h * &w.pow(2)) - &m,
        &(&h * &t.pow(2)) - &m,
    ])
    .unwrap()
}

pub fn poly_in(nvars: usize, max_terms: usize, max_exp: u32, coeff: i64) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, nvars), -coeff..=coeff),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        Polynomial::from_terms(
            nvars,
            terms.into_iter().map(|(e, c)| (Monomial::new(e), BigInt::from(c))),
        )
    })
}

pub fn nonzero_poly_in(nvars: usize, max_terms: usize, max_exp: u32, coeff: i64) -> impl Strategy<Value = Polynomial> {
    poly_in(nvars, max_terms.max(1), max_exp, coeff).prop_filter("nonzero", |p| !p.is_zero())
}

/// Homogeneous polynomial of degree `deg` in `nvars` variables.
pub fn homogeneous_in(nvars: usize, deg: u32, max_terms: usize, coeff: i64) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (prop::collection::vec(0u32..=deg, nvars - 1), -coeff..=coeff),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        let terms = terms.into_iter().filter_map(|(mut e, c)| {
            let used: u32 = e.iter().sum();
            (used <= deg).then(|| {
                e.push(deg - used);
                (Monomial::new(e), BigInt::from(c))
            })
        });
        Polynomial::from_terms(nvars, terms)
    })
}
