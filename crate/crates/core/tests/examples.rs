mod common;

use std::collections::BTreeMap;

use common::*;
use num_bigint::BigInt;
use qasdyn_core::degdyn::{fit_recurrence, predict_degrees, RecurrenceModel};
use qasdyn_core::iterator::{cross_check, iterate_naive, iterate_recurrent, Budget};
use qasdyn_core::projmap::HomogeneousMap;
use qasdyn_core::structure::discover_h0;
use qasdyn_core::{Monomial, Polynomial};

/// Expands a product of sums of monomials by enumerating every choice.
fn brute_expand(factors: &[Vec<[u32; 3]>]) -> BTreeMap<[u32; 3], i64> {
    let mut acc: BTreeMap<[u32; 3], i64> = BTreeMap::new();
    let mut idx = vec![0usize; factors.len()];
    loop {
        let mut e = [0u32; 3];
        for (f, &i) in factors.iter().zip(&idx) {
            for v in 0..3 {
                e[v] += f[i][v];
            }
        }
        *acc.entry(e).or_insert(0) += 1;
        let mut k = 0;
        loop {
            if k == idx.len() {
                return acc;
            }
            idx[k] += 1;
            if idx[k] < factors[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn quintic_matches_brute_force_expansion() {
    let linear = vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let cubic = vec![[3, 0, 0], [0, 3, 0], [0, 0, 3]];
    let oracle = brute_expand(&[linear.clone(), linear, cubic]);
    let p = quintic();
    assert_eq!(p.len(), oracle.len());
    assert_eq!(p.len(), 18);
    for (e, c) in oracle {
        assert_eq!(p.coeff(&Monomial::new(e.to_vec())), BigInt::from(c));
    }
    assert_eq!(p.total_degree(), Some(5));
}

/// `stripped` equals `h0 ∘ F_{n-n0-1}` in canonical form.
fn stripped_law_holds(f: &HomogeneousMap, horizon: usize) {
    let naive = iterate_naive(f, horizon, Budget::default());
    let (h0, n0) = discover_h0(&naive).expect("degree drop");
    for n in n0 + 1..=naive.last() {
        let inner = naive.lifting(n - n0 - 1).unwrap();
        let expect = h0.compose(inner.components()).unwrap();
        assert_eq!(naive.steps[n].stripped, expect.canonicalize(), "step {n}");
    }
    let recurrent = iterate_recurrent(f, &h0, n0, horizon, Budget::default()).unwrap();
    assert!(recurrent.steps.iter().skip(n0 + 1).all(|s| s.certificate.is_some()));
    let cc = cross_check(&naive, &recurrent);
    assert!(cc.agree, "{cc:?}");
    assert_eq!(cc.compared, horizon + 1);
}

#[test]
fn example_one_degrees_are_linear() {
    let f = example_one();
    let l = iterate_naive(&f, 12, Budget::default());
    let expect: Vec<u32> = (1..=13).collect();
    assert_eq!(l.degrees(), expect);
    let (h0, n0) = discover_h0(&l).unwrap();
    assert_eq!((h0, n0), (Polynomial::var(3, 2), 1));
    let seq: Vec<BigInt> = l.degrees().into_iter().map(BigInt::from).collect();
    let m = fit_recurrence(&seq).unwrap();
    assert!(predict_degrees(&m, &l).matches);
    let geometric = RecurrenceModel::from_integers(&[1, -2], &[1]).unwrap();
    let p = predict_degrees(&geometric, &l);
    let mm = p.first_mismatch.unwrap();
    assert_eq!((mm.n, mm.actual), (2, BigInt::from(3)));
}

#[test]
fn example_one_obeys_the_recurrent_law() {
    stripped_law_holds(&example_one(), 8);
}

#[test]
fn example_three_obeys_the_recurrent_law_early() {
    stripped_law_holds(&example_three(), 2);
}

#[test]
fn stable_maps_keep_full_degree() {
    let (z, w, t) = zwt();
    let f = HomogeneousMap::new(vec![z.pow(2), w.pow(2), t.pow(2)]).unwrap();
    let l = iterate_naive(&f, 10, Budget::default());
    let expect: Vec<u32> = (0..=10).map(|n| 1 << n).collect();
    assert_eq!(l.degrees(), expect);
    assert!(discover_h0(&l).is_none());
    assert!(l.steps.iter().all(|s| s.stripped.is_one()));
    assert!(!l.steps[3].lifting.components()[0].is_zero());
}
