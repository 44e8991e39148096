use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use qasdyn_core::degdyn::*;

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

/// Determinant by fraction-field elimination.
fn det(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut acc = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        acc *= m[c][c].clone();
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    acc
}

/// Terms of a recurrence, computed directly.
fn run(coeffs: &[Q], seed: &[Q], count: usize) -> Vec<Q> {
    let mut s = seed.to_vec();
    while s.len() < count {
        let n = s.len();
        let v = (1..coeffs.len()).fold(Q::zero(), |acc, i| acc - &coeffs[i] * &s[n - i]);
        s.push(v);
    }
    s
}

fn charpoly_value(d: u64, h: u64, n0: usize, x: &Q) -> Q {
    let mut p = Q::one();
    for _ in 0..n0 {
        p *= x;
    }
    p * (x - q(d as i64)) + q(h as i64)
}

/// Taylor coefficients of `P(x + a)`, lowest first.
fn shifted(d: u64, h: u64, n0: usize, a: &Q) -> Vec<Q> {
    let mut c: Vec<Q> = vec![Q::zero(); n0 + 2];
    c[n0 + 1] = Q::one();
    c[n0] = -q(d as i64);
    c[0] += q(h as i64);
    let deg = c.len() - 1;
    for i in 0..deg {
        for j in (i..deg).rev() {
            let v = &c[j + 1] * a;
            c[j] += v;
        }
    }
    c
}

fn planted() -> impl Strategy<Value = (Vec<Q>, Vec<Q>, usize)> {
    (1usize..=3, 1i64..=3).prop_flat_map(|(r, den)| {
        (
            prop::collection::vec(-6i64..=6, r),
            prop::collection::vec(-9i64..=9, r),
        )
            .prop_filter_map("nonzero tail", move |(nums, seed)| {
                if nums[r - 1] == 0 {
                    return None;
                }
                let len = 2 * r + 2;
                let lift = q(den).pow(len as i32);
                let mut coeffs = vec![Q::one()];
                coeffs.extend(nums.iter().map(|&x| Q::new(x.into(), den.into())));
                let seed: Vec<Q> = seed.iter().map(|&x| q(x) * &lift).collect();
                Some((coeffs, seed, len))
            })
    })
}

fn charpoly_params() -> impl Strategy<Value = (u64, u64, usize)> {
    prop_oneof![
        (1u64..=12, 1u64..=60, 1usize..=4),
        // planted double roots: (n0+1) | d
        (1u64..=4, 1usize..=3).prop_map(|(m, n0)| {
            let d = m * (n0 as u64 + 1);
            let h = m.pow(n0 as u32 + 1) * (n0 as u64).pow(n0 as u32);
            (d, h, n0)
        }),
    ]
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn planted_recurrences_are_recovered((coeffs, seed, len) in planted()) {
        let seq = run(&coeffs, &seed, len);
        let ints: Vec<BigInt> = seq.iter().map(|x| {
            assert!(x.is_integer());
            x.to_integer()
        }).collect();
        let r = coeffs.len() - 1;
        let hankel: Vec<Vec<Q>> = (0..r).map(|i| (0..r).map(|j| seq[i + j].clone()).collect()).collect();
        let fit = fit_recurrence(&ints);
        if !det(hankel).is_zero() {
            let m = fit.expect("order-r sequence with nonsingular Hankel matrix");
            prop_assert_eq!(m.coefficients(), coeffs.as_slice());
        } else if let Some(m) = fit {
            prop_assert!(m.order() < r);
            prop_assert_eq!(m.terms(len), seq);
        }
    }

    #[test]
    fn fitted_models_reproduce_their_window(seq in prop::collection::vec(-20i64..=20, 4..=10)) {
        let ints: Vec<BigInt> = seq.iter().map(|&x| BigInt::from(x)).collect();
        if let Some(m) = fit_recurrence(&ints) {
            prop_assert!(2 * m.order() <= ints.len());
            let expect: Vec<Q> = seq.iter().map(|&x| q(x)).collect();
            prop_assert_eq!(m.terms(ints.len()), expect);
        }
    }

    #[test]
    fn dominant_root_carries_a_sign_certificate((d, h, n0) in charpoly_params(), exp in 3u32..=14) {
        let cp = build_charpoly(d, h, n0).unwrap();
        let tol = Q::new(BigInt::one(), BigInt::from(10u64).pow(exp));
        let Some(e) = dominant_root(&cp, &tol) else {
            // no real root: P > 0 at every critical point
            let crit = Q::new(BigInt::from(d * n0 as u64), BigInt::from(n0 as u64 + 1));
            prop_assert!(charpoly_value(d, h, n0, &crit).is_positive());
            prop_assert!(n0 % 2 == 1);
            return Ok(());
        };
        prop_assert!(verify_enclosure(&cp, &e));
        prop_assert!(e.width() <= tol);
        match &e {
            RootEnclosure::Exact(r) => prop_assert!(charpoly_value(d, h, n0, r).is_zero()),
            RootEnclosure::Interval { lo, hi } => {
                prop_assert!(charpoly_value(d, h, n0, lo).is_negative());
                prop_assert!(charpoly_value(d, h, n0, hi).is_positive());
            }
        }
        // Past hi: nothing above the enclosure changes sign.
        let top = q((d + h) as i64);
        let hi = e.hi().clone();
        let coeffs = shifted(d, h, n0, &hi);
        let variations = coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .collect::<Vec<_>>()
            .windows(2)
            .filter(|w| w[0].is_positive() != w[1].is_positive())
            .count();
        if variations > 0 {
            for k in 1..=64 {
                let x = &hi + (&top - &hi) * Q::new(BigInt::from(k), BigInt::from(64));
                prop_assert!(!charpoly_value(d, h, n0, &x).is_negative());
            }
        }
    }

    #[test]
    fn double_root_detection_is_exact((d, h, n0) in charpoly_params()) {
        let cp = build_charpoly(d, h, n0).unwrap();
        let crit = Q::new(BigInt::from(d * n0 as u64), BigInt::from(n0 as u64 + 1));
        let oracle = charpoly_value(d, h, n0, &crit).is_zero();
        prop_assert_eq!(cp.has_double_root(), oracle);
        if oracle {
            prop_assert_eq!(cp.double_root(), Some(crit));
        }
    }

    #[test]
    fn closed_forms_reproduce_the_sequence((d, h, n0) in charpoly_params()) {
        prop_assume!(n0 <= 3);
        let cp = build_charpoly(d, h, n0).unwrap();
        let seed: Vec<Q> = cp.seed().into_iter().map(Q::from_integer).collect();
        let expect = run(&cp.recurrence(), &seed, 21);
        let form = closed_form(&cp, &cp.seed()).unwrap();
        for (n, s) in expect.iter().enumerate() {
            if n0 == 1 {
                prop_assert_eq!(form.evaluate_exact(n as u32), Some(s.clone()));
            } else {
                prop_assert_eq!(&Q::from_integer(form.rounded(n as u32)), s);
            }
        }
    }
}

#[test]
fn ratio_approaches_the_dominant_root() {
    let cp = build_charpoly(7, 5, 1).unwrap();
    let (seq, ratio) = extend_and_ratio(&cp.model(), 60).unwrap();
    assert_eq!(seq.len(), 61);
    let e = dominant_root(&cp, &default_tolerance()).unwrap();
    assert!(e.distance_bound(&ratio) < Q::new(1.into(), BigInt::from(10u64).pow(9)));
}
