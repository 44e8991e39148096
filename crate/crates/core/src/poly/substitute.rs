use std::collections::HashMap;

use super::modular;
use super::Polynomial;
use crate::error::{Error, Result};

/// Above this estimated number of coefficient products the sparse expansion
/// gives way to evaluation / interpolation.
const SPARSE_WORK_LIMIT: f64 = 4.0e6;

/// How a composition is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ComposeRoute {
    #[default]
    Auto,
    Sparse,
    Modular,
}

impl Polynomial {
    /// `self(inner_0, ..., inner_{n-1})`.
    pub fn compose(&self, inner: &[Polynomial]) -> Result<Polynomial> {
        self.compose_via(inner, ComposeRoute::Auto)
    }

    pub fn compose_via(&self, inner: &[Polynomial], route: ComposeRoute) -> Result<Polynomial> {
        if inner.len() != self.nvars() {
            return Err(Error::VarCountMismatch {
                left: self.nvars(),
                right: inner.len(),
            });
        }
        let Some(first) = inner.first() else {
            return Ok(self.clone());
        };
        let m = first.nvars();
        for g in inner {
            if g.nvars() != m {
                return Err(Error::VarCountMismatch {
                    left: m,
                    right: g.nvars(),
                });
            }
        }
        if self.is_zero() {
            return Ok(Polynomial::zero(m));
        }
        let sparse = match route {
            ComposeRoute::Sparse => true,
            ComposeRoute::Modular => false,
            ComposeRoute::Auto => sparse_work(self, inner) <= SPARSE_WORK_LIMIT,
        };
        if sparse {
            return Ok(compose_sparse(self, inner));
        }
        Ok(compose_modular(self, inner))
    }
}

fn sparse_work(outer: &Polynomial, inner: &[Polynomial]) -> f64 {
    outer
        .terms()
        .iter()
        .map(|(mono, _)| {
            mono.exponents()
                .iter()
                .zip(inner.iter())
                .map(|(&e, g)| (g.len() as f64).powi(e as i32))
                .product::<f64>()
        })
        .sum()
}

fn compose_sparse(outer: &Polynomial, inner: &[Polynomial]) -> Polynomial {
    let m = inner[0].nvars();
    let mut cache: Vec<HashMap<u32, Polynomial>> = vec![HashMap::new(); inner.len()];
    let mut power = |i: usize, e: u32| -> Polynomial {
        cache[i].entry(e).or_insert_with(|| inner[i].pow(e)).clone()
    };
    let mut acc = Polynomial::zero(m);
    for (mono, c) in outer.terms() {
        let mut t = Polynomial::constant(m, c.clone());
        for (i, &e) in mono.exponents().iter().enumerate() {
            if e > 0 {
                t = &t * &power(i, e);
            }
        }
        acc = &acc + &t;
    }
    acc
}

fn compose_modular(outer: &Polynomial, inner: &[Polynomial]) -> Polynomial {
    let m = inner[0].nvars();
    let degs: Vec<Option<u32>> = inner.iter().map(|g| g.total_degree()).collect();
    let homogeneous = m >= 2
        && outer.is_homogeneous()
        && inner.iter().all(|g| g.is_homogeneous())
        && degs.iter().all(|d| d.is_some() && *d == degs[0]);
    if homogeneous {
        let total = outer.total_degree().unwrap() * degs[0].unwrap();
        let affine: Vec<Polynomial> = inner.iter().map(|g| g.dehomogenize_last()).collect();
        let bounds = degree_bounds(outer, &affine).into_iter().map(|b| b.min(total)).collect::<Vec<_>>();
        return modular::compose_affine(outer, &affine, &bounds).homogenize_last(total);
    }
    let bounds = degree_bounds(outer, inner);
    modular::compose_affine(outer, inner, &bounds)
}

/// Per-variable degree bound of the composition.
fn degree_bounds(outer: &Polynomial, inner: &[Polynomial]) -> Vec<u32> {
    let m = inner[0].nvars();
    let inner_degs: Vec<Vec<u32>> = inner.iter().map(|g| g.degrees()).collect();
    (0..m)
        .map(|j| {
            outer
                .terms()
                .iter()
                .map(|(mono, _)| {
                    mono.exponents()
                        .iter()
                        .zip(inner_degs.iter())
                        .map(|(&e, d)| e * d[j])
                        .sum::<u32>()
                })
                .max()
                .unwrap_or(0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn zwt() -> (Polynomial, Polynomial, Polynomial) {
        (
            Polynomial::var(3, 0),
            Polynomial::var(3, 1),
            Polynomial::var(3, 2),
        )
    }

    #[test]
    fn substituting_variables_is_identity() {
        let (z, w, t) = zwt();
        let p = &(&z.pow(2) * &w) - &t.pow(3).scale(&BigInt::from(4));
        let vars = [z.clone(), w.clone(), t.clone()];
        assert_eq!(p.compose(&vars).unwrap(), p);
    }

    #[test]
    fn routes_agree_on_homogeneous_maps() {
        let (z, w, t) = zwt();
        let s = &z.pow(2) + &w.pow(2);
        let two = BigInt::from(2);
        let f = [
            &(&t * &z).scale(&two) - &s,
            &(&t * &w).scale(&two) - &s,
            &(&t * &t).scale(&two) - &s,
        ];
        for comp in &f {
            let a = comp.compose_via(&f, ComposeRoute::Sparse).unwrap();
            let b = comp.compose_via(&f, ComposeRoute::Modular).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.total_degree(), Some(4));
        }
    }

    #[test]
    fn routes_agree_on_inhomogeneous_input() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let outer = &(&x.pow(3) - &y) + &Polynomial::constant(2, 7);
        let inner = [&(&x * &y) - &Polynomial::one(2), &x.pow(2) + &y.scale(&BigInt::from(-3))];
        let a = outer.compose_via(&inner, ComposeRoute::Sparse).unwrap();
        let b = outer.compose_via(&inner, ComposeRoute::Modular).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arity_is_checked() {
        let (z, w, _) = zwt();
        assert!(z.compose(&[z.clone(), w.clone()]).is_err());
    }
}
