use num_bigint::BigInt;

use super::{Polynomial, RationalScalar};
use crate::error::{Error, Result};

/// `input == unit * prod(factor^multiplicity)`, with canonical, square-free,
/// pairwise coprime factors and distinct multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: RationalScalar,
    pub factors: Vec<(Polynomial, u32)>,
}

impl SquarefreeDecomposition {
    pub fn expand(&self, nvars: usize) -> Polynomial {
        let mut p = Polynomial::one(nvars);
        for (f, m) in &self.factors {
            p = &p * &f.pow(*m);
        }
        p
    }
}

impl Polynomial {
    /// Square-free layers computed from GCDs with partial derivatives.
    pub fn squarefree_decompose(&self) -> Result<SquarefreeDecomposition> {
        if self.is_constant() {
            return Err(Error::Domain("square-free decomposition of a constant".into()));
        }
        let mut layers: Vec<(Polynomial, u32)> = Vec::new();
        collect_layers(&self.canonicalize(), &mut layers)?;
        // Merge layers of equal multiplicity; they are coprime by construction.
        layers.sort_by_key(|(_, m)| *m);
        let mut factors: Vec<(Polynomial, u32)> = Vec::new();
        for (f, m) in layers {
            match factors.last_mut() {
                Some((g, k)) if *k == m => *g = (&*g * &f).canonicalize(),
                _ => factors.push((f, m)),
            }
        }
        let out = SquarefreeDecomposition {
            unit: RationalScalar::from_integer(BigInt::from(1)),
            factors,
        };
        let expanded = out.expand(self.nvars());
        let lc_in = self.leading_coeff().unwrap().clone();
        let lc_out = expanded.leading_coeff().unwrap().clone();
        Ok(SquarefreeDecomposition {
            unit: RationalScalar::new(lc_in, lc_out),
            ..out
        })
    }
}

/// Appends the square-free layers of a canonical nonconstant polynomial.
fn collect_layers(p: &Polynomial, out: &mut Vec<(Polynomial, u32)>) -> Result<()> {
    if p.is_constant() {
        return Ok(());
    }
    let x = (0..p.nvars()).find(|&v| p.degree_in(v) > 0).unwrap();
    let cont = content_in(p, x)?;
    let prim = p.exact_div(&cont)?.expect("content divides");
    yun(&prim, x, out)?;
    collect_layers(&cont, out)
}

/// GCD of the coefficients of `p` viewed as a polynomial in `x`.
fn content_in(p: &Polynomial, x: usize) -> Result<Polynomial> {
    let n = p.nvars();
    let deg = p.degree_in(x) as usize;
    let mut buckets: Vec<Vec<_>> = vec![Vec::new(); deg + 1];
    for (m, c) in p.terms() {
        let e = m.exponent(x);
        buckets[e as usize].push((m.with_exponent(x, 0), c.clone()));
    }
    let mut g: Option<Polynomial> = None;
    for b in buckets.into_iter().filter(|b| !b.is_empty()) {
        let c = Polynomial::from_terms(n, b);
        g = Some(match g {
            None => c.canonicalize(),
            Some(g) => g.gcd(&c)?,
        });
        if g.as_ref().is_some_and(|g| g.is_constant()) {
            break;
        }
    }
    Ok(g.unwrap())
}

fn div(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    p.exact_div(q)?
        .ok_or_else(|| Error::Structural("square-free step produced an inexact quotient".into()))
}

/// Yun's algorithm in the variable `x` for a polynomial primitive in `x`.
fn yun(p: &Polynomial, x: usize, out: &mut Vec<(Polynomial, u32)>) -> Result<()> {
    let dp = p.partial_derivative(x);
    let g = p.gcd(&dp)?;
    let mut c = div(p, &g)?;
    let mut d = &div(&dp, &g)? - &c.partial_derivative(x);
    let mut i = 1;
    while !c.is_constant() {
        let a = if d.is_zero() { c.canonicalize() } else { c.gcd(&d)? };
        let next = div(&c, &a)?;
        if !a.is_constant() {
            out.push((a.canonicalize(), i));
        }
        d = &div(&d, &a)? - &next.partial_derivative(x);
        c = next;
        i += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zwt() -> (Polynomial, Polynomial, Polynomial) {
        (
            Polynomial::var(3, 0),
            Polynomial::var(3, 1),
            Polynomial::var(3, 2),
        )
    }

    #[test]
    fn linear_times_cubic() {
        let (z, w, t) = zwt();
        let l = &(&z + &w) + &t;
        let c = &(&z.pow(3) + &w.pow(3)) + &t.pow(3);
        let p = &l.pow(2) * &c;
        let d = p.squarefree_decompose().unwrap();
        assert_eq!(d.factors, vec![(c, 1), (l, 2)]);
        assert_eq!(d.unit, RationalScalar::from_integer(BigInt::from(1)));
    }

    #[test]
    fn trivial_cases() {
        let (z, w, t) = zwt();
        let d = (&z - &w).squarefree_decompose().unwrap();
        assert_eq!(d.factors, vec![(&z - &w, 1)]);
        let d = t.pow(3).squarefree_decompose().unwrap();
        assert_eq!(d.factors, vec![(t.clone(), 3)]);
        assert!(Polynomial::constant(3, 5).squarefree_decompose().is_err());
    }

    #[test]
    fn unit_absorbs_sign_and_content() {
        let (z, w, t) = zwt();
        let p = (&z.pow(2) * &(&w - &t)).scale(&BigInt::from(-6));
        let d = p.squarefree_decompose().unwrap();
        assert_eq!(d.unit, RationalScalar::from_integer(BigInt::from(-6)));
        let back = d.expand(3).scale(d.unit.numer());
        assert_eq!(back, p);
    }
}
