use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::dense::Layout;
use super::modular;
use super::monomial::Monomial;
use super::Polynomial;
use crate::error::{Error, Result};

/// Largest dense buffer used by Kronecker-layout exact division.
const DENSE_DIV_LIMIT: usize = 1 << 21;

/// Above this many coefficient products, division goes through word-sized
/// primes first.
const MODULAR_DIV_WORK: usize = 200_000;

/// Result of fraction-free division by a single divisor:
/// `scale * dividend = quotient * divisor + remainder`, with `scale > 0` and
/// no term of `remainder` divisible by the divisor's leading monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoDivision {
    pub scale: BigInt,
    pub quotient: Polynomial,
    pub remainder: Polynomial,
}

impl Polynomial {
    /// Multivariate division by `divisor` under graded-lex order. Since a
    /// single polynomial is a Gröbner basis of the ideal it generates, the
    /// remainder is zero exactly when `divisor` divides `self` over the
    /// rationals, and it is a normal form modulo `divisor` up to the scale.
    pub fn pseudo_div_rem(&self, divisor: &Polynomial) -> Result<PseudoDivision> {
        self.check_arity(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.nvars;
        let (lm, lc) = divisor.leading_term().expect("nonzero divisor");
        let mut work: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut quotient: Vec<(Monomial, BigInt)> = Vec::new();
        let mut remainder: Vec<(Monomial, BigInt)> = Vec::new();
        let mut scale = BigInt::from(1);
        while let Some((m, c)) = work.pop_last() {
            if !lm.divides(&m) {
                remainder.push((m, c));
                continue;
            }
            let g = c.gcd(lc);
            let mut a = lc / &g;
            let mut b = &c / &g;
            if a.is_negative() {
                a = -a;
                b = -b;
            }
            if a != BigInt::from(1) {
                for v in work.values_mut() {
                    *v *= &a;
                }
                for (_, q) in quotient.iter_mut() {
                    *q *= &a;
                }
                for (_, r) in remainder.iter_mut() {
                    *r *= &a;
                }
                scale *= &a;
            }
            let shift = lm.quotient_of(&m);
            for (dm, dc) in divisor.terms.iter().skip(1) {
                let key = dm.mul(&shift);
                let delta = &b * dc;
                let entry = work.entry(key).or_insert_with(BigInt::zero);
                *entry -= delta;
                if entry.is_zero() {
                    let key = dm.mul(&shift);
                    work.remove(&key);
                }
            }
            quotient.push((shift, b));
        }
        Ok(PseudoDivision {
            scale,
            quotient: Polynomial::from_sorted_terms(n, quotient),
            remainder: Polynomial::from_sorted_terms(n, remainder),
        })
    }

    /// Exact division over the integers: `Some(r)` with `divisor * r == self`,
    /// or `None` when no integer-coefficient quotient exists.
    pub fn exact_div(&self, divisor: &Polynomial) -> Result<Option<Polynomial>> {
        self.check_arity(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.nvars;
        if self.is_zero() {
            return Ok(Some(Polynomial::zero(n)));
        }
        if divisor.len() == 1 {
            return Ok(self.div_by_term(&divisor.terms[0]));
        }
        if let (Some(dp), Some(dq)) = (self.total_degree(), divisor.total_degree()) {
            if dq > dp {
                return Ok(None);
            }
        }
        if n >= 2 && self.is_homogeneous() && divisor.is_homogeneous() {
            return Ok(self.exact_div_homogeneous(divisor));
        }
        Ok(affine_exact_div(self, divisor))
    }

    fn div_by_term(&self, (dm, dc): &(Monomial, BigInt)) -> Option<Polynomial> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            if !dm.divides(m) {
                return None;
            }
            let (q, r) = c.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            out.push((dm.quotient_of(m), q));
        }
        Some(Polynomial::from_sorted_terms(self.nvars, out))
    }

    /// Strips the powers of the last variable, divides the dehomogenized
    /// parts, and re-homogenizes the quotient.
    fn exact_div_homogeneous(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let n = self.nvars;
        let last = n - 1;
        let ep = self.min_degree_in(last);
        let eq = divisor.min_degree_in(last);
        if eq > ep {
            return None;
        }
        let p_aff = self.dehomogenize_last();
        let q_aff = divisor.dehomogenize_last();
        let p_deg = self.total_degree().unwrap() - ep;
        let q_deg = divisor.total_degree().unwrap() - eq;
        if q_deg > p_deg {
            return None;
        }
        let quot = affine_exact_div(&p_aff, &q_aff)?;
        if quot.total_degree().unwrap_or(0) > p_deg - q_deg {
            return None;
        }
        let mut shift = Monomial::one(n);
        shift = shift.with_exponent(last, ep - eq);
        Some(quot.homogenize_last(p_deg - q_deg).mul_monomial(&shift))
    }

    pub(crate) fn check_arity(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }
}

fn affine_exact_div(p: &Polynomial, q: &Polynomial) -> Option<Polynomial> {
    if p.len().saturating_mul(q.len()) > MODULAR_DIV_WORK {
        if let Some(r) = modular::exact_div_affine(p, q, DENSE_DIV_LIMIT) {
            return r;
        }
    }
    match kronecker_exact_div(p, q) {
        Some(r) => r,
        None => sparse_exact_div(p, q),
    }
}

/// Exact division by long division of the Kronecker images. Returns `None`
/// when the dense buffer would be too large, `Some(None)` when the divisor
/// does not divide.
fn kronecker_exact_div(p: &Polynomial, q: &Polynomial) -> Option<Option<Polynomial>> {
    if p.nvars == 0 {
        let a = p.as_constant().unwrap();
        let b = q.as_constant().unwrap();
        let (quo, rem) = a.div_rem(&b);
        return Some(if rem.is_zero() {
            Some(Polynomial::constant(0, quo))
        } else {
            None
        });
    }
    let dp = p.degrees();
    let dq = q.degrees();
    if dq.iter().zip(dp.iter()).any(|(a, b)| a > b) {
        return Some(None);
    }
    let layout = Layout::new(dp.iter().map(|&d| d as usize + 1).collect(), DENSE_DIV_LIMIT)?;
    let mut buf = vec![BigInt::zero(); layout.size()];
    for (m, c) in &p.terms {
        buf[layout.index(m.exponents())] = c.clone();
    }
    let mut dterms: Vec<(usize, &BigInt)> = q
        .terms
        .iter()
        .map(|(m, c)| (layout.index(m.exponents()), c))
        .collect();
    dterms.sort_by(|a, b| b.0.cmp(&a.0));
    let (top_q, lc) = dterms[0];
    let rest: Vec<(usize, &BigInt)> = dterms[1..].iter().map(|&(i, c)| (top_q - i, c)).collect();
    let top_p = match buf.iter().rposition(|c| !c.is_zero()) {
        Some(i) => i,
        None => return Some(Some(Polynomial::zero(p.nvars))),
    };
    if top_p < top_q {
        return Some(None);
    }
    let mut quot: Vec<(usize, BigInt)> = Vec::new();
    for i in (top_q..=top_p).rev() {
        if buf[i].is_zero() {
            continue;
        }
        let (qc, r) = buf[i].div_rem(lc);
        if !r.is_zero() {
            return Some(None);
        }
        buf[i] = BigInt::zero();
        for &(off, c) in &rest {
            buf[i - off] -= &qc * c;
        }
        quot.push((i - top_q, qc));
    }
    if buf[..top_q].iter().any(|c| !c.is_zero()) {
        return Some(None);
    }
    // The Kronecker map is injective only inside the box; reject quotients
    // whose product with the divisor would carry across digits.
    let mut out = Vec::with_capacity(quot.len());
    for (idx, c) in quot {
        let e = layout.unravel(idx);
        if e.iter().zip(dq.iter()).zip(dp.iter()).any(|((a, b), d)| a + b > *d) {
            return Some(None);
        }
        out.push((Monomial::from_exps(e), c));
    }
    Some(Some(Polynomial::from_terms(p.nvars, out)))
}

/// Sparse graded-lex exact division with early exit on the first obstruction.
fn sparse_exact_div(p: &Polynomial, q: &Polynomial) -> Option<Polynomial> {
    let (lm, lc) = q.leading_term().expect("nonzero divisor");
    let mut work: BTreeMap<Monomial, BigInt> = p.terms.iter().cloned().collect();
    let mut quotient = Vec::new();
    while let Some((m, c)) = work.pop_last() {
        if !lm.divides(&m) {
            return None;
        }
        let (b, r) = c.div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        let shift = lm.quotient_of(&m);
        for (dm, dc) in q.terms.iter().skip(1) {
            let key = dm.mul(&shift);
            let entry = work.entry(key.clone()).or_insert_with(BigInt::zero);
            *entry -= &b * dc;
            if entry.is_zero() {
                work.remove(&key);
            }
        }
        quotient.push((shift, b));
    }
    Some(Polynomial::from_sorted_terms(p.nvars, quotient))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> (Polynomial, Polynomial, Polynomial) {
        (
            Polynomial::var(3, 0),
            Polynomial::var(3, 1),
            Polynomial::var(3, 2),
        )
    }

    #[test]
    fn exact_quotient() {
        let (z, w, _) = vars();
        let p = &(&z * &z) - &(&w * &w);
        assert_eq!(p.exact_div(&(&z - &w)).unwrap(), Some(&z + &w));
    }

    #[test]
    fn not_divisible() {
        let (z, w, t) = vars();
        let p = &(&z * &z) + &(&w * &w);
        assert_eq!(p.exact_div(&t).unwrap(), None);
        assert_eq!(p.exact_div(&(&z + &t)).unwrap(), None);
    }

    #[test]
    fn non_integral_quotient_is_rejected() {
        let (z, _, _) = vars();
        assert_eq!(z.exact_div(&z.scale(&BigInt::from(2))).unwrap(), None);
    }

    #[test]
    fn zero_divisor_is_an_error() {
        let (z, _, _) = vars();
        assert_eq!(z.exact_div(&Polynomial::zero(3)), Err(Error::DivisionByZero));
    }

    #[test]
    fn routes_agree_on_inhomogeneous_input() {
        let (z, w, t) = vars();
        let a = &(&(&z * &w) + &t) - &Polynomial::constant(3, 3);
        let b = &(&z - &(&w * &w)) + &t.pow(3);
        let p = &a * &b;
        assert_eq!(sparse_exact_div(&p, &b), Some(a.clone()));
        assert_eq!(kronecker_exact_div(&p, &b), Some(Some(a.clone())));
        assert_eq!(p.exact_div(&a).unwrap(), Some(b));
    }

    #[test]
    fn pseudo_division_identity() {
        let (z, w, t) = vars();
        let p = &(&z.pow(3) - &(&w * &t).scale(&BigInt::from(5))) + &t.pow(3);
        let q = &(&z * &w).scale(&BigInt::from(3)) + &t.pow(2);
        let d = p.pseudo_div_rem(&q).unwrap();
        let lhs = p.scale(&d.scale);
        let rhs = &(&d.quotient * &q) + &d.remainder;
        assert_eq!(lhs, rhs);
        let lm = q.leading_monomial().unwrap();
        assert!(d
            .remainder
            .terms()
            .iter()
            .all(|(m, _)| !lm.divides(m)));
    }
}
