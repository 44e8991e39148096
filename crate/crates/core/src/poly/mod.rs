//! Exact sparse multivariate polynomials over arbitrary-precision integers.
//!
//! Terms are stored in a vector sorted by strictly decreasing graded-lex
//! order, so `terms()[0]` is always the leading term. Zero coefficients are
//! never stored. Raw arithmetic does not normalize scalars; call
//! [`Polynomial::canonicalize`] where a canonical representative is needed.

mod arith;
pub(crate) mod dense;
mod division;
mod gcd;
pub(crate) mod modular;
mod monomial;
mod squarefree;
mod substitute;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use arith::ArithOp;
pub use division::PseudoDivision;
pub use gcd::{gcd_prs, gcd_with_cofactors, GcdRoute};
pub use monomial::Monomial;
pub use squarefree::SquarefreeDecomposition;
pub use substitute::ComposeRoute;

/// Reduced fraction of arbitrary-precision integers with positive denominator.
pub type RationalScalar = BigRational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Monomial, BigInt)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, var: usize) -> Self {
        Self::term(Monomial::var(nvars, var), BigInt::one())
    }

    pub fn term(m: Monomial, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let nvars = m.nvars();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Polynomial {
            nvars,
            terms: vec![(m, c)],
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut v: Vec<(Monomial, BigInt)> = terms.into_iter().collect();
        for (m, _) in &v {
            assert_eq!(m.nvars(), nvars, "monomial arity does not match");
        }
        v.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, BigInt)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial { nvars, terms: out }
    }

    /// Terms already sorted by strictly decreasing graded-lex order with no
    /// zero coefficients.
    pub(crate) fn from_sorted_terms(nvars: usize, terms: Vec<(Monomial, BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { nvars, terms }
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// Coefficient of `m` (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    /// The constant coefficient, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|(m, _)| m)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.first().map(|(_, c)| c)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exponent(var))
            .max()
            .unwrap_or(0)
    }

    /// Smallest exponent of `var` among the terms (0 for the zero polynomial).
    pub fn min_degree_in(&self, var: usize) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exponent(var))
            .min()
            .unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for (m, _) in &self.terms {
            for (o, &e) in out.iter_mut().zip(m.exponents()) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// True when every monomial has the same total degree. The zero
    /// polynomial counts as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m0, _)) => self.terms.iter().all(|(m, _)| m.degree() == m0.degree()),
        }
    }

    /// GCD of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Content 1 and positive leading coefficient, or zero.
    pub fn canonicalize(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        if g.is_one() {
            return self.clone();
        }
        self.div_scalar_exact(&g)
    }

    pub fn is_canonical(&self) -> bool {
        self.is_zero() || (self.terms[0].1.is_positive() && self.content().is_one())
    }

    pub fn scale(&self, s: &BigInt) -> Polynomial {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// Divides every coefficient by `s`, which must divide them all.
    pub(crate) fn div_scalar_exact(&self, s: &BigInt) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c / s)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    /// Exact value at an integer point.
    pub fn evaluate(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.nvars, "point length must equal variable count");
        let degs = self.degrees();
        let powers: Vec<Vec<BigInt>> = point
            .iter()
            .zip(degs.iter())
            .map(|(x, &d)| {
                let mut p = Vec::with_capacity(d as usize + 1);
                p.push(BigInt::one());
                for e in 1..=d as usize {
                    let next = &p[e - 1] * x;
                    p.push(next);
                }
                p
            })
            .collect();
        let mut acc = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= &powers[j][e as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Formal partial derivative with respect to `var`.
    pub fn partial_derivative(&self, var: usize) -> Polynomial {
        assert!(var < self.nvars, "variable index out of range");
        // Lowering one exponent in every surviving term preserves graded-lex order.
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(var) > 0)
            .map(|(m, c)| {
                let e = m.exponent(var);
                (m.with_exponent(var, e - 1), c * BigInt::from(e))
            })
            .collect();
        Polynomial {
            nvars: self.nvars,
            terms,
        }
    }

    /// Sets the last variable to 1. Inverse of [`Polynomial::homogenize_last`]
    /// for homogeneous inputs not divisible by the last variable.
    pub(crate) fn dehomogenize_last(&self) -> Polynomial {
        let n = self.nvars;
        Polynomial::from_terms(
            n - 1,
            self.terms.iter().map(|(m, c)| {
                (
                    Monomial::from_exps(m.exponents()[..n - 1].iter().copied().collect()),
                    c.clone(),
                )
            }),
        )
    }

    /// Homogenizes to total degree `degree` with a new last variable.
    pub(crate) fn homogenize_last(&self, degree: u32) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e: monomial::Exponents = m.exponents().iter().copied().collect();
            e.push(degree - m.degree());
            (Monomial::from_exps(e), c.clone())
        });
        Polynomial::from_terms(self.nvars + 1, terms)
    }

    /// Polynomial with rational coefficients as (integer polynomial, positive
    /// denominator) with the denominators cleared.
    pub fn from_rational_terms<I>(nvars: usize, terms: I) -> (Polynomial, BigInt)
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let terms: Vec<(Monomial, BigRational)> = terms.into_iter().collect();
        let mut den = BigInt::one();
        for (_, c) in &terms {
            den = den.lcm(c.denom());
        }
        let poly = Polynomial::from_terms(
            nvars,
            terms
                .into_iter()
                .map(|(m, c)| (m, c.numer() * (&den / c.denom()))),
        );
        (poly, den)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

/// Default variable names `x0, x1, ...`.
pub fn default_names(nvars: usize) -> Vec<String> {
    match nvars {
        3 => vec!["z".into(), "w".into(), "t".into()],
        _ => (0..nvars).map(|i| format!("x{i}")).collect(),
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (j, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.names[j].clone()),
                    _ => factors.push(format!("{}^{}", self.names[j], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
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
    fn evaluate_examples() {
        let (z, w, t) = zwt();
        let two = BigInt::from(2);
        let g = &(&t * &z).scale(&two) - &(&(&z * &z) + &(&w * &w));
        let one = BigInt::one();
        assert!(g.evaluate(&[one.clone(), one.clone(), one.clone()]).is_zero());
        let s = &(&z * &z) + &(&w * &w);
        assert!(s
            .evaluate(&[BigInt::zero(), BigInt::zero(), BigInt::from(5)])
            .is_zero());
        let cubic = &(&z.pow(3) + &w.pow(3)) + &t.pow(3);
        assert!(cubic
            .evaluate(&[BigInt::one(), BigInt::from(-1), BigInt::zero()])
            .is_zero());
    }

    #[test]
    fn partial_derivative_examples() {
        let (z, w, t) = zwt();
        let s = &(&z * &z) + &(&w * &w);
        assert_eq!(s.partial_derivative(0), z.scale(&BigInt::from(2)));
        assert!(t.partial_derivative(0).is_zero());
        let l = &(&z + &w) + &t;
        let sq = l.pow(2);
        assert_eq!(sq.partial_derivative(2), l.scale(&BigInt::from(2)));
    }

    #[test]
    fn canonical_form() {
        let (z, w, _) = zwt();
        let p = (&z - &w).scale(&BigInt::from(-6));
        let c = p.canonicalize();
        assert_eq!(c, &z - &w);
        assert!(c.is_canonical());
        assert!(!p.is_canonical());
    }

    #[test]
    fn display_uses_names() {
        let (z, w, t) = zwt();
        let p = &(&(&t * &z).scale(&BigInt::from(2)) - &(&z * &z)) - &w.pow(2);
        assert_eq!(p.to_string(), "-z^2 + 2*z*t - w^2");
        assert_eq!(Polynomial::zero(3).to_string(), "0");
        assert_eq!(Polynomial::constant(3, -4).to_string(), "-4");
    }

    #[test]
    fn dehomogenize_round_trip() {
        let (z, w, t) = zwt();
        let p = &(&(&z * &w) + &(&t * &t)) - &(&w * &t);
        let d = p.dehomogenize_last();
        assert_eq!(d.nvars(), 2);
        assert_eq!(d.homogenize_last(2), p);
    }
}
