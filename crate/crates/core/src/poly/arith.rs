use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::dense::Layout;
use super::monomial::Monomial;
use super::Polynomial;
use crate::error::{Error, Result};

/// Largest dense accumulator used by multiplication before falling back to
/// hashing.
const DENSE_MUL_LIMIT: usize = 1 << 23;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    /// Raise the first operand to the given power; the second operand is unused.
    Pow(u32),
}

impl Polynomial {
    /// Checked arithmetic entry point.
    pub fn arith(&self, other: &Polynomial, op: ArithOp) -> Result<Polynomial> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(match op {
            ArithOp::Add => self + other,
            ArithOp::Sub => self - other,
            ArithOp::Mul => self * other,
            ArithOp::Pow(e) => self.pow(e),
        })
    }

    fn merge(&self, other: &Polynomial, negate_other: bool) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb) {
                    Ordering::Greater => {
                        out.push((ma.clone(), ca.clone()));
                        a.next();
                    }
                    Ordering::Less => {
                        out.push((mb.clone(), if negate_other { -cb } else { cb.clone() }));
                        b.next();
                    }
                    Ordering::Equal => {
                        let c = if negate_other { ca - cb } else { ca + cb };
                        if !c.is_zero() {
                            out.push((ma.clone(), c));
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some((ma, ca)), None) => {
                    out.push((ma.clone(), ca.clone()));
                    a.next();
                }
                (None, Some((mb, cb))) => {
                    out.push((mb.clone(), if negate_other { -cb } else { cb.clone() }));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Polynomial::from_sorted_terms(self.nvars, out)
    }

    fn mul_impl(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let n = self.nvars;
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(n);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return Polynomial::from_sorted_terms(
                n,
                self.terms.iter().map(|(t, d)| (t.mul(m), d * c)).collect(),
            );
        }
        if self.terms.len() == 1 {
            return other.mul_impl(self);
        }
        if n >= 2 && self.is_homogeneous() && other.is_homogeneous() {
            let d = self.total_degree().unwrap() + other.total_degree().unwrap();
            let a = self.dehomogenize_last();
            let b = other.dehomogenize_last();
            return a.mul_impl(&b).homogenize_last(d);
        }
        let work = self.terms.len().saturating_mul(other.terms.len());
        let da = self.degrees();
        let db = other.degrees();
        let dims: Vec<usize> = da
            .iter()
            .zip(db.iter())
            .map(|(a, b)| (a + b + 1) as usize)
            .collect();
        if let Some(layout) = Layout::new(dims, DENSE_MUL_LIMIT.min(work.saturating_mul(4))) {
            return self.mul_dense(other, &layout);
        }
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(work.min(1 << 20));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                acc.entry(ma.mul(mb))
                    .and_modify(|c| *c += &prod)
                    .or_insert(prod);
            }
        }
        Polynomial::from_terms(n, acc)
    }

    fn mul_dense(&self, other: &Polynomial, layout: &Layout) -> Polynomial {
        let mut acc = vec![BigInt::zero(); layout.size()];
        let ib: Vec<(usize, &BigInt)> = other
            .terms
            .iter()
            .map(|(m, c)| (layout.index(m.exponents()), c))
            .collect();
        for (ma, ca) in &self.terms {
            let ia = layout.index(ma.exponents());
            for &(j, cb) in &ib {
                acc[ia + j] += ca * cb;
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (Monomial::from_exps(layout.unravel(i)), c));
        Polynomial::from_terms(self.nvars, terms)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars);
        if e == 0 {
            return result;
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            let exps = m.exponents().iter().map(|x| x * e).collect();
            return Polynomial::term(Monomial::from_exps(exps), num_traits::pow(c.clone(), e as usize));
        }
        let mut base = self.clone();
        let mut k = e;
        loop {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = &base * &base;
        }
        result
    }

    pub fn is_unit(&self) -> bool {
        self.as_constant()
            .map(|c| c.is_one() || (-c).is_one())
            .unwrap_or(false)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.merge(rhs, true)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.mul_impl(rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::from_sorted_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        )
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
