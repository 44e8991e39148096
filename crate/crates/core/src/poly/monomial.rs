use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

pub(crate) type Exponents = SmallVec<[u32; 4]>;

/// A power product `x_0^e_0 * ... * x_{n-1}^e_{n-1}` over a fixed number of
/// variables. Ordered graded-lexicographically: total degree first, then the
/// exponent vectors compared left to right.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Exponents,
    degree: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, nvars),
            degree: 0,
        }
    }

    pub fn new(exps: impl Into<Vec<u32>>) -> Self {
        let exps: Vec<u32> = exps.into();
        Self::from_exps(Exponents::from_vec(exps))
    }

    pub(crate) fn from_exps(exps: Exponents) -> Self {
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    /// The monomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[var] = 1;
        m.degree = 1;
        m
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    #[inline]
    pub fn exponent(&self, var: usize) -> u32 {
        self.exps[var]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        let exps = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a + b)
            .collect();
        Monomial {
            exps,
            degree: self.degree + other.degree,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        let exps = other
            .exps
            .iter()
            .zip(self.exps.iter())
            .map(|(a, b)| a - b)
            .collect();
        Monomial {
            exps,
            degree: other.degree - self.degree,
        }
    }

    pub(crate) fn with_exponent(&self, var: usize, e: u32) -> Monomial {
        let mut exps = self.exps.clone();
        exps[var] = e;
        Self::from_exps(exps)
    }

    /// Lexicographic comparison of exponent vectors (first variable most
    /// significant), ignoring total degree.
    pub fn cmp_lex(&self, other: &Monomial) -> Ordering {
        self.exps.cmp(&other.exps)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_puts_degree_first() {
        let z2 = Monomial::new(vec![2, 0, 0]);
        let wt2 = Monomial::new(vec![0, 1, 2]);
        let zw = Monomial::new(vec![1, 1, 0]);
        assert!(wt2 > z2);
        assert!(z2 > zw);
        assert_eq!(zw.mul(&zw), Monomial::new(vec![2, 2, 0]));
        assert!(zw.divides(&Monomial::new(vec![2, 1, 3])));
        assert!(!z2.divides(&zw));
    }
}
