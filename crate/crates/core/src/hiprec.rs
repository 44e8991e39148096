//! Complex arithmetic rounded to a fixed number of significant decimal digits.

use std::fmt;

use bigdecimal::{BigDecimal, Context, FromPrimitive, RoundingMode, ToPrimitive};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Digits carried through intermediate results.
pub const WORKING_DIGITS: u64 = 96;
/// Digits reported for closed-form constants.
pub const REPORTED_DIGITS: u64 = 64;

fn ctx() -> Context {
    Context::default().with_prec(WORKING_DIGITS).expect("nonzero precision")
}

fn round(x: BigDecimal) -> BigDecimal {
    if x.is_zero() {
        x
    } else {
        x.with_prec(WORKING_DIGITS)
    }
}

#[derive(Clone, PartialEq)]
pub struct HiComplex {
    pub re: BigDecimal,
    pub im: BigDecimal,
}

impl HiComplex {
    pub fn zero() -> Self {
        HiComplex {
            re: BigDecimal::zero(),
            im: BigDecimal::zero(),
        }
    }

    pub fn real(re: BigDecimal) -> Self {
        HiComplex {
            re,
            im: BigDecimal::zero(),
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        let n = BigDecimal::from(q.numer().clone());
        let d = BigDecimal::from(q.denom().clone());
        Self::real(round(n * ctx().invert(&d)))
    }

    pub fn from_c64(z: Complex64) -> Self {
        HiComplex {
            re: BigDecimal::from_f64(z.re).unwrap_or_default(),
            im: BigDecimal::from_f64(z.im).unwrap_or_default(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    pub fn add(&self, o: &Self) -> Self {
        HiComplex {
            re: round(&self.re + &o.re),
            im: round(&self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        HiComplex {
            re: round(&self.re - &o.re),
            im: round(&self.im - &o.im),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        HiComplex {
            re: round(&self.re * &o.re - &self.im * &o.im),
            im: round(&self.re * &o.im + &self.im * &o.re),
        }
    }

    pub fn norm_sqr(&self) -> BigDecimal {
        round(self.re.square() + self.im.square())
    }

    pub fn abs(&self) -> BigDecimal {
        self.norm_sqr().sqrt_with_context(&ctx()).unwrap_or_default()
    }

    /// `None` on division by zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        let n = o.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let inv = ctx().invert(&n);
        let conj = HiComplex {
            re: o.re.clone(),
            im: -o.im.clone(),
        };
        let num = self.mul(&conj);
        Some(HiComplex {
            re: round(num.re * &inv),
            im: round(num.im * &inv),
        })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::real(BigDecimal::from(1));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Nearest integer to the real part.
    pub fn round_real(&self) -> BigInt {
        let r = self.re.with_scale_round(0, RoundingMode::HalfEven);
        r.into_bigint_and_scale().0
    }

    /// Scientific notation with `digits` significant digits.
    pub fn format(&self, digits: u64) -> String {
        let part = |x: &BigDecimal| {
            if x.is_zero() {
                "0".to_string()
            } else {
                x.with_prec(digits).to_scientific_notation()
            }
        };
        if self.im.is_zero() {
            part(&self.re)
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            format!("{} {sign} {}i", part(&self.re), part(&self.im.abs()))
        }
    }
}

impl fmt::Debug for HiComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(20))
    }
}

/// Horner evaluation; `coeffs` in descending powers.
pub fn horner(coeffs: &[HiComplex], x: &HiComplex) -> HiComplex {
    coeffs
        .iter()
        .fold(HiComplex::zero(), |acc, c| acc.mul(x).add(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let third = HiComplex::from_rational(&BigRational::new(1.into(), 3.into()));
        let one = third.add(&third).add(&third);
        assert!((&one.re - BigDecimal::from(1)).abs() < BigDecimal::from_f64(1e-90).unwrap());
        assert_eq!(one.round_real(), BigInt::from(1));
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = HiComplex::from_c64(Complex64::new(1.5, -2.0));
        let b = HiComplex::from_c64(Complex64::new(-0.25, 3.0));
        let q = a.mul(&b).div(&b).unwrap();
        let diff = q.sub(&a).abs();
        assert!(diff < BigDecimal::from_f64(1e-80).unwrap());
        assert!(a.div(&HiComplex::zero()).is_none());
    }

    #[test]
    fn formatting() {
        let x = HiComplex::from_rational(&BigRational::new(2.into(), 3.into()));
        let s = x.format(10);
        assert!(s.starts_with("6.666666667e-1"), "{s}");
    }
}
