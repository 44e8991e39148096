//! Degree sequences: minimal recurrences, the characteristic polynomial
//! `s^(n0+1) - d s^n0 + h`, its dominant root, and closed forms.

use std::fmt;

use bigdecimal::BigDecimal;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hiprec::{self, HiComplex};
use crate::iterator::IterationLedger;

type Q = BigRational;

fn qi(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

// ---------------------------------------------------------------------------
// Linear recurrences

/// `sum_i a_i s_{n-i} = 0` with `a_0 = 1`, started from `seed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceModel {
    coefficients: Vec<Q>,
    seed: Vec<BigInt>,
}

impl RecurrenceModel {
    pub fn new(coefficients: Vec<Q>, seed: Vec<BigInt>) -> Result<Self> {
        if coefficients.len() < 2 || !coefficients[0].is_one() {
            return Err(Error::Domain("a recurrence needs a_0 = 1 and order at least 1".into()));
        }
        if seed.len() != coefficients.len() - 1 {
            return Err(Error::Domain(format!(
                "order {} needs {} seed terms, got {}",
                coefficients.len() - 1,
                coefficients.len() - 1,
                seed.len()
            )));
        }
        Ok(RecurrenceModel { coefficients, seed })
    }

    pub fn from_integers(coefficients: &[i64], seed: &[i64]) -> Result<Self> {
        Self::new(
            coefficients.iter().map(|&c| qi(c)).collect(),
            seed.iter().map(|&s| BigInt::from(s)).collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.coefficients
    }

    pub fn seed(&self) -> &[BigInt] {
        &self.seed
    }

    /// Coefficients as integers when they all are.
    pub fn integer_coefficients(&self) -> Option<Vec<BigInt>> {
        self.coefficients
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// The first `count` terms.
    pub fn terms(&self, count: usize) -> Vec<Q> {
        let r = self.order();
        let mut out: Vec<Q> = self.seed.iter().take(count).map(|s| qi(s.clone())).collect();
        while out.len() < count {
            let n = out.len();
            let mut acc = Q::zero();
            for i in 1..=r {
                acc -= &self.coefficients[i] * &out[n - i];
            }
            out.push(acc);
        }
        out
    }
}

impl fmt::Display for RecurrenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Minimal linear recurrence over the rationals (Berlekamp-Massey). `None`
/// when fewer than four terms are given, the sequence is zero, or the window
/// is too short to determine the recurrence (`2 * order > len`).
pub fn fit_recurrence(sequence: &[BigInt]) -> Option<RecurrenceModel> {
    let n = sequence.len();
    if n < 4 {
        return None;
    }
    let s: Vec<Q> = sequence.iter().map(|x| qi(x.clone())).collect();
    let mut c: Vec<Q> = vec![Q::one()];
    let mut b: Vec<Q> = vec![Q::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = Q::one();
    for k in 0..n {
        let mut disc = s[k].clone();
        for i in 1..=l {
            disc += &c[i] * &s[k - i];
        }
        if disc.is_zero() {
            m += 1;
            continue;
        }
        let coef = &disc / &bd;
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, Q::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] -= &coef * bi;
        }
        if 2 * l <= k {
            l = k + 1 - l;
            b = prev;
            bd = disc;
            m = 1;
        } else {
            m += 1;
        }
    }
    if l == 0 || 2 * l > n {
        return None;
    }
    c.resize(l + 1, Q::zero());
    RecurrenceModel::new(c, sequence[..l].to_vec()).ok()
}

/// Extends the model to `s_0..=s_n` and returns `s_n / s_{n-1}`. Every term
/// must be a positive integer.
pub fn extend_and_ratio(model: &RecurrenceModel, n: usize) -> Result<(Vec<BigInt>, Q)> {
    if n < model.order().max(1) {
        return Err(Error::Domain(format!("extension length {n} is below the model order")));
    }
    let terms = model.terms(n + 1);
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.into_iter().enumerate() {
        if !t.is_integer() || !t.is_positive() {
            return Err(Error::Domain(format!(
                "non-QAS-consistent sequence: term {i} is {t}, degrees must be positive integers"
            )));
        }
        out.push(t.to_integer());
    }
    let ratio = Q::new(out[n].clone(), out[n - 1].clone());
    Ok((out, ratio))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub n: usize,
    pub predicted: Q,
    pub actual: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prediction {
    pub matches: bool,
    pub first_mismatch: Option<Mismatch>,
}

pub fn predict_sequence(model: &RecurrenceModel, actual: &[BigInt]) -> Prediction {
    let predicted = model.terms(actual.len());
    let first_mismatch = predicted
        .into_iter()
        .zip(actual.iter())
        .enumerate()
        .find(|(_, (p, a))| *p != qi((*a).clone()))
        .map(|(n, (predicted, actual))| Mismatch {
            n,
            predicted,
            actual: actual.clone(),
        });
    Prediction {
        matches: first_mismatch.is_none(),
        first_mismatch,
    }
}

pub fn predict_degrees(model: &RecurrenceModel, ledger: &IterationLedger) -> Prediction {
    let degrees: Vec<BigInt> = ledger.degrees().into_iter().map(BigInt::from).collect();
    predict_sequence(model, &degrees)
}

// ---------------------------------------------------------------------------
// Characteristic polynomial

/// `P(s) = s^(n0+1) - d s^n0 + h`; `n0 = 0, h = 0` is the stable case `s - d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharPoly {
    d: u64,
    h: u64,
    n0: usize,
}

pub fn build_charpoly(d: u64, h: u64, n0: usize) -> Result<CharPoly> {
    CharPoly::new(d, h, n0)
}

impl CharPoly {
    pub fn new(d: u64, h: u64, n0: usize) -> Result<Self> {
        if d == 0 || h == 0 || n0 == 0 {
            return Err(Error::Domain("d, h and n0 must all be positive".into()));
        }
        Ok(CharPoly { d, h, n0 })
    }

    pub fn algebraically_stable(d: u64) -> Self {
        CharPoly { d, h: 0, n0: 0 }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn degree(&self) -> usize {
        self.n0 + 1
    }

    /// Integer coefficients, highest power first.
    pub fn coefficients(&self) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); self.n0 + 2];
        c[0] = BigInt::one();
        c[1] = -BigInt::from(self.d);
        c[self.n0 + 1] += BigInt::from(self.h);
        c
    }

    /// Recurrence coefficients `(1, -d, 0, ..., 0, h)`.
    pub fn recurrence(&self) -> Vec<Q> {
        self.coefficients().into_iter().map(Q::from_integer).collect()
    }

    /// The degrees `1, d, ..., d^n0` before the first drop.
    pub fn seed(&self) -> Vec<BigInt> {
        (0..=self.n0 as u32).map(|j| BigInt::from(self.d).pow(j)).collect()
    }

    pub fn model(&self) -> RecurrenceModel {
        RecurrenceModel::new(self.recurrence(), self.seed()).expect("well-formed")
    }

    pub fn matches_model(&self, model: &RecurrenceModel) -> bool {
        model.coefficients() == self.recurrence().as_slice()
    }

    /// The characteristic polynomial when the model has the shape
    /// `(1, -d, 0, ..., 0, h)` with positive integers `d`, `h` (or `(1, -d)`).
    pub fn from_model(model: &RecurrenceModel) -> Option<CharPoly> {
        let c = model.integer_coefficients()?;
        let d = (-&c[1]).to_u64().filter(|&d| d > 0)?;
        let r = model.order();
        if r == 1 {
            return Some(CharPoly::algebraically_stable(d));
        }
        if c[2..r].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let h = c[r].to_u64().filter(|&h| h > 0)?;
        CharPoly::new(d, h, r - 1).ok()
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coefficients()
            .iter()
            .fold(Q::zero(), |acc, c| acc * x + qi(c.clone()))
    }

    /// Every root satisfies `|s| <= d + max(h, 1)`.
    pub fn root_bound(&self) -> BigInt {
        BigInt::from(self.d + self.h.max(1))
    }

    /// `h (n0+1)^(n0+1) == d^(n0+1) n0^n0`.
    pub fn has_double_root(&self) -> bool {
        if self.n0 == 0 {
            return false;
        }
        let e = self.n0 as u32 + 1;
        BigInt::from(self.h) * BigInt::from(self.n0 + 1).pow(e)
            == BigInt::from(self.d).pow(e) * BigInt::from(self.n0).pow(e - 1)
    }

    /// `d n0 / (n0 + 1)` in the double-root case.
    pub fn double_root(&self) -> Option<Q> {
        self.has_double_root()
            .then(|| Q::new(BigInt::from(self.d * self.n0 as u64), BigInt::from(self.n0 as u64 + 1)))
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.n0 {
            0 => write!(f, "s - {}", self.d),
            1 => write!(f, "s^2 - {}*s + {}", self.d, self.h),
            k => write!(f, "s^{} - {}*s^{k} + {}", k + 1, self.d, self.h),
        }
    }
}

// ---------------------------------------------------------------------------
// Real root isolation

/// Dense univariate polynomial over Q, lowest power first, trimmed.
#[derive(Clone, Debug, PartialEq)]
struct UPoly(Vec<Q>);

impl UPoly {
    fn from_charpoly(cp: &CharPoly) -> Self {
        let mut c: Vec<Q> = cp.coefficients().into_iter().map(Q::from_integer).collect();
        c.reverse();
        UPoly(c).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Self {
        UPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * qi(i as i64))
                .collect(),
        )
        .trimmed()
    }

    fn div_rem(&self, b: &UPoly) -> (UPoly, UPoly) {
        let mut r = self.0.clone();
        let db = b.degree();
        let lb = b.0.last().unwrap();
        if r.len() < b.0.len() {
            return (UPoly(Vec::new()), self.clone());
        }
        let mut q = vec![Q::zero(); r.len() - db];
        for i in (0..q.len()).rev() {
            let c = &r[i + db] / lb;
            for (j, bj) in b.0.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
            q[i] = c;
        }
        r.truncate(db);
        (UPoly(q).trimmed(), UPoly(r).trimmed())
    }

    fn gcd(&self, b: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a
    }
}

/// Sturm chain of the square-free part of `p`.
struct Sturm(Vec<UPoly>);

impl Sturm {
    fn new(p: &UPoly) -> Self {
        let g = p.gcd(&p.derivative());
        let sqf = p.div_rem(&g).0;
        let mut chain = vec![sqf.clone(), sqf.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            chain.push(UPoly(r.0.into_iter().map(|c| -c).collect()));
        }
        chain.pop();
        Sturm(chain)
    }

    fn variations(&self, x: &Q) -> usize {
        let signs: Vec<bool> = self
            .0
            .iter()
            .map(|p| p.eval(x))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in `(a, b]`.
    fn count(&self, a: &Q, b: &Q) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootEnclosure {
    Exact(Q),
    /// `P(lo) < 0 < P(hi)` with exactly one root in between.
    Interval { lo: Q, hi: Q },
}

impl RootEnclosure {
    pub fn width(&self) -> Q {
        match self {
            RootEnclosure::Exact(_) => Q::zero(),
            RootEnclosure::Interval { lo, hi } => hi - lo,
        }
    }

    pub fn lo(&self) -> &Q {
        match self {
            RootEnclosure::Exact(x) => x,
            RootEnclosure::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &Q {
        match self {
            RootEnclosure::Exact(x) => x,
            RootEnclosure::Interval { hi, .. } => hi,
        }
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn midpoint(&self) -> f64 {
        ((self.lo() + self.hi()) / qi(2)).to_f64().unwrap_or(f64::NAN)
    }

    /// Upper bound on `|x - r|` for the enclosed root `r`.
    pub fn distance_bound(&self, x: &Q) -> Q {
        let a = (x - self.lo()).abs();
        let b = (x - self.hi()).abs();
        a.max(b)
    }
}

/// Largest real root of `cp`, exact when rational, otherwise isolated to
/// width at most `tol`. `None` when `cp` has no real root.
pub fn dominant_root(cp: &CharPoly, tol: &Q) -> Option<RootEnclosure> {
    if let Some(r) = cp.double_root() {
        return Some(RootEnclosure::Exact(r));
    }
    let p = UPoly::from_charpoly(cp);
    let sturm = Sturm::new(&p);
    let bound = cp.root_bound();
    let top = qi(bound.clone());
    if sturm.count(&qi(-bound.clone()), &top) == 0 {
        return None;
    }
    // Integer search: the largest root lies in (lo, lo + 1].
    let (mut lo, mut hi) = (-bound.clone(), bound);
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
        if sturm.count(&qi(mid.clone()), &top) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (mut lo, mut hi) = (qi(lo), qi(hi));
    if p.eval(&hi).is_zero() {
        return Some(RootEnclosure::Exact(hi));
    }
    let two = qi(2);
    while &hi - &lo > *tol || sturm.count(&lo, &hi) > 1 {
        let mid = (&lo + &hi) / &two;
        if p.eval(&mid).is_zero() && sturm.count(&mid, &top) == 0 {
            return Some(RootEnclosure::Exact(mid));
        }
        if sturm.count(&mid, &hi) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(RootEnclosure::Interval { lo, hi })
}

/// Exact sign certificate: `P(lo) < 0 < P(hi)` (or `P(r) = 0`) and no real
/// root of `P` in `(hi, d + h]`.
pub fn verify_enclosure(cp: &CharPoly, e: &RootEnclosure) -> bool {
    let p = UPoly::from_charpoly(cp);
    let top = qi(BigInt::from(cp.d() + cp.h()));
    let sturm = Sturm::new(&p);
    let signs = match e {
        RootEnclosure::Exact(r) => p.eval(r).is_zero(),
        RootEnclosure::Interval { lo, hi } => p.eval(lo).is_negative() && p.eval(hi).is_positive(),
    };
    signs && (e.hi() >= &top || sturm.count(e.hi(), &top) == 0)
}

/// Approximations of all complex roots (Durand-Kerner).
pub fn approximate_roots(cp: &CharPoly) -> Vec<Complex64> {
    let coeffs: Vec<f64> = cp
        .coefficients()
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect();
    durand_kerner(&coeffs)
}

fn durand_kerner(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let radius = 1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * (radius / 2.0)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-12, 0.0);
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    roots
}

// ---------------------------------------------------------------------------
// Closed forms

/// `a + b * sqrt(disc)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadExt {
    pub a: Q,
    pub b: Q,
    pub disc: BigInt,
}

impl QuadExt {
    pub fn new(a: Q, b: Q, disc: BigInt) -> Self {
        QuadExt { a, b, disc }
    }

    fn rational(a: Q, disc: &BigInt) -> Self {
        QuadExt::new(a, Q::zero(), disc.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadExt::new(&self.a + &o.a, &self.b + &o.b, self.disc.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadExt::new(&self.a - &o.a, &self.b - &o.b, self.disc.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let d = qi(self.disc.clone());
        QuadExt::new(
            &self.a * &o.a + &self.b * &o.b * d,
            &self.a * &o.b + &self.b * &o.a,
            self.disc.clone(),
        )
    }

    pub fn scale(&self, s: &Q) -> Self {
        QuadExt::new(&self.a * s, &self.b * s, self.disc.clone())
    }

    /// Division by `sqrt(disc)`.
    pub fn div_sqrt(&self) -> Self {
        QuadExt::new(self.b.clone(), &self.a / qi(self.disc.clone()), self.disc.clone())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QuadExt::rational(Q::one(), &self.disc);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Real value; `NaN` for a negative discriminant with nonzero `b`.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * self.disc.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { "-" } else { "+" };
        write!(f, "{} {sign} ({})*sqrt({})", self.a, self.b.abs(), self.disc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericTerm {
    pub root: HiComplex,
    /// Coefficients of the polynomial multiplying `root^n`, constant first.
    pub coefficients: Vec<HiComplex>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericClosedForm {
    /// Significant digits of the reported constants.
    pub digits: u64,
    pub terms: Vec<NumericTerm>,
    /// Largest `|closed(n) - s_n|` over the seed terms.
    pub residual: BigDecimal,
}

/// `s_n` as a sum of root powers.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedForm {
    /// `s_n = coefficient * ratio^n`.
    Geometric { ratio: Q, coefficient: Q },
    /// `s_n = (linear * n + constant) * root^n`.
    DoubleRoot { root: Q, linear: Q, constant: Q },
    /// `s_n = c_1 r_1^n + c_2 r_2^n`, exact in `Q(sqrt(disc))`.
    Quadratic {
        roots: [QuadExt; 2],
        coefficients: [QuadExt; 2],
    },
    Numeric(NumericClosedForm),
}

impl ClosedForm {
    /// Exact value, when the form is exact.
    pub fn evaluate_exact(&self, n: u32) -> Option<Q> {
        match self {
            ClosedForm::Geometric { ratio, coefficient } => Some(coefficient * num_traits::pow(ratio.clone(), n as usize)),
            ClosedForm::DoubleRoot { root, linear, constant } => {
                Some((linear * qi(n) + constant) * num_traits::pow(root.clone(), n as usize))
            }
            ClosedForm::Quadratic { roots, coefficients } => {
                let v = coefficients[0]
                    .mul(&roots[0].pow(n))
                    .add(&coefficients[1].mul(&roots[1].pow(n)));
                v.is_rational().then_some(v.a)
            }
            ClosedForm::Numeric(_) => None,
        }
    }

    /// High-precision value.
    pub fn evaluate(&self, n: u32) -> HiComplex {
        match self {
            ClosedForm::Numeric(form) => form.terms.iter().fold(HiComplex::zero(), |acc, t| {
                let power = t.root.pow(n);
                let nn = HiComplex::from_rational(&qi(n));
                let poly = t
                    .coefficients
                    .iter()
                    .rev()
                    .fold(HiComplex::zero(), |p, c| p.mul(&nn).add(c));
                acc.add(&poly.mul(&power))
            }),
            exact => HiComplex::from_rational(&exact.evaluate_exact(n).expect("exact form")),
        }
    }

    /// Nearest integer to `s_n`.
    pub fn rounded(&self, n: u32) -> BigInt {
        match self.evaluate_exact(n) {
            Some(q) => q.round().to_integer(),
            None => self.evaluate(n).round_real(),
        }
    }
}

/// Closed form of the sequence with characteristic polynomial `cp` and
/// initial terms `seed` (at least `cp.degree()` of them).
pub fn closed_form(cp: &CharPoly, seed: &[BigInt]) -> Result<ClosedForm> {
    if seed.len() < cp.degree() {
        return Err(Error::Domain(format!("closed form needs {} seed terms", cp.degree())));
    }
    let s: Vec<Q> = seed.iter().map(|x| qi(x.clone())).collect();
    let d = qi(cp.d());
    match cp.n0() {
        0 => Ok(ClosedForm::Geometric {
            ratio: d,
            coefficient: s[0].clone(),
        }),
        1 => {
            let disc = BigInt::from(cp.d()).pow(2) - BigInt::from(4 * cp.h());
            if disc.is_zero() {
                let root = d / qi(2);
                let linear = &s[1] / &root - &s[0];
                return Ok(ClosedForm::DoubleRoot {
                    root,
                    linear,
                    constant: s[0].clone(),
                });
            }
            let half = Q::new(1.into(), 2.into());
            let r1 = QuadExt::new(&d * &half, half.clone(), disc.clone());
            let r2 = QuadExt::new(&d * &half, -half, disc.clone());
            let s0 = QuadExt::rational(s[0].clone(), &disc);
            let s1 = QuadExt::rational(s[1].clone(), &disc);
            let c1 = s1.sub(&s0.mul(&r2)).div_sqrt();
            let c2 = s1.sub(&s0.mul(&r1)).div_sqrt().scale(&qi(-1));
            Ok(ClosedForm::Quadratic {
                roots: [r1, r2],
                coefficients: [c1, c2],
            })
        }
        _ => numeric_closed_form(cp, &s),
    }
}

fn hi_coeffs(cp: &CharPoly) -> Vec<HiComplex> {
    cp.coefficients()
        .into_iter()
        .map(|c| HiComplex::from_rational(&Q::from_integer(c)))
        .collect()
}

fn newton_refine(coeffs: &[HiComplex], start: Complex64) -> HiComplex {
    let n = coeffs.len() - 1;
    let deriv: Vec<HiComplex> = coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| c.mul(&HiComplex::from_rational(&qi((n - i) as i64))))
        .collect();
    let tiny = BigDecimal::new(BigInt::one(), hiprec::WORKING_DIGITS as i64 - 8);
    let mut x = HiComplex::from_c64(start);
    for _ in 0..64 {
        let Some(step) = hiprec::horner(coeffs, &x).div(&hiprec::horner(&deriv, &x)) else {
            break;
        };
        x = x.sub(&step);
        if step.abs() <= &tiny * (BigDecimal::one() + x.abs()) {
            break;
        }
    }
    x
}

fn numeric_closed_form(cp: &CharPoly, s: &[Q]) -> Result<ClosedForm> {
    let coeffs = hi_coeffs(cp);
    let mut approx = approximate_roots(cp);
    let mut terms: Vec<NumericTerm> = Vec::new();
    if let Some(r) = cp.double_root() {
        let rf = r.to_f64().unwrap_or(f64::NAN);
        approx.sort_by(|a, b| (a - rf).norm().total_cmp(&(b - rf).norm()));
        approx.drain(..2);
        terms.push(NumericTerm {
            root: HiComplex::from_rational(&r),
            coefficients: vec![HiComplex::zero(); 2],
        });
    }
    for z in approx {
        terms.push(NumericTerm {
            root: newton_refine(&coeffs, z),
            coefficients: vec![HiComplex::zero()],
        });
    }
    // Columns: root^n, n root^n (double root only), one row per seed term.
    let m = cp.degree();
    let mut rows: Vec<Vec<HiComplex>> = Vec::with_capacity(m);
    for n in 0..m as u32 {
        let nn = HiComplex::from_rational(&qi(n));
        let mut row = Vec::with_capacity(m + 1);
        for t in &terms {
            let p = t.root.pow(n);
            row.push(p.clone());
            if t.coefficients.len() == 2 {
                row.push(p.mul(&nn));
            }
        }
        row.push(HiComplex::from_rational(&s[n as usize]));
        rows.push(row);
    }
    let solution = solve(rows).ok_or_else(|| Error::Domain("singular closed-form system".into()))?;
    let mut it = solution.into_iter();
    for t in terms.iter_mut() {
        for c in t.coefficients.iter_mut() {
            *c = it.next().unwrap();
        }
    }
    let mut form = NumericClosedForm {
        digits: hiprec::REPORTED_DIGITS,
        terms,
        residual: BigDecimal::zero(),
    };
    let probe = ClosedForm::Numeric(form.clone());
    form.residual = (0..m as u32)
        .map(|n| probe.evaluate(n).sub(&HiComplex::from_rational(&s[n as usize])).abs())
        .fold(BigDecimal::zero(), |a, b| a.max(b));
    Ok(ClosedForm::Numeric(form))
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut rows: Vec<Vec<HiComplex>>) -> Option<Vec<HiComplex>> {
    let n = rows.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| rows[a][col].norm_sqr().cmp(&rows[b][col].norm_sqr()))?;
        if rows[pivot][col].norm_sqr().is_zero() {
            return None;
        }
        rows.swap(col, pivot);
        for r in col + 1..n {
            let factor = rows[r][col].div(&rows[col][col])?;
            for c in col..=n {
                let v = rows[col][c].mul(&factor);
                rows[r][c] = rows[r][c].sub(&v);
            }
        }
    }
    let mut x = vec![HiComplex::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rows[r][n].clone();
        for c in r + 1..n {
            acc = acc.sub(&rows[r][c].mul(&x[c]));
        }
        x[r] = acc.div(&rows[r][r])?;
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Root analysis and the dynamical degree

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootCase {
    DistinctRoots,
    DoubleRoot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootAnalysis {
    pub case: RootCase,
    /// Largest real root; `None` when there is none.
    pub dominant: Option<RootEnclosure>,
    pub double_root: Option<Q>,
    /// Modulus of a root larger in modulus than every real root, if any.
    pub competing_modulus: Option<f64>,
    pub roots: Vec<Complex64>,
    pub closed_form: Option<ClosedForm>,
}

impl RootAnalysis {
    /// Whether the largest real root dominates every root in modulus.
    pub fn has_real_dominant(&self) -> bool {
        self.dominant.is_some() && self.competing_modulus.is_none()
    }
}

/// Root structure of `cp`, with the closed form for the seed `1, d, ..., d^n0`.
pub fn classify_roots(cp: &CharPoly, tol: &Q) -> RootAnalysis {
    let double_root = cp.double_root();
    let case = if double_root.is_some() {
        RootCase::DoubleRoot
    } else {
        RootCase::DistinctRoots
    };
    let dominant = dominant_root(cp, tol);
    let roots = approximate_roots(cp);
    let largest = roots.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let competing_modulus = match &dominant {
        None => Some(largest),
        Some(e) => {
            // Approximations of the dominant root itself (split when it is
            // multiple) do not compete.
            let lam = e.hi().to_f64().unwrap_or(f64::NAN);
            roots
                .iter()
                .filter(|z| z.norm() > lam * (1.0 + 1e-9) && (*z - lam).norm() > 1e-6 * lam)
                .map(|z| z.norm())
                .reduce(f64::max)
        }
    };
    let closed_form = closed_form(cp, &cp.seed()).ok();
    RootAnalysis {
        case,
        dominant,
        double_root,
        competing_modulus,
        roots,
        closed_form,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioCheck {
    pub n: usize,
    /// `s_n / s_{n-1}`.
    pub ratio: Q,
    /// `|ratio - lambda1| <= deviation`.
    pub deviation: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicalDegreeReport {
    pub charpoly: CharPoly,
    pub lambda1: RootEnclosure,
    /// Root of the monic integer polynomial `charpoly`.
    pub is_algebraic_integer: bool,
    pub ratio_check: RatioCheck,
}

pub const DEFAULT_RATIO_N: usize = 60;

/// `lambda1` as the dominant root of `cp`, with the growth ratio of the
/// extended sequence at step `ratio_n`.
pub fn dynamical_degree(cp: &CharPoly, tol: &Q, ratio_n: usize) -> Result<DynamicalDegreeReport> {
    let analysis = classify_roots(cp, tol);
    let lambda1 = match (&analysis.dominant, analysis.competing_modulus) {
        (Some(e), None) => e.clone(),
        (_, Some(m)) => {
            return Err(Error::Domain(format!(
                "no real dominant root of QAS shape: a root of modulus {m:.6} dominates"
            )))
        }
        (None, None) => return Err(Error::Domain("no real root".into())),
    };
    let (_, ratio) = extend_and_ratio(&cp.model(), ratio_n)?;
    let deviation = lambda1.distance_bound(&ratio);
    Ok(DynamicalDegreeReport {
        charpoly: *cp,
        lambda1,
        is_algebraic_integer: true,
        ratio_check: RatioCheck {
            n: ratio_n,
            ratio,
            deviation,
        },
    })
}

/// `10^-12`.
pub fn default_tolerance() -> Q {
    Q::new(BigInt::one(), BigInt::from(10u64).pow(12))
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}
