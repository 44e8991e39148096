//! Multi-modular dense machinery: word-size prime fields, Chinese remaindering,
//! tensor evaluation/interpolation (used for large compositions) and a
//! Brown-style dense modular GCD with trial-division certification.
//!
//! Everything here works on *affine* polynomials; callers dehomogenize first.
//! Dense tensors are row-major with the last variable fastest.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dense::Layout;
use super::monomial::{Exponents, Monomial};
use super::Polynomial;
use crate::exec;

/// Arithmetic in Z/pZ for primes below 2^31, with Barrett reduction.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Zp {
    p: u64,
    barrett: u64,
}

impl Zp {
    pub(crate) fn new(p: u64) -> Self {
        debug_assert!(p > 2 && p < (1 << 31));
        Zp {
            p,
            barrett: (u128::from(u64::MAX) / u128::from(p)) as u64,
        }
    }

    #[inline]
    pub(crate) fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce(&self, a: u64) -> u64 {
        let q = ((u128::from(a) * u128::from(self.barrett)) >> 64) as u64;
        let r = a - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    #[inline]
    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub(crate) fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub(crate) fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }

    pub(crate) fn from_bigint(&self, c: &BigInt) -> u64 {
        let r = (c.magnitude() % self.p).to_u64().unwrap();
        if c.sign() == Sign::Minus {
            self.neg(r)
        } else {
            r
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    // Deterministic for n < 3.2e9.
    'witness: for a in [2u64, 3, 5, 7] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const PRIME_COUNT: usize = 4096;

/// Primes just below 2^31, in decreasing order.
pub(crate) fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut n: u64 = (1 << 31) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime_u64(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

/// Mixed-radix (Garner) reconstruction of values given residues modulo a
/// fixed list of primes.
pub(crate) struct Garner {
    fields: Vec<Zp>,
    /// `inverses[i]` = (p_0 * ... * p_{i-1})^{-1} mod p_i
    inverses: Vec<u64>,
    modulus: BigInt,
    half: BigInt,
}

impl Garner {
    pub(crate) fn new(primes: &[u64]) -> Self {
        let fields: Vec<Zp> = primes.iter().map(|&p| Zp::new(p)).collect();
        let mut inverses = Vec::with_capacity(primes.len());
        for (i, f) in fields.iter().enumerate() {
            let mut prod = 1u64;
            for &q in &primes[..i] {
                prod = f.mul(prod, q % f.modulus());
            }
            inverses.push(if i == 0 { 1 } else { f.inv(prod) });
        }
        let modulus = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
        let half = &modulus >> 1;
        Garner {
            fields,
            inverses,
            modulus,
            half,
        }
    }

    /// Symmetric-range value congruent to `residues[i]` mod `p_i`.
    pub(crate) fn reconstruct(&self, residues: &[u64]) -> BigInt {
        let k = self.fields.len();
        let mut digits = vec![0u64; k];
        for i in 0..k {
            let f = &self.fields[i];
            // Evaluate the partial mixed-radix number modulo p_i.
            let mut acc = 0u64;
            for j in (0..i).rev() {
                acc = f.add(f.mul(acc, self.fields[j].modulus() % f.modulus()), digits[j] % f.modulus());
            }
            digits[i] = f.mul(f.sub(residues[i], acc), self.inverses[i]);
        }
        let mut v = BigInt::zero();
        for i in (0..k).rev() {
            v = v * self.fields[i].modulus() + digits[i];
        }
        if v > self.half {
            v - &self.modulus
        } else {
            v
        }
    }
}

/// Enough primes so that their product exceeds `2 * bound`.
pub(crate) fn primes_for_bound(bound: &BigInt, min_prime: u64) -> Vec<u64> {
    let target: BigInt = bound * 2 + 1;
    let mut prod = BigInt::one();
    let mut out = Vec::new();
    for &p in primes() {
        if p <= min_prime {
            continue;
        }
        out.push(p);
        prod *= p;
        if prod > target {
            break;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Dense tensors over Z/p

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Tensor {
    dims: Vec<usize>,
    data: Vec<u64>,
}

impl Tensor {
    fn zeros(dims: Vec<usize>) -> Self {
        let size = dims.iter().product();
        Tensor {
            dims,
            data: vec![0; size],
        }
    }

    fn strides(&self) -> Vec<usize> {
        strides_of(&self.dims)
    }

    pub(crate) fn from_poly(poly: &Polynomial, f: &Zp) -> Self {
        let dims: Vec<usize> = poly.degrees().iter().map(|&d| d as usize + 1).collect();
        let mut t = Tensor::zeros(dims);
        let strides = t.strides();
        for (m, c) in poly.terms() {
            let idx: usize = m
                .exponents()
                .iter()
                .zip(strides.iter())
                .map(|(&e, &s)| e as usize * s)
                .sum();
            t.data[idx] = f.from_bigint(c);
        }
        t
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|&c| c == 0)
    }

    fn top_index(&self) -> Option<usize> {
        self.data.iter().rposition(|&c| c != 0)
    }

    /// Lexicographically largest exponent vector with nonzero coefficient.
    fn leading_exponents(&self) -> Option<Vec<usize>> {
        self.top_index().map(|i| unravel(&self.dims, i))
    }

    fn is_constant(&self) -> bool {
        self.data.iter().skip(1).all(|&c| c == 0)
    }

    /// Re-embeds into a box with the given dims (coefficients outside are
    /// dropped; callers only shrink past zero slices).
    fn resized(&self, dims: &[usize]) -> Tensor {
        if dims == self.dims.as_slice() {
            return self.clone();
        }
        let mut out = Tensor::zeros(dims.to_vec());
        for (i, &c) in self.data.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = unravel(&self.dims, i);
            if e.iter().zip(dims.iter()).all(|(a, b)| a < b) {
                out.data[ravel(dims, &e)] = c;
            }
        }
        out
    }

    /// Shrinks each dimension to one past the largest exponent used.
    fn trimmed(&self) -> Tensor {
        let mut used = vec![1usize; self.dims.len()];
        for (i, &c) in self.data.iter().enumerate() {
            if c != 0 {
                for (u, e) in used.iter_mut().zip(unravel(&self.dims, i)) {
                    *u = (*u).max(e + 1);
                }
            }
        }
        self.resized(&used)
    }

    fn scale(&mut self, s: u64, f: &Zp) {
        for c in self.data.iter_mut() {
            *c = f.mul(*c, s);
        }
    }

    /// Makes the lexicographically leading coefficient 1.
    fn make_monic(&mut self, f: &Zp) {
        if let Some(i) = self.top_index() {
            let inv = f.inv(self.data[i]);
            self.scale(inv, f);
        }
    }

    fn to_poly_symmetric(&self, f: &Zp) -> Vec<(Vec<usize>, i64)> {
        let p = f.modulus();
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let v = if c > p / 2 { c as i64 - p as i64 } else { c as i64 };
                (unravel(&self.dims, i), v)
            })
            .collect()
    }
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for j in (0..dims.len().saturating_sub(1)).rev() {
        s[j] = s[j + 1] * dims[j + 1];
    }
    s
}

fn ravel(dims: &[usize], exps: &[usize]) -> usize {
    let mut idx = 0;
    for (e, d) in exps.iter().zip(dims.iter()) {
        idx = idx * d + e;
    }
    idx
}

fn unravel(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for j in (0..dims.len()).rev() {
        out[j] = idx % dims[j];
        idx /= dims[j];
    }
    out
}

// ---------------------------------------------------------------------------
// Univariate helpers over Z/p (coefficients in ascending order, trimmed)

fn uni_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn uni_eval(v: &[u64], x: u64, f: &Zp) -> u64 {
    v.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

fn uni_monic(v: &mut [u64], f: &Zp) {
    if let Some(&lc) = v.last() {
        let inv = f.inv(lc);
        for c in v.iter_mut() {
            *c = f.mul(*c, inv);
        }
    }
}

/// Remainder of `a` modulo `b` (b nonzero, trimmed).
fn uni_rem(mut a: Vec<u64>, b: &[u64], f: &Zp) -> Vec<u64> {
    uni_trim(&mut a);
    let db = b.len() - 1;
    let inv = f.inv(b[db]);
    while a.len() > db {
        let top = a.len() - 1;
        let q = f.mul(a[top], inv);
        if q != 0 {
            let shift = top - db;
            for (j, &bj) in b.iter().enumerate() {
                a[shift + j] = f.sub(a[shift + j], f.mul(q, bj));
            }
        }
        a.pop();
        uni_trim(&mut a);
    }
    a
}

/// Quotient of an exact division (b nonzero, trimmed).
fn uni_div_exact(a: &[u64], b: &[u64], f: &Zp) -> Vec<u64> {
    let mut a = a.to_vec();
    uni_trim(&mut a);
    if a.is_empty() {
        return a;
    }
    let db = b.len() - 1;
    let inv = f.inv(b[db]);
    let mut q = vec![0u64; a.len() - db];
    for top in (db..a.len()).rev() {
        let c = f.mul(a[top], inv);
        q[top - db] = c;
        if c != 0 {
            let shift = top - db;
            for (j, &bj) in b.iter().enumerate() {
                a[shift + j] = f.sub(a[shift + j], f.mul(c, bj));
            }
        }
    }
    debug_assert!(a.iter().all(|&c| c == 0), "inexact univariate division");
    uni_trim(&mut q);
    q
}

/// Monic GCD; the GCD of two zeros is zero (empty vector).
fn uni_gcd(a: &[u64], b: &[u64], f: &Zp) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    uni_trim(&mut a);
    uni_trim(&mut b);
    while !b.is_empty() {
        let r = uni_rem(a, &b, f);
        a = b;
        b = r;
    }
    uni_monic(&mut a, f);
    a
}

fn uni_mul(a: &[u64], b: &[u64], f: &Zp) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Composition by evaluation / interpolation on a tensor grid

/// Applies the matrix `m` (rows x `t.dims[axis]`) along one axis, using
/// 128-bit accumulation and a single reduction per output.
fn apply_axis(t: &Tensor, axis: usize, m: &[Vec<u64>], f: &Zp) -> Tensor {
    let outer: usize = t.dims[..axis].iter().product();
    let len = t.dims[axis];
    let inner: usize = t.dims[axis + 1..].iter().product();
    let rows = m.len();
    let mut dims = t.dims.clone();
    dims[axis] = rows;
    let mut out = Tensor::zeros(dims);
    let p = u128::from(f.modulus());
    let mut acc = vec![0u128; inner];
    for o in 0..outer {
        let src = &t.data[o * len * inner..(o + 1) * len * inner];
        if src.iter().all(|&c| c == 0) {
            continue;
        }
        let dst = &mut out.data[o * rows * inner..(o + 1) * rows * inner];
        if inner == 1 {
            for (i, row) in m.iter().enumerate() {
                let s: u128 = row
                    .iter()
                    .zip(src.iter())
                    .map(|(&a, &b)| u128::from(a * b))
                    .sum();
                dst[i] = (s % p) as u64;
            }
            continue;
        }
        for (i, row) in m.iter().enumerate() {
            acc.iter_mut().for_each(|a| *a = 0);
            for (j, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let line = &src[j * inner..(j + 1) * inner];
                for (a, &v) in acc.iter_mut().zip(line.iter()) {
                    *a += u128::from(c * v);
                }
            }
            for (d, &a) in dst[i * inner..(i + 1) * inner].iter_mut().zip(acc.iter()) {
                *d = (a % p) as u64;
            }
        }
    }
    out
}

/// `m[x][j] = x^j` for `x` in `0..npoints`.
fn power_matrix(npoints: usize, len: usize, f: &Zp) -> Vec<Vec<u64>> {
    (0..npoints)
        .map(|x| {
            let mut row = vec![0u64; len];
            let mut v = 1u64;
            for slot in row.iter_mut() {
                *slot = v;
                v = f.mul(v, x as u64 % f.modulus());
            }
            row
        })
        .collect()
}

/// Inverse Vandermonde matrix for the points `0..n`: row `i` holds the
/// coefficient of `x^i` in each Lagrange basis polynomial.
fn lagrange_matrix(n: usize, f: &Zp) -> Vec<Vec<u64>> {
    // master = prod_k (x - k)
    let mut master = vec![0u64; n + 1];
    master[0] = 1;
    for k in 0..n {
        let negk = f.neg(k as u64);
        for l in (0..=k).rev() {
            let v = master[l];
            master[l + 1] = f.add(master[l + 1], v);
            master[l] = f.mul(v, negk);
        }
    }
    let mut fact = vec![1u64; n + 1];
    for i in 1..=n {
        fact[i] = f.mul(fact[i - 1], i as u64);
    }
    let mut m = vec![vec![0u64; n]; n];
    let mut quot = vec![0u64; n];
    for j in 0..n {
        // master / (x - j) by synthetic division
        let mut carry = 0u64;
        for l in (0..n).rev() {
            carry = f.add(master[l + 1], f.mul(carry, j as u64));
            quot[l] = carry;
        }
        let mut w = f.mul(fact[j], fact[n - 1 - j]);
        if (n - 1 - j) % 2 == 1 {
            w = f.neg(w);
        }
        let winv = f.inv(w);
        for (i, &q) in quot.iter().enumerate() {
            m[i][j] = f.mul(q, winv);
        }
    }
    m
}

/// Evaluates axis `axis` of `t` at the points `0..npoints`.
fn eval_axis(t: &Tensor, axis: usize, npoints: usize, f: &Zp) -> Tensor {
    apply_axis(t, axis, &power_matrix(npoints, t.dims[axis], f), f)
}

/// Converts values at the points `0..n` along `axis` into coefficients.
fn interpolate_axis(t: &Tensor, axis: usize, f: &Zp) -> Tensor {
    apply_axis(t, axis, &lagrange_matrix(t.dims[axis], f), f)
}

fn l1_norm(p: &Polynomial) -> BigInt {
    p.terms().iter().map(|(_, c)| c.abs()).sum()
}

/// Exact `outer(inner_0, ..., inner_{n-1})` by multi-modular evaluation and
/// interpolation on a tensor grid. All polynomials here are affine in the
/// same `m` variables (the outer one in `inner.len()` variables); `bounds[j]`
/// must bound the result's degree in variable `j`.
pub(crate) fn compose_affine(outer: &Polynomial, inner: &[Polynomial], bounds: &[u32]) -> Polynomial {
    let m = inner[0].nvars();
    if outer.is_zero() {
        return Polynomial::zero(m);
    }
    let norms: Vec<BigInt> = inner.iter().map(l1_norm).collect();
    let mut coeff_bound = BigInt::zero();
    for (mono, c) in outer.terms() {
        let mut t = c.abs();
        for (i, &e) in mono.exponents().iter().enumerate() {
            if e > 0 {
                t *= num_traits::pow(norms[i].clone(), e as usize);
            }
        }
        coeff_bound += t;
    }
    let max_bound = bounds.iter().copied().max().unwrap_or(0) as u64;
    let chosen = primes_for_bound(&coeff_bound, max_bound + 1);
    let dims: Vec<usize> = bounds.iter().map(|&b| b as usize + 1).collect();
    let outer_exps: Vec<(Vec<u32>, &BigInt)> = outer
        .terms()
        .iter()
        .map(|(mono, c)| (mono.exponents().to_vec(), c))
        .collect();
    let outer_deg = outer.degrees();
    let images: Vec<Vec<u64>> = exec::map(&chosen, |&p| {
        let f = Zp::new(p);
        let values: Vec<Tensor> = inner
            .iter()
            .map(|g| {
                let mut t = Tensor::from_poly(g, &f);
                for (axis, &npts) in dims.iter().enumerate() {
                    t = eval_axis(&t, axis, npts, &f);
                }
                t
            })
            .collect();
        let size: usize = dims.iter().product();
        let coeffs: Vec<(Vec<u32>, u64)> = outer_exps
            .iter()
            .map(|(e, c)| (e.clone(), f.from_bigint(c)))
            .collect();
        let mut grid = Tensor::zeros(dims.clone());
        let mut powers: Vec<Vec<u64>> = outer_deg
            .iter()
            .map(|&d| vec![0u64; d as usize + 1])
            .collect();
        for idx in 0..size {
            for (i, table) in powers.iter_mut().enumerate() {
                let x = values[i].data[idx];
                table[0] = 1;
                for e in 1..table.len() {
                    table[e] = f.mul(table[e - 1], x);
                }
            }
            let mut acc = 0u64;
            for (e, c) in &coeffs {
                let mut t = *c;
                for (i, &k) in e.iter().enumerate() {
                    if k > 0 {
                        t = f.mul(t, powers[i][k as usize]);
                    }
                }
                acc = f.add(acc, t);
            }
            grid.data[idx] = acc;
        }
        for axis in 0..dims.len() {
            grid = interpolate_axis(&grid, axis, &f);
        }
        grid.data
    });
    let garner = Garner::new(&chosen);
    let size: usize = dims.iter().product();
    let mut residues = vec![0u64; chosen.len()];
    let mut terms = Vec::new();
    for idx in 0..size {
        let mut nonzero = false;
        for (r, img) in residues.iter_mut().zip(images.iter()) {
            *r = img[idx];
            nonzero |= *r != 0;
        }
        if !nonzero {
            continue;
        }
        let v = garner.reconstruct(&residues);
        if !v.is_zero() {
            let e: Exponents = unravel(&dims, idx).into_iter().map(|x| x as u32).collect();
            terms.push((Monomial::from_exps(e), v));
        }
    }
    Polynomial::from_terms(m, terms)
}

// ---------------------------------------------------------------------------
// Brown's dense modular GCD

/// Exponent-vector comparison in lex order (shorter vectors padded with 0).
fn cmp_exps(a: &[usize], b: &[usize]) -> Ordering {
    a.cmp(b)
}

fn lines(t: &Tensor) -> impl Iterator<Item = &[u64]> {
    let l = *t.dims.last().unwrap();
    t.data.chunks(l)
}

fn line_trimmed(line: &[u64]) -> Vec<u64> {
    let mut v = line.to_vec();
    uni_trim(&mut v);
    v
}

/// GCD over Z/p[x_m] of all coefficient lines of `t`.
fn content_last(t: &Tensor, f: &Zp) -> Vec<u64> {
    let mut g: Vec<u64> = Vec::new();
    for line in lines(t) {
        let v = line_trimmed(line);
        if v.is_empty() {
            continue;
        }
        g = if g.is_empty() {
            let mut v = v;
            uni_monic(&mut v, f);
            v
        } else {
            uni_gcd(&g, &v, f)
        };
        if g.len() == 1 {
            break;
        }
    }
    g
}

fn map_lines(t: &Tensor, op: impl FnMut(&[u64]) -> Vec<u64>) -> Tensor {
    let l = *t.dims.last().unwrap();
    let results: Vec<Vec<u64>> = t.data.chunks(l).map(op).collect();
    let newlen = results.iter().map(|v| v.len()).max().unwrap_or(1).max(1);
    let mut dims = t.dims.clone();
    *dims.last_mut().unwrap() = newlen;
    let mut out = Tensor::zeros(dims);
    for (k, v) in results.iter().enumerate() {
        out.data[k * newlen..k * newlen + v.len()].copy_from_slice(v);
    }
    out
}

fn eval_last(t: &Tensor, x: u64, f: &Zp) -> Tensor {
    let mut dims = t.dims.clone();
    dims.pop();
    let data = lines(t).map(|line| uni_eval(line, x, f)).collect();
    Tensor { dims, data }
}

fn leading_line(t: &Tensor) -> Vec<u64> {
    let l = *t.dims.last().unwrap();
    let top = t.top_index().expect("nonzero tensor");
    let start = top / l * l;
    line_trimmed(&t.data[start..start + l])
}

fn degree_last(t: &Tensor) -> usize {
    lines(t)
        .map(|line| line_trimmed(line).len().saturating_sub(1))
        .max()
        .unwrap_or(0)
}

/// Exact divisibility test modulo p via long division of the Kronecker images
/// in the dividend's box, with the carry check that makes it rigorous.
fn divides_mod(d: &Tensor, a: &Tensor, f: &Zp) -> bool {
    if a.is_zero() {
        return true;
    }
    let da: Vec<usize> = a.dims.iter().map(|&x| x - 1).collect();
    let dd = match d.trimmed() {
        t if t.dims.iter().zip(a.dims.iter()).any(|(x, y)| x > y) => return false,
        t => t,
    };
    let degs_d: Vec<usize> = dd.dims.iter().map(|&x| x - 1).collect();
    let pm = u128::from(f.modulus());
    let mut buf: Vec<u128> = a.data.iter().map(|&c| u128::from(c)).collect();
    let mut dterms: Vec<(usize, u64)> = dd
        .data
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (ravel(&a.dims, &unravel(&dd.dims, i)), c))
        .collect();
    dterms.sort_by(|x, y| y.0.cmp(&x.0));
    let (top_d, lc) = dterms[0];
    let inv = f.inv(lc);
    let rest: Vec<(usize, u64)> = dterms[1..].iter().map(|&(i, c)| (top_d - i, f.neg(c))).collect();
    let top_a = match a.data.iter().rposition(|&c| c != 0) {
        Some(i) => i,
        None => return true,
    };
    if top_a < top_d {
        return false;
    }
    for i in (top_d..=top_a).rev() {
        let c = (buf[i] % pm) as u64;
        if c == 0 {
            continue;
        }
        let q = f.mul(c, inv);
        let qe = unravel(&a.dims, i - top_d);
        if qe.iter().zip(degs_d.iter()).zip(da.iter()).any(|((x, y), z)| x + y > *z) {
            return false;
        }
        for &(off, c) in &rest {
            buf[i - off] += u128::from(q * c);
        }
    }
    buf[..top_d].iter().all(|&c| c % pm == 0)
}

/// Monic (lex-leading coefficient 1) GCD of two tensors over Z/p in the same
/// number of variables. `None` signals that the evaluation loop gave up.
fn gcd_rec(a: &Tensor, b: &Tensor, f: &Zp) -> Option<Tensor> {
    let nv = a.dims.len();
    debug_assert_eq!(nv, b.dims.len());
    if a.is_zero() {
        let mut g = b.trimmed();
        g.make_monic(f);
        return Some(g);
    }
    if b.is_zero() {
        let mut g = a.trimmed();
        g.make_monic(f);
        return Some(g);
    }
    if nv == 0 {
        return Some(Tensor {
            dims: vec![],
            data: vec![1],
        });
    }
    if nv == 1 {
        let g = uni_gcd(&a.data, &b.data, f);
        return Some(Tensor {
            dims: vec![g.len()],
            data: g,
        });
    }
    let ca = content_last(a, f);
    let cb = content_last(b, f);
    let c = uni_gcd(&ca, &cb, f);
    let a1 = map_lines(a, |l| {
        let v = line_trimmed(l);
        if v.is_empty() {
            v
        } else {
            uni_div_exact(&v, &ca, f)
        }
    })
    .trimmed();
    let b1 = map_lines(b, |l| {
        let v = line_trimmed(l);
        if v.is_empty() {
            v
        } else {
            uni_div_exact(&v, &cb, f)
        }
    })
    .trimmed();
    let lca = leading_line(&a1);
    let lcb = leading_line(&b1);
    let gamma = uni_gcd(&lca, &lcb, f);
    let bound = degree_last(&a1).min(degree_last(&b1)) + gamma.len() - 1;

    let mut lm: Option<Vec<usize>> = None;
    let mut interp: Option<Tensor> = None;
    let mut modulus: Vec<u64> = vec![1];
    let mut count = 0usize;
    let mut alpha = 0u64;
    let give_up = 2 * bound + 64;
    let mut attempts = 0usize;
    loop {
        alpha += 1;
        if alpha >= f.modulus() || attempts > give_up * 4 {
            return None;
        }
        let gv = uni_eval(&gamma, alpha, f);
        if gv == 0 || uni_eval(&lca, alpha, f) == 0 || uni_eval(&lcb, alpha, f) == 0 {
            continue;
        }
        attempts += 1;
        let aa = eval_last(&a1, alpha, f);
        let bb = eval_last(&b1, alpha, f);
        let mut g = gcd_rec(&aa, &bb, f)?.trimmed();
        if g.is_constant() {
            return Some(with_content(&unit_tensor(nv), &c, f));
        }
        let glm = g.leading_exponents().unwrap();
        match lm.as_ref().map(|cur| cmp_exps(&glm, cur)) {
            Some(Ordering::Greater) => continue,
            Some(Ordering::Equal) => {}
            _ => {
                lm = Some(glm);
                interp = None;
                modulus = vec![1];
                count = 0;
            }
        }
        g.scale(gv, f);
        count += 1;
        match interp.take() {
            None => {
                let mut dims = g.dims.clone();
                dims.push(1);
                interp = Some(Tensor {
                    dims,
                    data: g.data.clone(),
                });
            }
            Some(cur) => {
                // Align shapes on the main variables.
                let mut main: Vec<usize> = cur.dims[..nv - 1].to_vec();
                for (x, &y) in main.iter_mut().zip(g.dims.iter()) {
                    *x = (*x).max(y);
                }
                let mut cdims = main.clone();
                cdims.push(cur.dims[nv - 1]);
                let cur = cur.resized(&cdims);
                let g = g.resized(&main);
                let at = eval_last(&cur, alpha, f);
                let stable = at == g;
                let updated = if stable {
                    cur
                } else {
                    // cur + (g - cur(alpha)) * modulus(x) / modulus(alpha)
                    let scale = f.inv(uni_eval(&modulus, alpha, f));
                    let newlen = (cur.dims[nv - 1]).max(modulus.len());
                    let mut dims = main.clone();
                    dims.push(newlen);
                    let mut out = cur.resized(&dims);
                    for (k, (&gv, &cv)) in g.data.iter().zip(at.data.iter()).enumerate() {
                        let delta = f.mul(f.sub(gv, cv), scale);
                        if delta == 0 {
                            continue;
                        }
                        for (j, &mj) in modulus.iter().enumerate() {
                            let slot = &mut out.data[k * newlen + j];
                            *slot = f.add(*slot, f.mul(delta, mj));
                        }
                    }
                    out
                };
                let check = stable || count > bound + 1;
                interp = Some(updated);
                if check {
                    let cand = interp.as_ref().unwrap();
                    let cc = content_last(cand, f);
                    let pp = map_lines(cand, |l| {
                        let v = line_trimmed(l);
                        if v.is_empty() {
                            v
                        } else {
                            uni_div_exact(&v, &cc, f)
                        }
                    })
                    .trimmed();
                    if divides_mod(&pp, &a1, f) && divides_mod(&pp, &b1, f) {
                        return Some(with_content(&pp, &c, f));
                    }
                }
            }
        }
        modulus = uni_mul(&modulus, &[f.neg(alpha), 1], f);
    }
}

fn unit_tensor(nv: usize) -> Tensor {
    Tensor {
        dims: vec![1; nv],
        data: vec![1],
    }
}

/// Multiplies every line by the univariate `c` (in the last variable) and
/// makes the result monic.
fn with_content(t: &Tensor, c: &[u64], f: &Zp) -> Tensor {
    let mut out = map_lines(t, |l| {
        let v = line_trimmed(l);
        if v.is_empty() {
            v
        } else {
            uni_mul(&v, c, f)
        }
    })
    .trimmed();
    out.make_monic(f);
    out
}

/// Lex-leading term (first variable most significant) of an affine polynomial.
fn lex_leading(p: &Polynomial) -> (&Monomial, &BigInt) {
    let (m, c) = p
        .terms()
        .iter()
        .max_by(|x, y| x.0.cmp_lex(&y.0))
        .expect("nonzero polynomial");
    (m, c)
}

/// Outcome of the modular GCD: the primitive GCD (positive lex-leading
/// coefficient) and the exact cofactors of each input.
pub(crate) struct ModularGcd {
    pub(crate) gcd: Polynomial,
    pub(crate) cofactors: Vec<Polynomial>,
}

const MAX_GCD_PRIMES: usize = 600;

/// GCD of nonzero, primitive affine integer polynomials in the same variables.
/// The result is certified by exact trial division over Z.
pub(crate) fn gcd_affine(inputs: &[Polynomial]) -> Option<ModularGcd> {
    let m = inputs[0].nvars();
    if m == 0 || inputs.iter().any(|p| p.is_constant()) {
        let one = Polynomial::one(m);
        let cofactors = inputs.to_vec();
        return Some(ModularGcd {
            gcd: one,
            cofactors,
        });
    }
    let leads: Vec<&BigInt> = inputs.iter().map(|p| lex_leading(p).1).collect();
    let mut gamma = BigInt::zero();
    for c in &leads {
        gamma = gamma.gcd(c);
    }
    let mut lm: Option<Vec<usize>> = None;
    let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    let mut modulus = BigInt::one();
    let mut previous: Option<BTreeMap<Vec<usize>, BigInt>> = None;
    let mut used = 0usize;
    for &p in primes() {
        if used >= MAX_GCD_PRIMES {
            return None;
        }
        let f = Zp::new(p);
        if f.from_bigint(&gamma) == 0 || leads.iter().any(|c| f.from_bigint(c) == 0) {
            continue;
        }
        used += 1;
        let tensors: Vec<Tensor> = inputs.iter().map(|q| Tensor::from_poly(q, &f)).collect();
        let mut g = tensors[0].clone();
        let mut failed = false;
        for t in &tensors[1..] {
            match gcd_rec(&g, t, &f) {
                Some(r) => g = r,
                None => {
                    failed = true;
                    break;
                }
            }
            if g.is_constant() {
                break;
            }
        }
        if failed {
            continue;
        }
        if g.is_constant() {
            return Some(ModularGcd {
                gcd: Polynomial::one(m),
                cofactors: inputs.to_vec(),
            });
        }
        let glm = g.leading_exponents().unwrap();
        match lm.as_ref().map(|cur| cmp_exps(&glm, cur)) {
            Some(Ordering::Greater) => continue,
            Some(Ordering::Equal) => {}
            _ => {
                lm = Some(glm);
                acc.clear();
                modulus = BigInt::one();
                previous = None;
            }
        }
        g.scale(f.from_bigint(&gamma), &f);
        // Incremental CRT over the union of supports.
        let image: BTreeMap<Vec<usize>, u64> = g
            .to_poly_symmetric(&f)
            .into_iter()
            .map(|(e, v)| (e, if v < 0 { (v + p as i64) as u64 } else { v as u64 }))
            .collect();
        let keys: Vec<Vec<usize>> = acc.keys().cloned().chain(image.keys().cloned()).collect();
        let minv = f.inv(f.from_bigint(&modulus));
        let new_modulus = &modulus * p;
        let half = &new_modulus >> 1;
        for k in keys {
            let cur = acc.get(&k).cloned().unwrap_or_else(BigInt::zero);
            let r = image.get(&k).copied().unwrap_or(0);
            let cur_mod = f.from_bigint(&cur);
            let t = f.mul(f.sub(r, cur_mod), minv);
            let mut v = cur.mod_floor(&modulus) + &modulus * t;
            if v > half {
                v -= &new_modulus;
            }
            acc.insert(k, v);
        }
        acc.retain(|_, v| !v.is_zero());
        modulus = new_modulus;
        let stable = previous.as_ref() == Some(&acc);
        previous = Some(acc.clone());
        if !stable {
            continue;
        }
        let cand = Polynomial::from_terms(
            m,
            acc.iter().map(|(e, v)| {
                (
                    Monomial::from_exps(e.iter().map(|&x| x as u32).collect()),
                    v.clone(),
                )
            }),
        );
        let content = cand.content();
        let mut cand = cand.div_scalar_exact(&content);
        if lex_leading(&cand).1.is_negative() {
            cand = -cand;
        }
        let cofactors: Option<Vec<Polynomial>> = exec::map(inputs, |q| q.exact_div(&cand).ok().flatten())
            .into_iter()
            .collect();
        if let Some(cofactors) = cofactors {
            return Some(ModularGcd {
                gcd: cand,
                cofactors,
            });
        }
    }
    None
}

/// Sanity check that the layout helper and tensors agree on ordering.
#[allow(dead_code)]
pub(crate) fn layout_matches(dims: &[usize]) -> bool {
    let l = Layout::new(dims.to_vec(), usize::MAX).unwrap();
    (0..l.size()).all(|i| {
        let a: Vec<usize> = l.unravel(i).iter().map(|&x| x as usize).collect();
        a == unravel(dims, i)
    })
}

// ---------------------------------------------------------------------------
// Multi-modular exact division

const MAX_DIV_PRIMES: usize = 96;

enum DivImage {
    Quotient(Vec<(usize, u64)>),
    NotDivisible,
}

/// Long division of the Kronecker images modulo one prime. `lc_inv` inverts
/// the divisor's leading coefficient.
fn div_image(
    p: &[(usize, &BigInt)],
    q: &[(usize, &BigInt)],
    size: usize,
    valid: &dyn Fn(usize) -> bool,
    f: &Zp,
) -> DivImage {
    // Products accumulate unreduced; a slot is reduced once, when reached.
    let pm = f.modulus();
    let mut r = vec![0u128; size];
    for &(i, c) in p {
        r[i] = u128::from(f.from_bigint(c));
    }
    let (top_q, lc) = q[0];
    let lc_inv = f.inv(f.from_bigint(lc));
    let rest: Vec<(usize, u64)> = q[1..].iter().map(|&(i, c)| (top_q - i, f.neg(f.from_bigint(c)))).collect();
    let mut quot = Vec::new();
    for i in (top_q..size).rev() {
        let c = (r[i] % u128::from(pm)) as u64;
        if c == 0 {
            continue;
        }
        if !valid(i - top_q) {
            return DivImage::NotDivisible;
        }
        let qc = f.mul(c, lc_inv);
        for &(off, d) in &rest {
            r[i - off] += u128::from(qc * d);
        }
        quot.push((i - top_q, qc));
    }
    if r[..top_q].iter().any(|&c| c % u128::from(pm) != 0) {
        return DivImage::NotDivisible;
    }
    DivImage::Quotient(quot)
}

/// Exact division over Z through images modulo word-sized primes. The
/// quotient is accepted once the product of the primes exceeds
/// `2 * (|q|_1 * |quotient|_inf + |p|_inf)`, which forces `q * quotient == p`.
/// A nonzero remainder modulo a prime not dividing the leading coefficient
/// proves non-divisibility. Returns `None` when the dense box exceeds
/// `limit` or too many primes would be needed.
pub(crate) fn exact_div_affine(p: &Polynomial, q: &Polynomial, limit: usize) -> Option<Option<Polynomial>> {
    let n = p.nvars();
    if n == 0 {
        return None;
    }
    let dp = p.degrees();
    let dq = q.degrees();
    if dq.iter().zip(dp.iter()).any(|(a, b)| a > b) {
        return Some(None);
    }
    let layout = Layout::new(dp.iter().map(|&d| d as usize + 1).collect(), limit)?;
    let index = |e: &[u32]| layout.index(e);
    let mut pk: Vec<(usize, &BigInt)> = p.terms().iter().map(|(m, c)| (index(m.exponents()), c)).collect();
    let mut qk: Vec<(usize, &BigInt)> = q.terms().iter().map(|(m, c)| (index(m.exponents()), c)).collect();
    pk.sort_by(|a, b| b.0.cmp(&a.0));
    qk.sort_by(|a, b| b.0.cmp(&a.0));
    let size = pk[0].0 + 1;
    if size <= qk[0].0 {
        return Some(None);
    }
    let room: Vec<u32> = dp.iter().zip(dq.iter()).map(|(a, b)| a - b).collect();
    let valid = |idx: usize| {
        let e = layout.unravel(idx);
        e.iter().zip(room.iter()).all(|(a, b)| a <= b)
    };
    let lc = qk[0].1;
    let p_inf = p.terms().iter().map(|(_, c)| c.abs()).max().unwrap();
    let q_l1 = l1_norm(q);
    let usable: Vec<u64> = primes()
        .iter()
        .copied()
        .filter(|&pr| !(lc % pr).is_zero())
        .take(MAX_DIV_PRIMES)
        .collect();
    let mut want = ((p_inf.bits() + q_l1.bits() + 2) / 30 + 2) as usize;
    let mut images: Vec<Vec<(usize, u64)>> = Vec::new();
    loop {
        want = want.min(usable.len());
        let batch = &usable[images.len()..want];
        for image in exec::map(batch, |&pr| div_image(&pk, &qk, size, &valid, &Zp::new(pr))) {
            match image {
                DivImage::NotDivisible => return Some(None),
                DivImage::Quotient(v) => images.push(v),
            }
        }
        let mut support: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        for (k, image) in images.iter().enumerate() {
            for &(i, c) in image {
                support.entry(i).or_insert_with(|| vec![0; images.len()])[k] = c;
            }
        }
        let garner = Garner::new(&usable[..images.len()]);
        let entries: Vec<(usize, Vec<u64>)> = support.into_iter().collect();
        let coeffs = exec::map(&entries, |(_, r)| garner.reconstruct(r));
        let q_inf = coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero);
        let bound = (&q_l1 * &q_inf + &p_inf) * 2u32;
        if garner.modulus > bound {
            let terms = entries
                .iter()
                .zip(coeffs)
                .filter(|(_, c)| !c.is_zero())
                .map(|((i, _), c)| (Monomial::from_exps(layout.unravel(*i)), c));
            return Some(Some(Polynomial::from_terms(n, terms)));
        }
        if want == usable.len() {
            return None;
        }
        want *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars2() -> (Polynomial, Polynomial) {
        (Polynomial::var(2, 0), Polynomial::var(2, 1))
    }

    #[test]
    fn barrett_matches_remainder() {
        let f = Zp::new(2_147_483_629);
        for &(a, b) in &[(12345u64, 678910u64), (2_147_483_000, 2_147_483_100), (0, 5)] {
            assert_eq!(f.mul(a, b), (a * b) % f.modulus());
        }
        assert_eq!(f.mul(f.inv(17), 17), 1);
        assert_eq!(f.from_bigint(&BigInt::from(-1)), f.modulus() - 1);
    }

    #[test]
    fn primes_are_prime_and_large() {
        let ps = primes();
        assert_eq!(ps[0], 2_147_483_647);
        assert!(ps.iter().take(50).all(|&p| is_prime_u64(p) && p > 1 << 30));
        assert!(!is_prime_u64(2_147_483_649));
    }

    #[test]
    fn garner_recovers_signed_values() {
        let ps = &primes()[..3];
        let g = Garner::new(ps);
        for v in [
            BigInt::from(0),
            BigInt::from(-5),
            BigInt::parse_bytes(b"123456789012345678901234567", 10).unwrap(),
            -BigInt::parse_bytes(b"98765432109876543210987654", 10).unwrap(),
        ] {
            let res: Vec<u64> = ps.iter().map(|&p| Zp::new(p).from_bigint(&v)).collect();
            assert_eq!(g.reconstruct(&res), v);
        }
    }

    #[test]
    fn tensor_layout_agrees_with_kronecker_layout() {
        assert!(layout_matches(&[3, 2, 4]));
    }

    #[test]
    fn interpolation_inverts_evaluation() {
        let f = Zp::new(primes()[0]);
        let (x, y) = vars2();
        let p = &(&x.pow(3) - &(&x * &y).scale(&BigInt::from(7))) + &y.pow(2);
        let mut t = Tensor::from_poly(&p, &f).resized(&[6, 6]);
        let mut grid = eval_axis(&t, 0, 6, &f);
        grid = eval_axis(&grid, 1, 6, &f);
        grid = interpolate_axis(&grid, 0, &f);
        grid = interpolate_axis(&grid, 1, &f);
        t = t.resized(&[6, 6]);
        assert_eq!(grid, t);
    }

    #[test]
    fn affine_composition_matches_direct_expansion() {
        let (x, y) = vars2();
        let outer = &(&x.pow(2) * &y) - &Polynomial::var(2, 1).scale(&BigInt::from(3));
        let g0 = &(&x * &y) + &Polynomial::constant(2, 2);
        let g1 = &x - &y.pow(2);
        let direct = &(&g0.pow(2) * &g1) - &g1.scale(&BigInt::from(3));
        let bounds = direct.degrees();
        let got = compose_affine(&outer, &[g0, g1], &bounds);
        assert_eq!(got, direct);
    }

    #[test]
    fn modular_gcd_of_bivariate_products() {
        let (x, y) = vars2();
        let g = &(&x.pow(2) * &y) + &(&y - &Polynomial::constant(2, 4)).scale(&BigInt::from(3));
        let a = &g * &(&x + &y.pow(3));
        let b = &g * &(&(&x * &y) - &Polynomial::constant(2, 7));
        let res = gcd_affine(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(res.gcd.canonicalize(), g.canonicalize());
        assert_eq!(&res.gcd * &res.cofactors[0], a);
        assert_eq!(&res.gcd * &res.cofactors[1], b);
    }

    #[test]
    fn modular_gcd_detects_coprime_inputs() {
        let (x, y) = vars2();
        let a = &x.pow(2) + &y.pow(2);
        let b = &(&x + &y) + &Polynomial::one(2);
        let res = gcd_affine(&[a, b]).unwrap();
        assert!(res.gcd.is_one());
    }

    #[test]
    fn divisibility_test_mod_p() {
        let f = Zp::new(primes()[3]);
        let (x, y) = vars2();
        let d = &x - &y;
        let a = &d * &(&x.pow(2) + &y);
        assert!(divides_mod(&Tensor::from_poly(&d, &f), &Tensor::from_poly(&a, &f), &f));
        let b = &a + &Polynomial::one(2);
        assert!(!divides_mod(&Tensor::from_poly(&d, &f), &Tensor::from_poly(&b, &f), &f));
    }

    #[test]
    fn multimodular_exact_division() {
        let (x, y) = vars2();
        let big = BigInt::from(1u64 << 40).pow(3);
        let q = &(&x.pow(3) - &y.scale(&big)) + &Polynomial::constant(2, 5);
        let r = &(&x * &y).scale(&big) + &(&y.pow(4) - &Polynomial::constant(2, 11));
        let p = &q * &r;
        assert_eq!(exact_div_affine(&p, &q, 1 << 20), Some(Some(r.clone())));
        let off = &p + &x;
        assert_eq!(exact_div_affine(&off, &q, 1 << 20), Some(None));
        assert_eq!(exact_div_affine(&r, &q, 1 << 20), Some(None));
    }
}
