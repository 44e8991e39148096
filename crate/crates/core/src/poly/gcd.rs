use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::modular;
use super::monomial::{Exponents, Monomial};
use super::Polynomial;
use crate::error::{Error, Result};

/// Which GCD engine to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GcdRoute {
    /// Subresultant PRS for small inputs, the modular engine otherwise.
    #[default]
    Auto,
    /// Recursive content / primitive part with subresultant pseudo-remainders.
    Prs,
    /// Dense multi-modular interpolation certified by trial division over Z.
    Modular,
}

const PRS_MAX_DEGREE: u32 = 6;
const PRS_MAX_TERMS: usize = 24;

impl Polynomial {
    /// Canonical greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Result<Polynomial> {
        self.gcd_via(other, GcdRoute::Auto)
    }

    pub fn gcd_via(&self, other: &Polynomial, route: GcdRoute) -> Result<Polynomial> {
        self.check_arity(other)?;
        let (g, _) = gcd_many(&[self.clone(), other.clone()], route, false)?;
        Ok(g)
    }
}

/// GCD by the recursive subresultant algorithm only.
pub fn gcd_prs(p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    p.gcd_via(q, GcdRoute::Prs)
}

/// Canonical GCD of several polynomials together with exact cofactors:
/// `inputs[i] == gcd * cofactors[i]` for every `i`.
pub fn gcd_with_cofactors(inputs: &[Polynomial], route: GcdRoute) -> Result<(Polynomial, Vec<Polynomial>)> {
    gcd_many(inputs, route, true)
}

fn gcd_many(inputs: &[Polynomial], route: GcdRoute, want_cofactors: bool) -> Result<(Polynomial, Vec<Polynomial>)> {
    let Some(first) = inputs.first() else {
        return Err(Error::Domain("gcd of an empty list".into()));
    };
    let n = first.nvars();
    for p in inputs {
        first.check_arity(p)?;
    }
    let nonzero: Vec<&Polynomial> = inputs.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(Error::Domain("gcd of zero polynomials".into()));
    }
    let homogeneous = n >= 1 && nonzero.iter().all(|p| p.is_homogeneous());
    let owned: Vec<Polynomial> = nonzero.iter().map(|p| (*p).clone()).collect();
    let use_prs = match route {
        GcdRoute::Prs => true,
        GcdRoute::Modular => false,
        GcdRoute::Auto => owned
            .iter()
            .all(|p| p.total_degree().unwrap_or(0) <= PRS_MAX_DEGREE && p.len() <= PRS_MAX_TERMS),
    };
    let (g, cofs) = if homogeneous {
        homogeneous_gcd(&owned, use_prs)
    } else {
        affine_gcd(&owned, use_prs)
    };
    let canonical = g.canonicalize();
    if !want_cofactors {
        return Ok((canonical, Vec::new()));
    }
    // g == unit * canonical, so input == canonical * (unit * cofactor).
    let unit = g.leading_coeff().unwrap() / canonical.leading_coeff().unwrap();
    let mut cofactors = Vec::with_capacity(inputs.len());
    let mut it = cofs.into_iter();
    for p in inputs {
        if p.is_zero() {
            cofactors.push(Polynomial::zero(n));
            continue;
        }
        let c = match it.next().flatten() {
            Some(c) => c.scale(&unit),
            None => p
                .exact_div(&canonical)?
                .ok_or_else(|| Error::Structural("gcd does not divide its input".into()))?,
        };
        cofactors.push(c);
    }
    Ok((canonical, cofactors))
}

/// Strips powers of the last variable, works on the dehomogenized parts and
/// homogenizes the result back.
fn homogeneous_gcd(inputs: &[Polynomial], use_prs: bool) -> (Polynomial, Vec<Option<Polynomial>>) {
    let n = inputs[0].nvars();
    let last = n - 1;
    let shifts: Vec<u32> = inputs.iter().map(|p| p.min_degree_in(last)).collect();
    let emin = *shifts.iter().min().unwrap();
    let affine: Vec<Polynomial> = inputs.iter().map(|p| p.dehomogenize_last()).collect();
    let degrees: Vec<u32> = inputs
        .iter()
        .zip(shifts.iter())
        .map(|(p, e)| p.total_degree().unwrap() - e)
        .collect();
    let (ga, cofs) = affine_gcd(&affine, use_prs);
    let dg = ga.total_degree().unwrap_or(0);
    let tpow = |e: u32| Monomial::one(n).with_exponent(last, e);
    let g = ga.homogenize_last(dg).mul_monomial(&tpow(emin));
    let cofs = cofs
        .into_iter()
        .zip(shifts.iter().zip(degrees.iter()))
        .map(|(c, (&e, &d))| c.map(|c| c.homogenize_last(d - dg).mul_monomial(&tpow(e - emin))))
        .collect();
    (g, cofs)
}

/// GCD of nonzero polynomials (no homogeneity assumed). Cofactors are
/// returned when the engine produced them for free.
fn affine_gcd(inputs: &[Polynomial], use_prs: bool) -> (Polynomial, Vec<Option<Polynomial>>) {
    let n = inputs[0].nvars();
    let contents: Vec<BigInt> = inputs.iter().map(|p| p.content()).collect();
    let cgcd = contents.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if n == 0 {
        let cofs = contents.iter().map(|c| Some(Polynomial::constant(0, c / &cgcd))).collect();
        return (Polynomial::constant(0, cgcd), cofs);
    }
    let prims: Vec<Polynomial> = inputs
        .iter()
        .zip(contents.iter())
        .map(|(p, c)| p.div_scalar_exact(c))
        .collect();
    if !use_prs {
        if let Some(res) = modular::gcd_affine(&prims) {
            let g = res.gcd.scale(&cgcd);
            let cofs = res
                .cofactors
                .into_iter()
                .zip(contents.iter())
                .map(|(c, k)| Some(c.scale(&(k / &cgcd))))
                .collect();
            return (g, cofs);
        }
    }
    let mut g = prims[0].clone();
    for p in &prims[1..] {
        if g.is_constant() {
            break;
        }
        g = prs_gcd(&g, p);
    }
    let g = if g.is_constant() {
        Polynomial::constant(n, cgcd)
    } else {
        g.scale(&cgcd)
    };
    (g, vec![None; inputs.len()])
}

// ---------------------------------------------------------------------------
// Recursive subresultant GCD. Polynomials in n variables are viewed as
// univariate in the first variable with coefficients in the remaining ones.

type Uni = Vec<Polynomial>;

fn to_uni(p: &Polynomial) -> Uni {
    let n = p.nvars();
    let deg = p.degree_in(0) as usize;
    let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); deg + 1];
    for (m, c) in p.terms() {
        let e: Exponents = m.exponents()[1..].iter().copied().collect();
        buckets[m.exponent(0) as usize].push((Monomial::from_exps(e), c.clone()));
    }
    buckets
        .into_iter()
        .map(|t| Polynomial::from_terms(n - 1, t))
        .collect()
}

fn from_uni(u: &Uni, n: usize) -> Polynomial {
    let mut terms = Vec::new();
    for (i, c) in u.iter().enumerate() {
        for (m, k) in c.terms() {
            let mut e: Exponents = Exponents::with_capacity(n);
            e.push(i as u32);
            e.extend(m.exponents().iter().copied());
            terms.push((Monomial::from_exps(e), k.clone()));
        }
    }
    Polynomial::from_terms(n, terms)
}

fn uni_trim(u: &mut Uni) {
    while u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
}

fn uni_deg(u: &Uni) -> usize {
    u.len() - 1
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`.
fn prem(a: &Uni, b: &Uni) -> Uni {
    let db = uni_deg(b);
    let lc = &b[db];
    let mut r = a.clone();
    let mut steps = a.len() - db;
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let q = r[top].clone();
        for c in r.iter_mut() {
            *c = &*c * lc;
        }
        let shift = top - db;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = &r[shift + j] - &(&q * bj);
        }
        debug_assert!(r[top].is_zero());
        r.pop();
        uni_trim(&mut r);
        steps -= 1;
    }
    if steps > 0 {
        let k = lc.pow(steps as u32);
        for c in r.iter_mut() {
            *c = &*c * &k;
        }
    }
    r
}

fn exact(p: &Polynomial, q: &Polynomial) -> Polynomial {
    p.exact_div(q)
        .expect("arity")
        .expect("subresultant division is exact")
}

fn content_uni(u: &Uni) -> Polynomial {
    let mut g = Polynomial::zero(u[0].nvars());
    for c in u {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.clone() } else { prs_gcd(&g, c) };
        if g.is_unit() {
            break;
        }
    }
    g
}

fn positive(p: Polynomial) -> Polynomial {
    if p.leading_coeff().is_some_and(|c| c.is_negative()) {
        -p
    } else {
        p
    }
}

/// GCD over the integers, with positive leading coefficient.
fn prs_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let n = a.nvars();
    if a.is_zero() {
        return positive(b.clone());
    }
    if b.is_zero() {
        return positive(a.clone());
    }
    if n == 0 {
        let g = a.as_constant().unwrap().gcd(&b.as_constant().unwrap());
        return Polynomial::constant(0, g);
    }
    if a.is_constant() || b.is_constant() {
        let g = a.content().gcd(&b.content());
        return Polynomial::constant(n, g);
    }
    let ua = to_uni(a);
    let ub = to_uni(b);
    let ca = content_uni(&ua);
    let cb = content_uni(&ub);
    let c = positive(prs_gcd(&ca, &cb));
    let pa: Uni = ua.iter().map(|x| exact(x, &ca)).collect();
    let pb: Uni = ub.iter().map(|x| exact(x, &cb)).collect();
    let (mut f, mut g) = if pa.len() >= pb.len() { (pa, pb) } else { (pb, pa) };
    let cpoly = from_uni(&vec![c], n);
    if uni_deg(&g) == 0 {
        return cpoly;
    }
    let one = Polynomial::one(n - 1);
    let mut gg = one.clone();
    let mut hh = one;
    loop {
        let delta = uni_deg(&f) - uni_deg(&g);
        let r = prem(&f, &g);
        if r.is_empty() {
            break;
        }
        if uni_deg(&r) == 0 {
            return cpoly;
        }
        let divisor = &gg * &hh.pow(delta as u32);
        f = g;
        g = r.iter().map(|x| exact(x, &divisor)).collect();
        gg = f[uni_deg(&f)].clone();
        hh = match delta {
            0 => hh,
            1 => gg.clone(),
            _ => exact(&gg.pow(delta as u32), &hh.pow(delta as u32 - 1)),
        };
    }
    let cg = content_uni(&g);
    let pg: Uni = g.iter().map(|x| exact(x, &cg)).collect();
    let mut out = positive(&from_uni(&pg, n) * &cpoly);
    if out.is_zero() {
        out = Polynomial::one(n);
    }
    out
}
