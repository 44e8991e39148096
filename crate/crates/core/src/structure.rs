//! Degree-lowering hypersurfaces: discovery of `H0`, collapse certificates,
//! restriction of iterates to a hypersurface, and a three-valued QAS verdict.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exec;
use crate::iterator::IterationLedger;
use crate::poly::Polynomial;
use crate::projmap::{HomogeneousMap, OrbitEnd, OrbitRecord, ProjectivePoint};

pub const DEFAULT_SEARCH_BOUND: i64 = 5;

/// Proof that `f` sends `{factor = 0}` to the single point `image`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseCertificate {
    pub factor: Polynomial,
    pub image: ProjectivePoint,
    /// `((i, j), w)` for `i < j`, with `factor * w == c_j F_i - c_i F_j`.
    pub witnesses: Vec<((usize, usize), Polynomial)>,
}

impl CollapseCertificate {
    /// Re-multiplies every witness.
    pub fn verify(&self, f: &HomogeneousMap) -> bool {
        let k1 = f.nvars();
        let pairs = k1 * (k1 - 1) / 2;
        self.witnesses.len() == pairs
            && self.image.dim() == k1
            && self
                .witnesses
                .iter()
                .all(|((i, j), w)| &self.factor * w == cross_minor(f.components(), self.image.coords(), *i, *j))
    }
}

fn cross_minor(comps: &[Polynomial], c: &[BigInt], i: usize, j: usize) -> Polynomial {
    &comps[i].scale(&c[j]) - &comps[j].scale(&c[i])
}

/// First nonconstant stripped factor and its height `n0 = step - 1`.
pub fn discover_h0(ledger: &IterationLedger) -> Option<(Polynomial, usize)> {
    ledger
        .steps
        .iter()
        .filter(|s| s.n >= 2)
        .find(|s| !s.stripped.is_constant())
        .map(|s| (s.stripped.clone(), s.n - 1))
}

pub fn certify_collapse(f: &HomogeneousMap, h: &Polynomial, c: &ProjectivePoint) -> Option<CollapseCertificate> {
    let k1 = f.nvars();
    if h.is_constant() || !h.is_homogeneous() || h.nvars() != k1 || c.dim() != k1 {
        return None;
    }
    let pairs: Vec<(usize, usize)> = (0..k1).flat_map(|i| (i + 1..k1).map(move |j| (i, j))).collect();
    let quotients = exec::map(&pairs, |&(i, j)| {
        cross_minor(f.components(), c.coords(), i, j)
            .exact_div(h)
            .ok()
            .flatten()
    });
    let witnesses = pairs
        .into_iter()
        .zip(quotients)
        .map(|(ij, w)| w.map(|w| (ij, w)))
        .collect::<Option<Vec<_>>>()?;
    Some(CollapseCertificate {
        factor: h.clone(),
        image: c.clone(),
        witnesses,
    })
}

/// Canonical integer points of `[-bound, bound]^n`, ordered by L1 norm and
/// then lexicographically with coordinate values ranked `1, -1, 2, -2, ..., 0`.
fn box_points(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let rank = |v: i64| -> i64 {
        match v {
            0 => 2 * bound + 1,
            v if v > 0 => 2 * v - 2,
            v => -2 * v - 1,
        }
    };
    let side = (2 * bound + 1) as usize;
    let total = side.pow(n as u32);
    let mut out: Vec<Vec<i64>> = (0..total)
        .map(|mut idx| {
            let mut v = vec![0i64; n];
            for slot in v.iter_mut().rev() {
                *slot = (idx % side) as i64 - bound;
                idx /= side;
            }
            v
        })
        .filter(|v| {
            ProjectivePoint::from_i64(v)
                .is_some_and(|p| p.coords().iter().zip(v.iter()).all(|(a, &b)| *a == BigInt::from(b)))
        })
        .collect();
    out.sort_by_key(|v| {
        let l1: i64 = v.iter().map(|x| x.abs()).sum();
        (l1, v.iter().map(|&x| rank(x)).collect::<Vec<_>>())
    });
    out
}

/// Image of the first box point on `{h = 0}` outside the indeterminacy locus.
/// Only a candidate until [`certify_collapse`] accepts it.
pub fn propose_collapse_image(f: &HomogeneousMap, h: &Polynomial, search_bound: i64) -> Option<ProjectivePoint> {
    if search_bound < 1 || h.nvars() != f.nvars() {
        return None;
    }
    box_points(f.nvars(), search_bound).into_iter().find_map(|v| {
        let p: Vec<BigInt> = v.into_iter().map(BigInt::from).collect();
        if !h.evaluate(&p).is_zero() {
            return None;
        }
        ProjectivePoint::new(f.evaluate(&p))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    Constant(ProjectivePoint),
    Nonconstant,
    /// Every component vanishes on the hypersurface.
    Undefined,
}

/// Restriction of a lifting to `{h = 0}`, decided on normal forms modulo `h`.
/// Exact for square-free `h`.
pub fn restrict_map(components: &[Polynomial], h: &Polynomial) -> Restriction {
    let divs = exec::map(components, |p| p.pseudo_div_rem(h).expect("same arity"));
    let Some(pivot) = divs.iter().position(|d| !d.remainder.is_zero()) else {
        return Restriction::Undefined;
    };
    let rp = &divs[pivot].remainder;
    let (lm, lc) = rp.leading_term().unwrap();
    let mut coords: Vec<BigRational> = Vec::with_capacity(divs.len());
    for d in &divs {
        let coef = d.remainder.coeff(lm);
        if d.remainder.scale(lc) != rp.scale(&coef) {
            return Restriction::Nonconstant;
        }
        coords.push(BigRational::new(coef, d.scale.clone()));
    }
    let den = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = coords
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    ProjectivePoint::new(ints).map_or(Restriction::Undefined, Restriction::Constant)
}

/// Restriction of the normalized lifting `F_n` to `{h = 0}`; `Undefined` when
/// step `n` is not in the ledger.
pub fn restrict_iterate(ledger: &IterationLedger, h: &Polynomial, n: usize) -> Restriction {
    match ledger.lifting(n) {
        Some(map) if h.nvars() == map.nvars() => restrict_map(map.components(), h),
        _ => Restriction::Undefined,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PostIndeterminacy {
    /// `F_step` is nonconstant on the component.
    Hypersurface { step: usize },
    /// `f^from_step` of the component is the first point of `orbit`.
    PointContinues { from_step: usize, orbit: OrbitRecord },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeLoweringRecord {
    pub factor: Polynomial,
    pub multiplicity: u32,
    pub collapse: Option<CollapseCertificate>,
    /// Orbit of the collapse image; `points[m - 1]` is `f^m` of the component.
    pub orbit: Option<OrbitRecord>,
    pub height: Option<usize>,
    pub post_indeterminacy: PostIndeterminacy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `f^m(H)` must avoid `H0` for `m = 1..n0`.
    AvoidsH0,
    /// `f^m(H)` must avoid the indeterminacy locus after step `n0`.
    AvoidsIndeterminacy,
}

/// A point `f^step(component)` violating `condition`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QasWitness {
    pub component: Polynomial,
    pub condition: Condition,
    pub step: usize,
    pub point: ProjectivePoint,
    pub in_h0: bool,
    pub in_indeterminacy: bool,
}

impl QasWitness {
    /// Re-checks the membership flags by point evaluation.
    pub fn verify(&self, f: &HomogeneousMap, h0: &Polynomial) -> bool {
        let in_h0 = h0.evaluate(self.point.coords()).is_zero();
        let in_indeterminacy = f.is_indeterminate(&self.point);
        let violated = match self.condition {
            Condition::AvoidsH0 => in_h0,
            Condition::AvoidsIndeterminacy => in_indeterminacy,
        };
        violated && in_h0 == self.in_h0 && in_indeterminacy == self.in_indeterminacy
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QasVerdict {
    CertifiedAtHorizon,
    NotQas { witnesses: Vec<QasWitness> },
    Inconclusive { reasons: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub h0: Option<Polynomial>,
    pub n0: Option<usize>,
    pub components: Vec<DegreeLoweringRecord>,
    pub verdict: QasVerdict,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct QasOptions {
    /// Steps followed along point orbits.
    pub orbit_horizon: usize,
    pub search_bound: i64,
    /// Extra points tried as witnesses on each component.
    pub witness_points: Vec<ProjectivePoint>,
    /// Screen square-free Jacobian factors for other degree-lowering candidates.
    pub screen_jacobian: bool,
}

impl Default for QasOptions {
    fn default() -> Self {
        QasOptions {
            orbit_horizon: 64,
            search_bound: DEFAULT_SEARCH_BOUND,
            witness_points: Vec::new(),
            screen_jacobian: true,
        }
    }
}

struct ComponentOutcome {
    record: DegreeLoweringRecord,
    witnesses: Vec<QasWitness>,
    reasons: Vec<String>,
}

/// Runs the QAS conditions on every component of `H0`. `components` defaults
/// to the square-free decomposition of `H0`.
pub fn qas_check(
    f: &HomogeneousMap,
    ledger: &IterationLedger,
    components: Option<&[(Polynomial, u32)]>,
    opts: &QasOptions,
) -> Result<StructureReport> {
    let Some((h0, n0)) = discover_h0(ledger) else {
        return Ok(StructureReport {
            h0: None,
            n0: None,
            components: Vec::new(),
            verdict: QasVerdict::Inconclusive {
                reasons: vec![format!(
                    "no degree drop through step {}; algebraic stability is not proven at a finite horizon",
                    ledger.last()
                )],
            },
            assumptions: Vec::new(),
        });
    };
    let k1 = f.nvars();
    let mut assumptions = Vec::new();
    let comps: Vec<(Polynomial, u32)> = match components {
        Some(list) => {
            check_product(&h0, list)?;
            assumptions.push("config-supplied factors of h0 assumed irreducible".to_string());
            list.iter().map(|(p, m)| (p.canonicalize(), *m)).collect()
        }
        None => {
            assumptions.push("square-free factors of h0 assumed irreducible".to_string());
            h0.squarefree_decompose()?.factors
        }
    };
    if k1 > 3 {
        assumptions.push("k > 2: a nonconstant restriction is not evidence of a hypersurface image".to_string());
    }
    let outcomes = exec::map(&comps, |(p, m)| analyze_component(f, ledger, &h0, n0, p, *m, opts));
    let mut witnesses = Vec::new();
    let mut reasons = Vec::new();
    let mut records = Vec::new();
    for o in outcomes {
        witnesses.extend(o.witnesses);
        reasons.extend(o.reasons);
        records.push(o.record);
    }
    if opts.screen_jacobian {
        let (note, doubts) = screen_jacobian(f, &h0, opts.orbit_horizon)?;
        assumptions.push(note);
        reasons.extend(doubts);
    }
    let verdict = if !witnesses.is_empty() {
        QasVerdict::NotQas { witnesses }
    } else if !reasons.is_empty() {
        QasVerdict::Inconclusive { reasons }
    } else {
        QasVerdict::CertifiedAtHorizon
    };
    Ok(StructureReport {
        h0: Some(h0),
        n0: Some(n0),
        components: records,
        verdict,
        assumptions,
    })
}

fn check_product(h0: &Polynomial, list: &[(Polynomial, u32)]) -> Result<()> {
    let n = h0.nvars();
    if list.is_empty() {
        return Err(Error::Structural("empty component list".into()));
    }
    let mut prod = Polynomial::one(n);
    for (p, m) in list {
        if p.nvars() != n {
            return Err(Error::VarCountMismatch {
                left: n,
                right: p.nvars(),
            });
        }
        if p.is_constant() || *m == 0 {
            return Err(Error::Structural("components must be nonconstant with positive multiplicity".into()));
        }
        prod = &prod * &p.pow(*m);
    }
    if prod.canonicalize() != h0.canonicalize() {
        return Err(Error::Structural(format!(
            "components multiply to {}, not to h0 = {h0}",
            prod.canonicalize()
        )));
    }
    Ok(())
}

fn analyze_component(
    f: &HomogeneousMap,
    ledger: &IterationLedger,
    h0: &Polynomial,
    n0: usize,
    factor: &Polynomial,
    multiplicity: u32,
    opts: &QasOptions,
) -> ComponentOutcome {
    let k1 = f.nvars();
    let mut out = ComponentOutcome {
        record: DegreeLoweringRecord {
            factor: factor.clone(),
            multiplicity,
            collapse: None,
            orbit: None,
            height: None,
            post_indeterminacy: PostIndeterminacy::Inconclusive {
                reason: "not reached".into(),
            },
        },
        witnesses: Vec::new(),
        reasons: Vec::new(),
    };
    let Some(cert) = find_collapse(f, factor, opts) else {
        let reason = format!("no point image certified for {factor}");
        out.record.post_indeterminacy = PostIndeterminacy::Inconclusive { reason: reason.clone() };
        out.reasons.push(reason);
        return out;
    };
    let orbit = f.point_orbit(&cert.image, opts.orbit_horizon);
    let height = match orbit.end {
        OrbitEnd::EnteredIndeterminacy { step } => Some(step + 1),
        _ => None,
    };
    out.record.collapse = Some(cert);
    out.record.orbit = Some(orbit.clone());
    out.record.height = height;
    if height != Some(n0) {
        let reason = format!("height of {factor} is {height:?}, expected {n0}");
        out.record.post_indeterminacy = PostIndeterminacy::Inconclusive { reason: reason.clone() };
        out.reasons.push(reason);
        return out;
    }
    for m in 1..=n0 {
        let p = &orbit.points[m - 1];
        if h0.evaluate(p.coords()).is_zero() {
            out.witnesses.push(QasWitness {
                component: factor.clone(),
                condition: Condition::AvoidsH0,
                step: m,
                point: p.clone(),
                in_h0: true,
                in_indeterminacy: f.is_indeterminate(p),
            });
        }
    }
    let post = match restrict_iterate(ledger, factor, n0 + 1) {
        Restriction::Nonconstant if k1 <= 3 => PostIndeterminacy::Hypersurface { step: n0 + 1 },
        Restriction::Nonconstant => PostIndeterminacy::Inconclusive {
            reason: format!("restriction of F_{} to {factor} is nonconstant, but k > 2", n0 + 1),
        },
        Restriction::Undefined => PostIndeterminacy::Inconclusive {
            reason: format!("F_{} is undefined or vanishes on {factor}", n0 + 1),
        },
        Restriction::Constant(p) => {
            let tail = f.point_orbit(&p, opts.orbit_horizon);
            match tail.end {
                OrbitEnd::EnteredIndeterminacy { step } => {
                    let q = tail.points[step].clone();
                    out.witnesses.push(QasWitness {
                        component: factor.clone(),
                        condition: Condition::AvoidsIndeterminacy,
                        step: n0 + 1 + step,
                        in_h0: h0.evaluate(q.coords()).is_zero(),
                        in_indeterminacy: true,
                        point: q,
                    });
                }
                OrbitEnd::Horizon => {
                    out.reasons.push(format!("orbit of {factor} after step {n0} reached the horizon"));
                }
                OrbitEnd::Cycle { .. } => {}
            }
            PostIndeterminacy::PointContinues {
                from_step: n0 + 1,
                orbit: tail,
            }
        }
    };
    if let PostIndeterminacy::Inconclusive { reason } = &post {
        out.reasons.push(reason.clone());
    }
    out.record.post_indeterminacy = post;
    out
}

/// Tries witness hints, the restriction of `F`, then the box search.
fn find_collapse(f: &HomogeneousMap, factor: &Polynomial, opts: &QasOptions) -> Option<CollapseCertificate> {
    let mut tried: Vec<ProjectivePoint> = Vec::new();
    let hinted = opts
        .witness_points
        .iter()
        .filter(|p| p.dim() == f.nvars() && factor.evaluate(p.coords()).is_zero())
        .filter_map(|p| f.image(p));
    let restricted = match restrict_map(f.components(), factor) {
        Restriction::Constant(c) => Some(c),
        _ => None,
    };
    let candidates = hinted
        .chain(restricted)
        .chain(std::iter::from_fn({
            let mut done = false;
            move || {
                if done {
                    return None;
                }
                done = true;
                propose_collapse_image(f, factor, opts.search_bound)
            }
        }));
    for c in candidates {
        if tried.contains(&c) {
            continue;
        }
        if let Some(cert) = certify_collapse(f, factor, &c) {
            return Some(cert);
        }
        tried.push(c);
    }
    None
}

/// Screens the square-free Jacobian factors prime to `h0`: each must fail to
/// collapse or collapse to a point whose orbit avoids the indeterminacy locus.
fn screen_jacobian(f: &HomogeneousMap, h0: &Polynomial, horizon: usize) -> Result<(String, Vec<String>)> {
    let jac = f.jacobian_determinant();
    if jac.is_constant() {
        return Ok(("Jacobian determinant is constant".into(), Vec::new()));
    }
    let mut rest = Vec::new();
    for (g, _) in jac.squarefree_decompose()?.factors {
        let mut g = g;
        loop {
            let d = g.gcd(h0)?;
            if d.is_constant() {
                break;
            }
            g = g.exact_div(&d)?.expect("gcd divides");
        }
        for v in 0..g.nvars() {
            if g.min_degree_in(v) > 0 {
                let x = Polynomial::var(g.nvars(), v);
                g = g.exact_div(&x.pow(g.min_degree_in(v)))?.expect("monomial factor");
                if !rest.contains(&x) {
                    rest.push(x);
                }
            }
        }
        if !g.is_constant() {
            rest.push(g.canonicalize());
        }
    }
    let mut doubts = Vec::new();
    for g in &rest {
        if let Restriction::Constant(c) = restrict_map(f.components(), g) {
            if let OrbitEnd::EnteredIndeterminacy { step } = f.point_orbit(&c, horizon).end {
                doubts.push(format!(
                    "Jacobian factor {g} collapses to {c}, which enters the indeterminacy locus after {} steps",
                    step + 1
                ));
            }
        }
    }
    let listed: Vec<String> = rest.iter().map(|g| g.to_string()).collect();
    let note = if listed.is_empty() {
        "uniqueness of h0 screened heuristically: every Jacobian factor divides h0".to_string()
    } else {
        format!(
            "uniqueness of h0 screened heuristically on Jacobian factors [{}]",
            listed.join(", ")
        )
    };
    Ok((note, doubts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterator::{iterate_naive, Budget};

    fn zwt() -> (Polynomial, Polynomial, Polynomial) {
        (
            Polynomial::var(3, 0),
            Polynomial::var(3, 1),
            Polynomial::var(3, 2),
        )
    }

    fn example_one() -> HomogeneousMap {
        let (z, w, t) = zwt();
        let s = &z.pow(2) + &w.pow(2);
        let two = BigInt::from(2);
        HomogeneousMap::new(vec![
            &(&t * &z).scale(&two) - &s,
            &(&t * &w).scale(&two) - &s,
            &(&t * &t).scale(&two) - &s,
        ])
        .unwrap()
    }

    fn bonifant_fornaess() -> HomogeneousMap {
        let (z, w, t) = zwt();
        HomogeneousMap::new(vec![&z * &t, -&t.pow(2), &(&w * &t) + &z.pow(2)]).unwrap()
    }

    fn ones() -> ProjectivePoint {
        ProjectivePoint::from_i64(&[1, 1, 1]).unwrap()
    }

    #[test]
    fn discovers_t_with_height_one() {
        let l = iterate_naive(&example_one(), 4, Budget::default());
        let (h0, n0) = discover_h0(&l).unwrap();
        assert_eq!(h0, Polynomial::var(3, 2));
        assert_eq!(n0, 1);
    }

    #[test]
    fn stable_map_has_no_h0() {
        let (z, w, t) = zwt();
        let f = HomogeneousMap::new(vec![z.pow(2), w.pow(2), t.pow(2)]).unwrap();
        assert!(discover_h0(&iterate_naive(&f, 4, Budget::default())).is_none());
    }

    #[test]
    fn collapse_of_t_to_ones() {
        let f = example_one();
        let t = Polynomial::var(3, 2);
        let cert = certify_collapse(&f, &t, &ones()).unwrap();
        assert!(cert.verify(&f));
        assert_eq!(cert.witnesses.len(), 3);
        let (z, w, _) = zwt();
        let w01 = &cert.witnesses[0].1;
        assert_eq!(w01.canonicalize(), (&z - &w).canonicalize());
    }

    #[test]
    fn quadric_does_not_collapse() {
        let f = example_one();
        let (z, w, t) = zwt();
        let two = BigInt::from(2);
        let q = &(&(&t.pow(2).scale(&two) + &w.pow(2)) + &z.pow(2)) - &(&(&z * &t) + &(&w * &t)).scale(&two);
        assert!(certify_collapse(&f, &q, &ones()).is_none());
        assert_eq!(restrict_map(f.components(), &q), Restriction::Nonconstant);
    }

    #[test]
    fn box_search() {
        let f = example_one();
        let (z, w, t) = zwt();
        assert_eq!(propose_collapse_image(&f, &t, 2), Some(ones()));
        let sum_sq = &(&z.pow(2) + &w.pow(2)) + &t.pow(2);
        assert_eq!(propose_collapse_image(&f, &sum_sq, 3), None);
        let pts = box_points(3, 1);
        assert_eq!(pts[0], vec![1, 0, 0]);
        assert_eq!(pts[3], vec![1, 1, 0]);
        assert_eq!(pts[4], vec![1, -1, 0]);
    }

    #[test]
    fn restrictions_of_example_one() {
        let l = iterate_naive(&example_one(), 3, Budget::default());
        let t = Polynomial::var(3, 2);
        assert_eq!(restrict_iterate(&l, &t, 1), Restriction::Constant(ones()));
        assert_eq!(restrict_iterate(&l, &t, 2), Restriction::Nonconstant);
        assert_eq!(restrict_iterate(&l, &t, 0), Restriction::Nonconstant);
        assert_eq!(restrict_iterate(&l, &t, 9), Restriction::Undefined);
    }

    #[test]
    fn example_one_is_certified() {
        let f = example_one();
        let l = iterate_naive(&f, 4, Budget::default());
        let r = qas_check(&f, &l, None, &QasOptions::default()).unwrap();
        assert_eq!(r.verdict, QasVerdict::CertifiedAtHorizon, "{r:#?}");
        assert_eq!(r.components.len(), 1);
        let c = &r.components[0];
        assert_eq!(c.height, Some(1));
        assert_eq!(c.collapse.as_ref().unwrap().image, ones());
        assert_eq!(c.post_indeterminacy, PostIndeterminacy::Hypersurface { step: 2 });
    }

    #[test]
    fn bonifant_fornaess_is_refuted() {
        let f = bonifant_fornaess();
        let l = iterate_naive(&f, 5, Budget::default());
        let (h0, n0) = discover_h0(&l).unwrap();
        assert_eq!((h0.clone(), n0), (Polynomial::var(3, 2).pow(2), 2));
        assert_eq!(l.degrees()[..4], [1, 2, 4, 6]);
        let r = qas_check(&f, &l, None, &QasOptions::default()).unwrap();
        let QasVerdict::NotQas { witnesses } = &r.verdict else {
            panic!("{r:#?}");
        };
        let at_two = witnesses.iter().find(|w| w.step == 2).unwrap();
        assert_eq!(at_two.point, ProjectivePoint::from_i64(&[0, 1, 0]).unwrap());
        assert!(at_two.in_h0 && at_two.in_indeterminacy);
        assert!(witnesses.iter().all(|w| w.verify(&f, &h0)));
    }

    #[test]
    fn mismatched_components_are_rejected() {
        let f = example_one();
        let l = iterate_naive(&f, 3, Budget::default());
        let z = Polynomial::var(3, 0);
        let err = qas_check(&f, &l, Some(&[(z, 1)]), &QasOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Structural(_)));
    }
}
