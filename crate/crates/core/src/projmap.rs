//! Rational self-maps of P^k as normalized homogeneous liftings.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exec;
use crate::poly::{gcd_with_cofactors, GcdRoute, Polynomial};

/// Canonical representative of a rational point: coprime integer coordinates
/// whose first nonzero entry is positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<BigInt>,
}

impl ProjectivePoint {
    /// `None` when every coordinate is zero.
    pub fn new(coords: Vec<BigInt>) -> Option<Self> {
        let g = coords.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return None;
        }
        let first = coords.iter().find(|c| !c.is_zero()).unwrap();
        let g = if first.is_negative() { -g } else { g };
        Some(ProjectivePoint {
            coords: coords.into_iter().map(|c| c / &g).collect(),
        })
    }

    pub fn from_i64(coords: &[i64]) -> Option<Self> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A lifting `F = (F_0, ..., F_k)` with homogeneous components of one common
/// degree, no common factor, and joint canonical scaling.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousMap {
    components: Vec<Polynomial>,
    degree: u32,
}

impl fmt::Debug for HomogeneousMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.components.iter()).finish()
    }
}

/// Checks shape and returns the common degree.
fn validate(raw: &[Polynomial]) -> Result<u32> {
    let n = raw.len();
    if n == 0 {
        return Err(Error::Structural("a lifting needs at least one component".into()));
    }
    let mut degree = None;
    for (i, p) in raw.iter().enumerate() {
        if p.nvars() != n {
            return Err(Error::VarCountMismatch {
                left: n,
                right: p.nvars(),
            });
        }
        if !p.is_homogeneous() {
            return Err(Error::Structural(format!("component {i} is not homogeneous")));
        }
        if let Some(d) = p.total_degree() {
            match degree {
                None => degree = Some(d),
                Some(e) if e != d => {
                    return Err(Error::Structural(format!(
                        "component {i} has degree {d}, expected {e}"
                    )))
                }
                _ => {}
            }
        }
    }
    degree.ok_or_else(|| Error::Structural("all components are zero".into()))
}

/// Divides out the joint integer content and fixes the sign of the first
/// nonzero component's leading coefficient.
fn joint_canonical(mut comps: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut g = comps.iter().fold(BigInt::zero(), |acc, p| acc.gcd(&p.content()));
    let first = comps.iter().find(|p| !p.is_zero()).unwrap();
    if first.leading_coeff().unwrap().is_negative() {
        g = -g;
    }
    if !g.is_one() {
        comps = comps.iter().map(|p| p.div_scalar_exact(&g)).collect();
    }
    comps
}

/// Strips the common factor of a raw lifting. Returns the normalized map and
/// the canonical stripped factor; `stripped * map` equals `raw` up to a
/// nonzero rational scalar.
pub fn normalize_lifting(raw: Vec<Polynomial>) -> Result<(HomogeneousMap, Polynomial)> {
    validate(&raw)?;
    let n = raw.len();
    let (g, cofactors) = gcd_with_cofactors(&raw, GcdRoute::Auto)?;
    let components = joint_canonical(cofactors);
    let degree = components.iter().find_map(|p| p.total_degree()).unwrap();
    debug_assert_eq!(g.nvars(), n);
    Ok((HomogeneousMap { components, degree }, g))
}

impl HomogeneousMap {
    /// Validates and normalizes; use [`normalize_lifting`] to see what was
    /// stripped.
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        normalize_lifting(components).map(|(m, _)| m)
    }

    /// Wraps components already known to be a normalized lifting (only the
    /// cheap invariants are checked).
    pub fn from_normalized(components: Vec<Polynomial>) -> Result<Self> {
        let degree = validate(&components)?;
        let components = joint_canonical(components);
        Ok(HomogeneousMap { components, degree })
    }

    pub fn identity(nvars: usize) -> Self {
        HomogeneousMap {
            components: (0..nvars).map(|i| Polynomial::var(nvars, i)).collect(),
            degree: 1,
        }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.components
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of homogeneous coordinates (k + 1).
    pub fn nvars(&self) -> usize {
        self.components.len()
    }

    pub fn term_count(&self) -> usize {
        self.components.iter().map(|p| p.len()).sum()
    }

    pub fn is_identity(&self) -> bool {
        *self == HomogeneousMap::identity(self.nvars())
    }

    /// Raw lifting of `self ∘ inner`: every component of `self` with the
    /// components of `inner` substituted. Not normalized.
    pub fn compose(&self, inner: &HomogeneousMap) -> Result<Vec<Polynomial>> {
        if self.nvars() != inner.nvars() {
            return Err(Error::VarCountMismatch {
                left: self.nvars(),
                right: inner.nvars(),
            });
        }
        exec::map(&self.components, |p| p.compose(&inner.components))
            .into_iter()
            .collect()
    }

    pub fn evaluate(&self, point: &[BigInt]) -> Vec<BigInt> {
        self.components.iter().map(|p| p.evaluate(point)).collect()
    }

    pub fn is_indeterminate(&self, p: &ProjectivePoint) -> bool {
        self.components
            .iter()
            .all(|c| c.evaluate(p.coords()).is_zero())
    }

    /// Image of a point outside the indeterminacy locus.
    pub fn image(&self, p: &ProjectivePoint) -> Option<ProjectivePoint> {
        ProjectivePoint::new(self.evaluate(p.coords()))
    }

    pub fn point_orbit(&self, p: &ProjectivePoint, horizon: usize) -> OrbitRecord {
        let mut points = vec![p.clone()];
        let mut seen: HashMap<ProjectivePoint, usize> = HashMap::new();
        seen.insert(p.clone(), 0);
        loop {
            let s = points.len() - 1;
            let Some(next) = self.image(&points[s]) else {
                return OrbitRecord {
                    points,
                    end: OrbitEnd::EnteredIndeterminacy { step: s },
                };
            };
            if s == horizon {
                return OrbitRecord {
                    points,
                    end: OrbitEnd::Horizon,
                };
            }
            if let Some(&entry) = seen.get(&next) {
                return OrbitRecord {
                    points,
                    end: OrbitEnd::Cycle {
                        entry,
                        period: s + 1 - entry,
                    },
                };
            }
            seen.insert(next.clone(), s + 1);
            points.push(next);
        }
    }

    /// Canonical determinant of the matrix of partial derivatives.
    pub fn jacobian_determinant(&self) -> Polynomial {
        let n = self.nvars();
        let rows: Vec<Vec<Polynomial>> = self
            .components
            .iter()
            .map(|p| (0..n).map(|j| p.partial_derivative(j)).collect())
            .collect();
        determinant(rows).canonicalize()
    }
}

/// Fraction-free (Bareiss) determinant of a square polynomial matrix.
pub fn determinant(mut m: Vec<Vec<Polynomial>>) -> Polynomial {
    let n = m.len();
    let nv = m[0][0].nvars();
    let mut sign = false;
    let mut prev = Polynomial::one(nv);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return Polynomial::zero(nv),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .exact_div(&prev)
                    .expect("arity")
                    .expect("Bareiss step is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitEnd {
    /// `points[step]` lies in the indeterminacy locus.
    EnteredIndeterminacy { step: usize },
    /// The image of the last point is `points[entry]`.
    Cycle { entry: usize, period: usize },
    Horizon,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub points: Vec<ProjectivePoint>,
    pub end: OrbitEnd,
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

    pub(crate) fn example_one() -> HomogeneousMap {
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

    fn monomial_square() -> HomogeneousMap {
        let (z, w, t) = zwt();
        HomogeneousMap::new(vec![z.pow(2), w.pow(2), t.pow(2)]).unwrap()
    }

    #[test]
    fn points_are_canonical() {
        let p = ProjectivePoint::from_i64(&[0, -2, 4]).unwrap();
        assert_eq!(p.to_string(), "[0:1:-2]");
        assert!(ProjectivePoint::from_i64(&[0, 0, 0]).is_none());
    }

    #[test]
    fn strips_common_factor() {
        let (z, w, t) = zwt();
        let raw = vec![&t * &z.pow(2), &t * &w.pow(2), t.pow(3)];
        let (m, s) = normalize_lifting(raw).unwrap();
        assert_eq!(s, t);
        assert_eq!(m, monomial_square());
        let (again, one) = normalize_lifting(m.components().to_vec()).unwrap();
        assert_eq!(again, m);
        assert!(one.is_one());
    }

    #[test]
    fn rejects_bad_shapes() {
        let (z, w, t) = zwt();
        assert!(HomogeneousMap::new(vec![&z.pow(2) + &w, w.pow(2), t.pow(2)]).is_err());
        assert!(HomogeneousMap::new(vec![z.pow(2), w.pow(3), t.pow(2)]).is_err());
        assert!(HomogeneousMap::new(vec![Polynomial::zero(3); 3]).is_err());
    }

    #[test]
    fn identity_composition() {
        let f = example_one();
        let id = HomogeneousMap::identity(3);
        assert_eq!(f.compose(&id).unwrap(), f.components());
        assert_eq!(id.compose(&f).unwrap(), f.components());
    }

    #[test]
    fn example_one_self_composition_drops_t() {
        let f = example_one();
        let raw = f.compose(&f).unwrap();
        assert!(raw.iter().all(|p| p.total_degree() == Some(4)));
        let (g, s) = normalize_lifting(raw).unwrap();
        assert_eq!(s, Polynomial::var(3, 2));
        assert_eq!(g.degree(), 3);
    }

    #[test]
    fn indeterminacy() {
        let f = example_one();
        assert!(f.is_indeterminate(&ProjectivePoint::from_i64(&[1, 1, 1]).unwrap()));
        let p = ProjectivePoint::from_i64(&[1, 0, 0]).unwrap();
        assert!(!f.is_indeterminate(&p));
        // Joint canonical scaling flips the sign of the raw lifting.
        assert_eq!(f.evaluate(p.coords()), vec![BigInt::from(1); 3]);
        assert!(!HomogeneousMap::identity(3).is_indeterminate(&p));
    }

    #[test]
    fn orbits() {
        let f = example_one();
        let p = ProjectivePoint::from_i64(&[1, 1, 1]).unwrap();
        assert_eq!(f.point_orbit(&p, 5).end, OrbitEnd::EnteredIndeterminacy { step: 0 });
        let sq = monomial_square();
        assert_eq!(sq.point_orbit(&p, 5).end, OrbitEnd::Cycle { entry: 0, period: 1 });
        let q = ProjectivePoint::from_i64(&[1, 2, 3]).unwrap();
        let r = sq.point_orbit(&q, 3);
        assert_eq!(r.end, OrbitEnd::Horizon);
        assert_eq!(r.points.len(), 4);
        assert_eq!(r.points[3], ProjectivePoint::from_i64(&[1, 256, 6561]).unwrap());
    }

    #[test]
    fn bonifant_fornaess_orbit_of_collapse_image() {
        let (z, w, t) = zwt();
        let f = HomogeneousMap::new(vec![&z * &t, -&t.pow(2), &(&w * &t) + &z.pow(2)]).unwrap();
        let p = ProjectivePoint::from_i64(&[0, 0, 1]).unwrap();
        let r = f.point_orbit(&p, 10);
        assert_eq!(r.end, OrbitEnd::EnteredIndeterminacy { step: 1 });
        assert_eq!(r.points[1], ProjectivePoint::from_i64(&[0, 1, 0]).unwrap());
    }

    #[test]
    fn jacobians() {
        let (z, w, t) = zwt();
        assert_eq!(monomial_square().jacobian_determinant(), &(&z * &w) * &t);
        assert!(HomogeneousMap::identity(3).jacobian_determinant().is_one());
        let two = BigInt::from(2);
        let q = &(&(&(&t.pow(2).scale(&two) + &w.pow(2)) + &z.pow(2)) - &(&z * &t).scale(&two))
            - &(&w * &t).scale(&two);
        assert_eq!(example_one().jacobian_determinant(), (&t * &q).canonicalize());
    }
}
