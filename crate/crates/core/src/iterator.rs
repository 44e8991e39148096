//! Normalized liftings of the iterates, their degrees, and the factors
//! stripped along the way.

use crate::error::{Error, Result};
use crate::exec;
use crate::poly::Polynomial;
use crate::projmap::{normalize_lifting, HomogeneousMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_terms: usize,
    pub max_degree: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_terms: 5_000_000,
            max_degree: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StopReason {
    Horizon,
    /// Computing step `step` would have exceeded the budget.
    Budget { step: usize, detail: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetState {
    pub budget: Budget,
    /// Terms stored across all liftings in the ledger.
    pub terms_used: usize,
}

/// Proof that the step's division by `H0 ∘ F_{n-n0-1}` was exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionCertificate {
    /// Canonical divisor.
    pub divisor: Polynomial,
    /// Number of components whose quotient was checked exact.
    pub exact_components: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerStep {
    pub n: usize,
    pub lifting: HomogeneousMap,
    pub degree: u32,
    pub stripped: Polynomial,
    pub certificate: Option<DivisionCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationLedger {
    pub steps: Vec<LedgerStep>,
    pub state: BudgetState,
    pub stop: StopReason,
}

impl IterationLedger {
    fn start(f: &HomogeneousMap, budget: Budget) -> Self {
        let k1 = f.nvars();
        let id = HomogeneousMap::identity(k1);
        let terms = id.term_count();
        IterationLedger {
            steps: vec![LedgerStep {
                n: 0,
                lifting: id,
                degree: 1,
                stripped: Polynomial::one(k1),
                certificate: None,
            }],
            state: BudgetState {
                budget,
                terms_used: terms,
            },
            stop: StopReason::Horizon,
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.degree).collect()
    }

    pub fn stripped_degrees(&self) -> Vec<u32> {
        self.steps
            .iter()
            .map(|s| s.stripped.total_degree().unwrap_or(0))
            .collect()
    }

    /// Index of the last computed step.
    pub fn last(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn lifting(&self, n: usize) -> Option<&HomogeneousMap> {
        self.steps.get(n).map(|s| &s.lifting)
    }

    pub fn stopped_on_budget(&self) -> bool {
        matches!(self.stop, StopReason::Budget { .. })
    }

    /// Checks that a step `n` fits the budget before computing it.
    fn admit(&mut self, f: &HomogeneousMap, n: usize) -> bool {
        let k = f.nvars() - 1;
        let prev = self.steps[n - 1].degree;
        let composed = f.degree() as u64 * prev as u64;
        let budget = self.state.budget;
        if composed > budget.max_degree as u64 {
            self.stop = StopReason::Budget {
                step: n,
                detail: format!("composed degree {composed} exceeds {}", budget.max_degree),
            };
            return false;
        }
        let estimate = (k as u64 + 1) * dense_count(composed, k);
        if self.state.terms_used as u64 + estimate > budget.max_terms as u64 {
            self.stop = StopReason::Budget {
                step: n,
                detail: format!(
                    "estimated {estimate} terms on top of {} exceeds {}",
                    self.state.terms_used, budget.max_terms
                ),
            };
            return false;
        }
        true
    }

    fn push(&mut self, step: LedgerStep) {
        self.state.terms_used += step.lifting.term_count() + step.stripped.len();
        self.steps.push(step);
    }
}

/// Number of monomials of degree `d` in `k + 1` variables.
fn dense_count(d: u64, k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 1..=k as u64 {
        c = c.saturating_mul(d + i) / i;
    }
    c
}

/// Compose with `f`, then strip the full GCD of the components.
pub fn iterate_naive(f: &HomogeneousMap, horizon: usize, budget: Budget) -> IterationLedger {
    let mut ledger = IterationLedger::start(f, budget);
    for n in 1..=horizon {
        if !ledger.admit(f, n) {
            break;
        }
        let prev = &ledger.steps[n - 1].lifting;
        let raw = f.compose(prev).expect("same ambient dimension");
        let (lifting, stripped) = normalize_lifting(raw).expect("composition of dominating liftings is nonzero");
        let degree = lifting.degree();
        ledger.push(LedgerStep {
            n,
            lifting,
            degree,
            stripped,
            certificate: None,
        });
    }
    ledger
}

/// Iterates by the recurrent law `F_n = F_1 ∘ F_{n-1} / H0 ∘ F_{n-n0-1}` for
/// `n > n0`, requiring every division to be exact.
pub fn iterate_recurrent(
    f: &HomogeneousMap,
    h0: &Polynomial,
    n0: usize,
    horizon: usize,
    budget: Budget,
) -> Result<IterationLedger> {
    if n0 == 0 {
        return Err(Error::Domain("n0 must be at least 1".into()));
    }
    if h0.nvars() != f.nvars() || !h0.is_homogeneous() || h0.is_constant() {
        return Err(Error::Domain("h0 must be a nonconstant homogeneous polynomial in the map's variables".into()));
    }
    let mut ledger = IterationLedger::start(f, budget);
    for n in 1..=horizon {
        if !ledger.admit(f, n) {
            break;
        }
        let prev = &ledger.steps[n - 1].lifting;
        let composed = f.compose(prev)?;
        if n <= n0 {
            let (lifting, stripped) = normalize_lifting(composed)?;
            if !stripped.is_constant() {
                return Err(Error::RecurrentLawViolated {
                    step: n,
                    leading_term: format!("factor {stripped} stripped before step {}", n0 + 1),
                });
            }
            let degree = lifting.degree();
            ledger.push(LedgerStep {
                n,
                lifting,
                degree,
                stripped,
                certificate: None,
            });
            continue;
        }
        let inner = &ledger.steps[n - n0 - 1].lifting;
        let divisor = h0.compose(inner.components())?.canonicalize();
        let quotients: Vec<Result<Option<Polynomial>>> = exec::map(&composed, |p| p.exact_div(&divisor));
        let mut parts = Vec::with_capacity(quotients.len());
        for (p, q) in composed.iter().zip(quotients) {
            match q? {
                Some(q) => parts.push(q),
                None => {
                    let rem = p.pseudo_div_rem(&divisor)?.remainder;
                    let lead = rem
                        .leading_term()
                        .map(|(m, c)| Polynomial::term(m.clone(), c.clone()).to_string())
                        .unwrap_or_else(|| "(non-integral quotient)".into());
                    return Err(Error::RecurrentLawViolated {
                        step: n,
                        leading_term: lead,
                    });
                }
            }
        }
        let lifting = HomogeneousMap::from_normalized(parts)?;
        let degree = lifting.degree();
        let expected = f.degree() * ledger.steps[n - 1].degree - divisor.total_degree().unwrap_or(0);
        if degree != expected {
            return Err(Error::Structural(format!("degree bookkeeping failed at step {n}")));
        }
        let exact_components = lifting.nvars();
        ledger.push(LedgerStep {
            n,
            lifting,
            degree,
            stripped: divisor.clone(),
            certificate: Some(DivisionCertificate {
                divisor,
                exact_components,
            }),
        });
    }
    Ok(ledger)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub agree: bool,
    /// Number of overlapping steps compared.
    pub compared: usize,
    pub first_divergence: Option<usize>,
}

/// Compares liftings, degrees and stripped factors over the common steps.
pub fn cross_check(a: &IterationLedger, b: &IterationLedger) -> CrossCheck {
    let compared = a.steps.len().min(b.steps.len());
    let first_divergence = (0..compared).find(|&i| {
        let (x, y) = (&a.steps[i], &b.steps[i]);
        x.lifting != y.lifting || x.degree != y.degree || x.stripped != y.stripped
    });
    CrossCheck {
        agree: first_divergence.is_none(),
        compared,
        first_divergence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

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

    #[test]
    fn naive_degrees_grow_linearly() {
        let l = iterate_naive(&example_one(), 6, Budget::default());
        assert_eq!(l.degrees(), vec![1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(l.stop, StopReason::Horizon);
        for s in &l.steps[1..] {
            let d = s.degree;
            let prev = l.steps[s.n - 1].degree;
            assert_eq!(d, 2 * prev - s.stripped.total_degree().unwrap());
        }
    }

    #[test]
    fn recurrent_matches_naive() {
        let f = example_one();
        let t = Polynomial::var(3, 2);
        let a = iterate_naive(&f, 6, Budget::default());
        let b = iterate_recurrent(&f, &t, 1, 6, Budget::default()).unwrap();
        let c = cross_check(&a, &b);
        assert!(c.agree, "{c:?}");
        assert_eq!(c.compared, 7);
        assert!(b.steps[2..].iter().all(|s| s.certificate.is_some()));
    }

    #[test]
    fn wrong_h0_is_rejected_at_step_two() {
        let z = Polynomial::var(3, 0);
        let err = iterate_recurrent(&example_one(), &z, 1, 4, Budget::default()).unwrap_err();
        assert!(matches!(err, Error::RecurrentLawViolated { step: 2, .. }), "{err:?}");
    }

    #[test]
    fn monomial_map_is_never_stripped() {
        let (z, w, t) = zwt();
        let f = HomogeneousMap::new(vec![z.pow(2), w.pow(2), t.pow(2)]).unwrap();
        let l = iterate_naive(&f, 6, Budget::default());
        assert_eq!(l.degrees(), vec![1, 2, 4, 8, 16, 32, 64]);
        assert!(l.steps.iter().all(|s| s.stripped.is_one()));
        let err = iterate_recurrent(&f, &t, 1, 4, Budget::default()).unwrap_err();
        assert!(matches!(err, Error::RecurrentLawViolated { step: 2, .. }));
    }

    #[test]
    fn budget_stops_gracefully() {
        let tight = Budget {
            max_terms: 5_000_000,
            max_degree: 8,
        };
        let l = iterate_naive(&example_one(), 10, tight);
        assert_eq!(l.degrees(), vec![1, 2, 3, 4, 5]);
        assert!(l.stopped_on_budget());
    }

    #[test]
    fn dense_counts() {
        assert_eq!(dense_count(5, 2), 21);
        assert_eq!(dense_count(3, 1), 4);
    }
}
