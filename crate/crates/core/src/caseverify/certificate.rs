//! Closed-form certificates for the built-in cases.
//!
//! A certificate is an expression in the limit spectrum whose sign, together
//! with the sign and ordering constraints, decides the case without search.
//! [`certify`] checks the polynomial identities behind each certificate in
//! exact arithmetic at random rational points (with `H` and `R` read off each
//! point, so the equality constraints hold by construction), then states the
//! conclusion the sign argument gives.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cases::{Expectation, NamedCase};
use super::scan::{scan_with, FeasibilityStatus, FeasibilityVerdict, GridExecutor, ScanBudget};
use super::system::{exact_check, ConstraintSystem};
use crate::scalar::{binomial, rat, Field, Rational, Tolerance};
use crate::simons::pair_sum;
use crate::spectrum::{elementary_symmetric, sigma};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateValue<T> {
    pub case: NamedCase,
    pub value: T,
    /// Second expression for two-sided certificates.
    pub companion: Option<T>,
    /// How the sign decides the case.
    pub reading: &'static str,
}

fn hat<T: Field>(x: &[T], skip: usize) -> Vec<T> {
    x.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| v.clone()).collect()
}

fn sigma_hat<T: Field>(x: &[T], skip: usize, r: usize) -> T {
    elementary_symmetric(&hat(x, skip))[r].clone()
}

/// Evaluate the registered certificate of the case matching `sys` at `x`.
/// `x` must satisfy the trace and `sigma_2` equations.
pub fn closed_form_contradiction<T: Field>(
    sys: &ConstraintSystem,
    x: &[T],
    tol: &Tolerance,
) -> Result<CertificateValue<T>> {
    let case = NamedCase::recognize(sys)
        .ok_or_else(|| Error::UnsupportedCase("no certificate registered for this system".into()))?;
    let (dt, ds) = sys.equality_residuals(x)?;
    let scale = T::from_rational(&(sys.norm_a2() + Rational::from_int(1)));
    if !dt.approx_zero(&scale, tol) || !ds.approx_zero(&scale, tol) {
        return Err(Error::precondition(format!("point violates the equality constraints (trace {dt}, sigma_2 {ds})")));
    }
    let h = T::from_rational(&sys.mean_curvature());
    let r = T::from_rational(&sys.scalar_curvature());
    let c = |v: i64| T::from_int(v);
    let (value, companion, reading) = match case {
        NamedCase::Thm1Claim => (
            c(4) * h * x[1].clone() - c(6) * r,
            None,
            "equals l2^2 - l1 l4 >= 0 on the constraint set, so l2 >= 3R/(2H) > 0",
        ),
        NamedCase::Thm1Lambda2 => (
            x[0].clone() * x[2].clone(),
            None,
            "equals (l4 - 2H)^2 + 6(R - 2H^2/3) >= 0 while l1 <= 0 < l3; zero only on (0, 0, 2H, 2H)",
        ),
        NamedCase::Thm2Claim => (
            x[0].clone() * x[1].clone() * x[4].clone(),
            Some(x[0].clone() * sigma_hat(x, 0, 2)),
            "lim S3 = l1 l2 l5 > 0, yet lim S3 = l1 sigma2(no l1) <= 0",
        ),
        NamedCase::Thm2Lambda3 => (
            x[0].clone() * x[1].clone() * x[3].clone(),
            Some(x[0].clone() * x[3].clone() * x[4].clone()),
            "0 <= l1 l2 l4 <= lim S3 <= l1 l4 l5 <= 0 forces l1 = 0",
        ),
        NamedCase::Thm2Lambda2 => (
            x[0].clone() * x[2].clone() * x[3].clone() * x[4].clone(),
            None,
            "equals S4 >= 0 while l1 <= 0 < l3, so l1 = 0",
        ),
    };
    Ok(CertificateValue { case, value, companion, reading })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Conclusion {
    Infeasible,
    Pinned(Vec<Rational>),
    HypothesisNotMet,
}

impl Conclusion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Conclusion::Infeasible => "INFEASIBLE",
            Conclusion::Pinned(_) => "PINNED",
            Conclusion::HypothesisNotMet => "HYPOTHESIS_NOT_MET",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub case: NamedCase,
    pub h: Rational,
    pub r: Rational,
    pub conclusion: Conclusion,
    pub identities_checked: usize,
    pub identity_failures: Vec<&'static str>,
    /// Certificate value (and companion) at the pinned point.
    pub pinned_value: Option<(Rational, Option<Rational>)>,
    pub pass: bool,
}

type Sides = fn(&[Rational], &Rational, &Rational) -> (Rational, Rational);

/// Polynomial identity behind a certificate, valid whenever the listed
/// entries vanish (on top of the case's own zero).
struct Identity {
    name: &'static str,
    zeros: &'static [usize],
    sides: Sides,
}

fn s(x: &[Rational], r: usize) -> Rational {
    sigma(x, r).expect("r <= n")
}

fn sh(x: &[Rational], skip: usize, r: usize) -> Rational {
    sigma_hat(x, skip, r)
}

/// `sigma_2` without `l_i` as a square plus the `R` excess.
fn quintic_square(x: &[Rational], h: &Rational, r: &Rational, i: usize) -> (Rational, Rational) {
    let d = &x[i] - rat(5, 2) * h;
    (sh(x, i, 2), &d * &d + rat(10, 1) * (r - rat(5, 8) * h * h))
}

fn identities(case: NamedCase) -> Vec<Identity> {
    match case {
        NamedCase::Thm1Claim => vec![Identity {
            name: "4H l2 - 6R = l2^2 - l1 l4",
            zeros: &[],
            sides: |x, h, r| (rat(4, 1) * h * &x[1] - rat(6, 1) * r, &x[1] * &x[1] - &x[0] * &x[3]),
        }],
        NamedCase::Thm1Lambda2 => vec![Identity {
            name: "l1 l3 = (l4 - 2H)^2 + 6(R - 2H^2/3)",
            zeros: &[],
            sides: |x, h, r| {
                let d = &x[3] - rat(2, 1) * h;
                (&x[0] * &x[2], &d * &d + rat(6, 1) * (r - rat(2, 3) * h * h))
            },
        }],
        NamedCase::Thm2Claim => vec![
            Identity {
                name: "S4 = l1 l2 l3 l5",
                zeros: &[],
                sides: |x, _, _| (s(x, 4), &x[0] * &x[1] * &x[2] * &x[4]),
            },
            Identity { name: "sigma2(no l1) square form", zeros: &[], sides: |x, h, r| quintic_square(x, h, r, 0) },
            Identity { name: "sigma2(no l5) square form", zeros: &[], sides: |x, h, r| quintic_square(x, h, r, 4) },
            Identity {
                name: "S3 = l1 sigma2(no l1) + sigma3(no l1)",
                zeros: &[],
                sides: |x, _, _| (s(x, 3), &x[0] * sh(x, 0, 2) + sh(x, 0, 3)),
            },
            Identity {
                name: "10R = l1 l2 + l1 l5 + l2 l5",
                zeros: &[2],
                sides: |x, _, r| (rat(10, 1) * r, &x[0] * &x[1] + &x[0] * &x[4] + &x[1] * &x[4]),
            },
            Identity { name: "S3 = l1 l2 l5", zeros: &[2], sides: |x, _, _| (s(x, 3), &x[0] * &x[1] * &x[4]) },
            Identity { name: "sigma3(no l1) = 0", zeros: &[2], sides: |x, _, _| (sh(x, 0, 3), Rational::zero()) },
        ],
        NamedCase::Thm2Lambda3 => vec![
            Identity {
                name: "S3 = l5 sigma2(no l5) + l1 l2 l4",
                zeros: &[],
                sides: |x, _, _| (s(x, 3), &x[4] * sh(x, 4, 2) + &x[0] * &x[1] * &x[3]),
            },
            Identity {
                name: "S3 = l2 sigma2(no l2) + l1 l4 l5",
                zeros: &[],
                sides: |x, _, _| (s(x, 3), &x[1] * sh(x, 1, 2) + &x[0] * &x[3] * &x[4]),
            },
            Identity { name: "sigma2(no l2) square form", zeros: &[], sides: |x, h, r| quintic_square(x, h, r, 1) },
            Identity { name: "sigma2(no l5) square form", zeros: &[], sides: |x, h, r| quintic_square(x, h, r, 4) },
            Identity {
                name: "pair sum = (l4 - l5)^2 l4 l5",
                zeros: &[0, 1],
                sides: |x, _, _| {
                    let d = &x[3] - &x[4];
                    (pair_sum(x), &d * &d * &x[3] * &x[4])
                },
            },
        ],
        NamedCase::Thm2Lambda2 => vec![
            Identity {
                name: "S4 = l1 l3 l4 l5",
                zeros: &[],
                sides: |x, _, _| (s(x, 4), &x[0] * &x[2] * &x[3] * &x[4]),
            },
            Identity {
                name: "pair sum over l3, l4, l5",
                zeros: &[0],
                sides: |x, _, _| {
                    let mut acc = Rational::zero();
                    for (i, j) in [(2, 3), (2, 4), (3, 4)] {
                        let d = &x[i] - &x[j];
                        acc += &d * &d * &x[i] * &x[j];
                    }
                    (pair_sum(x), acc)
                },
            },
        ],
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-20..=20), rng.gen_range(1..=12))
}

/// Check identities and state the conclusion of the sign argument.
pub fn certify(case: NamedCase, h: &Rational, r: &Rational, samples: usize, seed: u64) -> CertificateReport {
    let n = case.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list = identities(case);
    let mut checked = 0;
    let mut failures = Vec::new();
    for id in &list {
        let mut failed = false;
        for _ in 0..samples {
            let mut x: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
            x[case.zero_index()] = Rational::zero();
            for &z in id.zeros {
                x[z] = Rational::zero();
            }
            let hx = x.iter().sum::<Rational>() / Rational::from_int(n as i64);
            let rx = s(&x, 2) / binomial::<Rational>(n, 2);
            let (lhs, rhs) = (id.sides)(&x, &hx, &rx);
            checked += 1;
            failed |= lhs != rhs;
        }
        if failed {
            failures.push(id.name);
        }
    }

    let conclusion = match case.expectation(h, r) {
        Expectation::Infeasible => Conclusion::Infeasible,
        Expectation::Pinned(x) => Conclusion::Pinned(x),
        Expectation::HypothesisNotMet => Conclusion::HypothesisNotMet,
    };
    let sys = case.system(h, r);
    let mut pinned_value = None;
    let mut pinned_ok = true;
    if let Conclusion::Pinned(x) = &conclusion {
        pinned_ok = exact_check(&sys, x).feasible();
        match closed_form_contradiction(&sys, x, &Tolerance::default()) {
            Ok(cv) => {
                pinned_ok &= cv.value.is_zero() && cv.companion.as_ref().is_none_or(Zero::is_zero);
                pinned_value = Some((cv.value, cv.companion));
            }
            Err(_) => pinned_ok = false,
        }
    }
    let pass = failures.is_empty() && pinned_ok && conclusion != Conclusion::HypothesisNotMet;
    CertificateReport {
        case,
        h: h.clone(),
        r: r.clone(),
        conclusion,
        identities_checked: checked,
        identity_failures: failures,
        pinned_value,
        pass,
    }
}

/// Scan and certificate for one case, with their agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRun {
    pub case: NamedCase,
    pub verdict: FeasibilityVerdict,
    pub certificate: CertificateReport,
    /// `None` when the hypotheses do not hold and the certificate says
    /// nothing.
    pub agree: Option<bool>,
}

pub fn run_case<E: GridExecutor + ?Sized>(
    case: NamedCase,
    h: &Rational,
    r: &Rational,
    budget: &ScanBudget,
    seed: u64,
    executor: &E,
) -> Result<CaseRun> {
    let sys = case.system(h, r);
    let verdict = scan_with(&sys, budget, seed, executor)?;
    let certificate = certify(case, h, r, 64, seed);
    let agree = agreement(&certificate, &verdict, budget.tolerance);
    Ok(CaseRun { case, verdict, certificate, agree })
}

/// Whether a scan verdict matches the certificate's conclusion: no witness
/// when infeasible, a witness within `tolerance` of the pinned point otherwise.
pub fn agreement(certificate: &CertificateReport, verdict: &FeasibilityVerdict, tolerance: f64) -> Option<bool> {
    match &certificate.conclusion {
        Conclusion::HypothesisNotMet => None,
        Conclusion::Infeasible => Some(verdict.status == FeasibilityStatus::NoWitness),
        Conclusion::Pinned(x) => Some(
            verdict
                .witness
                .as_ref()
                .is_some_and(|w| w.iter().zip(x).all(|(a, b)| libm::fabs(a - b.as_f64()) <= tolerance)),
        ),
    }
}

/// Random float points on the equality variety of `sys` (trace, `sigma_2`
/// and fixed zeros): all free entries but two are drawn from the box, the
/// last two solve a quadratic.
pub fn equality_feasible_samples(sys: &ConstraintSystem, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let free = sys.free_indices();
    let mut out = Vec::with_capacity(count);
    if free.len() < 2 {
        return out;
    }
    let bound = libm::sqrt(sys.norm_a2().as_f64().max(0.0));
    let trace = sys.trace_target.as_f64();
    let s2 = sys.sigma2_target.as_f64();
    let (a, b) = (free[free.len() - 2], free[free.len() - 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 1000 {
        attempts += 1;
        let mut x = vec![0.0; sys.n];
        for &i in &free[..free.len() - 2] {
            x[i] = rng.gen_range(-bound..=bound);
        }
        let rest_sum: f64 = x.iter().sum();
        let rest_s2 = elementary_symmetric(&x)[2];
        // x_a + x_b = t, x_a x_b = p
        let t = trace - rest_sum;
        let p = s2 - rest_s2 - t * rest_sum;
        let disc = t * t - 4.0 * p;
        if disc < 0.0 {
            continue;
        }
        let root = libm::sqrt(disc);
        let (lo, hi) = ((t - root) / 2.0, (t + root) / 2.0);
        if rng.gen::<bool>() {
            x[a] = lo;
            x[b] = hi;
        } else {
            x[a] = hi;
            x[b] = lo;
        }
        out.push(x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caseverify::system::SignKind;

    #[test]
    fn thm1_claim_certificate_example() {
        // With l1 = -1 the equalities need R <= 5/24; R = 1/6 gives (-1, 2, 0, 3).
        let sys = NamedCase::Thm1Claim.system(&rat(1, 1), &rat(1, 6));
        let x = [rat(-1, 1), rat(2, 1), rat(0, 1), rat(3, 1)];
        let cv = closed_form_contradiction(&sys, &x, &Tolerance::default()).unwrap();
        assert_eq!(cv.value, &x[1] * &x[1] - &x[0] * &x[3]);
        assert!(cv.value > rat(0, 1));
        let xf = [-1.0, 2.0, 0.0, 3.0];
        let cf = closed_form_contradiction(&sys, &xf, &Tolerance::default()).unwrap();
        assert_eq!(cf.value, 7.0);
    }

    #[test]
    fn thm1_lambda2_pinned_point() {
        let sys = NamedCase::Thm1Lambda2.system(&rat(1, 1), &rat(2, 3));
        let x = [rat(0, 1), rat(0, 1), rat(2, 1), rat(2, 1)];
        let cv = closed_form_contradiction(&sys, &x, &Tolerance::default()).unwrap();
        assert_eq!(cv.value, rat(0, 1));
    }

    #[test]
    fn umbilic_point_gives_positive_certificate() {
        let sys = NamedCase::Thm1Lambda2.system(&rat(1, 1), &rat(1, 1));
        let x = [rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)];
        let cv = closed_form_contradiction(&sys, &x, &Tolerance::default()).unwrap();
        assert!(cv.value > rat(0, 1));
    }

    #[test]
    fn preconditions() {
        let sys = NamedCase::Thm1Lambda2.system(&rat(1, 1), &rat(2, 3));
        let bad = [rat(0, 1), rat(0, 1), rat(1, 1), rat(2, 1)];
        assert!(matches!(closed_form_contradiction(&sys, &bad, &Tolerance::default()), Err(Error::Precondition(_))));
        let other = ConstraintSystem::for_curvatures(4, &rat(1, 1), &rat(1, 1)).with_sign(0, SignKind::Pos);
        let x = vec![rat(1, 1); 4];
        assert!(matches!(closed_form_contradiction(&other, &x, &Tolerance::default()), Err(Error::UnsupportedCase(_))));
    }

    #[test]
    fn all_cases_certify_at_default_ratios() {
        for case in NamedCase::ALL {
            for h in [rat(1, 1), rat(2, 1), rat(1, 3)] {
                let r = case.default_ratio() * &h * &h;
                let report = certify(case, &h, &r, 50, 11);
                assert!(report.pass, "{case}: {:?}", report.identity_failures);
                assert!(report.identities_checked >= 50);
            }
        }
    }

    #[test]
    fn wrong_identity_is_caught() {
        // Sanity check of the harness: a false identity must fail.
        let bogus = Identity { name: "bogus", zeros: &[], sides: |x, _, _| (s(x, 3), s(x, 2)) };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Rational> = (0..5).map(|_| random_rational(&mut rng)).collect();
        let (l, r) = (bogus.sides)(&x, &rat(0, 1), &rat(0, 1));
        assert_ne!(l, r);
    }

    #[test]
    fn samples_lie_on_the_equality_variety() {
        let sys = NamedCase::Thm2Lambda3.system(&rat(1, 1), &rat(5, 8));
        let pts = equality_feasible_samples(&sys, 200, 5);
        assert_eq!(pts.len(), 200);
        for x in pts {
            let (dt, ds) = sys.equality_residuals(&x).unwrap();
            assert!(dt.abs() < 1e-9 && ds.abs() < 1e-9);
            assert_eq!(x[2], 0.0);
        }
    }
}
