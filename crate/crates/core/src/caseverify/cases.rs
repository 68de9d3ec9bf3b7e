//! The built-in limit-spectrum cases.
//!
//! Each case describes the limit `lim lambda_i(p_k)` of principal curvatures
//! along a sequence on which one of them tends to zero. Indices are
//! zero-based here; names in messages use the one-based convention.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Signed;

use super::system::{ConstraintSystem, ExtraConstraint, Inequality, SignKind};
use crate::scalar::{rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedCase {
    /// n = 4: `l3 = 0`, `l4 >= H`.
    Thm1Claim,
    /// n = 4: `l2 = 0 < l3`.
    Thm1Lambda2,
    /// n = 5: `l4 = 0`, `l5 >= H`, `S4 >= 0`.
    Thm2Claim,
    /// n = 5: `l3 = 0 < l4`, `S4 >= 0`, pair sum `<= 0`.
    Thm2Lambda3,
    /// n = 5: `l2 = 0 < l3`, `S4 >= 0`, pair sum `<= 0`.
    Thm2Lambda2,
}

/// What the case algebra predicts for given `(H, R)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    Infeasible,
    Pinned(Vec<Rational>),
    HypothesisNotMet,
}

impl NamedCase {
    pub const ALL: [NamedCase; 5] = [
        NamedCase::Thm1Claim,
        NamedCase::Thm1Lambda2,
        NamedCase::Thm2Claim,
        NamedCase::Thm2Lambda3,
        NamedCase::Thm2Lambda2,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedCase::Thm1Claim => "thm1-claim",
            NamedCase::Thm1Lambda2 => "thm1-lambda2",
            NamedCase::Thm2Claim => "thm2-claim",
            NamedCase::Thm2Lambda3 => "thm2-lambda3",
            NamedCase::Thm2Lambda2 => "thm2-lambda2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s.trim())
    }

    pub fn dim(&self) -> usize {
        match self {
            NamedCase::Thm1Claim | NamedCase::Thm1Lambda2 => 4,
            _ => 5,
        }
    }

    /// Lower bound on `R / H^2` assumed by the case.
    pub fn hypothesis_ratio(&self) -> Rational {
        match self.dim() {
            4 => rat(2, 3),
            _ => rat(5, 8),
        }
    }

    /// `R / H^2` used when the caller gives no `R`.
    pub fn default_ratio(&self) -> Rational {
        match self {
            NamedCase::Thm2Lambda2 => rat(5, 6),
            _ => self.hypothesis_ratio(),
        }
    }

    /// Index forced to zero.
    pub fn zero_index(&self) -> usize {
        match self {
            NamedCase::Thm1Claim => 2,
            NamedCase::Thm1Lambda2 => 1,
            NamedCase::Thm2Claim => 3,
            NamedCase::Thm2Lambda3 => 2,
            NamedCase::Thm2Lambda2 => 1,
        }
    }

    pub fn system(&self, h: &Rational, r: &Rational) -> ConstraintSystem {
        let n = self.dim();
        let z = self.zero_index();
        let base = ConstraintSystem::for_curvatures(n, h, r).with_zero(z).ordered();
        let s4 = ExtraConstraint::Sigma { r: 4, sign: Inequality::NonNeg };
        let simons = ExtraConstraint::PairSum { sign: Inequality::NonPos };
        match self {
            NamedCase::Thm1Claim => base.with_sign(3, SignKind::AtLeastMean),
            NamedCase::Thm1Lambda2 => base.with_sign(2, SignKind::Pos),
            NamedCase::Thm2Claim => base.with_sign(4, SignKind::AtLeastMean).with_extra(s4),
            NamedCase::Thm2Lambda3 => base.with_sign(3, SignKind::Pos).with_extra(s4).with_extra(simons),
            NamedCase::Thm2Lambda2 => base.with_sign(2, SignKind::Pos).with_extra(s4).with_extra(simons),
        }
    }

    /// Match a system against the built-in shapes, ignoring the targets.
    pub fn recognize(sys: &ConstraintSystem) -> Option<NamedCase> {
        let h = sys.mean_curvature();
        let r = sys.scalar_curvature();
        Self::ALL.into_iter().find(|case| {
            let mut reference = case.system(&h, &r);
            let mut candidate = sys.clone();
            reference.signs.sort();
            reference.extra.sort();
            candidate.signs.sort();
            candidate.signs.dedup();
            candidate.extra.sort();
            candidate.extra.dedup();
            reference == candidate
        })
    }

    /// Prediction from the case algebra, assuming `H > 0`.
    pub fn expectation(&self, h: &Rational, r: &Rational) -> Expectation {
        let h2 = h * h;
        if !h.is_positive() || r < &(self.hypothesis_ratio() * &h2) {
            return Expectation::HypothesisNotMet;
        }
        let pinned = match self {
            NamedCase::Thm1Claim | NamedCase::Thm2Claim => None,
            NamedCase::Thm1Lambda2 => Some((rat(2, 3), vec![rat(0, 1), rat(0, 1), rat(2, 1), rat(2, 1)])),
            NamedCase::Thm2Lambda3 => Some((rat(5, 8), vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(5, 2), rat(5, 2)])),
            NamedCase::Thm2Lambda2 => Some((rat(5, 6), vec![rat(0, 1), rat(0, 1), rat(5, 3), rat(5, 3), rat(5, 3)])),
        };
        match pinned {
            Some((ratio, shape)) if *r == &ratio * &h2 => {
                Expectation::Pinned(shape.into_iter().map(|v| v * h).collect())
            }
            _ => Expectation::Infeasible,
        }
    }
}

impl fmt::Display for NamedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caseverify::system::exact_check;

    #[test]
    fn names_round_trip() {
        for case in NamedCase::ALL {
            assert_eq!(NamedCase::parse(case.name()), Some(case));
        }
        assert_eq!(NamedCase::parse("thm3"), None);
    }

    #[test]
    fn systems_are_recognized() {
        for case in NamedCase::ALL {
            let h = rat(2, 1);
            let r = case.default_ratio() * &h * &h;
            let sys = case.system(&h, &r);
            sys.validate().unwrap();
            assert_eq!(NamedCase::recognize(&sys), Some(case));
        }
        let other = ConstraintSystem::for_curvatures(4, &rat(1, 1), &rat(2, 3)).with_zero(0);
        assert_eq!(NamedCase::recognize(&other), None);
    }

    #[test]
    fn pinned_points_satisfy_their_systems() {
        for case in NamedCase::ALL {
            for h in [rat(1, 1), rat(2, 1), rat(1, 3)] {
                let r = case.default_ratio() * &h * &h;
                let sys = case.system(&h, &r);
                match case.expectation(&h, &r) {
                    Expectation::Pinned(x) => assert!(exact_check(&sys, &x).feasible(), "{case}"),
                    Expectation::Infeasible => {
                        assert!(matches!(case, NamedCase::Thm1Claim | NamedCase::Thm2Claim))
                    }
                    Expectation::HypothesisNotMet => panic!("{case}"),
                }
            }
        }
    }

    #[test]
    fn off_threshold_cases_are_infeasible() {
        let h = rat(1, 1);
        assert_eq!(NamedCase::Thm1Lambda2.expectation(&h, &rat(3, 4)), Expectation::Infeasible);
        assert_eq!(NamedCase::Thm2Lambda3.expectation(&h, &rat(5, 6)), Expectation::Infeasible);
        assert_eq!(NamedCase::Thm2Lambda2.expectation(&h, &rat(5, 8)), Expectation::Infeasible);
        assert_eq!(NamedCase::Thm1Claim.expectation(&h, &rat(1, 2)), Expectation::HypothesisNotMet);
        assert_eq!(NamedCase::Thm1Claim.expectation(&rat(-1, 1), &rat(1, 1)), Expectation::HypothesisNotMet);
    }
}
