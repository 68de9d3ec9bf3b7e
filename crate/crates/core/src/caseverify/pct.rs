//! Set conditions on sampled principal curvature values.
//!
//! For a complete non-planar hypersurface the nonzero values split into
//! `L+` and `L-`. If both are non-empty then `inf L+ = 0 = sup L-`; if one is
//! empty the closure of the value set is connected. A finite sample can
//! refute the first condition numerically but only describe the second.

use alloc::vec::Vec;
use core::fmt;

use crate::scalar::Field;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PctTolerance {
    /// Absolute threshold below which a sample counts as zero.
    pub zero: f64,
    /// Relative (to the largest magnitude) threshold for `inf L+ = 0`.
    pub closure: f64,
    /// When set, a gap wider than this inside a one-signed sample is
    /// reported as a violation of connectivity.
    pub max_gap: Option<f64>,
}

impl Default for PctTolerance {
    fn default() -> Self {
        PctTolerance { zero: 1e-12, closure: 1e-6, max_gap: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PctVerdict {
    Planar,
    Consistent,
    Violated,
}

impl PctVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            PctVerdict::Planar => "PLANAR_SAMPLE",
            PctVerdict::Consistent => "CONSISTENT",
            PctVerdict::Violated => "VIOLATED",
        }
    }
}

impl fmt::Display for PctVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SetSummary {
    /// Distinct values, ascending.
    pub values: Vec<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl SetSummary {
    fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        values.dedup();
        SetSummary { min: values.first().copied(), max: values.last().copied(), values }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PctReport {
    pub plus: SetSummary,
    pub minus: SetSummary,
    pub zeros: usize,
    pub inf_plus: Option<f64>,
    pub sup_minus: Option<f64>,
    /// Which condition was tested: "i", "ii" or "none" for planar samples.
    pub condition: &'static str,
    /// Largest gap between consecutive values of the non-empty side.
    pub max_gap: Option<f64>,
    pub verdict: PctVerdict,
}

pub fn pct_sets<T: Field>(values: &[T], tol: &PctTolerance) -> Result<PctReport> {
    if values.is_empty() {
        return Err(Error::precondition("no principal curvature samples"));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut zeros = 0;
    let mut scale = 0.0f64;
    for v in values {
        let x = v.as_f64();
        if !x.is_finite() {
            return Err(Error::domain("non-finite principal curvature sample"));
        }
        let zero = match T::REGIME {
            crate::Regime::Exact => v.is_zero(),
            crate::Regime::Float => libm::fabs(x) <= tol.zero,
        };
        if zero {
            zeros += 1;
        } else if x > 0.0 {
            plus.push(x);
        } else {
            minus.push(x);
        }
        scale = scale.max(libm::fabs(x));
    }
    let plus = SetSummary::from_values(plus);
    let minus = SetSummary::from_values(minus);
    let inf_plus = plus.min;
    let sup_minus = minus.max;
    let near_zero = |x: f64| libm::fabs(x) <= tol.closure * scale.max(1.0);
    let (condition, max_gap, verdict) = match (plus.is_empty(), minus.is_empty()) {
        (true, true) => ("none", None, PctVerdict::Planar),
        (false, false) => {
            let ok = inf_plus.is_some_and(near_zero) && sup_minus.is_some_and(near_zero);
            ("i", None, if ok { PctVerdict::Consistent } else { PctVerdict::Violated })
        }
        _ => {
            let side = if plus.is_empty() { &minus } else { &plus };
            let gap = side.values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            let verdict = match tol.max_gap {
                Some(limit) if gap > limit => PctVerdict::Violated,
                _ => PctVerdict::Consistent,
            };
            ("ii", Some(gap), verdict)
        }
    };
    Ok(PctReport { plus, minus, zeros, inf_plus, sup_minus, condition, max_gap, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn mixed_signs_away_from_zero() {
        let r = pct_sets(&[-1.0, -0.5, 0.3, 2.0], &PctTolerance::default()).unwrap();
        assert_eq!(r.verdict, PctVerdict::Violated);
        assert_eq!(r.inf_plus, Some(0.3));
        assert_eq!(r.sup_minus, Some(-0.5));
        assert_eq!(r.condition, "i");
    }

    #[test]
    fn one_signed_sample() {
        let r = pct_sets(&[0.5, 1.0, 1.5], &PctTolerance::default()).unwrap();
        assert!(r.minus.is_empty());
        assert_eq!(r.condition, "ii");
        assert_eq!(r.max_gap, Some(0.5));
        assert_eq!(r.verdict, PctVerdict::Consistent);
        let strict = PctTolerance { max_gap: Some(0.1), ..PctTolerance::default() };
        assert_eq!(pct_sets(&[0.5, 1.0, 1.5], &strict).unwrap().verdict, PctVerdict::Violated);
    }

    #[test]
    fn cylinder_sample() {
        let v: Vec<Rational> = [0, 0, 4, 4, 4].iter().map(|&k| rat(k, 3)).collect();
        let r = pct_sets(&v, &PctTolerance::default()).unwrap();
        assert_eq!(r.plus.values, [4.0 / 3.0]);
        assert_eq!(r.zeros, 2);
        assert_eq!(r.verdict, PctVerdict::Consistent);
    }

    #[test]
    fn planar_and_empty() {
        assert_eq!(pct_sets(&[0.0, 0.0], &PctTolerance::default()).unwrap().verdict, PctVerdict::Planar);
        assert!(pct_sets::<f64>(&[], &PctTolerance::default()).is_err());
        let r = pct_sets(&[-1e-9, 1e-9, 2.0], &PctTolerance::default()).unwrap();
        assert_eq!(r.verdict, PctVerdict::Consistent);
    }
}
