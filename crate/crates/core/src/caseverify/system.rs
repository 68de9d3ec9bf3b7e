//! Constraint systems on limit spectra.
//!
//! A system fixes `sum x_i = trace_target` and `sigma_2(x) = sigma2_target`
//! (that is `nH` and `C(n,2) R`), pins some entries to zero and adds sign,
//! ordering and symmetric-function constraints. Indices are zero-based.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::scalar::{binomial, Field, Rational};
use crate::simons::pair_sum;
use crate::spectrum::elementary_symmetric;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignKind {
    NonNeg,
    NonPos,
    /// Strict; relaxed to `>= epsilon` during search.
    Pos,
    /// Strict; relaxed to `<= -epsilon` during search.
    Neg,
    /// `x_i >= H`
    AtLeastMean,
}

impl SignKind {
    pub fn symbol(&self) -> &'static str {
        match self {
            SignKind::NonNeg => ">=0",
            SignKind::NonPos => "<=0",
            SignKind::Pos => ">0",
            SignKind::Neg => "<0",
            SignKind::AtLeastMean => ">=H",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s.trim() {
            ">=0" => SignKind::NonNeg,
            "<=0" => SignKind::NonPos,
            ">0" => SignKind::Pos,
            "<0" => SignKind::Neg,
            ">=H" => SignKind::AtLeastMean,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignConstraint {
    pub index: usize,
    pub kind: SignKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Inequality {
    NonNeg,
    NonPos,
}

impl Inequality {
    pub fn symbol(&self) -> &'static str {
        match self {
            Inequality::NonNeg => ">=0",
            Inequality::NonPos => "<=0",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s.trim() {
            ">=0" => Some(Inequality::NonNeg),
            "<=0" => Some(Inequality::NonPos),
            _ => None,
        }
    }

    fn violation(&self, value: f64) -> f64 {
        match self {
            Inequality::NonNeg => (-value).max(0.0),
            Inequality::NonPos => value.max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtraConstraint {
    /// Sign of `sigma_r(x)`, e.g. `S_4 >= 0`.
    Sigma { r: usize, sign: Inequality },
    /// Sign of `sum_{i<j} (x_i - x_j)^2 x_i x_j`.
    PairSum { sign: Inequality },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    pub n: usize,
    pub trace_target: Rational,
    pub sigma2_target: Rational,
    pub fixed_zeros: BTreeSet<usize>,
    pub ordering: bool,
    pub signs: Vec<SignConstraint>,
    pub extra: Vec<ExtraConstraint>,
}

impl ConstraintSystem {
    /// Empty system with `trace = nH` and `sigma_2 = C(n,2) R`.
    pub fn for_curvatures(n: usize, h: &Rational, r: &Rational) -> Self {
        ConstraintSystem {
            n,
            trace_target: Rational::from_int(n as i64) * h,
            sigma2_target: binomial::<Rational>(n, 2) * r,
            fixed_zeros: BTreeSet::new(),
            ordering: false,
            signs: Vec::new(),
            extra: Vec::new(),
        }
    }

    pub fn with_zero(mut self, index: usize) -> Self {
        self.fixed_zeros.insert(index);
        self
    }

    pub fn ordered(mut self) -> Self {
        self.ordering = true;
        self
    }

    pub fn with_sign(mut self, index: usize, kind: SignKind) -> Self {
        self.signs.push(SignConstraint { index, kind });
        self
    }

    pub fn with_extra(mut self, extra: ExtraConstraint) -> Self {
        self.extra.push(extra);
        self
    }

    pub fn mean_curvature(&self) -> Rational {
        &self.trace_target / Rational::from_int(self.n as i64)
    }

    pub fn scalar_curvature(&self) -> Rational {
        &self.sigma2_target / binomial::<Rational>(self.n, 2)
    }

    /// `|A|^2 = trace^2 - 2 sigma_2`, which bounds every `|x_i|`.
    pub fn norm_a2(&self) -> Rational {
        &self.trace_target * &self.trace_target - Rational::from_int(2) * &self.sigma2_target
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.fixed_zeros.contains(i)).collect()
    }

    /// Structural checks: index ranges and directly contradictory constraints.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("system dimension must be >= 2, got {}", self.n)));
        }
        let n = self.n;
        let out_of_range = |i: usize| Error::domain(format!("index {} outside 1..={n}", i + 1));
        if let Some(&i) = self.fixed_zeros.iter().find(|&&i| i >= n) {
            return Err(out_of_range(i));
        }
        if let Some(c) = self.signs.iter().find(|c| c.index >= n) {
            return Err(out_of_range(c.index));
        }
        for e in &self.extra {
            if let ExtraConstraint::Sigma { r, .. } = e {
                if *r == 0 || *r > n {
                    return Err(Error::domain(format!("sigma_{r} outside 1..={n}")));
                }
            }
        }
        let h_positive = self.trace_target.is_positive();
        let h_negative = self.trace_target.is_negative();
        // Per-index sign ranges: lower/upper with strictness, in units of {0, H}.
        for i in 0..n {
            let kinds: Vec<SignKind> = self.signs.iter().filter(|c| c.index == i).map(|c| c.kind).collect();
            let zero = self.fixed_zeros.contains(&i);
            let forces_pos = kinds.contains(&SignKind::Pos) || (kinds.contains(&SignKind::AtLeastMean) && h_positive);
            let forces_nonneg = forces_pos
                || kinds.contains(&SignKind::NonNeg)
                || (kinds.contains(&SignKind::AtLeastMean) && !h_negative);
            let forces_neg = kinds.contains(&SignKind::Neg);
            let forces_nonpos = forces_neg || kinds.contains(&SignKind::NonPos);
            let clash =
                (zero && (forces_pos || forces_neg)) || (forces_pos && forces_nonpos) || (forces_neg && forces_nonneg);
            if clash {
                return Err(Error::domain(format!("inconsistent constraints on index {}", i + 1)));
            }
            if self.ordering && zero {
                let bad_below = self.signs.iter().any(|c| {
                    c.index < i && (c.kind == SignKind::Pos || (c.kind == SignKind::AtLeastMean && h_positive))
                });
                let bad_above = self.signs.iter().any(|c| c.index > i && c.kind == SignKind::Neg);
                if bad_below || bad_above {
                    return Err(Error::domain(format!("ordering contradicts the zero at index {}", i + 1)));
                }
            }
        }
        Ok(())
    }

    /// Float view of the system for repeated evaluation.
    pub fn compile(&self, epsilon: f64) -> CompiledSystem {
        CompiledSystem {
            n: self.n,
            trace: self.trace_target.as_f64(),
            sigma2: self.sigma2_target.as_f64(),
            mean: self.mean_curvature().as_f64(),
            epsilon,
            zeros: self.fixed_zeros.iter().copied().collect(),
            ordering: self.ordering,
            signs: self.signs.clone(),
            extra: self.extra.clone(),
        }
    }

    /// Constraint violations at a floating point point.
    pub fn violations(&self, x: &[f64], epsilon: f64) -> Violations {
        self.compile(epsilon).violations(x)
    }

    pub fn max_violation(&self, x: &[f64], epsilon: f64) -> f64 {
        self.violations(x, epsilon).max
    }

    /// Equality residuals only: `(trace - target, sigma_2 - target)`.
    pub fn equality_residuals<T: Field>(&self, x: &[T]) -> Result<(T, T)> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let trace = x.iter().cloned().fold(T::zero(), |a, b| a + b);
        let s2 = crate::spectrum::sigma(x, 2)?;
        Ok((trace - T::from_rational(&self.trace_target), s2 - T::from_rational(&self.sigma2_target)))
    }
}

/// Floating point evaluator. Strict inequalities are relaxed to a margin
/// of `epsilon`.
#[derive(Debug, Clone)]
pub struct CompiledSystem {
    n: usize,
    trace: f64,
    sigma2: f64,
    mean: f64,
    epsilon: f64,
    zeros: Vec<usize>,
    ordering: bool,
    signs: Vec<SignConstraint>,
    extra: Vec<ExtraConstraint>,
}

impl CompiledSystem {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Signed residuals: equalities as differences, inequalities as hinges
    /// (zero when satisfied).
    pub fn residuals_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let trace: f64 = x.iter().sum();
        out.push(trace - self.trace);
        let sym = elementary_symmetric(x);
        out.push(sym[2] - self.sigma2);
        for &i in &self.zeros {
            out.push(x[i]);
        }
        if self.ordering {
            for w in x.windows(2) {
                out.push((w[0] - w[1]).max(0.0));
            }
        }
        for c in &self.signs {
            let xi = x[c.index];
            out.push(match c.kind {
                SignKind::NonNeg => (-xi).max(0.0),
                SignKind::NonPos => xi.max(0.0),
                SignKind::Pos => (self.epsilon - xi).max(0.0),
                SignKind::Neg => (xi + self.epsilon).max(0.0),
                SignKind::AtLeastMean => (self.mean - xi).max(0.0),
            });
        }
        for e in &self.extra {
            out.push(match e {
                ExtraConstraint::Sigma { r, sign } => sign.violation(sym[*r]),
                ExtraConstraint::PairSum { sign } => sign.violation(pair_sum(x)),
            });
        }
    }

    pub fn violations(&self, x: &[f64]) -> Violations {
        let mut buf = Vec::new();
        self.residuals_into(x, &mut buf);
        Violations::from_residuals(&buf)
    }

    /// Sum of squared residuals.
    pub fn penalty(&self, x: &[f64]) -> f64 {
        self.violations(x).penalty
    }
}

/// Individual violations plus their maximum and sum of squares.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Violations {
    pub max: f64,
    pub penalty: f64,
    pub count: usize,
}

impl Violations {
    pub fn from_residuals(residuals: &[f64]) -> Self {
        let mut v = Violations::default();
        for &r in residuals {
            let a = libm::fabs(r);
            if a > v.max || a.is_nan() {
                v.max = a;
            }
            v.penalty += r * r;
        }
        v.count = residuals.len();
        v
    }
}

/// Exact evaluation of the same constraints with an independent code path:
/// symmetric functions by subset enumeration and pair sums expanded
/// directly. Used to re-validate witnesses.
pub fn exact_max_violation(sys: &ConstraintSystem, x: &[Rational], epsilon: &Rational) -> Rational {
    let mut worst = Rational::zero();
    let mut note = |v: Rational| {
        let a = v.abs();
        if a > worst {
            worst = a;
        }
    };
    let clamp = |v: Rational| if v.is_positive() { v } else { Rational::zero() };
    let trace: Rational = x.iter().sum();
    note(trace.clone() - &sys.trace_target);
    note(subset_sigma(x, 2) - &sys.sigma2_target);
    for &i in &sys.fixed_zeros {
        note(x[i].clone());
    }
    if sys.ordering {
        for w in x.windows(2) {
            note(clamp(&w[0] - &w[1]));
        }
    }
    let h = trace / Rational::from_int(sys.n as i64);
    for c in &sys.signs {
        let xi = &x[c.index];
        note(match c.kind {
            SignKind::NonNeg => clamp(-xi.clone()),
            SignKind::NonPos => clamp(xi.clone()),
            SignKind::Pos => clamp(epsilon - xi),
            SignKind::Neg => clamp(xi + epsilon),
            SignKind::AtLeastMean => clamp(&h - xi),
        });
    }
    for e in &sys.extra {
        let (value, sign) = match e {
            ExtraConstraint::Sigma { r, sign } => (subset_sigma(x, *r), sign),
            ExtraConstraint::PairSum { sign } => {
                let mut acc = Rational::zero();
                for i in 0..x.len() {
                    for j in 0..x.len() {
                        if i < j {
                            let d = &x[i] - &x[j];
                            acc += &d * &d * &x[i] * &x[j];
                        }
                    }
                }
                (acc, sign)
            }
        };
        note(match sign {
            Inequality::NonNeg => clamp(-value),
            Inequality::NonPos => clamp(value),
        });
    }
    worst
}

/// Exact verdict on a candidate point: all constraints hold with strict
/// inequalities taken literally.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCheck {
    pub max_violation: Rational,
    pub strict_ok: bool,
}

impl ExactCheck {
    pub fn feasible(&self) -> bool {
        self.max_violation.is_zero() && self.strict_ok
    }
}

pub fn exact_check(sys: &ConstraintSystem, x: &[Rational]) -> ExactCheck {
    let max_violation = exact_max_violation(sys, x, &Rational::zero());
    let strict_ok = sys.signs.iter().all(|c| match c.kind {
        SignKind::Pos => x[c.index].is_positive(),
        SignKind::Neg => x[c.index].is_negative(),
        _ => true,
    });
    ExactCheck { max_violation, strict_ok }
}

fn subset_sigma(x: &[Rational], r: usize) -> Rational {
    fn go(x: &[Rational], r: usize, start: usize, acc: &Rational, total: &mut Rational) {
        if r == 0 {
            *total += acc;
            return;
        }
        for i in start..x.len() {
            if x.len() - i < r {
                break;
            }
            go(x, r - 1, i + 1, &(acc * &x[i]), total);
        }
    }
    let mut total = Rational::zero();
    go(x, r, 0, &Rational::from_int(1), &mut total);
    total
}
