//! Grid search plus local descent.
//!
//! The search eliminates fixed zeros and one free coordinate (through the
//! trace equation), lays a uniform grid over the remaining box, keeps the
//! best fraction of cells and descends from each. Survivors are polished
//! with Levenberg-Marquardt and then snapped to nearby simple rationals so a
//! witness can be confirmed exactly.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_traits::{FromPrimitive, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::system::{exact_check, exact_max_violation, CompiledSystem, ConstraintSystem, SignKind, Violations};
use crate::scalar::{Field, Rational};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanBudget {
    /// Upper bound on grid cells.
    pub grid_points: u64,
    /// Fraction of best cells used as descent starts.
    pub top_fraction: f64,
    /// Penalty evaluations allowed per descent.
    pub descent_evaluations: usize,
    /// Distinct descended points passed to the polishing stage.
    pub polish: usize,
    /// A point is a witness when its maximum violation is at most this.
    pub tolerance: f64,
    /// Margin replacing strict inequalities during the search.
    pub epsilon: f64,
    /// Largest denominator tried when snapping to rationals.
    pub max_denominator: u64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget {
            grid_points: 1_000_000,
            top_fraction: 0.01,
            descent_evaluations: 4_000,
            polish: 8,
            tolerance: 1e-8,
            epsilon: 1e-6,
            max_denominator: 10_000,
        }
    }
}

impl ScanBudget {
    pub fn with_grid_points(mut self, grid_points: u64) -> Self {
        self.grid_points = grid_points;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeasibilityStatus {
    Witness,
    NoWitness,
}

impl FeasibilityStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FeasibilityStatus::Witness => "WITNESS",
            FeasibilityStatus::NoWitness => "NO_WITNESS",
        }
    }
}

impl fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub seed: u64,
    /// Gridded coordinates after eliminating zeros and the trace.
    pub dims: usize,
    pub per_axis: u64,
    pub grid_points: u64,
    pub starts: usize,
    pub evaluations: u64,
    pub polished: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub status: FeasibilityStatus,
    pub witness: Option<Vec<f64>>,
    /// Rational point confirmed feasible by exact arithmetic, when snapping
    /// succeeded.
    pub exact_witness: Option<Vec<Rational>>,
    /// Maximum violation at the best point found.
    pub residual: f64,
    pub best_point: Vec<f64>,
    /// The witness passed the independent exact evaluator.
    pub validated: bool,
    /// Strict constraints (by index) that the witness meets only within a
    /// few multiples of the relaxation margin. Such a witness sits on the
    /// boundary of the relaxed system; the certificate decides the strict one.
    pub strict_boundary: Vec<usize>,
    pub stats: ScanStats,
}

/// A grid cell with its penalty. Ordered by penalty, then index, so every
/// reduction order gives the same result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: u64,
    pub penalty: f64,
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.penalty.total_cmp(&other.penalty).then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Evaluates grid cells and returns the `keep` best, sorted.
pub trait GridExecutor {
    fn best_cells(&self, total: u64, keep: usize, eval: &(dyn Fn(u64) -> f64 + Sync)) -> Vec<Cell>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl GridExecutor for Sequential {
    fn best_cells(&self, total: u64, keep: usize, eval: &(dyn Fn(u64) -> f64 + Sync)) -> Vec<Cell> {
        best_in_range(0..total, keep, eval)
    }
}

/// Best `keep` cells of a contiguous index range, ascending.
pub fn best_in_range(range: Range<u64>, keep: usize, eval: &(dyn Fn(u64) -> f64 + Sync)) -> Vec<Cell> {
    let mut heap = BinaryHeap::with_capacity(keep + 1);
    for index in range {
        let cell = Cell { index, penalty: eval(index) };
        if heap.len() < keep {
            heap.push(cell);
        } else if let Some(worst) = heap.peek() {
            if cell < *worst {
                heap.pop();
                heap.push(cell);
            }
        }
    }
    heap.into_sorted_vec()
}

/// Merge partial results from disjoint ranges.
pub fn merge_best<I: IntoIterator<Item = Vec<Cell>>>(parts: I, keep: usize) -> Vec<Cell> {
    let mut all: Vec<Cell> = parts.into_iter().flatten().collect();
    all.sort();
    all.truncate(keep);
    all
}

/// Coordinates searched by the grid and how they map back to a spectrum.
struct Layout {
    n: usize,
    axes: Vec<usize>,
    last: Option<usize>,
    trace: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Layout {
    fn new(sys: &ConstraintSystem, bound: f64) -> Self {
        let mut free = sys.free_indices();
        let last = free.pop();
        let mean = sys.mean_curvature().as_f64();
        let mut lo = Vec::with_capacity(free.len());
        let mut hi = Vec::with_capacity(free.len());
        for &i in &free {
            let (mut a, mut b) = (-bound, bound);
            for c in sys.signs.iter().filter(|c| c.index == i) {
                match c.kind {
                    SignKind::NonNeg | SignKind::Pos => a = a.max(0.0),
                    SignKind::NonPos | SignKind::Neg => b = b.min(0.0),
                    SignKind::AtLeastMean => a = a.max(mean),
                }
            }
            if a > b {
                b = a;
            }
            lo.push(a);
            hi.push(b);
        }
        Layout { n: sys.n, axes: free, last, trace: sys.trace_target.as_f64(), lo, hi }
    }

    fn dims(&self) -> usize {
        self.axes.len()
    }

    fn embed(&self, y: &[f64], x: &mut Vec<f64>) {
        x.clear();
        x.resize(self.n, 0.0);
        let mut rest = self.trace;
        for (a, &i) in self.axes.iter().enumerate() {
            x[i] = y[a];
            rest -= y[a];
        }
        if let Some(l) = self.last {
            x[l] = rest;
        }
    }

    fn embed_exact(&self, sys: &ConstraintSystem, y: &[Rational]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        let mut rest = sys.trace_target.clone();
        for (a, &i) in self.axes.iter().enumerate() {
            x[i] = y[a].clone();
            rest -= &y[a];
        }
        if let Some(l) = self.last {
            x[l] = rest;
        }
        x
    }
}

struct Objective<'a> {
    layout: &'a Layout,
    compiled: &'a CompiledSystem,
}

impl Objective<'_> {
    fn residuals(&self, y: &[f64], out: &mut Vec<f64>) {
        let mut x = Vec::new();
        self.layout.embed(y, &mut x);
        self.compiled.residuals_into(&x, out);
    }

    fn violations(&self, y: &[f64]) -> Violations {
        let mut r = Vec::new();
        self.residuals(y, &mut r);
        Violations::from_residuals(&r)
    }

    fn penalty(&self, y: &[f64]) -> f64 {
        self.violations(y).penalty
    }
}

fn per_axis(budget: u64, d: usize) -> u64 {
    if d == 0 {
        return 1;
    }
    let mut m = libm::floor(libm::pow(budget.max(1) as f64, 1.0 / d as f64)).max(1.0) as u64;
    while m > 1 && m.checked_pow(d as u32).is_none_or(|t| t > budget) {
        m -= 1;
    }
    while (m + 1).checked_pow(d as u32).is_some_and(|t| t <= budget) {
        m += 1;
    }
    m
}

/// Scan with the sequential executor.
pub fn scan(sys: &ConstraintSystem, budget: &ScanBudget, seed: u64) -> Result<FeasibilityVerdict> {
    scan_with(sys, budget, seed, &Sequential)
}

pub fn scan_with<E: GridExecutor + ?Sized>(
    sys: &ConstraintSystem,
    budget: &ScanBudget,
    seed: u64,
    executor: &E,
) -> Result<FeasibilityVerdict> {
    sys.validate()?;
    let mut stats = ScanStats { seed, ..ScanStats::default() };
    let norm_a2 = sys.norm_a2().as_f64();
    if norm_a2 < 0.0 {
        // No real spectrum has these targets.
        return Ok(FeasibilityVerdict {
            status: FeasibilityStatus::NoWitness,
            witness: None,
            exact_witness: None,
            residual: -norm_a2,
            best_point: Vec::new(),
            validated: false,
            strict_boundary: Vec::new(),
            stats,
        });
    }
    let bound = libm::sqrt(norm_a2);
    let layout = Layout::new(sys, bound);
    let compiled = sys.compile(budget.epsilon);
    let objective = Objective { layout: &layout, compiled: &compiled };
    let d = layout.dims();
    let m = per_axis(budget.grid_points, d);
    let total = m.pow(d as u32);
    stats.dims = d;
    stats.per_axis = m;
    stats.grid_points = total;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    let widths: Vec<f64> = (0..d).map(|a| (layout.hi[a] - layout.lo[a]) / m as f64).collect();
    let cell_point = |mut index: u64| -> Vec<f64> {
        let mut y = vec![0.0; d];
        for a in (0..d).rev() {
            let j = index % m;
            index /= m;
            y[a] = layout.lo[a] + (j as f64 + offsets[a]) * widths[a];
        }
        y
    };

    let keep = (libm::ceil(total as f64 * budget.top_fraction) as usize).clamp(1, total as usize);
    let eval = |index: u64| objective.penalty(&cell_point(index));
    let cells = executor.best_cells(total, keep, &eval);
    stats.evaluations = total;
    stats.starts = cells.len();

    let floor = 1e-14 * (1.0 + bound);
    let mut descended: Vec<(f64, u64, Vec<f64>)> = Vec::with_capacity(cells.len());
    for cell in &cells {
        let steps: Vec<f64> = widths.iter().map(|w| w / 2.0).collect();
        let (y, f, evals) = descend(&objective, cell_point(cell.index), steps, floor, budget.descent_evaluations);
        stats.evaluations += evals as u64;
        descended.push((f, cell.index, y));
    }
    descended.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for (_, _, y) in &descended {
        if candidates.len() >= budget.polish.max(1) {
            break;
        }
        let distinct =
            candidates.iter().all(|c| c.iter().zip(y).any(|(a, b)| libm::fabs(a - b) > 1e-6 * (1.0 + bound)));
        if distinct {
            candidates.push(y.clone());
        }
    }
    let mut polished: Vec<(Violations, Vec<f64>)> = Vec::new();
    for y in candidates {
        let (y, evals) = levenberg_marquardt(&objective, y, 200);
        stats.evaluations += evals as u64;
        polished.push((objective.violations(&y), y));
    }
    stats.polished = polished.len();
    polished.sort_by(|a, b| a.0.max.total_cmp(&b.0.max).then(a.0.penalty.total_cmp(&b.0.penalty)));

    for (_, y) in &polished {
        if let Some(exact) = snap(sys, &layout, y, budget.max_denominator) {
            let float: Vec<f64> = exact.iter().map(Field::as_f64).collect();
            let residual = compiled.violations(&float).max;
            return Ok(FeasibilityVerdict {
                status: FeasibilityStatus::Witness,
                witness: Some(float.clone()),
                exact_witness: Some(exact),
                residual,
                best_point: float,
                validated: true,
                strict_boundary: Vec::new(),
                stats,
            });
        }
    }

    let (best_v, best_y) = match polished.into_iter().next() {
        Some(best) => best,
        None => {
            let y = vec![0.0; d];
            (objective.violations(&y), y)
        }
    };
    let mut best = Vec::new();
    layout.embed(&best_y, &mut best);
    if best_v.max <= budget.tolerance {
        let validated = validate_float(sys, &best, budget);
        let strict_boundary = sys
            .signs
            .iter()
            .filter(|c| match c.kind {
                SignKind::Pos => best[c.index] < 10.0 * budget.epsilon,
                SignKind::Neg => best[c.index] > -10.0 * budget.epsilon,
                _ => false,
            })
            .map(|c| c.index)
            .collect();
        return Ok(FeasibilityVerdict {
            status: FeasibilityStatus::Witness,
            witness: Some(best.clone()),
            exact_witness: None,
            residual: best_v.max,
            best_point: best,
            validated,
            strict_boundary,
            stats,
        });
    }
    Ok(FeasibilityVerdict {
        status: FeasibilityStatus::NoWitness,
        witness: None,
        exact_witness: None,
        residual: best_v.max,
        best_point: best,
        validated: false,
        strict_boundary: Vec::new(),
        stats,
    })
}

/// Re-evaluate a float point exactly (each double converted without rounding).
fn validate_float(sys: &ConstraintSystem, x: &[f64], budget: &ScanBudget) -> bool {
    let exact: Option<Vec<Rational>> = x.iter().map(|&v| Rational::from_f64(v)).collect();
    let (Some(exact), Some(eps), Some(tol)) =
        (exact, Rational::from_f64(budget.epsilon), Rational::from_f64(budget.tolerance))
    else {
        return false;
    };
    exact_max_violation(sys, &exact, &eps) <= tol
}

/// Pattern search: try `+-step` along each axis, halve the steps when no
/// move improves.
fn descend(
    obj: &Objective<'_>,
    mut y: Vec<f64>,
    mut steps: Vec<f64>,
    floor: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize) {
    let mut f = obj.penalty(&y);
    let mut evals = 1;
    if y.is_empty() {
        return (y, f, evals);
    }
    while evals < max_evals && f > 0.0 {
        let mut moved = false;
        for a in 0..y.len() {
            for dir in [1.0, -1.0] {
                let old = y[a];
                y[a] = old + dir * steps[a];
                let ft = obj.penalty(&y);
                evals += 1;
                if ft < f {
                    f = ft;
                    moved = true;
                    break;
                }
                y[a] = old;
            }
        }
        if !moved {
            let mut all_small = true;
            for s in steps.iter_mut() {
                *s *= 0.5;
                all_small &= *s < floor;
            }
            if all_small {
                break;
            }
        }
    }
    (y, f, evals)
}

/// Damped Gauss-Newton on the residual vector, central-difference Jacobian.
fn levenberg_marquardt(obj: &Objective<'_>, mut y: Vec<f64>, iterations: usize) -> (Vec<f64>, usize) {
    let d = y.len();
    let mut evals = 0;
    if d == 0 {
        return (y, evals);
    }
    let mut r = Vec::new();
    obj.residuals(&y, &mut r);
    evals += 1;
    let mut f: f64 = r.iter().map(|v| v * v).sum();
    let mut mu = 1e-3;
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for _ in 0..iterations {
        if f == 0.0 {
            break;
        }
        let rows = r.len();
        let mut jac = DMatrix::<f64>::zeros(rows, d);
        for a in 0..d {
            let h = 1e-7 * (1.0 + libm::fabs(y[a]));
            let old = y[a];
            y[a] = old + h;
            obj.residuals(&y, &mut plus);
            y[a] = old - h;
            obj.residuals(&y, &mut minus);
            y[a] = old;
            evals += 2;
            for row in 0..rows {
                jac[(row, a)] = (plus[row] - minus[row]) / (2.0 * h);
            }
        }
        let res = DVector::from_column_slice(&r);
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * &res;
        let mut accepted = false;
        for _ in 0..12 {
            let mut damped = normal.clone();
            for a in 0..d {
                damped[(a, a)] += mu * (normal[(a, a)] + 1.0);
            }
            let Some(chol) = damped.cholesky() else {
                mu *= 4.0;
                continue;
            };
            let delta = chol.solve(&(-&grad));
            let trial: Vec<f64> = y.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            let mut rt = Vec::new();
            obj.residuals(&trial, &mut rt);
            evals += 1;
            let ft: f64 = rt.iter().map(|v| v * v).sum();
            if ft < f {
                let tiny = delta.norm() <= 1e-15 * (1.0 + libm::sqrt(y.iter().map(|v| v * v).sum::<f64>()));
                y = trial;
                r = rt;
                f = ft;
                mu = (mu / 3.0).max(1e-12);
                accepted = !tiny;
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    (y, evals)
}

/// Try increasingly coarse rational roundings of the gridded coordinates and
/// accept the first one that the exact evaluator confirms.
fn snap(sys: &ConstraintSystem, layout: &Layout, y: &[f64], max_denominator: u64) -> Option<Vec<Rational>> {
    let max_den = num_bigint::BigInt::from(max_denominator);
    let mut last_tried: Option<Vec<Rational>> = None;
    for delta in [1e-12, 1e-10, 1e-8, 1e-6, 1e-5, 1e-4, 1e-3] {
        let snapped: Option<Vec<Rational>> = y
            .iter()
            .map(|&v| simplest_within(v, delta * (1.0 + libm::fabs(v))).filter(|q| q.denom() <= &max_den))
            .collect();
        let Some(snapped) = snapped else { continue };
        if last_tried.as_ref() == Some(&snapped) {
            continue;
        }
        let x = layout.embed_exact(sys, &snapped);
        if exact_check(sys, &x).feasible() {
            return Some(x);
        }
        last_tried = Some(snapped);
    }
    None
}

/// The rational with the smallest denominator in `[x - delta, x + delta]`.
pub fn simplest_within(x: f64, delta: f64) -> Option<Rational> {
    if !x.is_finite() || !delta.is_finite() || delta < 0.0 {
        return None;
    }
    let lo = Rational::from_f64(x - delta)?;
    let hi = Rational::from_f64(x + delta)?;
    simplest_between(&lo, &hi, 0)
}

fn simplest_between(lo: &Rational, hi: &Rational, depth: usize) -> Option<Rational> {
    if depth > 64 {
        return None;
    }
    if !lo.is_positive() && !hi.is_negative() {
        return Some(Rational::zero());
    }
    if hi.is_negative() {
        return simplest_between(&-hi, &-lo, depth + 1).map(|q| -q);
    }
    let f = lo.floor();
    if &f == lo {
        return Some(f);
    }
    let next = &f + Rational::from_int(1);
    if &next <= hi {
        return Some(next);
    }
    let inner = simplest_between(&(hi - &f).recip(), &(lo - &f).recip(), depth + 1)?;
    Some(f + inner.recip())
}
