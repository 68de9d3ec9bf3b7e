//! Pointwise algebra of a principal-curvature spectrum.
//!
//! For principal curvatures `lambda_1 <= ... <= lambda_n` of a hypersurface in
//! a space form of curvature `c`:
//!
//! - `S_r = sigma_r(lambda)` and `H_r = S_r / C(n, r)`; `H = H_1`.
//! - `R = c + H_2` (normalized scalar curvature).
//! - `|A|^2 = sum lambda_i^2`, so `n^2 H^2 = |A|^2 + n(n-1)(R - c)`.
//! - `phi = A - H I` has eigenvalues `mu_i = lambda_i - H`, trace zero,
//!   `|phi|^2 = |A|^2 - n H^2` and
//!   `tr A^3 = tr phi^3 + 3 H |phi|^2 + n H^3`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::scalar::{binomial, Field, Rational, Tolerance};
use crate::{Error, Result};

/// Elementary symmetric polynomials `sigma_0, ..., sigma_len` of `x`.
///
/// Coefficients of `prod (1 + x_i t)`, accumulated one factor at a time.
pub fn elementary_symmetric<T: Field>(x: &[T]) -> Vec<T> {
    let mut coeffs = vec![T::zero(); x.len() + 1];
    coeffs[0] = T::one();
    for (done, xi) in x.iter().enumerate() {
        for r in (1..=done + 1).rev() {
            let term = xi.clone() * coeffs[r - 1].clone();
            coeffs[r] = coeffs[r].clone() + term;
        }
    }
    coeffs
}

/// `sigma_r(x)`, with `sigma_0 = 1`.
pub fn sigma<T: Field>(x: &[T], r: usize) -> Result<T> {
    if r > x.len() {
        return Err(Error::domain(format!("sigma_{r} undefined for a vector of length {}", x.len())));
    }
    let mut coeffs = vec![T::zero(); r + 1];
    coeffs[0] = T::one();
    for (done, xi) in x.iter().enumerate() {
        for k in (1..=(done + 1).min(r)).rev() {
            let term = xi.clone() * coeffs[k - 1].clone();
            coeffs[k] = coeffs[k].clone() + term;
        }
    }
    Ok(coeffs.pop().expect("r + 1 >= 1 coefficients"))
}

fn without<T: Clone>(x: &[T], i: usize) -> Vec<T> {
    x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()).collect()
}

/// `sigma_r(x) - x_i sigma_{r-1}(x without x_i) - sigma_r(x without x_i)`.
///
/// `r` runs over `1..=n`; `i` is a zero-based index. The identity says the
/// result is zero.
pub fn sigma_recursion_residual<T: Field>(x: &[T], r: usize, i: usize) -> Result<T> {
    let n = x.len();
    if r == 0 || r > n {
        return Err(Error::domain(format!("r = {r} outside 1..={n}")));
    }
    if i >= n {
        return Err(Error::domain(format!("index {i} outside 0..{n}")));
    }
    let rest = without(x, i);
    let full = sigma(x, r)?;
    let lower = sigma(&rest, r - 1)?;
    let same = if r <= rest.len() { sigma(&rest, r)? } else { T::zero() };
    Ok(full - x[i].clone() * lower - same)
}

/// All recursion residuals at once: `out[i][r - 1]` for `r = 1..=n`.
pub fn sigma_recursion_residuals<T: Field>(x: &[T]) -> Vec<Vec<T>> {
    let n = x.len();
    let full = elementary_symmetric(x);
    (0..n)
        .map(|i| {
            let rest = elementary_symmetric(&without(x, i));
            (1..=n)
                .map(|r| {
                    let same = rest.get(r).cloned().unwrap_or_else(T::zero);
                    full[r].clone() - x[i].clone() * rest[r - 1].clone() - same
                })
                .collect()
        })
        .collect()
}

/// Ordered principal curvatures together with the ambient curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSpectrum<T> {
    lambdas: Vec<T>,
    c: T,
}

impl<T: Field> CurvatureSpectrum<T> {
    /// Builds a spectrum, sorting the curvatures into non-decreasing order.
    pub fn new(mut lambdas: Vec<T>, c: T) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::domain(format!(
                "a hypersurface spectrum needs n >= 2 curvatures, got {}",
                lambdas.len()
            )));
        }
        if !lambdas.iter().chain(core::iter::once(&c)).all(Field::is_finite_value) {
            return Err(Error::domain("non-finite curvature value"));
        }
        lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        Ok(CurvatureSpectrum { lambdas, c })
    }

    /// Spectrum in Euclidean space (`c = 0`).
    pub fn euclidean(lambdas: Vec<T>) -> Result<Self> {
        Self::new(lambdas, T::zero())
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn ambient_curvature(&self) -> &T {
        &self.c
    }

    pub fn mean_curvature(&self) -> T {
        let sum = self.lambdas.iter().cloned().fold(T::zero(), |a, b| a + b);
        sum / T::from_int(self.dim() as i64)
    }

    pub fn norm_a2(&self) -> T {
        self.lambdas.iter().fold(T::zero(), |acc, l| acc + l.sq())
    }

    pub fn tr_a3(&self) -> T {
        self.lambdas.iter().fold(T::zero(), |acc, l| acc + l.cube())
    }
}

impl CurvatureSpectrum<Rational> {
    /// One-way promotion to floating point.
    pub fn to_float(&self) -> CurvatureSpectrum<f64> {
        CurvatureSpectrum { lambdas: self.lambdas.iter().map(Field::as_f64).collect(), c: self.c.as_f64() }
    }
}

/// Every derived scalar of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport<T> {
    pub n: usize,
    pub mean_curvature: T,
    /// `S_0 = 1, S_1, ..., S_n`.
    pub symmetric: Vec<T>,
    /// `H_0 = 1, H_1, ..., H_n`.
    pub mean_curvatures: Vec<T>,
    pub scalar_curvature: T,
    pub norm_a2: T,
    pub mu: Vec<T>,
    pub norm_phi2: T,
    pub tr_phi3: T,
    pub tr_a3: T,
}

pub fn invariants<T: Field>(s: &CurvatureSpectrum<T>) -> InvariantReport<T> {
    let n = s.dim();
    let symmetric = elementary_symmetric(s.lambdas());
    let mean_curvatures: Vec<T> =
        symmetric.iter().enumerate().map(|(r, sr)| sr.clone() / binomial::<T>(n, r)).collect();
    let h = mean_curvatures[1].clone();
    let scalar_curvature = s.ambient_curvature().clone() + mean_curvatures[2].clone();
    let mu: Vec<T> = s.lambdas().iter().map(|l| l.clone() - h.clone()).collect();
    let norm_phi2 = mu.iter().fold(T::zero(), |acc, m| acc + m.sq());
    let tr_phi3 = mu.iter().fold(T::zero(), |acc, m| acc + m.cube());
    InvariantReport {
        n,
        mean_curvature: h,
        symmetric,
        mean_curvatures,
        scalar_curvature,
        norm_a2: s.norm_a2(),
        mu,
        norm_phi2,
        tr_phi3,
        tr_a3: s.tr_a3(),
    }
}

/// Residuals of the algebraic identities tying the report together. All of
/// them vanish identically; in the exact regime they are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResiduals<T> {
    /// `n^2 H^2 - |A|^2 - n(n-1)(R - c)`
    pub gauss_trace: T,
    /// `sum mu_i`
    pub phi_trace: T,
    /// `|phi|^2 - (|A|^2 - n H^2)`
    pub phi_norm: T,
    /// `tr A^3 - (tr phi^3 + 3 H |phi|^2 + n H^3)`
    pub phi_cubic: T,
    /// `tr A^3 - ((nH/2)(3|A|^2 - n^2 H^2) + 3 S_3)`, zero for `n < 3` too.
    pub cubic_trace_lemma: T,
}

impl<T: Field> IdentityResiduals<T> {
    pub fn all(&self) -> [&T; 5] {
        [&self.gauss_trace, &self.phi_trace, &self.phi_norm, &self.phi_cubic, &self.cubic_trace_lemma]
    }

    /// Largest absolute residual, promoted to `f64` for reporting.
    pub fn max_abs(&self) -> f64 {
        self.all().iter().map(|r| libm::fabs(r.as_f64())).fold(0.0, libm::fmax)
    }
}

pub fn identity_residuals<T: Field>(s: &CurvatureSpectrum<T>, report: &InvariantReport<T>) -> IdentityResiduals<T> {
    let n = T::from_int(s.dim() as i64);
    let h = report.mean_curvature.clone();
    let c = s.ambient_curvature().clone();
    let gauss_trace = n.clone() * n.clone() * h.sq()
        - report.norm_a2.clone()
        - n.clone() * (n.clone() - T::one()) * (report.scalar_curvature.clone() - c);
    let phi_trace = report.mu.iter().cloned().fold(T::zero(), |a, b| a + b);
    let phi_norm = report.norm_phi2.clone() - (report.norm_a2.clone() - n.clone() * h.sq());
    let three = T::from_int(3);
    let phi_cubic = report.tr_a3.clone()
        - (report.tr_phi3.clone() + three.clone() * h.clone() * report.norm_phi2.clone() + n.clone() * h.cube());
    let (lhs, rhs) = tr_a3_lemma_sides(s);
    IdentityResiduals { gauss_trace, phi_trace, phi_norm, phi_cubic, cubic_trace_lemma: lhs - rhs }
}

/// Both sides of `tr A^3 = (nH/2)(3|A|^2 - n^2 H^2) + 3 S_3`.
pub fn tr_a3_lemma_sides<T: Field>(s: &CurvatureSpectrum<T>) -> (T, T) {
    let n = T::from_int(s.dim() as i64);
    let h = s.mean_curvature();
    let a2 = s.norm_a2();
    let s3 = if s.dim() >= 3 { sigma(s.lambdas(), 3).expect("n >= 3") } else { T::zero() };
    let three = T::from_int(3);
    let rhs = n.clone() * h.clone() / T::from_int(2) * (three.clone() * a2 - n.clone() * n * h.sq()) + three * s3;
    (s.tr_a3(), rhs)
}

/// Eigenvalues `p_{r,i}` of the Newton tensor `P_r`.
///
/// `A` is diagonal in its eigenbasis, so `P_r` is too and
/// `p_{0,i} = 1`, `p_{r,i} = S_r - lambda_i p_{r-1,i}`.
pub fn newton_eigenvalues<T: Field>(s: &CurvatureSpectrum<T>, r: usize) -> Result<Vec<T>> {
    let n = s.dim();
    if r > n {
        return Err(Error::domain(format!("Newton tensor P_{r} undefined for n = {n}")));
    }
    let sym = elementary_symmetric(s.lambdas());
    let mut p = vec![T::one(); n];
    for sr in sym.iter().take(r + 1).skip(1) {
        for (pi, li) in p.iter_mut().zip(s.lambdas()) {
            *pi = sr.clone() - li.clone() * pi.clone();
        }
    }
    Ok(p)
}

/// `tr(A P_r) - (r + 1) S_{r+1}`; zero for `0 <= r <= n - 1`.
pub fn newton_trace_residual<T: Field>(s: &CurvatureSpectrum<T>, r: usize) -> Result<T> {
    let n = s.dim();
    if r + 1 > n {
        return Err(Error::domain(format!("trace identity needs r <= n - 1, got r = {r}")));
    }
    let p = newton_eigenvalues(s, r)?;
    let trace = s.lambdas().iter().zip(&p).fold(T::zero(), |acc, (l, pi)| acc + l.clone() * pi.clone());
    Ok(trace - T::from_int((r + 1) as i64) * sigma(s.lambdas(), r + 1)?)
}

/// Outcome of the cubic bound for a trace-free vector.
///
/// The bound `((n-2)/sqrt(n(n-1))) beta^3` is irrational in general, so it is
/// carried squared: `bound_sq = (n-2)^2 beta^6 / (n(n-1))`. Containment of
/// `sum3` is decided by comparing `sum3^2` against `bound_sq`.
#[derive(Debug, Clone, PartialEq)]
pub struct OkumuraBound<T> {
    pub n: usize,
    /// `beta^2 = sum mu_i^2`
    pub beta2: T,
    pub bound_sq: T,
    /// `sum mu_i^3`
    pub sum3: T,
    /// `sum3` lies within `[-bound, bound]`.
    pub within: bool,
    /// At least `n - 1` of the entries coincide (the equality case).
    pub equality: bool,
    /// Sign of `sum3` (-1, 0, 1); in the equality case it tells which end of
    /// the interval is attained.
    pub sign: i8,
    /// Clustering threshold used for the float equality flag; zero when exact.
    pub cluster_tolerance: f64,
}

impl OkumuraBound<f64> {
    pub fn upper(&self) -> f64 {
        libm::sqrt(self.bound_sq)
    }

    pub fn lower(&self) -> f64 {
        -self.upper()
    }
}

fn sign_of<T: Field>(x: &T) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Cubic bound for `mu` with `sum mu_i = 0`, `n >= 3`.
pub fn okumura_bound<T: Field>(mu: &[T], tol: &Tolerance) -> Result<OkumuraBound<T>> {
    let n = mu.len();
    if n < 3 {
        return Err(Error::domain(format!("the cubic bound needs n >= 3, got {n}")));
    }
    let trace = mu.iter().cloned().fold(T::zero(), |a, b| a + b);
    let mass = mu.iter().fold(T::zero(), |acc, m| acc + m.abs());
    if !trace.approx_zero(&mass, tol) {
        return Err(Error::precondition(format!("entries must sum to zero, sum = {:e}", trace.as_f64())));
    }
    let beta2 = mu.iter().fold(T::zero(), |acc, m| acc + m.sq());
    let sum3 = mu.iter().fold(T::zero(), |acc, m| acc + m.cube());
    let nn = T::from_int(n as i64);
    let coef = T::from_int(((n - 2) * (n - 2)) as i64) / (nn.clone() * (nn - T::one()));
    let bound_sq = coef * beta2.cube();
    let sum3_sq = sum3.sq();

    let (within, equality, cluster_tolerance) = match T::REGIME {
        crate::Regime::Exact => (sum3_sq <= bound_sq, coincident_exact(mu), 0.0),
        crate::Regime::Float => {
            let beta = libm::sqrt(beta2.as_f64());
            let cluster = tol.abs + tol.rel * beta;
            let bound = libm::sqrt(bound_sq.as_f64());
            let s3 = libm::fabs(sum3.as_f64());
            let slack = tol.abs + tol.rel * bound;
            (s3 <= bound + slack, coincident_float(mu, cluster), cluster)
        }
    };
    Ok(OkumuraBound { n, sign: sign_of(&sum3), beta2, bound_sq, sum3, within, equality, cluster_tolerance })
}

fn sorted<T: Field>(mu: &[T]) -> Vec<T> {
    let mut v = mu.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

fn coincident_exact<T: Field>(mu: &[T]) -> bool {
    let v = sorted(mu);
    let n = v.len();
    v[0] == v[n - 2] || v[1] == v[n - 1]
}

fn coincident_float<T: Field>(mu: &[T], cluster: f64) -> bool {
    let v: Vec<f64> = sorted(mu).iter().map(Field::as_f64).collect();
    let n = v.len();
    v[n - 2] - v[0] <= cluster || v[n - 1] - v[1] <= cluster
}
