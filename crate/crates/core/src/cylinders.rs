//! Generalized cylinders `R^{n-k} x S^k(r)` in Euclidean space.
//!
//! The spectrum of such a cylinder is `n - k` zeros and `k` copies of `1/r`,
//! so `H = k / (n r)` and, for `k >= 1`, `R / H^2 = n(k-1) / (k(n-1))`.
//! Listing that ratio over `k = 1..=n` gives the scalar curvature ladder
//! against which constant `(H, R)` pairs are classified.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::scalar::{rat, Field, Rational, Tolerance};
use crate::spectrum::{invariants, CurvatureSpectrum, InvariantReport};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderModel<T> {
    n: usize,
    k: usize,
    radius: T,
}

impl<T: Field> CylinderModel<T> {
    /// `radius` is ignored (stored as 1) for the hyperplane `k = 0`.
    pub fn new(n: usize, k: usize, radius: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("cylinder dimension must be >= 2, got {n}")));
        }
        if k > n {
            return Err(Error::domain(format!("sphere factor S^{k} does not fit in dimension {n}")));
        }
        if k == 0 {
            return Ok(CylinderModel { n, k, radius: T::one() });
        }
        if !radius.is_positive() || !radius.is_finite_value() {
            return Err(Error::domain("cylinder radius must be positive"));
        }
        Ok(CylinderModel { n, k, radius })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn sphere_dim(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> &T {
        &self.radius
    }

    pub fn spectrum(&self) -> CurvatureSpectrum<T> {
        let mut lambdas = alloc::vec![T::zero(); self.n - self.k];
        if self.k > 0 {
            let kappa = T::one() / self.radius.clone();
            lambdas.extend(core::iter::repeat_n(kappa, self.k));
        }
        CurvatureSpectrum::euclidean(lambdas).expect("n >= 2 curvatures")
    }

    /// `k / (n r)`
    pub fn mean_curvature(&self) -> T {
        if self.k == 0 {
            return T::zero();
        }
        T::from_int(self.k as i64) / (T::from_int(self.n as i64) * self.radius.clone())
    }

    /// `n(k-1)/(k(n-1)) H^2`, and `0` for the hyperplane.
    pub fn scalar_curvature(&self) -> T {
        if self.k == 0 {
            return T::zero();
        }
        ladder_ratio::<T>(self.n, self.k) * self.mean_curvature().sq()
    }

    /// Human readable name, e.g. `R^2 x S^2(1/2)`.
    pub fn label(&self) -> String {
        let flat = self.n - self.k;
        let euclid = match flat {
            0 => String::new(),
            1 => String::from("R"),
            f => format!("R^{f}"),
        };
        if self.k == 0 {
            return format!("R^{}", self.n);
        }
        let sphere = format!("S^{}({})", self.k, self.radius);
        if euclid.is_empty() {
            sphere
        } else {
            format!("{euclid} x {sphere}")
        }
    }
}

fn ladder_ratio<T: Field>(n: usize, k: usize) -> T {
    T::from_int((n * (k - 1)) as i64) / T::from_int((k * (n - 1)) as i64)
}

/// Cylinder `R^{n-k} x S^k` with mean curvature `|h|`: radius `k / (n |h|)`.
pub fn cylinder_from_h<T: Field>(n: usize, k: usize, h: &T) -> Result<CylinderModel<T>> {
    if h.is_zero() {
        return Err(Error::domain("mean curvature must be non-zero"));
    }
    if k == 0 {
        return Err(Error::domain("a hyperplane has H = 0; no cylinder with this mean curvature"));
    }
    if k > n {
        return Err(Error::domain(format!("sphere factor S^{k} does not fit in dimension {n}")));
    }
    let radius = T::from_int(k as i64) / (T::from_int(n as i64) * h.abs());
    CylinderModel::new(n, k, radius)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderRung {
    pub k: usize,
    /// `R / H^2`
    pub ratio: Rational,
}

/// `(k, n(k-1)/(k(n-1)))` for `k = 1..=n`, ascending.
pub fn scalar_ladder(n: usize) -> Result<Vec<LadderRung>> {
    if n < 2 {
        return Err(Error::domain(format!("ladder needs n >= 2, got {n}")));
    }
    Ok((1..=n).map(|k| LadderRung { k, ratio: ladder_ratio(n, k) }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RigidityStatus {
    /// Every complete hypersurface with these invariants is this cylinder.
    Rigid,
    /// The cylinder realizes the value; uniqueness is open.
    ExampleOnly,
    /// Uniqueness holds under an additional hypothesis.
    Conditional,
    /// No classification statement is available.
    Unclassified,
}

impl RigidityStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RigidityStatus::Rigid => "rigid",
            RigidityStatus::ExampleOnly => "example-only",
            RigidityStatus::Conditional => "conditional",
            RigidityStatus::Unclassified => "unclassified",
        }
    }
}

/// What is known about complete, connected hypersurfaces of `R^{n+1}` with
/// constant `H != 0` and constant `R` on a given ladder rung.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rigidity {
    pub status: RigidityStatus,
    pub note: String,
    /// Extra statement that upgrades the rung to rigid.
    pub conditional: Option<&'static str>,
}

const SMALL_R_HYPOTHESES: &str = "rigid when additionally H H_3 >= 0 and 0 <= R <= n H^2 / (2(n-1))";

/// Rigidity table keyed by `(n, k)`.
pub fn rigidity(n: usize, k: usize) -> Rigidity {
    use RigidityStatus::*;
    let model = cylinder_name(n, k);
    let small_r = n >= 4 && (k == 1 || k == 2);
    let (status, note) = match (n, k) {
        (3, _) => (Rigid, format!("rigid: {model} (complete, H and R constant)")),
        (4, 4) => (Rigid, format!("rigid: sphere {model}, given R >= 2/3 H^2")),
        (4, 3) => (Rigid, format!("rigid: {model}, given R >= 2/3 H^2")),
        (5, 5) => (Rigid, format!("rigid: sphere {model}, given R >= 5/8 H^2 and H_4 >= 0")),
        (5, 4) => (Rigid, format!("rigid: {model}, given R >= 5/8 H^2 and H_4 >= 0")),
        (4, 2) | (5, 3) | (5, 2) => (ExampleOnly, format!("example only, rigidity open: {model}")),
        _ if small_r => (Conditional, format!("conditional: {model}")),
        _ => (Unclassified, format!("realized by {model}; no rigidity statement")),
    };
    Rigidity { status, note, conditional: small_r.then_some(SMALL_R_HYPOTHESES) }
}

fn cylinder_name(n: usize, k: usize) -> String {
    let radius = match (k, n) {
        (k, n) if k == n => String::from("1/|H|"),
        _ => format!("{k}/({n}|H|)"),
    };
    let sphere = format!("S^{k}({radius})");
    match n - k {
        0 => sphere,
        1 => format!("R x {sphere}"),
        f => format!("R^{f} x {sphere}"),
    }
}

/// When an off-ladder value is ruled out, the hypotheses that rule it out.
fn exclusion(n: usize, ratio: f64) -> Option<&'static str> {
    match n {
        3 => Some("excluded for complete hypersurfaces with constant H != 0 and constant R"),
        4 if ratio >= 2.0 / 3.0 => Some("excluded for complete hypersurfaces with constant H != 0 and R >= 2/3 H^2"),
        5 if ratio >= 5.0 / 8.0 => {
            Some("excluded for complete hypersurfaces with constant H != 0, H_4 >= 0 and R >= 5/8 H^2")
        }
        _ if n >= 3 && ratio >= 0.0 && ratio <= n as f64 / (2.0 * (n as f64 - 1.0)) => {
            Some("excluded when H H_3 >= 0 and 0 <= R <= n H^2 / (2(n-1))")
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassificationVerdict<T> {
    OnLadder {
        k: usize,
        model: CylinderModel<T>,
        rigidity: Rigidity,
    },
    OffLadder {
        /// Rung immediately below `R/H^2` (the first rung when the value lies
        /// below the whole ladder).
        nearest_k: usize,
        /// `R/H^2` minus the ratio of `nearest_k`.
        gap: T,
        /// Rung at the smallest absolute distance.
        closest_k: usize,
        exclusion: Option<&'static str>,
    },
}

/// Locates `R / H^2` on the dimension-`n` ladder.
pub fn classify<T: Field>(n: usize, h: &T, r: &T, tol: &Tolerance) -> Result<ClassificationVerdict<T>> {
    if n < 3 {
        return Err(Error::domain(format!("classification needs n >= 3, got {n}")));
    }
    if h.approx_zero(&T::one(), tol) {
        return Err(Error::domain("mean curvature must be non-zero"));
    }
    let ratio = r.clone() / h.sq();
    let ladder = scalar_ladder(n)?;
    let mut below: Option<(usize, T)> = None;
    let mut closest: Option<(usize, T)> = None;
    for rung in &ladder {
        let target = T::from_rational(&rung.ratio);
        if ratio.approx_eq(&target, tol) {
            return Ok(ClassificationVerdict::OnLadder {
                k: rung.k,
                model: cylinder_from_h(n, rung.k, h)?,
                rigidity: rigidity(n, rung.k),
            });
        }
        let gap = ratio.clone() - target;
        if below.is_none() || !gap.is_negative() {
            below = Some((rung.k, gap.clone()));
        }
        if closest.as_ref().is_none_or(|(_, g)| gap.abs() < g.abs()) {
            closest = Some((rung.k, gap));
        }
    }
    let (nearest_k, gap) = below.expect("ladder is non-empty");
    let (closest_k, _) = closest.expect("ladder is non-empty");
    Ok(ClassificationVerdict::OffLadder { nearest_k, gap, closest_k, exclusion: exclusion(n, ratio.as_f64()) })
}

/// Invariants of the cylinder's spectrum, checked against the closed forms.
pub fn cylinder_invariant_check<T: Field>(m: &CylinderModel<T>) -> Result<InvariantReport<T>> {
    let report = invariants(&m.spectrum());
    let tol = Tolerance::default();
    let h = m.mean_curvature();
    if !report.mean_curvature.approx_eq(&h, &tol) {
        return Err(Error::InvariantMismatch(format!(
            "{}: H = {:?}, closed form {:?}",
            m.label(),
            report.mean_curvature,
            h
        )));
    }
    let r = m.scalar_curvature();
    if !report.scalar_curvature.approx_eq(&r, &tol) {
        return Err(Error::InvariantMismatch(format!(
            "{}: R = {:?}, closed form {:?}",
            m.label(),
            report.scalar_curvature,
            r
        )));
    }
    Ok(report)
}

/// Endpoint values `R = 0` (`k = 1`) and `R = n H^2 / (2(n-1))` (`k = 2`).
pub fn small_scalar_endpoints(n: usize) -> (Rational, Rational) {
    (Rational::zero(), rat(n as i64, 2 * (n as i64 - 1)))
}
