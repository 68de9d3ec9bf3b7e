//! Shape operators of parametrized hypersurface patches.
//!
//! A [`PatchSample`] holds an embedding `f: R^n -> R^(n+1)` at a parameter
//! point together with its first and second derivatives, either exact
//! ([`shapes`]) or by central differences ([`finite_difference_lift`]). From
//! it we build the first and second fundamental forms and solve
//! `b v = lambda g v` for the principal curvatures.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::spectrum::CurvatureSpectrum;
use crate::{Error, Result};

pub mod shapes;

pub use shapes::{AnalyticShape, Factor, QuadraticMap, Term};

/// Largest accepted condition number of the Jacobian.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeSource {
    Analytic,
    FiniteDiff,
}

impl DerivativeSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            DerivativeSource::Analytic => "ANALYTIC",
            DerivativeSource::FiniteDiff => "FINITE_DIFF",
        }
    }
}

impl fmt::Display for DerivativeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchSample {
    pub point: Vec<f64>,
    pub value: Vec<f64>,
    /// `jacobian[i] = df/du_i`, each of length `n + 1`.
    pub jacobian: Vec<Vec<f64>>,
    /// `hessian[i][j] = d^2 f / du_i du_j`.
    pub hessian: Vec<Vec<Vec<f64>>>,
    pub source: DerivativeSource,
}

impl PatchSample {
    pub fn new(
        point: Vec<f64>,
        value: Vec<f64>,
        jacobian: Vec<Vec<f64>>,
        hessian: Vec<Vec<Vec<f64>>>,
        source: DerivativeSource,
    ) -> Result<Self> {
        let n = point.len();
        if n == 0 {
            return Err(Error::domain("empty parameter point"));
        }
        let m = n + 1;
        let dim = |found: usize, expected: usize| {
            if found == expected {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected, found })
            }
        };
        dim(value.len(), m)?;
        dim(jacobian.len(), n)?;
        for col in &jacobian {
            dim(col.len(), m)?;
        }
        dim(hessian.len(), n)?;
        for row in &hessian {
            dim(row.len(), n)?;
            for h in row {
                dim(h.len(), m)?;
            }
        }
        let finite = value
            .iter()
            .chain(jacobian.iter().flatten())
            .chain(hessian.iter().flatten().flatten())
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Numerical("non-finite derivative data".to_string()));
        }
        Ok(PatchSample { point, value, jacobian, hessian, source })
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalForms {
    pub g: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub normal: Vec<f64>,
    /// Condition number of the Jacobian.
    pub condition: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Generalized cross product of the Jacobian columns: the `k`-th entry is
/// the signed minor with row `k` deleted.
fn cofactor_normal(jac: &DMatrix<f64>) -> Vec<f64> {
    let (m, n) = jac.shape();
    (0..m)
        .map(|k| {
            let minor = jac.clone().remove_row(k);
            debug_assert_eq!(minor.shape(), (n, n));
            let sign = if (k + n) % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        })
        .collect()
}

pub fn fundamental_forms(p: &PatchSample) -> Result<FundamentalForms> {
    let n = p.dim();
    let m = n + 1;
    let jac = DMatrix::from_fn(m, n, |r, c| p.jacobian[c][r]);
    let g = jac.transpose() * &jac;
    let eig = SymmetricEigen::try_new(g.clone(), 1e-14, 10_000)
        .ok_or_else(|| Error::Numerical("eigen-solver did not converge on the metric".to_string()))?;
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if min > 0.0 { libm::sqrt(max / min) } else { f64::INFINITY };
    if condition.is_nan() || condition >= MAX_CONDITION {
        return Err(Error::SingularPatch(format!(
            "Jacobian is rank deficient at {:?} (condition number {condition:e})",
            p.point
        )));
    }
    let mut normal = cofactor_normal(&jac);
    let len = libm::sqrt(dot(&normal, &normal));
    if len.is_nan() || len <= 0.0 || !len.is_finite() {
        return Err(Error::SingularPatch("no normal direction".to_string()));
    }
    for v in &mut normal {
        *v /= len;
    }
    let mut b = DMatrix::from_fn(n, n, |i, j| dot(&p.hessian[i][j], &normal));
    b = (&b + b.transpose()) * 0.5;
    // Orientation: mean curvature tr(g^-1 b) >= 0.
    let chol =
        g.clone().cholesky().ok_or_else(|| Error::SingularPatch("metric is not positive definite".to_string()))?;
    let trace = (chol.solve(&b)).trace();
    if trace < 0.0 {
        b = -b;
        for v in &mut normal {
            *v = -*v;
        }
    }
    Ok(FundamentalForms { g, b, normal, condition })
}

/// Eigenvalues of `b v = lambda g v`, by reducing with the Cholesky factor of
/// `g` to an ordinary symmetric problem.
pub fn generalized_eigenvalues(g: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = g.nrows();
    if g.shape() != (n, n) || b.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: b.nrows() });
    }
    let chol =
        g.clone().cholesky().ok_or_else(|| Error::SingularPatch("metric is not positive definite".to_string()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Numerical("triangular solve failed".to_string()))?;
    let c = &linv * b * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(c.clone(), 1e-15, 10_000).ok_or_else(|| {
        Error::Numerical(format!("symmetric eigen-solver did not converge (n = {n}, |C| = {:e})", c.norm()))
    })?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn principal_curvatures(p: &PatchSample) -> Result<CurvatureSpectrum<f64>> {
    let forms = fundamental_forms(p)?;
    let values = generalized_eigenvalues(&forms.g, &forms.b)?;
    CurvatureSpectrum::new(values, 0.0)
}

/// Step sizes for the central differences; `None` picks the defaults
/// `eps^(1/3) (1 + |u_i|)` for first and `eps^(1/4) (1 + |u_i|)` for second
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FdSteps {
    pub first: Option<f64>,
    pub second: Option<f64>,
}

impl FdSteps {
    /// Same step for both orders.
    pub fn uniform(h: f64) -> Self {
        FdSteps { first: Some(h), second: Some(h) }
    }

    /// Per-coordinate steps for first and second derivatives.
    fn resolve(&self, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let cbrt_eps = libm::cbrt(f64::EPSILON);
        let qrt_eps = libm::sqrt(libm::sqrt(f64::EPSILON));
        let mut first = Vec::with_capacity(u.len());
        let mut second = Vec::with_capacity(u.len());
        for &x in u {
            let scale = 1.0 + libm::fabs(x);
            let h1 = self.first.unwrap_or(cbrt_eps * scale);
            let h2 = self.second.unwrap_or(qrt_eps * scale);
            for h in [h1, h2] {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::domain(format!("finite-difference step must be positive, got {h}")));
                }
            }
            first.push(h1);
            second.push(h2);
        }
        Ok((first, second))
    }
}

/// Build a sample from an embedding callback by central differences.
pub fn finite_difference_lift<F, E>(mut f: F, u: &[f64], steps: FdSteps) -> Result<PatchSample>
where
    F: FnMut(&[f64]) -> core::result::Result<Vec<f64>, E>,
    E: fmt::Display,
{
    let n = u.len();
    if n == 0 {
        return Err(Error::domain("empty parameter point"));
    }
    let (h1, h2) = steps.resolve(u)?;
    let m = n + 1;
    let mut call = |x: &[f64]| -> Result<Vec<f64>> {
        let y = f(x).map_err(|e| Error::Callback(e.to_string()))?;
        if y.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: y.len() });
        }
        Ok(y)
    };
    let shifted = |d: &[(usize, f64)]| {
        let mut x = u.to_vec();
        for &(i, s) in d {
            x[i] += s;
        }
        x
    };
    let value = call(u)?;
    let mut jacobian = Vec::with_capacity(n);
    for i in 0..n {
        let p = call(&shifted(&[(i, h1[i])]))?;
        let q = call(&shifted(&[(i, -h1[i])]))?;
        jacobian.push(p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * h1[i])).collect::<Vec<_>>());
    }
    let mut hessian = vec![vec![vec![0.0; m]; n]; n];
    for i in 0..n {
        let hi = h2[i];
        let p = call(&shifted(&[(i, hi)]))?;
        let q = call(&shifted(&[(i, -hi)]))?;
        for k in 0..m {
            hessian[i][i][k] = (p[k] - 2.0 * value[k] + q[k]) / (hi * hi);
        }
        for j in i + 1..n {
            let hj = h2[j];
            let pp = call(&shifted(&[(i, hi), (j, hj)]))?;
            let pm = call(&shifted(&[(i, hi), (j, -hj)]))?;
            let mp = call(&shifted(&[(i, -hi), (j, hj)]))?;
            let mm = call(&shifted(&[(i, -hi), (j, -hj)]))?;
            for k in 0..m {
                let d = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * hi * hj);
                hessian[i][j][k] = d;
                hessian[j][i][k] = d;
            }
        }
    }
    PatchSample::new(u.to_vec(), value, jacobian, hessian, DerivativeSource::FiniteDiff)
}

/// Shape matrix `g^-1 b` in the parameter basis (not symmetric in general).
pub fn shape_operator(forms: &FundamentalForms) -> Result<DMatrix<f64>> {
    let chol = forms
        .g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularPatch("metric is not positive definite".to_string()))?;
    Ok(chol.solve(&forms.b))
}

/// Residuals `<J_i, N>` of the normal against the tangent columns.
pub fn normal_residual(p: &PatchSample, forms: &FundamentalForms) -> f64 {
    p.jacobian.iter().map(|c| libm::fabs(dot(c, &forms.normal))).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::invariants;

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn unit_sphere_has_b_equal_g() {
        let s = AnalyticShape::sphere(4, 1.0).unwrap();
        let p = s.sample(&[0.7, 1.2, 2.1, 0.4]).unwrap();
        let f = fundamental_forms(&p).unwrap();
        assert!((&f.b - &f.g).norm() < 1e-12);
        assert!(normal_residual(&p, &f) < 1e-12);
        let k = principal_curvatures(&p).unwrap();
        assert!(max_diff(k.lambdas(), &[1.0; 4]) < 1e-12);
    }

    #[test]
    fn sphere_radius_two() {
        let s = AnalyticShape::sphere(4, 2.0).unwrap();
        let k = principal_curvatures(&s.sample(&[1.0, 1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!(max_diff(k.lambdas(), &[0.5; 4]) < 1e-8);
        let inv = invariants(&k);
        assert!((inv.scalar_curvature - 0.25).abs() < 1e-7 * 0.25);
        assert!(inv.norm_phi2.abs() < 1e-7);
    }

    #[test]
    fn cylinders() {
        let c = AnalyticShape::cylinder(4, 2, 0.5).unwrap();
        let k = principal_curvatures(&c.sample(&[0.3, -1.0, 1.1, 0.2]).unwrap()).unwrap();
        assert!(max_diff(k.lambdas(), &[0.0, 0.0, 2.0, 2.0]) < 1e-8);
        assert!((invariants(&k).scalar_curvature - 2.0 / 3.0).abs() < 1e-7);

        let c = AnalyticShape::cylinder(4, 3, 0.75).unwrap();
        let p = c.sample(&[0.0, 1.0, 1.0, 1.0]).unwrap();
        let f = fundamental_forms(&p).unwrap();
        assert!(f.b.row(0).norm() < 1e-14 && f.b.column(0).norm() < 1e-14);
        let k = principal_curvatures(&p).unwrap();
        assert!(max_diff(k.lambdas(), &[0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0]) < 1e-8);
    }

    #[test]
    fn plane_and_paraboloid() {
        let p = AnalyticShape::plane(3).unwrap().sample(&[0.2, 0.5, -1.0]).unwrap();
        assert_eq!(fundamental_forms(&p).unwrap().b.norm(), 0.0);
        let q = AnalyticShape::paraboloid(3).unwrap().sample(&[0.0; 3]).unwrap();
        let k = principal_curvatures(&q).unwrap();
        assert!(max_diff(k.lambdas(), &[1.0; 3]) < 1e-14);
    }

    #[test]
    fn orientation_makes_mean_curvature_non_negative() {
        // Graph of -|u|^2/2 curves the other way.
        let g = AnalyticShape::graph(2, &[(-0.5, vec![2, 0]), (-0.5, vec![0, 2])]).unwrap();
        let k = principal_curvatures(&g.sample(&[0.1, -0.2]).unwrap()).unwrap();
        assert!(k.mean_curvature() > 0.0);
    }

    #[test]
    fn singular_patch() {
        // Sphere coordinates degenerate at u_1 = 0.
        let s = AnalyticShape::sphere(3, 1.0).unwrap();
        let p = s.sample(&[0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(fundamental_forms(&p), Err(Error::SingularPatch(_))));
    }

    #[test]
    fn finite_differences_match_analytic() {
        let s = AnalyticShape::sphere(4, 2.0).unwrap();
        let u = [0.9, 1.3, 0.6, 2.0];
        let a = s.sample(&u).unwrap();
        let d = finite_difference_lift(|x| s.value(x), &u, FdSteps::default()).unwrap();
        assert_eq!(d.source, DerivativeSource::FiniteDiff);
        for i in 0..4 {
            assert!(max_diff(&a.jacobian[i], &d.jacobian[i]) < 1e-10);
        }
        let ka = principal_curvatures(&a).unwrap();
        let kd = principal_curvatures(&d).unwrap();
        assert!(max_diff(ka.lambdas(), kd.lambdas()) < 1e-5);
    }

    #[test]
    fn linear_embedding_has_no_second_derivatives() {
        let lin = |x: &[f64]| -> core::result::Result<Vec<f64>, &'static str> {
            Ok(vec![x[0] + 2.0 * x[1], x[1] - x[0], 3.0 * x[0]])
        };
        let d = finite_difference_lift(lin, &[0.5, -0.25], FdSteps::default()).unwrap();
        assert!(d.hessian.iter().flatten().flatten().all(|v| v.abs() < 1e-7));
    }

    #[test]
    fn bad_steps_and_callbacks() {
        let s = AnalyticShape::sphere(2, 1.0).unwrap();
        assert!(matches!(
            finite_difference_lift(|x| s.value(x), &[1.0, 1.0], FdSteps::uniform(0.0)),
            Err(Error::Domain(_))
        ));
        let failing = |_: &[f64]| -> core::result::Result<Vec<f64>, &'static str> { Err("child exited") };
        assert!(matches!(
            finite_difference_lift(failing, &[1.0, 1.0], FdSteps::default()),
            Err(Error::Callback(m)) if m == "child exited"
        ));
        let short = |_: &[f64]| -> core::result::Result<Vec<f64>, &'static str> { Ok(vec![1.0]) };
        assert!(matches!(
            finite_difference_lift(short, &[1.0, 1.0], FdSteps::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reparametrization_invariance() {
        let s = AnalyticShape::sphere(3, 1.5).unwrap();
        let map = QuadraticMap {
            center: vec![1.0, 1.2, 0.4],
            linear: vec![vec![1.0, 0.2, 0.0], vec![0.0, 0.9, 0.1], vec![0.3, 0.0, 1.1]],
            quadratic: vec![
                vec![vec![0.2, 0.1, 0.0], vec![0.1, 0.0, 0.0], vec![0.0, 0.0, -0.3]],
                vec![vec![0.0, 0.0, 0.1], vec![0.0, 0.4, 0.0], vec![0.1, 0.0, 0.0]],
                vec![vec![0.1, 0.0, 0.0], vec![0.0, -0.2, 0.05], vec![0.0, 0.05, 0.0]],
            ],
        };
        let v = [0.1, -0.2, 0.15];
        let u = map.apply(&v);
        let direct = principal_curvatures(&s.sample(&u).unwrap()).unwrap();
        let pulled = map.pull_back(&v, &s.sample(&u).unwrap()).unwrap();
        let k = principal_curvatures(&pulled).unwrap();
        for (a, b) in direct.lambdas().iter().zip(k.lambdas()) {
            assert!((a - b).abs() < 1e-7 * a.abs());
        }
        // Metric changed, curvatures did not.
        assert!(
            (fundamental_forms(&pulled).unwrap().g - fundamental_forms(&s.sample(&u).unwrap()).unwrap().g).norm()
                > 1e-3
        );
    }
}
