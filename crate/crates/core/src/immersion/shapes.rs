//! Built-in patches with exact derivatives.
//!
//! Every coordinate of an embedding is a sum of terms
//! `coeff * prod_v f_v(u_v)` with each factor a power, sine or cosine of a
//! single parameter. That covers hyperspherical coordinates, cylinders and
//! polynomial graphs, and makes first and second derivatives a matter of
//! differentiating one factor at a time.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{DerivativeSource, PatchSample};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    Pow(u32),
    Sin,
    Cos,
}

impl Factor {
    /// Value of the `order`-th derivative at `x`.
    fn eval(&self, x: f64, order: usize) -> f64 {
        match (self, order % 4) {
            (Factor::Sin, 0) => libm::sin(x),
            (Factor::Sin, 1) => libm::cos(x),
            (Factor::Sin, 2) => -libm::sin(x),
            (Factor::Sin, _) => -libm::cos(x),
            (Factor::Cos, 0) => libm::cos(x),
            (Factor::Cos, 1) => -libm::sin(x),
            (Factor::Cos, 2) => -libm::cos(x),
            (Factor::Cos, _) => libm::sin(x),
            (Factor::Pow(e), k) => {
                let e = *e as i64;
                if (k as i64) > e {
                    return 0.0;
                }
                let mut c = 1.0;
                for j in 0..k as i64 {
                    c *= (e - j) as f64;
                }
                c * libm::pow(x, (e - k as i64) as f64)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    /// At most one factor per parameter.
    pub factors: Vec<(usize, Factor)>,
}

impl Term {
    pub fn constant(coeff: f64) -> Self {
        Term { coeff, factors: Vec::new() }
    }

    pub fn new(coeff: f64, factors: Vec<(usize, Factor)>) -> Self {
        Term { coeff, factors }
    }

    /// Mixed partial derivative; `orders[v]` is the order in parameter `v`.
    fn eval(&self, u: &[f64], orders: &[usize]) -> f64 {
        let mut acc = self.coeff;
        let mut covered = 0usize;
        for &(v, f) in &self.factors {
            acc *= f.eval(u[v], orders[v]);
            if orders[v] > 0 {
                covered += 1;
            }
        }
        let needed = orders.iter().filter(|&&k| k > 0).count();
        if covered < needed {
            // Differentiating in a parameter the term does not depend on.
            return 0.0;
        }
        acc
    }
}

/// Embedding `R^n -> R^(n+1)` built from [`Term`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticShape {
    name: String,
    n: usize,
    coords: Vec<Vec<Term>>,
}

impl AnalyticShape {
    pub fn new(name: impl Into<String>, n: usize, coords: Vec<Vec<Term>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("patch dimension must be positive"));
        }
        if coords.len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, found: coords.len() });
        }
        for t in coords.iter().flatten() {
            if let Some(&(v, _)) = t.factors.iter().find(|(v, _)| *v >= n) {
                return Err(Error::domain(format!("term uses parameter {v} of an {n}-dimensional patch")));
            }
            for (i, (v, _)) in t.factors.iter().enumerate() {
                if t.factors[..i].iter().any(|(w, _)| w == v) {
                    return Err(Error::domain(format!("term repeats parameter {v}")));
                }
            }
        }
        Ok(AnalyticShape { name: name.into(), n, coords })
    }

    /// `S^n(rho)` in hyperspherical coordinates `(u_1, ..., u_n)`: regular
    /// where every angle but the last lies in `(0, pi)`.
    pub fn sphere(n: usize, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::domain("sphere radius must be positive"));
        }
        Self::new(format!("sphere(n={n}, rho={rho})"), n, hyperspherical(n, rho, 0))
    }

    /// `R^(n-k) x S^k(r)`: linear coordinates first, then the sphere angles.
    pub fn cylinder(n: usize, k: usize, r: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::domain(format!("cylinder needs 1 <= k <= n, got k={k}, n={n}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain("cylinder radius must be positive"));
        }
        let flat = n - k;
        let mut coords: Vec<Vec<Term>> = (0..flat).map(|i| vec![Term::new(1.0, vec![(i, Factor::Pow(1))])]).collect();
        coords.extend(hyperspherical(k, r, flat));
        Self::new(format!("cylinder(n={n}, k={k}, r={r})"), n, coords)
    }

    /// Graph `u -> (u, p(u))` of a polynomial given as `(coeff, exponents)`.
    pub fn graph(n: usize, poly: &[(f64, Vec<u32>)]) -> Result<Self> {
        let mut coords: Vec<Vec<Term>> = (0..n).map(|i| vec![Term::new(1.0, vec![(i, Factor::Pow(1))])]).collect();
        let mut last = Vec::new();
        for (coeff, exps) in poly {
            if exps.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: exps.len() });
            }
            let factors = exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| (v, Factor::Pow(e))).collect();
            last.push(Term::new(*coeff, factors));
        }
        coords.push(last);
        Self::new(format!("graph(n={n})"), n, coords)
    }

    /// Graph of `|u|^2 / 2`.
    pub fn paraboloid(n: usize) -> Result<Self> {
        let poly: Vec<(f64, Vec<u32>)> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 2;
                (0.5, e)
            })
            .collect();
        Self::graph(n, &poly)
    }

    pub fn plane(n: usize) -> Result<Self> {
        Self::graph(n, &[])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check_point(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: u.len() });
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("non-finite parameter"));
        }
        Ok(())
    }

    fn derivative(&self, u: &[f64], orders: &[usize]) -> Vec<f64> {
        self.coords.iter().map(|terms| terms.iter().map(|t| t.eval(u, orders)).sum()).collect()
    }

    pub fn value(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_point(u)?;
        Ok(self.derivative(u, &vec![0; self.n]))
    }

    /// Sample with exact first and second derivatives.
    pub fn sample(&self, u: &[f64]) -> Result<PatchSample> {
        self.check_point(u)?;
        let n = self.n;
        let mut orders = vec![0; n];
        let value = self.derivative(u, &orders);
        let mut jacobian = Vec::with_capacity(n);
        for i in 0..n {
            orders[i] = 1;
            jacobian.push(self.derivative(u, &orders));
            orders[i] = 0;
        }
        let mut hessian = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in i..n {
                orders[i] += 1;
                orders[j] += 1;
                let d = self.derivative(u, &orders);
                orders[i] = 0;
                orders[j] = 0;
                hessian[j][i] = d.clone();
                hessian[i][j] = d;
            }
        }
        PatchSample::new(u.to_vec(), value, jacobian, hessian, DerivativeSource::Analytic)
    }

    /// A point where the patch is regular.
    pub fn default_point(&self) -> Vec<f64> {
        vec![1.0; self.n]
    }
}

/// Coordinates of `S^k(r)` using parameters `offset .. offset + k`.
fn hyperspherical(k: usize, r: f64, offset: usize) -> Vec<Vec<Term>> {
    (0..=k)
        .map(|i| {
            let mut factors: Vec<(usize, Factor)> = (0..i).map(|j| (offset + j, Factor::Sin)).collect();
            if i < k {
                factors.push((offset + i, Factor::Cos));
            }
            vec![Term::new(r, factors)]
        })
        .collect()
}

/// Quadratic change of parameters `u = c + A v + Q(v, v) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticMap {
    pub center: Vec<f64>,
    /// `linear[a][i] = d u_a / d v_i`
    pub linear: Vec<Vec<f64>>,
    /// `quadratic[a][i][j] = d^2 u_a / d v_i d v_j` (symmetric in `i, j`)
    pub quadratic: Vec<Vec<Vec<f64>>>,
}

impl QuadraticMap {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|a| {
                let mut x = self.center[a];
                for i in 0..n {
                    x += self.linear[a][i] * v[i];
                    for j in 0..n {
                        x += 0.5 * self.quadratic[a][i][j] * v[i] * v[j];
                    }
                }
                x
            })
            .collect()
    }

    /// `d u_a / d v_i` at `v`.
    pub fn jacobian(&self, v: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|i| self.linear[a][i] + (0..n).map(|j| self.quadratic[a][i][j] * v[j]).sum::<f64>())
                    .collect()
            })
            .collect()
    }

    /// Pull a sample taken at `u = self.apply(v)` back to the `v` chart.
    pub fn pull_back(&self, v: &[f64], at_u: &PatchSample) -> Result<PatchSample> {
        let n = self.dim();
        if at_u.jacobian.len() != n || v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: at_u.jacobian.len() });
        }
        let d = self.jacobian(v);
        let m = at_u.value.len();
        let mut jacobian = vec![vec![0.0; m]; n];
        for i in 0..n {
            for a in 0..n {
                for k in 0..m {
                    jacobian[i][k] += at_u.jacobian[a][k] * d[a][i];
                }
            }
        }
        let mut hessian = vec![vec![vec![0.0; m]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    let mut acc = 0.0;
                    for a in 0..n {
                        acc += at_u.jacobian[a][k] * self.quadratic[a][i][j];
                        for b in 0..n {
                            acc += at_u.hessian[a][b][k] * d[a][i] * d[b][j];
                        }
                    }
                    hessian[i][j][k] = acc;
                }
            }
        }
        PatchSample::new(v.to_vec(), at_u.value.clone(), jacobian, hessian, at_u.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_derivatives() {
        let x = 0.3;
        assert_eq!(Factor::Sin.eval(x, 1), libm::cos(x));
        assert_eq!(Factor::Cos.eval(x, 1), -libm::sin(x));
        assert_eq!(Factor::Sin.eval(x, 2), -libm::sin(x));
        assert_eq!(Factor::Pow(3).eval(2.0, 2), 12.0);
        assert_eq!(Factor::Pow(1).eval(2.0, 2), 0.0);
        assert_eq!(Factor::Pow(0).eval(5.0, 0), 1.0);
    }

    #[test]
    fn sphere_points_have_radius_rho() {
        let s = AnalyticShape::sphere(4, 2.0).unwrap();
        let x = s.value(&[0.4, 1.1, 2.0, -0.7]).unwrap();
        assert_eq!(x.len(), 5);
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cylinder_coordinates() {
        let c = AnalyticShape::cylinder(4, 2, 0.5).unwrap();
        let x = c.value(&[1.5, -2.0, 0.3, 0.9]).unwrap();
        assert_eq!(&x[..2], &[1.5, -2.0]);
        let r: f64 = x[2..].iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((r - 0.5).abs() < 1e-15);
        assert!(AnalyticShape::cylinder(4, 0, 1.0).is_err());
        assert!(AnalyticShape::cylinder(4, 5, 1.0).is_err());
        assert!(AnalyticShape::sphere(3, -1.0).is_err());
    }

    #[test]
    fn malformed_shapes() {
        assert!(AnalyticShape::new("bad", 2, vec![vec![]; 2]).is_err());
        assert!(AnalyticShape::new("bad", 1, vec![vec![Term::new(1.0, vec![(3, Factor::Sin)])], vec![]]).is_err());
        assert!(AnalyticShape::graph(2, &[(1.0, vec![1])]).is_err());
        assert!(AnalyticShape::plane(2).unwrap().value(&[1.0]).is_err());
    }

    #[test]
    fn graph_derivatives() {
        // p(u, v) = u^2 v + 3 v^3
        let g = AnalyticShape::graph(2, &[(1.0, vec![2, 1]), (3.0, vec![0, 3])]).unwrap();
        let s = g.sample(&[2.0, -1.0]).unwrap();
        assert_eq!(s.value, [2.0, -1.0, -4.0 - 3.0]);
        assert_eq!(s.jacobian[0], [1.0, 0.0, -4.0]);
        assert_eq!(s.jacobian[1], [0.0, 1.0, 4.0 + 9.0]);
        assert_eq!(s.hessian[0][0][2], -2.0);
        assert_eq!(s.hessian[0][1][2], 4.0);
        assert_eq!(s.hessian[1][1][2], -18.0);
    }
}
