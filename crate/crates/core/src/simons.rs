//! Right-hand sides of the Laplacian formula for `|A|^2` and the bracket that
//! controls its sign for constant mean curvature.
//!
//! `|nabla A|^2` and `Hess H(e_i, e_i)` are caller supplied point data; this
//! module never differentiates anything. Orientation convention: `H >= 0`.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Signed;

use crate::scalar::{Field, Rational};
use crate::spectrum::{invariants, CurvatureSpectrum};
use crate::{Error, Result};

/// Point data entering the general formula. `hess_h` and `sectional` are
/// indexed like the spectrum, in ascending order of curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct SimonsPointData<T> {
    spectrum: CurvatureSpectrum<T>,
    grad_a2: T,
    hess_h: Vec<T>,
    sectional: Vec<Vec<T>>,
    gauss: bool,
}

impl<T: Field> SimonsPointData<T> {
    /// Explicit sectional curvatures `K_ij`; only `i != j` entries are read and
    /// the table must be symmetric.
    pub fn new(spectrum: CurvatureSpectrum<T>, grad_a2: T, hess_h: Vec<T>, sectional: Vec<Vec<T>>) -> Result<Self> {
        let n = spectrum.dim();
        check_common(n, &grad_a2, &hess_h)?;
        if sectional.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: sectional.len() });
        }
        for row in &sectional {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if sectional[i][j] != sectional[j][i] {
                    return Err(Error::domain(format!("K is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SimonsPointData { spectrum, grad_a2, hess_h, sectional, gauss: false })
    }

    /// Sectional curvatures from the Gauss equation, `K_ij = c + lambda_i lambda_j`.
    pub fn with_gauss(spectrum: CurvatureSpectrum<T>, grad_a2: T, hess_h: Vec<T>) -> Result<Self> {
        let n = spectrum.dim();
        check_common(n, &grad_a2, &hess_h)?;
        let l = spectrum.lambdas();
        let c = spectrum.ambient_curvature().clone();
        let sectional = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::zero() } else { c.clone() + l[i].clone() * l[j].clone() }).collect())
            .collect();
        Ok(SimonsPointData { spectrum, grad_a2, hess_h, sectional, gauss: true })
    }

    pub fn spectrum(&self) -> &CurvatureSpectrum<T> {
        &self.spectrum
    }

    pub fn grad_a2(&self) -> &T {
        &self.grad_a2
    }

    pub fn hess_h(&self) -> &[T] {
        &self.hess_h
    }

    pub fn sectional(&self) -> &[Vec<T>] {
        &self.sectional
    }

    pub fn uses_gauss_equation(&self) -> bool {
        self.gauss
    }
}

fn check_common<T: Field>(n: usize, grad_a2: &T, hess_h: &[T]) -> Result<()> {
    if hess_h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: hess_h.len() });
    }
    if grad_a2.is_negative() {
        return Err(Error::domain("|nabla A|^2 must be non-negative"));
    }
    Ok(())
}

fn hessian_term<T: Field>(s: &CurvatureSpectrum<T>, hess_h: &[T]) -> T {
    let n = T::from_int(s.dim() as i64);
    n * s.lambdas().iter().zip(hess_h).fold(T::zero(), |acc, (l, h)| acc + l.clone() * h.clone())
}

/// `|nabla A|^2 + n sum lambda_i H_ii + sum_{i<j} (lambda_i - lambda_j)^2 K_ij`.
pub fn simons_rhs_general<T: Field>(d: &SimonsPointData<T>) -> T {
    let l = d.spectrum.lambdas();
    let n = l.len();
    let mut pairs = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            pairs = pairs + (l[i].clone() - l[j].clone()).sq() * d.sectional[i][j].clone();
        }
    }
    d.grad_a2.clone() + hessian_term(&d.spectrum, &d.hess_h) + pairs
}

/// Space form version:
/// `|nabla A|^2 + n sum lambda_i H_ii + nc(|A|^2 - nH^2) + nH tr A^3 - |A|^4`.
pub fn simons_rhs_spaceform<T: Field>(s: &CurvatureSpectrum<T>, grad_a2: &T, hess_h: &[T]) -> Result<T> {
    check_common(s.dim(), grad_a2, hess_h)?;
    let n = T::from_int(s.dim() as i64);
    let h = s.mean_curvature();
    let a2 = s.norm_a2();
    let c = s.ambient_curvature().clone();
    Ok(grad_a2.clone()
        + hessian_term(s, hess_h)
        + n.clone() * c * (a2.clone() - n.clone() * h.sq())
        + n * h * s.tr_a3()
        - a2.sq())
}

/// `sum_{i<j} (lambda_i - lambda_j)^2 lambda_i lambda_j`, the Euclidean pair sum
/// that remains when `|A|^2` is constant.
pub fn pair_sum<T: Field>(lambdas: &[T]) -> T {
    let n = lambdas.len();
    let mut acc = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&lambdas[i], &lambdas[j]);
            acc = acc + (a.clone() - b.clone()).sq() * a.clone() * b.clone();
        }
    }
    acc
}

fn check_bracket_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(format!("the bracket needs n >= 3, got {n}")));
    }
    Ok(())
}

/// `nc + nH^2 - (n(n-2)/sqrt(n(n-1))) |H| |phi| - |phi|^2`.
pub fn cmc_bracket(n: usize, c: f64, h: f64, norm_phi: f64) -> Result<f64> {
    check_bracket_dim(n)?;
    if norm_phi < 0.0 {
        return Err(Error::domain("|phi| must be non-negative"));
    }
    let nf = n as f64;
    let coef = nf * (nf - 2.0) / libm::sqrt(nf * (nf - 1.0));
    Ok(nf * c + nf * h * h - coef * libm::fabs(h) * norm_phi - norm_phi * norm_phi)
}

/// Exact sign of the bracket, with `|phi|` given through `|phi|^2`.
///
/// Writing the bracket as `a - b sqrt(q)` with `a = nc + nH^2 - |phi|^2`,
/// `b = n(n-2)|H| >= 0` and `q = |phi|^2 / (n(n-1))`, the sign follows from
/// the sign of `a` and a comparison of `a^2` with `b^2 q`.
pub fn cmc_bracket_sign(n: usize, c: &Rational, h: &Rational, norm_phi2: &Rational) -> Result<Ordering> {
    check_bracket_dim(n)?;
    if norm_phi2.is_negative() {
        return Err(Error::domain("|phi|^2 must be non-negative"));
    }
    let nn = Rational::from_int(n as i64);
    let a = &nn * c + &nn * h * h - norm_phi2;
    let b = &nn * Rational::from_int(n as i64 - 2) * h.abs();
    let q = norm_phi2 / (&nn * (&nn - Rational::from_int(1)));
    let b2q = &b * &b * q;
    if a.is_negative() {
        // a < 0 and b sqrt(q) >= 0
        return Ok(Ordering::Less);
    }
    let a2 = &a * &a;
    Ok(a2.cmp(&b2q))
}

/// The identity behind the bracket: for constant `H` and `Hess H = 0`,
/// `rhs = |nabla A|^2 + nH tr phi^3 + |phi|^2 (nc + nH^2 - |phi|^2)`.
/// Returns `(rhs_spaceform, decomposed)`; both agree identically.
pub fn cmc_decomposition<T: Field>(s: &CurvatureSpectrum<T>, grad_a2: &T) -> Result<(T, T)> {
    let n = s.dim();
    let zeros = alloc::vec![T::zero(); n];
    let rhs = simons_rhs_spaceform(s, grad_a2, &zeros)?;
    let r = invariants(s);
    let nn = T::from_int(n as i64);
    let c = s.ambient_curvature().clone();
    let decomposed = grad_a2.clone()
        + nn.clone() * r.mean_curvature.clone() * r.tr_phi3.clone()
        + r.norm_phi2.clone() * (nn.clone() * c + nn * r.mean_curvature.sq() - r.norm_phi2.clone());
    Ok((rhs, decomposed))
}

/// Lower bound `|nabla A|^2 + |phi|^2 * bracket` from the cubic bound, in floating
/// point.
pub fn cmc_lower_bound(s: &CurvatureSpectrum<f64>, grad_a2: f64) -> Result<f64> {
    let r = invariants(s);
    let phi = libm::sqrt(r.norm_phi2.max(0.0));
    let bracket = cmc_bracket(s.dim(), *s.ambient_curvature(), r.mean_curvature, phi)?;
    Ok(grad_a2 + r.norm_phi2 * bracket)
}

/// `true` when the exact bracket vanishes.
pub fn bracket_vanishes(n: usize, c: &Rational, h: &Rational, norm_phi2: &Rational) -> Result<bool> {
    Ok(cmc_bracket_sign(n, c, h, norm_phi2)? == Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| rat(a, 1)).collect()
    }

    fn zeros(n: usize) -> Vec<Rational> {
        alloc::vec![rat(0, 1); n]
    }

    #[test]
    fn cylinder_and_sphere_vanish() {
        let l = alloc::vec![rat(0, 1), rat(4, 3), rat(4, 3), rat(4, 3)];
        let s = CurvatureSpectrum::euclidean(l).unwrap();
        let d = SimonsPointData::with_gauss(s, rat(0, 1), zeros(4)).unwrap();
        assert_eq!(simons_rhs_general(&d), rat(0, 1));

        let s = CurvatureSpectrum::euclidean(ints(&[1, 1, 1, 1])).unwrap();
        let d = SimonsPointData::with_gauss(s, rat(0, 1), zeros(4)).unwrap();
        assert_eq!(simons_rhs_general(&d), rat(0, 1));
    }

    #[test]
    fn direct_pair_sum() {
        // pairs (1,2): 1*2, (1,3): 4*3, (2,3): 1*6
        let s = CurvatureSpectrum::euclidean(ints(&[1, 2, 3])).unwrap();
        let d = SimonsPointData::with_gauss(s.clone(), rat(5, 1), zeros(3)).unwrap();
        assert_eq!(simons_rhs_general(&d), rat(25, 1));
        assert_eq!(simons_rhs_spaceform(&s, &rat(5, 1), &zeros(3)).unwrap(), rat(25, 1));
        assert_eq!(pair_sum(s.lambdas()), rat(20, 1));
    }

    #[test]
    fn spaceform_examples() {
        let h = rat(3, 2);
        let s = CurvatureSpectrum::euclidean(alloc::vec![h.clone(); 5]).unwrap();
        assert_eq!(simons_rhs_spaceform(&s, &rat(0, 1), &zeros(5)).unwrap(), rat(0, 1));
        let l = alloc::vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(5, 2), rat(5, 2)];
        let s = CurvatureSpectrum::euclidean(l).unwrap();
        assert_eq!(simons_rhs_spaceform(&s, &rat(0, 1), &zeros(5)).unwrap(), rat(0, 1));
    }

    #[test]
    fn explicit_sectional_table() {
        let s = CurvatureSpectrum::new(ints(&[1, 2, 3]), rat(1, 1)).unwrap();
        let k = alloc::vec![ints(&[0, 3, 4]), ints(&[3, 0, 7]), ints(&[4, 7, 0])];
        let d = SimonsPointData::new(s.clone(), rat(0, 1), zeros(3), k).unwrap();
        let gauss = SimonsPointData::with_gauss(s.clone(), rat(0, 1), zeros(3)).unwrap();
        assert_eq!(simons_rhs_general(&d), simons_rhs_general(&gauss));
        assert_eq!(simons_rhs_general(&d), simons_rhs_spaceform(&s, &rat(0, 1), &zeros(3)).unwrap());
        let bad = alloc::vec![ints(&[0, 3, 4]), ints(&[2, 0, 7]), ints(&[4, 7, 0])];
        assert!(SimonsPointData::new(s.clone(), rat(0, 1), zeros(3), bad).is_err());
        assert!(matches!(
            SimonsPointData::with_gauss(s.clone(), rat(0, 1), zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(SimonsPointData::with_gauss(s, rat(-1, 1), zeros(3)).is_err());
    }

    #[test]
    fn brackets() {
        let b = cmc_bracket(4, 0.0, 1.0, 2.0 / 3f64.sqrt()).unwrap();
        assert!(b.abs() < 1e-12, "{b}");
        let b = cmc_bracket(5, 0.0, 1.0, 5f64.sqrt() / 2.0).unwrap();
        assert!(b.abs() < 1e-12, "{b}");
        assert_eq!(cmc_bracket(4, 0.0, 1.0, 0.0).unwrap(), 4.0);
        assert!(cmc_bracket(2, 0.0, 1.0, 0.0).is_err());
        assert!(cmc_bracket(4, 0.0, 1.0, -1.0).is_err());

        let z = rat(0, 1);
        assert_eq!(cmc_bracket_sign(4, &z, &rat(1, 1), &rat(4, 3)).unwrap(), Ordering::Equal);
        assert_eq!(cmc_bracket_sign(5, &z, &rat(1, 1), &rat(5, 4)).unwrap(), Ordering::Equal);
        assert_eq!(cmc_bracket_sign(4, &z, &rat(1, 1), &z).unwrap(), Ordering::Greater);
        assert_eq!(cmc_bracket_sign(4, &z, &rat(1, 1), &rat(2, 1)).unwrap(), Ordering::Less);
        assert_eq!(cmc_bracket_sign(4, &z, &rat(1, 1), &rat(1, 1)).unwrap(), Ordering::Greater);
        // scaling: |phi|^2 = 4/3 H^2 with H = 2
        assert_eq!(cmc_bracket_sign(4, &z, &rat(-2, 1), &rat(16, 3)).unwrap(), Ordering::Equal);
        assert!(bracket_vanishes(5, &z, &rat(1, 3), &rat(5, 36)).unwrap());
        assert!(cmc_bracket_sign(2, &z, &z, &z).is_err());
    }

    #[test]
    fn decomposition_is_an_identity() {
        let s = CurvatureSpectrum::new(alloc::vec![rat(-1, 2), rat(1, 3), rat(2, 1), rat(7, 5)], rat(-1, 4)).unwrap();
        let (a, b) = cmc_decomposition(&s, &rat(3, 7)).unwrap();
        assert_eq!(a, b);
    }
}
