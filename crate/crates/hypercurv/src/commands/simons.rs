use std::cmp::Ordering;

use hypercurv_core::scalar::{Field, Rational, Regime, Tolerance};
use hypercurv_core::simons::{
    cmc_bracket, cmc_bracket_sign, cmc_decomposition, simons_rhs_general, simons_rhs_spaceform, SimonsPointData,
};
use hypercurv_core::spectrum::invariants;
use hypercurv_core::Error;
use serde::{Deserialize, Serialize};

use super::{finish, Outcome};
use crate::cli::SimonsArgs;
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{pass_fail, yes_no, Report, Table};
use crate::schema::{format_float, get_all, read_json, Emit, Num, SimonsInput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimonsReport {
    pub regime: String,
    pub n: usize,
    /// Sectional curvatures taken from the Gauss equation.
    pub gauss: bool,
    /// The supplied table equals `c + l_i l_j` off the diagonal.
    pub sectional_matches_gauss: bool,
    pub rhs_general: Num,
    pub rhs_spaceform: Num,
    pub difference: Num,
    /// Present when `Hess H = 0`.
    pub cmc: Option<CmcJson>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmcJson {
    pub rhs: Num,
    pub decomposed: Num,
    pub residual: Num,
    pub bracket: Option<BracketJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketJson {
    /// `negative`, `zero` or `positive`; exact in the exact regime.
    pub sign: String,
    pub value_approx: f64,
}

fn sign_name(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "negative",
        Ordering::Equal => "zero",
        Ordering::Greater => "positive",
    }
}

/// The bracket is irrational in general, so each regime evaluates it its own way.
pub trait Bracket: Emit {
    fn bracket(n: usize, c: &Self, h: &Self, norm_phi2: &Self, tol: &Tolerance) -> CliResult<BracketJson>;
}

impl Bracket for Rational {
    fn bracket(n: usize, c: &Self, h: &Self, norm_phi2: &Self, _tol: &Tolerance) -> CliResult<BracketJson> {
        let sign = cmc_bracket_sign(n, c, h, norm_phi2)?;
        let value = cmc_bracket(n, c.as_f64(), h.as_f64(), norm_phi2.as_f64().max(0.0).sqrt())?;
        let value = if sign == Ordering::Equal { 0.0 } else { value };
        Ok(BracketJson { sign: sign_name(sign).into(), value_approx: value })
    }
}

impl Bracket for f64 {
    fn bracket(n: usize, c: &Self, h: &Self, norm_phi2: &Self, tol: &Tolerance) -> CliResult<BracketJson> {
        let value = cmc_bracket(n, *c, *h, norm_phi2.max(0.0).sqrt())?;
        let scale = n as f64 * (c.abs() + h * h) + norm_phi2.abs();
        let sign = if tol.is_zero(value, scale) { Ordering::Equal } else { value.total_cmp(&0.0) };
        Ok(BracketJson { sign: sign_name(sign).into(), value_approx: value })
    }
}

fn small<T: Field>(x: &T, scale: f64, tol: &Tolerance) -> bool {
    match T::REGIME {
        Regime::Exact => x.is_zero(),
        Regime::Float => tol.is_zero(x.as_f64(), scale),
    }
}

/// Input positions in ascending order of curvature. The spectrum is stored
/// sorted (stably), so the Hessian diagonal and the sectional table are
/// permuted the same way to stay paired with their principal directions.
fn ascending_order<T: Field>(lambdas: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].partial_cmp(&lambdas[b]).unwrap_or(Ordering::Equal));
    order
}

pub fn build<T: Bracket>(input: &SimonsInput, gauss: bool, tol: &Tolerance) -> CliResult<SimonsReport> {
    let sp = input.spectrum.spectrum::<T>()?;
    let n = sp.dim();
    let grad: T = input.grad_a2.get()?;
    let raw: Vec<T> = get_all(&input.spectrum.lambdas)?;
    let order = ascending_order(&raw);
    let hess: Vec<T> = get_all(&input.hess_h)?;
    if hess.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: hess.len() }.into());
    }
    let hess: Vec<T> = order.iter().map(|&i| hess[i].clone()).collect();
    let data = match (&input.sectional, gauss) {
        (Some(_), true) => return Err(CliError::usage("--gauss replaces the sectional table; drop one of them")),
        (None, false) => {
            return Err(CliError::usage("the input has no sectional table; pass --gauss to use c + l_i l_j"))
        }
        (None, true) => SimonsPointData::with_gauss(sp.clone(), grad.clone(), hess.clone())?,
        (Some(k), false) => {
            let table = k.iter().map(|row| get_all(row)).collect::<CliResult<Vec<Vec<T>>>>()?;
            if table.len() != n || table.iter().any(|row| row.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: table.len() }.into());
            }
            let table = order.iter().map(|&a| order.iter().map(|&b| table[a][b].clone()).collect()).collect();
            SimonsPointData::new(sp.clone(), grad.clone(), hess.clone(), table)?
        }
    };
    let l = sp.lambdas();
    let c = sp.ambient_curvature();
    let matches_gauss =
        (0..n).all(|i| (0..n).all(|j| i == j || data.sectional()[i][j] == c.clone() + l[i].clone() * l[j].clone()));
    let general = simons_rhs_general(&data);
    let spaceform = simons_rhs_spaceform(&sp, &grad, &hess)?;
    let difference = general.clone() - spaceform.clone();

    let inv = invariants(&sp);
    let scale = (1.0 + inv.norm_a2.as_f64() + c.as_f64().abs()).powi(2) * (n * n) as f64 + grad.as_f64().abs();
    let equivalent = small(&difference, scale, tol);

    let cmc = if hess.iter().all(|x| x.is_zero()) {
        let (rhs, decomposed) = cmc_decomposition(&sp, &grad)?;
        let residual = rhs.clone() - decomposed.clone();
        let bracket = if n >= 3 { Some(T::bracket(n, c, &inv.mean_curvature, &inv.norm_phi2, tol)?) } else { None };
        Some((rhs, decomposed, residual, bracket))
    } else {
        None
    };
    let decomposition_ok = cmc.as_ref().is_none_or(|(_, _, res, _)| small(res, scale, tol));
    let pass = decomposition_ok && (!matches_gauss || equivalent);
    Ok(SimonsReport {
        regime: T::REGIME.to_string(),
        n,
        gauss: data.uses_gauss_equation(),
        sectional_matches_gauss: matches_gauss,
        rhs_general: general.emit(),
        rhs_spaceform: spaceform.emit(),
        difference: difference.emit(),
        cmc: cmc.map(|(rhs, decomposed, residual, bracket)| CmcJson {
            rhs: rhs.emit(),
            decomposed: decomposed.emit(),
            residual: residual.emit(),
            bracket,
        }),
        pass,
    })
}

impl Report for SimonsReport {
    fn table(&self) -> Table {
        let mut t = Table::fields();
        t.field("regime", self.regime.clone())
            .field("n", self.n.to_string())
            .field("gauss", yes_no(self.gauss))
            .field("sectional matches gauss", yes_no(self.sectional_matches_gauss))
            .field("rhs general", self.rhs_general.text())
            .field("rhs space form", self.rhs_spaceform.text())
            .field("difference", self.difference.text());
        if let Some(c) = &self.cmc {
            t.field("cmc rhs", c.rhs.text())
                .field("cmc decomposed", c.decomposed.text())
                .field("cmc residual", c.residual.text());
            if let Some(b) = &c.bracket {
                t.field("bracket sign", b.sign.clone()).field("bracket", format_float(b.value_approx));
            }
        }
        t.field("status", pass_fail(self.pass));
        t
    }

    fn passed(&self) -> bool {
        self.pass
    }
}

pub fn run(args: &SimonsArgs, settings: &Settings) -> CliResult<Outcome> {
    let input: SimonsInput = read_json(&args.input)?;
    let regime = settings.regime.or(input.spectrum.regime.map(Into::into)).unwrap_or(Regime::Exact);
    let tol = &settings.tolerance;
    let report = match regime {
        Regime::Exact => build::<Rational>(&input, args.gauss, tol)?,
        Regime::Float => build::<f64>(&input, args.gauss, tol)?,
    };
    finish(&report, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_json;

    fn input(text: &str) -> SimonsInput {
        parse_json(text, "t").unwrap()
    }

    #[test]
    fn cylinder_vanishes_with_zero_bracket() {
        let i =
            input(r#"{"spectrum": {"lambdas": ["0", "2", "2", "2"]}, "grad_a2": "0", "hess_h": ["0", "0", "0", "0"]}"#);
        let r = build::<Rational>(&i, true, &Tolerance::default()).unwrap();
        assert_eq!(r.rhs_general, Num::Exact("0".into()));
        assert_eq!(r.difference, Num::Exact("0".into()));
        assert_eq!(r.cmc.unwrap().bracket.unwrap().sign, "zero");
        assert!(r.pass);
    }

    #[test]
    fn general_and_space_form_agree() {
        let text = r#"{"spectrum": {"lambdas": ["-1/2", "1", "3"], "c": "1/3"}, "grad_a2": "5/7", "hess_h": ["1", "-2", "1/9"]}"#;
        let exact = build::<Rational>(&input(text), true, &Tolerance::default()).unwrap();
        assert_eq!(exact.difference, Num::Exact("0".into()));
        assert!(exact.cmc.is_none());
        let float = build::<f64>(&input(text), true, &Tolerance::default()).unwrap();
        assert!(float.pass);
    }

    #[test]
    fn hessian_follows_its_curvature() {
        let sorted = r#"{"spectrum": {"lambdas": ["-1", "0", "2"]}, "grad_a2": "0", "hess_h": ["3", "0", "1"],
                        "sectional": [["0", "0", "-2"], ["0", "0", "0"], ["-2", "0", "0"]]}"#;
        let shuffled = r#"{"spectrum": {"lambdas": ["2", "-1", "0"]}, "grad_a2": "0", "hess_h": ["1", "3", "0"],
                          "sectional": [["0", "-2", "0"], ["-2", "0", "0"], ["0", "0", "0"]]}"#;
        let a = build::<Rational>(&input(sorted), false, &Tolerance::default()).unwrap();
        let b = build::<Rational>(&input(shuffled), false, &Tolerance::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.sectional_matches_gauss && a.pass);
    }

    #[test]
    fn explicit_tables() {
        let gauss_table = r#"{"spectrum": {"lambdas": ["1", "2"]}, "grad_a2": "0", "hess_h": ["0", "0"],
                             "sectional": [["0", "2"], ["2", "0"]]}"#;
        let r = build::<Rational>(&input(gauss_table), false, &Tolerance::default()).unwrap();
        assert!(r.sectional_matches_gauss && r.pass);
        let other = r#"{"spectrum": {"lambdas": ["1", "2"]}, "grad_a2": "0", "hess_h": ["0", "0"],
                       "sectional": [["0", "5"], ["5", "0"]]}"#;
        let r = build::<Rational>(&input(other), false, &Tolerance::default()).unwrap();
        assert!(!r.sectional_matches_gauss);
        assert_ne!(r.difference, Num::Exact("0".into()));
        assert!(build::<Rational>(&input(other), true, &Tolerance::default()).is_err());
        let bare = r#"{"spectrum": {"lambdas": ["1", "2"]}, "grad_a2": "0", "hess_h": ["0", "0"]}"#;
        assert!(build::<Rational>(&input(bare), false, &Tolerance::default()).is_err());
    }
}
