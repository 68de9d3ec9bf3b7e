//! JSON conventions shared by every command.
//!
//! Exact rationals travel as strings `"p/q"` in lowest terms (integers as
//! `"p"`), floats as JSON numbers in shortest round-trip form. Input fields
//! accept either form; strings are read as rationals, numbers by their
//! decimal text, so `0.1` means `1/10` in the exact regime.

use std::path::Path;

use hypercurv_core::scalar::{Field, Rational, Regime, Scalar};
use hypercurv_core::spectrum::CurvatureSpectrum;
use hypercurv_core::Error;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Output scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Exact(String),
    Float(f64),
}

impl Num {
    pub fn exact(q: &Rational) -> Self {
        Num::Exact(q.to_string())
    }

    pub fn text(&self) -> String {
        match self {
            Num::Exact(s) => s.clone(),
            Num::Float(x) => format_float(*x),
        }
    }
}

/// Shortest round-trip rendering, matching what the JSON writer emits.
pub fn format_float(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
}

/// The two concrete regimes, with their JSON conversions.
pub trait Emit: Field {
    fn emit(&self) -> Num;
    fn from_scalar(s: Scalar) -> CliResult<Self>;

    fn parse_text(text: &str) -> CliResult<Self> {
        Self::from_scalar(Scalar::parse(text, Self::REGIME)?)
    }
}

impl Emit for Rational {
    fn emit(&self) -> Num {
        Num::exact(self)
    }

    fn from_scalar(s: Scalar) -> CliResult<Self> {
        Ok(s.as_exact()?.clone())
    }
}

impl Emit for f64 {
    fn emit(&self) -> Num {
        Num::Float(*self)
    }

    fn from_scalar(s: Scalar) -> CliResult<Self> {
        Ok(s.as_float()?)
    }
}

pub fn emit_all<T: Emit>(xs: &[T]) -> Vec<Num> {
    xs.iter().map(Emit::emit).collect()
}

/// Input scalar, either a rational string or a JSON number.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InputScalar {
    Text(String),
    Number(serde_json::Number),
}

impl InputScalar {
    pub fn text(&self) -> String {
        match self {
            InputScalar::Text(s) => s.clone(),
            InputScalar::Number(n) => n.to_string(),
        }
    }

    pub fn get<T: Emit>(&self) -> CliResult<T> {
        T::parse_text(&self.text())
    }
}

pub fn get_all<T: Emit>(xs: &[InputScalar]) -> CliResult<Vec<T>> {
    xs.iter().map(InputScalar::get).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeName {
    Exact,
    Float,
}

impl From<RegimeName> for Regime {
    fn from(r: RegimeName) -> Self {
        match r {
            RegimeName::Exact => Regime::Exact,
            RegimeName::Float => Regime::Float,
        }
    }
}

/// `{"n": 4, "lambdas": ["0", "0", "2", "2"], "c": "0", "regime": "exact"}`;
/// `n`, `c` and `regime` are optional.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumInput {
    #[serde(default)]
    pub n: Option<usize>,
    pub lambdas: Vec<InputScalar>,
    #[serde(default)]
    pub c: Option<InputScalar>,
    #[serde(default)]
    pub regime: Option<RegimeName>,
}

impl SpectrumInput {
    pub fn spectrum<T: Emit>(&self) -> CliResult<CurvatureSpectrum<T>> {
        if let Some(n) = self.n {
            if n != self.lambdas.len() {
                return Err(Error::DimensionMismatch { expected: n, found: self.lambdas.len() }.into());
            }
        }
        let c = match &self.c {
            Some(c) => c.get()?,
            None => T::zero(),
        };
        Ok(CurvatureSpectrum::new(get_all(&self.lambdas)?, c)?)
    }
}

/// Point data for the Simons formula. `sectional` is the full symmetric table
/// `K_ij` (diagonal ignored); omit it and pass `--gauss` to use `c + l_i l_j`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimonsInput {
    pub spectrum: SpectrumInput,
    pub grad_a2: InputScalar,
    pub hess_h: Vec<InputScalar>,
    #[serde(default)]
    pub sectional: Option<Vec<Vec<InputScalar>>>,
}

/// Constraint system file. Indices are 1-based.
///
/// ```json
/// {"n": 4, "H": "1", "R": "2/3",
///  "constraints": [{"kind": "zero", "index": 3}, {"kind": "ordered"},
///                  {"kind": "sign", "index": 4, "relation": ">=H"}]}
/// ```
///
/// Instead of `H`/`R` the raw targets may be given as
/// `"targets": {"trace": "4", "sigma2": "4"}`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemInput {
    pub n: usize,
    #[serde(default, rename = "H")]
    pub h: Option<InputScalar>,
    #[serde(default, rename = "R")]
    pub r: Option<InputScalar>,
    #[serde(default)]
    pub targets: Option<Targets>,
    #[serde(default)]
    pub constraints: Vec<ConstraintInput>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    pub trace: InputScalar,
    pub sigma2: InputScalar,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintInput {
    Zero { index: usize },
    Ordered,
    Sign { index: usize, relation: String },
    Sigma { r: usize, relation: String },
    PairSum { relation: String },
}

pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::json(origin, &e))
}

/// Reads a JSON file; `-` reads standard input.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut text).map_err(io)?;
        return parse_json(&text, "<stdin>");
    }
    let text = std::fs::read_to_string(path).map_err(io)?;
    parse_json(&text, &path.display().to_string())
}
