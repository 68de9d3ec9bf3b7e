use hypercurv_core::cylinders::{classify, ClassificationVerdict};
use hypercurv_core::scalar::{Rational, Regime, Tolerance};
use serde::{Deserialize, Serialize};

use super::{finish, Outcome};
use crate::cli::ClassifyArgs;
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{Report, Table};
use crate::schema::{Emit, Num};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub n: usize,
    pub regime: String,
    #[serde(rename = "H")]
    pub h: Num,
    #[serde(rename = "R")]
    pub r: Num,
    /// `R / H^2`
    pub ratio: Num,
    /// `OnLadder` or `OffLadder`.
    pub verdict: String,
    pub k: Option<usize>,
    pub model: Option<String>,
    pub radius: Option<Num>,
    pub rigidity: Option<String>,
    pub note: Option<String>,
    pub conditional: Option<String>,
    /// Rung at or below the ratio.
    pub nearest_k: Option<usize>,
    pub gap: Option<Num>,
    /// Rung closest to the ratio.
    pub closest_k: Option<usize>,
    pub exclusion: Option<String>,
}

pub fn build<T: Emit>(n: usize, h_text: &str, r_text: &str, tol: &Tolerance) -> CliResult<ClassifyReport> {
    let h = T::parse_text(h_text)?;
    let r = T::parse_text(r_text)?;
    let verdict = classify(n, &h, &r, tol)?;
    let ratio = r.clone() / h.sq();
    let mut report = ClassifyReport {
        n,
        regime: T::REGIME.to_string(),
        h: h.emit(),
        r: r.emit(),
        ratio: ratio.emit(),
        verdict: String::new(),
        k: None,
        model: None,
        radius: None,
        rigidity: None,
        note: None,
        conditional: None,
        nearest_k: None,
        gap: None,
        closest_k: None,
        exclusion: None,
    };
    match verdict {
        ClassificationVerdict::OnLadder { k, model, rigidity } => {
            report.verdict = "OnLadder".into();
            report.k = Some(k);
            report.model = Some(model.label());
            report.radius = Some(model.radius().emit());
            report.rigidity = Some(rigidity.status.as_str().into());
            report.note = Some(rigidity.note);
            report.conditional = rigidity.conditional.map(Into::into);
        }
        ClassificationVerdict::OffLadder { nearest_k, gap, closest_k, exclusion } => {
            report.verdict = "OffLadder".into();
            report.nearest_k = Some(nearest_k);
            report.gap = Some(gap.emit());
            report.closest_k = Some(closest_k);
            report.exclusion = exclusion.map(Into::into);
        }
    }
    Ok(report)
}

impl Report for ClassifyReport {
    fn table(&self) -> Table {
        let mut t = Table::fields();
        t.field("n", self.n.to_string())
            .field("regime", self.regime.clone())
            .field("H", self.h.text())
            .field("R", self.r.text())
            .field("R/H^2", self.ratio.text())
            .field("verdict", self.verdict.clone());
        let mut opt = |name: &str, v: Option<String>| {
            if let Some(v) = v {
                t.field(name, v);
            }
        };
        opt("k", self.k.map(|k| k.to_string()));
        opt("model", self.model.clone());
        opt("radius", self.radius.as_ref().map(Num::text));
        opt("rigidity", self.rigidity.clone());
        opt("note", self.note.clone());
        opt("conditional", self.conditional.clone());
        opt("nearest k", self.nearest_k.map(|k| k.to_string()));
        opt("gap", self.gap.as_ref().map(Num::text));
        opt("closest k", self.closest_k.map(|k| k.to_string()));
        opt("exclusion", self.exclusion.clone());
        t
    }
}

pub fn run(args: &ClassifyArgs, settings: &Settings) -> CliResult<Outcome> {
    let tol = &settings.tolerance;
    let report = match settings.regime_or(Regime::Exact) {
        Regime::Exact => build::<Rational>(args.n, &args.h, &args.r, tol)?,
        Regime::Float => build::<f64>(args.n, &args.h, &args.r, tol)?,
    };
    finish(&report, settings)
}
