use hypercurv_core::caseverify::pct::{pct_sets, PctReport, PctTolerance};
use hypercurv_core::scalar::{Field, Rational, Regime, Tolerance};
use hypercurv_core::spectrum::{
    identity_residuals, invariants, newton_trace_residual, okumura_bound, sigma_recursion_residuals, tr_a3_lemma_sides,
    OkumuraBound,
};
use serde::{Deserialize, Serialize};

use super::{finish, Outcome};
use crate::cli::InvariantsArgs;
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{join, pass_fail, yes_no, Report, Table};
use crate::schema::{emit_all, read_json, Emit, InputScalar, Num, SpectrumInput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsReport {
    pub regime: String,
    pub n: usize,
    pub c: Num,
    pub lambdas: Vec<Num>,
    pub mean_curvature: Num,
    /// `S_0, ..., S_n`
    pub symmetric: Vec<Num>,
    /// `H_0, ..., H_n`
    pub mean_curvatures: Vec<Num>,
    pub scalar_curvature: Num,
    pub norm_a2: Num,
    pub mu: Vec<Num>,
    pub norm_phi2: Num,
    pub tr_phi3: Num,
    pub tr_a3: Num,
    pub residuals: Residuals,
    pub okumura: Option<OkumuraJson>,
    pub pct: Option<PctJson>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub gauss_trace: Num,
    pub phi_trace: Num,
    pub phi_norm: Num,
    pub phi_cubic: Num,
    pub cubic_trace_lemma: Num,
    /// Largest residual of the one-variable recursion over all `(i, r)`.
    pub sigma_recursion: Num,
    /// `tr(A P_r) - (r + 1) S_{r+1}` for `r = 0..n-1`.
    pub newton_trace: Vec<Num>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OkumuraJson {
    pub beta2: Num,
    pub bound_sq: Num,
    pub sum3: Num,
    /// Floating point value of the bound, for display.
    pub bound_approx: f64,
    pub within: bool,
    pub equality: bool,
    pub sign: i8,
}

impl OkumuraJson {
    pub fn from_bound<T: Emit>(b: &OkumuraBound<T>) -> Self {
        OkumuraJson {
            beta2: b.beta2.emit(),
            bound_sq: b.bound_sq.emit(),
            sum3: b.sum3.emit(),
            bound_approx: b.bound_sq.as_f64().max(0.0).sqrt(),
            within: b.within,
            equality: b.equality,
            sign: b.sign,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PctJson {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub zeros: usize,
    pub inf_plus: Option<f64>,
    pub sup_minus: Option<f64>,
    pub condition: String,
    pub max_gap: Option<f64>,
    pub verdict: String,
}

impl From<PctReport> for PctJson {
    fn from(r: PctReport) -> Self {
        PctJson {
            plus: r.plus.values,
            minus: r.minus.values,
            zeros: r.zeros,
            inf_plus: r.inf_plus,
            sup_minus: r.sup_minus,
            condition: r.condition.to_string(),
            max_gap: r.max_gap,
            verdict: r.verdict.as_str().to_string(),
        }
    }
}

impl PctJson {
    pub fn add_rows(&self, t: &mut Table) {
        let nums = |xs: &[f64]| join(xs.iter().map(|x| crate::schema::format_float(*x)));
        let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), crate::schema::format_float);
        t.field("pct positive", nums(&self.plus))
            .field("pct negative", nums(&self.minus))
            .field("pct zeros", self.zeros.to_string())
            .field("pct inf positive", opt(self.inf_plus))
            .field("pct sup negative", opt(self.sup_minus))
            .field("pct condition", self.condition.clone())
            .field("pct max gap", opt(self.max_gap))
            .field("pct verdict", self.verdict.clone());
    }
}

fn largest<T: Field>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().fold(T::zero(), |best, x| if x.abs() > best.abs() { x } else { best })
}

pub fn build<T: Emit>(input: &SpectrumInput, with_pct: bool, tol: &Tolerance) -> CliResult<InvariantsReport> {
    let sp = input.spectrum::<T>()?;
    let n = sp.dim();
    let inv = invariants(&sp);
    let res = identity_residuals(&sp, &inv);
    let recursion = largest(sigma_recursion_residuals(sp.lambdas()).into_iter().flatten());
    let newton = (0..n).map(|r| newton_trace_residual(&sp, r)).collect::<Result<Vec<T>, _>>()?;
    let (lemma_lhs, lemma_rhs) = tr_a3_lemma_sides(&sp);
    let okumura = if n >= 3 { Some(okumura_bound(&inv.mu, tol)?) } else { None };

    // Float residuals are judged against the size of the cubic quantities.
    let scale = (1.0 + inv.norm_a2.as_f64()).powf(1.5) * n as f64 * n as f64;
    let float_bound = tol.abs + tol.rel * scale;
    let small = |x: &T| match T::REGIME {
        Regime::Exact => x.is_zero(),
        Regime::Float => x.as_f64().abs() <= float_bound,
    };
    let all: Vec<&T> = res.all().into_iter().chain([&recursion]).chain(newton.iter()).collect();
    let lemma = lemma_lhs.clone() - lemma_rhs;
    let identities_hold = all.iter().all(|x| small(x)) && small(&lemma);
    let pass = identities_hold && okumura.as_ref().is_none_or(|b| b.within);

    let pct = if with_pct { Some(pct_sets(sp.lambdas(), &PctTolerance::default())?.into()) } else { None };
    Ok(InvariantsReport {
        regime: T::REGIME.to_string(),
        n,
        c: sp.ambient_curvature().emit(),
        lambdas: emit_all(sp.lambdas()),
        mean_curvature: inv.mean_curvature.emit(),
        symmetric: emit_all(&inv.symmetric),
        mean_curvatures: emit_all(&inv.mean_curvatures),
        scalar_curvature: inv.scalar_curvature.emit(),
        norm_a2: inv.norm_a2.emit(),
        mu: emit_all(&inv.mu),
        norm_phi2: inv.norm_phi2.emit(),
        tr_phi3: inv.tr_phi3.emit(),
        tr_a3: inv.tr_a3.emit(),
        residuals: Residuals {
            gauss_trace: res.gauss_trace.emit(),
            phi_trace: res.phi_trace.emit(),
            phi_norm: res.phi_norm.emit(),
            phi_cubic: res.phi_cubic.emit(),
            cubic_trace_lemma: res.cubic_trace_lemma.emit(),
            sigma_recursion: recursion.emit(),
            newton_trace: emit_all(&newton),
            tolerance: (T::REGIME == Regime::Float).then_some(float_bound),
        },
        okumura: okumura.as_ref().map(OkumuraJson::from_bound),
        pct,
        pass,
    })
}

impl Report for InvariantsReport {
    fn table(&self) -> Table {
        let texts = |xs: &[Num]| join(xs.iter().map(Num::text));
        let r = &self.residuals;
        let mut t = Table::fields();
        t.field("regime", self.regime.clone())
            .field("n", self.n.to_string())
            .field("c", self.c.text())
            .field("lambdas", texts(&self.lambdas))
            .field("H", self.mean_curvature.text())
            .field("S_r", texts(&self.symmetric))
            .field("H_r", texts(&self.mean_curvatures))
            .field("R", self.scalar_curvature.text())
            .field("|A|^2", self.norm_a2.text())
            .field("mu", texts(&self.mu))
            .field("|phi|^2", self.norm_phi2.text())
            .field("tr phi^3", self.tr_phi3.text())
            .field("tr A^3", self.tr_a3.text())
            .field("residual gauss trace", r.gauss_trace.text())
            .field("residual phi trace", r.phi_trace.text())
            .field("residual phi norm", r.phi_norm.text())
            .field("residual phi cubic", r.phi_cubic.text())
            .field("residual cubic trace lemma", r.cubic_trace_lemma.text())
            .field("residual sigma recursion", r.sigma_recursion.text())
            .field("residual newton traces", texts(&r.newton_trace));
        if let Some(o) = &self.okumura {
            t.field("cubic bound beta^2", o.beta2.text())
                .field("cubic bound sum mu^3", o.sum3.text())
                .field("cubic bound", crate::schema::format_float(o.bound_approx))
                .field("cubic bound holds", yes_no(o.within))
                .field("cubic bound equality", yes_no(o.equality));
        }
        if let Some(p) = &self.pct {
            p.add_rows(&mut t);
        }
        t.field("status", pass_fail(self.pass));
        t
    }

    fn passed(&self) -> bool {
        self.pass
    }
}

pub fn run(args: &InvariantsArgs, settings: &Settings) -> CliResult<Outcome> {
    let mut input = match (&args.input, &args.lambdas) {
        (Some(path), _) => read_json::<SpectrumInput>(path)?,
        (None, Some(lambdas)) => SpectrumInput {
            n: None,
            lambdas: lambdas.iter().map(|l| InputScalar::Text(l.clone())).collect(),
            c: None,
            regime: None,
        },
        (None, None) => return Err(CliError::usage("pass --input or --lambdas")),
    };
    if let Some(c) = &args.c {
        input.c = Some(InputScalar::Text(c.clone()));
    }
    let regime = settings.regime.or(input.regime.map(Into::into)).unwrap_or(Regime::Exact);
    let report = match regime {
        Regime::Exact => build::<Rational>(&input, args.pct, &settings.tolerance)?,
        Regime::Float => build::<f64>(&input, args.pct, &settings.tolerance)?,
    };
    finish(&report, settings)
}
