use std::io::{BufReader, Write};
use std::ops::Index;

use hypercurv_core::caseverify::pct::{pct_sets, PctTolerance};
use hypercurv_core::immersion::shapes::AnalyticShape;
use hypercurv_core::immersion::{
    finite_difference_lift, fundamental_forms, generalized_eigenvalues, normal_residual, FdSteps, PatchSample,
};
use hypercurv_core::spectrum::{identity_residuals, invariants, CurvatureSpectrum};
use hypercurv_core::Error;
use serde::{Deserialize, Serialize};

use super::invariants::PctJson;
use super::{finish, Outcome};
use crate::cli::{ImmersionArgs, ShapeKind, ShapeServerArgs, ShapeSpec};
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{join, pass_fail, Report, Table};
use crate::schema::format_float;
use crate::subprocess::{serve, ShapeProcess};

/// Gauss-trace residual allowance, relative to `(1 + |A|^2)^2`.
pub const GAUSS_TRACE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersionReport {
    pub shape: String,
    pub n: usize,
    /// `ANALYTIC` or `FINITE_DIFF`.
    pub source: String,
    pub points: Vec<PointReport>,
    pub pct: Option<PctJson>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: Vec<f64>,
    pub value: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub normal: Vec<f64>,
    pub condition: f64,
    pub lambdas: Vec<f64>,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub norm_a2: f64,
    pub gauss_trace_residual: f64,
    pub normal_residual: f64,
    pub compare: Option<CompareJson>,
    pub pass: bool,
}

/// The other derivative path at the same point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareJson {
    pub source: String,
    pub lambdas: Vec<f64>,
    pub max_abs_diff: f64,
    pub tolerance: f64,
    pub within: bool,
}

fn rows<M: Index<(usize, usize), Output = f64>>(m: &M, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
}

fn parse_poly(text: &str, n: usize) -> CliResult<Vec<(f64, Vec<u32>)>> {
    let bad = || CliError::usage(format!("cannot read polynomial `{text}`; expected terms like `0.5:2,0;1:0,1`"));
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|term| {
            let (coeff, exps) = term.split_once(':').ok_or_else(bad)?;
            let coeff: f64 = coeff.trim().parse().map_err(|_| bad())?;
            let exps =
                exps.split(',').map(|e| e.trim().parse::<u32>().map_err(|_| bad())).collect::<CliResult<Vec<u32>>>()?;
            if exps.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: exps.len() }.into());
            }
            Ok((coeff, exps))
        })
        .collect()
}

pub fn build_shape(spec: &ShapeSpec) -> CliResult<AnalyticShape> {
    let kind = spec.shape.ok_or_else(|| CliError::usage("pass --shape or --command"))?;
    let n = spec.n.ok_or_else(|| CliError::usage("--n is required"))?;
    let shape = match kind {
        ShapeKind::Sphere => AnalyticShape::sphere(n, spec.rho)?,
        ShapeKind::Cylinder => {
            let k = spec.k.ok_or_else(|| CliError::usage("a cylinder needs --k"))?;
            AnalyticShape::cylinder(n, k, spec.radius)?
        }
        ShapeKind::Graph => {
            let poly = spec.poly.as_deref().ok_or_else(|| CliError::usage("a graph needs --poly"))?;
            AnalyticShape::graph(n, &parse_poly(poly, n)?)?
        }
        ShapeKind::Paraboloid => AnalyticShape::paraboloid(n)?,
        ShapeKind::Plane => AnalyticShape::plane(n)?,
    };
    Ok(shape)
}

pub fn parse_point(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|x| {
            let v: f64 = x.trim().parse().map_err(|_| Error::Parse { input: x.trim().to_string() })?;
            if !v.is_finite() {
                return Err(Error::Parse { input: x.trim().to_string() }.into());
            }
            Ok(v)
        })
        .collect()
}

/// Where the embedding comes from.
pub enum Source<'a> {
    Shape(&'a AnalyticShape),
    Process(&'a mut ShapeProcess),
}

impl Source<'_> {
    fn name(&self) -> String {
        match self {
            Source::Shape(s) => s.name().to_string(),
            Source::Process(_) => "external".to_string(),
        }
    }

    fn analytic(&mut self, u: &[f64]) -> CliResult<Option<PatchSample>> {
        match self {
            Source::Shape(s) => Ok(Some(s.sample(u)?)),
            Source::Process(_) => Ok(None),
        }
    }

    fn finite_diff(&mut self, u: &[f64], steps: FdSteps) -> CliResult<PatchSample> {
        Ok(match self {
            Source::Shape(s) => finite_difference_lift(|x| s.value(x), u, steps)?,
            Source::Process(p) => finite_difference_lift(|x| p.eval(x), u, steps)?,
        })
    }
}

fn spectrum_of(sample: &PatchSample) -> CliResult<(Vec<f64>, hypercurv_core::immersion::FundamentalForms)> {
    let forms = fundamental_forms(sample)?;
    let lambdas = generalized_eigenvalues(&forms.g, &forms.b)?;
    Ok((lambdas, forms))
}

pub struct EvalOptions {
    pub fd: bool,
    pub compare: bool,
    pub compare_tol: f64,
    pub steps: FdSteps,
}

pub fn evaluate(source: &mut Source<'_>, u: &[f64], opts: &EvalOptions) -> CliResult<PointReport> {
    let analytic = if opts.fd { None } else { source.analytic(u)? };
    let (primary, secondary) = match analytic {
        Some(a) => {
            let fd = if opts.compare { Some(source.finite_diff(u, opts.steps)?) } else { None };
            (a, fd)
        }
        None => {
            if opts.compare && !opts.fd {
                return Err(CliError::usage("--compare needs a built-in shape with analytic derivatives"));
            }
            (source.finite_diff(u, opts.steps)?, None)
        }
    };
    let (lambdas, forms) = spectrum_of(&primary)?;
    let sp = CurvatureSpectrum::new(lambdas, 0.0)?;
    let inv = invariants(&sp);
    let gauss = identity_residuals(&sp, &inv).gauss_trace.abs();
    let gauss_ok = gauss <= GAUSS_TRACE_TOL * (1.0 + inv.norm_a2).powi(2);
    let compare = match secondary {
        Some(fd) => {
            let (fd_lambdas, _) = spectrum_of(&fd)?;
            let mut fd_sorted = fd_lambdas;
            fd_sorted.sort_by(f64::total_cmp);
            let diff = sp.lambdas().iter().zip(&fd_sorted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Some(CompareJson {
                source: fd.source.as_str().to_string(),
                lambdas: fd_sorted,
                max_abs_diff: diff,
                tolerance: opts.compare_tol,
                within: diff <= opts.compare_tol,
            })
        }
        None => None,
    };
    let n = u.len();
    Ok(PointReport {
        point: u.to_vec(),
        value: primary.value.clone(),
        g: rows(&forms.g, n),
        b: rows(&forms.b, n),
        normal: forms.normal.clone(),
        condition: forms.condition,
        lambdas: sp.lambdas().to_vec(),
        h: inv.mean_curvature,
        r: inv.scalar_curvature,
        norm_a2: inv.norm_a2,
        gauss_trace_residual: gauss,
        normal_residual: normal_residual(&primary, &forms),
        pass: gauss_ok && compare.as_ref().is_none_or(|c| c.within),
        compare,
    })
}

impl Report for ImmersionReport {
    fn table(&self) -> Table {
        let floats = |xs: &[f64]| join(xs.iter().map(|x| format_float(*x)));
        let mut t = Table::new(["point", "lambdas", "H", "R", "|A|^2", "gauss residual", "compare", "status"]);
        for p in &self.points {
            let compare = p.compare.as_ref().map_or_else(|| "-".to_string(), |c| format_float(c.max_abs_diff));
            t.row([
                floats(&p.point),
                floats(&p.lambdas),
                format_float(p.h),
                format_float(p.r),
                format_float(p.norm_a2),
                format_float(p.gauss_trace_residual),
                compare,
                pass_fail(p.pass).to_string(),
            ]);
        }
        t
    }

    fn passed(&self) -> bool {
        self.pass
    }
}

pub fn build(
    source: &mut Source<'_>,
    points: &[Vec<f64>],
    opts: &EvalOptions,
    with_pct: bool,
) -> CliResult<ImmersionReport> {
    let shape = source.name();
    let n = points.first().map_or(0, Vec::len);
    let reports = points.iter().map(|u| evaluate(source, u, opts)).collect::<CliResult<Vec<_>>>()?;
    let all: Vec<f64> = reports.iter().flat_map(|p| p.lambdas.iter().copied()).collect();
    let pct = if with_pct { Some(pct_sets(&all, &PctTolerance::default())?.into()) } else { None };
    let analytic = matches!(source, Source::Shape(_)) && !opts.fd;
    Ok(ImmersionReport {
        shape,
        n,
        source: if analytic { "ANALYTIC" } else { "FINITE_DIFF" }.to_string(),
        pass: reports.iter().all(|p| p.pass),
        points: reports,
        pct,
    })
}

pub fn run(args: &ImmersionArgs, settings: &Settings) -> CliResult<Outcome> {
    let opts = EvalOptions {
        fd: args.fd || args.command.is_some(),
        compare: args.compare,
        compare_tol: args.compare_tol,
        steps: args.step.map(FdSteps::uniform).unwrap_or_default(),
    };
    let mut points = args.point.iter().map(|p| parse_point(p)).collect::<CliResult<Vec<_>>>()?;
    let report = match &args.command {
        Some(command) => {
            let n = args.shape.n.ok_or_else(|| CliError::usage("--command needs --n"))?;
            if points.is_empty() {
                points.push(vec![1.0; n]);
            }
            check_dims(&points, n)?;
            let mut process = ShapeProcess::spawn(command)?;
            build(&mut Source::Process(&mut process), &points, &opts, args.pct)?
        }
        None => {
            let shape = build_shape(&args.shape)?;
            if points.is_empty() {
                points.push(shape.default_point());
            }
            check_dims(&points, shape.dim())?;
            build(&mut Source::Shape(&shape), &points, &opts, args.pct)?
        }
    };
    finish(&report, settings)
}

fn check_dims(points: &[Vec<f64>], n: usize) -> CliResult<()> {
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() }.into());
        }
    }
    Ok(())
}

/// Answers embedding requests for a built-in shape on standard input.
pub fn serve_shape(args: &ShapeServerArgs) -> CliResult<Outcome> {
    let shape = build_shape(&args.shape)?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    serve(BufReader::new(stdin.lock()), stdout.lock(), |u| Ok(shape.value(u)?))?;
    std::io::stdout().flush().map_err(|e| CliError::Output(e.to_string()))?;
    Ok(Outcome { text: String::new(), passed: true })
}
