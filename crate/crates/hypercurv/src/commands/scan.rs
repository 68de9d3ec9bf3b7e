use hypercurv_core::caseverify::certificate::agreement;
use hypercurv_core::caseverify::{
    certify, scan_with, CertificateReport, Conclusion, ConstraintSystem, ExtraConstraint, FeasibilityStatus,
    FeasibilityVerdict, GridExecutor, Inequality, NamedCase, ScanBudget, Sequential, SignKind,
};
use hypercurv_core::scalar::Rational;
use hypercurv_core::Error;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{finish, Outcome};
use crate::cli::ScanArgs;
use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::{join, pass_fail, Report, Table};
use crate::parallel::Parallel;
use crate::schema::{emit_all, format_float, read_json, ConstraintInput, Emit, InputScalar, Num, SystemInput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub case: Option<String>,
    pub n: usize,
    #[serde(rename = "H")]
    pub h: Num,
    #[serde(rename = "R")]
    pub r: Num,
    pub seed: u64,
    pub grid_points: u64,
    /// `WITNESS` or `NO_WITNESS`.
    pub status: String,
    pub witness: Option<Vec<f64>>,
    pub exact_witness: Option<Vec<Num>>,
    pub residual: f64,
    pub best_point: Vec<f64>,
    pub validated: bool,
    /// 1-based indices of strict signs met only in the relaxed sense.
    pub strict_boundary: Vec<usize>,
    pub stats: StatsJson,
    pub certificate: Option<CertificateJson>,
    pub agree: Option<bool>,
    pub interpretation: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsJson {
    pub dims: usize,
    pub per_axis: u64,
    pub grid_points: u64,
    pub starts: usize,
    pub evaluations: u64,
    pub polished: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    /// `INFEASIBLE`, `PINNED` or `HYPOTHESIS_NOT_MET`.
    pub conclusion: String,
    pub pinned: Option<Vec<Num>>,
    pub identities_checked: usize,
    pub identity_failures: Vec<String>,
    pub pinned_value: Option<Num>,
    pub pinned_companion: Option<Num>,
    pub pass: bool,
}

impl From<&CertificateReport> for CertificateJson {
    fn from(c: &CertificateReport) -> Self {
        CertificateJson {
            conclusion: c.conclusion.as_str().to_string(),
            pinned: match &c.conclusion {
                Conclusion::Pinned(x) => Some(emit_all(x)),
                _ => None,
            },
            identities_checked: c.identities_checked,
            identity_failures: c.identity_failures.iter().map(|s| s.to_string()).collect(),
            pinned_value: c.pinned_value.as_ref().map(|(v, _)| v.emit()),
            pinned_companion: c.pinned_value.as_ref().and_then(|(_, w)| w.as_ref().map(Emit::emit)),
            pass: c.pass,
        }
    }
}

fn parse_rational(text: &str, what: &str) -> CliResult<Rational> {
    Rational::parse_text(text).map_err(|e| CliError::usage(format!("{what}: {e}")))
}

fn index(i: usize, n: usize) -> CliResult<usize> {
    if i == 0 || i > n {
        return Err(Error::domain(format!("index {i} outside 1..={n}")).into());
    }
    Ok(i - 1)
}

fn relation<T>(text: &str, parse: fn(&str) -> Option<T>) -> CliResult<T> {
    parse(text).ok_or_else(|| Error::Parse { input: text.to_string() }.into())
}

/// Turns a system file into a constraint system; `--H`/`--R` override the file.
pub fn system_from_input(input: &SystemInput, h: Option<&str>, r: Option<&str>) -> CliResult<ConstraintSystem> {
    let n = input.n;
    let h = h.map(str::to_string).or_else(|| input.h.as_ref().map(InputScalar::text));
    let r = r.map(str::to_string).or_else(|| input.r.as_ref().map(InputScalar::text));
    let mut sys = match (&input.targets, h, r) {
        (None, Some(h), Some(r)) => {
            ConstraintSystem::for_curvatures(n, &parse_rational(&h, "H")?, &parse_rational(&r, "R")?)
        }
        (Some(t), None, None) => {
            let mut sys = ConstraintSystem::for_curvatures(n, &Rational::zero(), &Rational::zero());
            sys.trace_target = t.trace.get()?;
            sys.sigma2_target = t.sigma2.get()?;
            sys
        }
        (Some(_), _, _) => return Err(CliError::usage("give either targets or H and R, not both")),
        _ => return Err(CliError::usage("the system needs both H and R (or raw targets)")),
    };
    for c in &input.constraints {
        sys = match c {
            ConstraintInput::Zero { index: i } => sys.with_zero(index(*i, n)?),
            ConstraintInput::Ordered => sys.ordered(),
            ConstraintInput::Sign { index: i, relation: rel } => {
                sys.with_sign(index(*i, n)?, relation(rel, SignKind::from_symbol)?)
            }
            ConstraintInput::Sigma { r, relation: rel } => {
                if *r == 0 || *r > n {
                    return Err(Error::domain(format!("sigma_{r} outside 1..={n}")).into());
                }
                sys.with_extra(ExtraConstraint::Sigma { r: *r, sign: relation(rel, Inequality::from_symbol)? })
            }
            ConstraintInput::PairSum { relation: rel } => {
                sys.with_extra(ExtraConstraint::PairSum { sign: relation(rel, Inequality::from_symbol)? })
            }
        };
    }
    sys.validate()?;
    Ok(sys)
}

pub fn case_system(name: &str, h: Option<&str>, r: Option<&str>) -> CliResult<(NamedCase, ConstraintSystem)> {
    let case = NamedCase::parse(name).ok_or_else(|| {
        let names: Vec<&str> = NamedCase::ALL.iter().map(NamedCase::name).collect();
        CliError::usage(format!("unknown case `{name}`; expected one of {}", names.join(", ")))
    })?;
    let h = parse_rational(h.unwrap_or("1"), "H")?;
    let r = match r {
        Some(r) => parse_rational(r, "R")?,
        None => case.default_ratio() * &h * &h,
    };
    Ok((case, case.system(&h, &r)))
}

pub fn executor(jobs: usize) -> CliResult<Box<dyn GridExecutor>> {
    Ok(if jobs > 1 { Box::new(Parallel::new(jobs)?) } else { Box::new(Sequential) })
}

fn interpretation(verdict: &FeasibilityVerdict, cert: Option<&CertificateReport>) -> String {
    let conclusion = cert.map(|c| &c.conclusion);
    let text = match (verdict.status, conclusion) {
        (FeasibilityStatus::NoWitness, Some(Conclusion::Infeasible)) => {
            "no point found under the budget; infeasibility is certified by the closed-form identity"
        }
        (FeasibilityStatus::NoWitness, _) => "no point found under the budget; evidence only, not a proof",
        (FeasibilityStatus::Witness, Some(Conclusion::Pinned(_))) => {
            "witness found at the point the closed-form identity pins down"
        }
        (FeasibilityStatus::Witness, Some(Conclusion::Infeasible)) if !verdict.strict_boundary.is_empty() => {
            "witness of the relaxed system only, on the boundary of a strict sign; the identity excludes it"
        }
        (FeasibilityStatus::Witness, Some(Conclusion::Infeasible)) => "witness contradicts the closed-form identity",
        (FeasibilityStatus::Witness, _) => "witness found within tolerance",
    };
    text.to_string()
}

/// Scans `sys` and, for a built-in case, checks its certificate.
pub fn scan_report(
    sys: &ConstraintSystem,
    budget: &ScanBudget,
    seed: u64,
    samples: usize,
    exec: &dyn GridExecutor,
) -> CliResult<ScanReport> {
    let verdict = scan_with(sys, budget, seed, exec)?;
    let case = NamedCase::recognize(sys);
    let h = sys.mean_curvature();
    let r = sys.scalar_curvature();
    let cert = case.map(|c| certify(c, &h, &r, samples, seed));
    let agree = cert.as_ref().and_then(|c| agreement(c, &verdict, budget.tolerance));
    let relaxed_boundary = verdict.status == FeasibilityStatus::Witness
        && verdict.exact_witness.is_none()
        && !verdict.strict_boundary.is_empty();
    let pass = match &cert {
        None => true,
        Some(c) if c.conclusion == Conclusion::HypothesisNotMet => c.identity_failures.is_empty(),
        Some(c) if c.conclusion == Conclusion::Infeasible => c.pass && (agree == Some(true) || relaxed_boundary),
        Some(c) => c.pass && agree == Some(true),
    };
    let st = &verdict.stats;
    Ok(ScanReport {
        case: case.map(|c| c.name().to_string()),
        n: sys.n,
        h: h.emit(),
        r: r.emit(),
        seed,
        grid_points: budget.grid_points,
        status: verdict.status.as_str().to_string(),
        witness: verdict.witness.clone(),
        exact_witness: verdict.exact_witness.as_ref().map(|w| emit_all(w)),
        residual: verdict.residual,
        best_point: verdict.best_point.clone(),
        validated: verdict.validated,
        strict_boundary: verdict.strict_boundary.iter().map(|i| i + 1).collect(),
        stats: StatsJson {
            dims: st.dims,
            per_axis: st.per_axis,
            grid_points: st.grid_points,
            starts: st.starts,
            evaluations: st.evaluations,
            polished: st.polished,
        },
        interpretation: interpretation(&verdict, cert.as_ref()),
        certificate: cert.as_ref().map(CertificateJson::from),
        agree,
        pass,
    })
}

impl Report for ScanReport {
    fn table(&self) -> Table {
        let floats = |xs: &[f64]| join(xs.iter().map(|x| format_float(*x)));
        let mut t = Table::fields();
        t.field("case", self.case.clone().unwrap_or_else(|| "-".into()))
            .field("n", self.n.to_string())
            .field("H", self.h.text())
            .field("R", self.r.text())
            .field("seed", self.seed.to_string())
            .field("grid points", self.grid_points.to_string())
            .field("status", self.status.clone())
            .field("residual", format_float(self.residual));
        if let Some(w) = &self.witness {
            t.field("witness", floats(w));
        }
        if let Some(w) = &self.exact_witness {
            t.field("exact witness", join(w.iter().map(Num::text)));
        }
        if !self.strict_boundary.is_empty() {
            t.field("strict boundary", join(self.strict_boundary.iter().map(|i| i.to_string())));
        }
        t.field("best point", floats(&self.best_point)).field(
            "search",
            format!(
                "{} dims, {} per axis, {} starts, {} evaluations",
                self.stats.dims, self.stats.per_axis, self.stats.starts, self.stats.evaluations
            ),
        );
        if let Some(c) = &self.certificate {
            t.field("certificate", format!("{} {}", c.conclusion, pass_fail(c.pass)))
                .field("identities checked", c.identities_checked.to_string());
            if !c.identity_failures.is_empty() {
                t.field("identity failures", c.identity_failures.join(", "));
            }
        }
        if let Some(a) = self.agree {
            t.field("scan agrees", if a { "yes" } else { "no" });
        }
        t.field("interpretation", self.interpretation.clone()).field("result", pass_fail(self.pass));
        t
    }

    fn passed(&self) -> bool {
        self.pass
    }
}

pub fn run(args: &ScanArgs, settings: &Settings) -> CliResult<Outcome> {
    let seed = settings.require_seed()?;
    let sys = match (&args.case, &args.system) {
        (Some(name), None) => case_system(name, args.h.as_deref(), args.r.as_deref())?.1,
        (None, Some(path)) => system_from_input(&read_json(path)?, args.h.as_deref(), args.r.as_deref())?,
        _ => return Err(CliError::usage("pass exactly one of --case and --system")),
    };
    let points = args.budget.or(settings.budget).unwrap_or(ScanBudget::default().grid_points);
    if points == 0 {
        return Err(CliError::usage("--budget must be positive"));
    }
    let budget = ScanBudget::default().with_grid_points(points);
    let exec = executor(settings.jobs)?;
    let report = scan_report(&sys, &budget, seed, args.samples, exec.as_ref())?;
    finish(&report, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_json;
    use hypercurv_core::scalar::rat;

    fn small() -> ScanBudget {
        ScanBudget::default().with_grid_points(20_000)
    }

    #[test]
    fn file_systems_match_named_cases() {
        let input: SystemInput = parse_json(
            r#"{"n": 4, "H": "1", "R": "2/3", "constraints": [
                {"kind": "zero", "index": 2}, {"kind": "ordered"},
                {"kind": "sign", "index": 3, "relation": ">0"}]}"#,
            "t",
        )
        .unwrap();
        let sys = system_from_input(&input, None, None).unwrap();
        assert_eq!(NamedCase::recognize(&sys), Some(NamedCase::Thm1Lambda2));
        let (_, named) = case_system("thm1-lambda2", None, None).unwrap();
        assert_eq!(sys, named);
    }

    #[test]
    fn raw_targets_and_overrides() {
        let input: SystemInput = parse_json(r#"{"n": 3, "targets": {"trace": "3", "sigma2": 3}}"#, "t").unwrap();
        let sys = system_from_input(&input, None, None).unwrap();
        assert_eq!((sys.mean_curvature(), sys.scalar_curvature()), (rat(1, 1), rat(1, 1)));
        assert!(system_from_input(&input, Some("1"), Some("1")).is_err());
        let input: SystemInput = parse_json(r#"{"n": 3, "H": "1"}"#, "t").unwrap();
        assert!(system_from_input(&input, None, None).is_err());
        let sys = system_from_input(&input, None, Some("1/2")).unwrap();
        assert_eq!(sys.scalar_curvature(), hypercurv_core::scalar::rat(1, 2));
    }

    #[test]
    fn bad_indices_and_relations() {
        for text in [
            r#"{"n": 3, "H": 1, "R": 1, "constraints": [{"kind": "zero", "index": 0}]}"#,
            r#"{"n": 3, "H": 1, "R": 1, "constraints": [{"kind": "zero", "index": 4}]}"#,
            r#"{"n": 3, "H": 1, "R": 1, "constraints": [{"kind": "sign", "index": 1, "relation": "=="}]}"#,
            r#"{"n": 3, "H": 1, "R": 1, "constraints": [{"kind": "sigma", "r": 4, "relation": ">=0"}]}"#,
        ] {
            let input: SystemInput = parse_json(text, "t").unwrap();
            assert!(system_from_input(&input, None, None).is_err(), "{text}");
        }
    }

    #[test]
    fn unknown_case() {
        assert!(matches!(case_system("thm3", None, None), Err(CliError::Usage(_))));
    }

    #[test]
    fn claim_scan_passes_with_certificate() {
        let (_, sys) = case_system("thm1-claim", Some("1"), Some("2/3")).unwrap();
        let r = scan_report(&sys, &small(), 7, 16, &Sequential).unwrap();
        assert_eq!(r.status, "NO_WITNESS");
        assert_eq!(r.certificate.as_ref().unwrap().conclusion, "INFEASIBLE");
        assert!(r.pass);
    }

    #[test]
    fn custom_system_without_certificate() {
        let input: SystemInput = parse_json(r#"{"n": 3, "H": "1", "R": "1"}"#, "t").unwrap();
        let sys = system_from_input(&input, None, None).unwrap();
        let r = scan_report(&sys, &small(), 1, 16, &Sequential).unwrap();
        assert!(r.case.is_none() && r.certificate.is_none());
        assert_eq!(r.status, "WITNESS");
        assert!(r.pass);
    }

    #[test]
    fn parallel_scan_is_identical() {
        let (_, sys) = case_system("thm2-lambda2", None, None).unwrap();
        let a = scan_report(&sys, &small(), 5, 8, &Sequential).unwrap();
        let b = scan_report(&sys, &small(), 5, 8, &Parallel::new(3).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
