use hypercurv_core::caseverify::pct::{pct_sets, PctTolerance, PctVerdict};
use hypercurv_core::caseverify::{NamedCase, ScanBudget};
use hypercurv_core::cylinders::{
    classify, cylinder_from_h, scalar_ladder, ClassificationVerdict, CylinderModel, RigidityStatus,
};
use hypercurv_core::immersion::shapes::AnalyticShape;
use hypercurv_core::immersion::FdSteps;
use hypercurv_core::scalar::{rat, Field, Rational, Tolerance};
use hypercurv_core::simons::{bracket_vanishes, simons_rhs_general, simons_rhs_spaceform, SimonsPointData};
use hypercurv_core::spectrum::{
    identity_residuals, invariants, newton_trace_residual, okumura_bound, sigma_recursion_residuals, tr_a3_lemma_sides,
    CurvatureSpectrum,
};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::immersion::{evaluate, EvalOptions, Source};
use super::scan::{case_system, executor, scan_report};
use super::{finish, Outcome};
use crate::cli::VerifyArgs;
use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{pass_fail, Report, Table};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub grid_points: u64,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Report for VerifyReport {
    fn table(&self) -> Table {
        let mut t = Table::new(["check", "result", "detail"]);
        for c in &self.checks {
            t.row([c.name.clone(), pass_fail(c.pass).to_string(), c.detail.clone()]);
        }
        t.row([
            "total".to_string(),
            pass_fail(self.pass).to_string(),
            format!("{} passed, {} failed", self.passed, self.failed),
        ]);
        t
    }

    fn passed(&self) -> bool {
        self.pass
    }
}

type Outcome2 = CliResult<(bool, String)>;

fn ladder(n: usize, expected: &[Rational]) -> Outcome2 {
    let got: Vec<Rational> = scalar_ladder(n)?.into_iter().map(|r| r.ratio).collect();
    let text: Vec<String> = got.iter().map(|q| q.to_string()).collect();
    Ok((got == expected, format!("{{{}}}", text.join(", "))))
}

fn radii() -> Outcome2 {
    let mut count = 0;
    for h in [rat(1, 1), rat(2, 1), rat(1, 3)] {
        let mut cases = vec![(4, 3, rat(3, 4)), (5, 4, rat(4, 5))];
        for n in 3..=6 {
            cases.push((n, 1, rat(1, n as i64)));
            cases.push((n, 2, rat(2, n as i64)));
        }
        for (n, k, coeff) in cases {
            let m: CylinderModel<Rational> = cylinder_from_h(n, k, &h)?;
            if *m.radius() != &coeff / h.abs() || m.mean_curvature() != h {
                return Ok((false, format!("n={n} k={k} H={h}: radius {}", m.radius())));
            }
            count += 1;
        }
    }
    Ok((true, format!("{count} radii exact")))
}

fn bracket(n: usize, coeff: Rational) -> Outcome2 {
    for h in [rat(1, 1), rat(2, 1), rat(1, 3), rat(-3, 2)] {
        let phi2 = &coeff * &h * &h;
        if !bracket_vanishes(n, &Rational::from_int(0), &h, &phi2)? {
            return Ok((false, format!("H={h}")));
        }
    }
    Ok((true, format!("|phi|^2 = {coeff} H^2 gives 0 for 4 values of H")))
}

fn classify_fixtures() -> Outcome2 {
    let tol = Tolerance::default();
    let exact = [
        (4, rat(8, 9), 3, rat(3, 4), RigidityStatus::Rigid),
        (4, rat(2, 3), 2, rat(1, 2), RigidityStatus::ExampleOnly),
        (5, rat(15, 16), 4, rat(4, 5), RigidityStatus::Rigid),
        (5, rat(5, 6), 3, rat(3, 5), RigidityStatus::ExampleOnly),
        (5, rat(5, 8), 2, rat(2, 5), RigidityStatus::ExampleOnly),
        (5, rat(1, 1), 5, rat(1, 1), RigidityStatus::Rigid),
    ];
    for (n, r, k, radius, status) in &exact {
        match classify(*n, &rat(1, 1), r, &tol)? {
            ClassificationVerdict::OnLadder { k: got, model, rigidity }
                if got == *k && model.radius() == radius && rigidity.status == *status => {}
            other => return Ok((false, format!("n={n} R={r}: {other:?}"))),
        }
    }
    match classify(4, &1.0, &0.95, &tol)? {
        ClassificationVerdict::OffLadder { nearest_k: 3, .. } => {}
        other => return Ok((false, format!("n=4 R=0.95: {other:?}"))),
    }
    Ok((true, format!("{} on-ladder points and one off-ladder point", exact.len())))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-50..=50), rng.gen_range(1..=50))
}

fn identities(count: usize, seed: u64) -> Outcome2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..count {
        let n = rng.gen_range(3..=12);
        let lambdas: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let c = random_rational(&mut rng);
        let sp = CurvatureSpectrum::new(lambdas, c)?;
        let inv = invariants(&sp);
        let res = identity_residuals(&sp, &inv);
        let (lhs, rhs) = tr_a3_lemma_sides(&sp);
        let recursion = sigma_recursion_residuals(sp.lambdas()).into_iter().flatten().all(|x| x.is_zero());
        let newton = (0..n).map(|r| newton_trace_residual(&sp, r)).collect::<Result<Vec<_>, _>>()?;
        let ok = res.all().iter().all(|x| x.is_zero()) && lhs == rhs && recursion && newton.iter().all(|x| x.is_zero());
        if !ok {
            return Ok((false, format!("spectrum {t} failed")));
        }
    }
    Ok((true, format!("{count} exact spectra, zero residuals")))
}

fn cubic_bound(count: usize, seed: u64) -> Outcome2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerance::default();
    for t in 0..count {
        let n = rng.gen_range(3..=12);
        let mut mu: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mean = mu.iter().sum::<f64>() / n as f64;
        mu.iter_mut().for_each(|m| *m -= mean);
        if !okumura_bound(&mu, &tol)?.within {
            return Ok((false, format!("vector {t} violates the bound")));
        }
    }
    for n in 3..=8 {
        for a in [0.5, 2.0] {
            let mut mu = vec![a; n - 1];
            mu.push(-(n as f64 - 1.0) * a);
            let b = okumura_bound(&mu, &tol)?;
            if !b.equality || !tol.eq(b.sum3.abs(), b.upper()) {
                return Ok((false, format!("equality case n={n} a={a}")));
            }
        }
    }
    Ok((true, format!("{count} random vectors plus equality cases")))
}

fn simons(count: usize, seed: u64) -> Outcome2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..count {
        let n = rng.gen_range(3..=8);
        let lambdas: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let sp = CurvatureSpectrum::new(lambdas, random_rational(&mut rng))?;
        let grad = random_rational(&mut rng).abs();
        let hess: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let general = simons_rhs_general(&SimonsPointData::with_gauss(sp.clone(), grad.clone(), hess.clone())?);
        if general != simons_rhs_spaceform(&sp, &grad, &hess)? {
            return Ok((false, format!("spectrum {t}")));
        }
    }
    let mut cylinders = 0;
    for n in 3..=6 {
        for k in 1..=n {
            let m: CylinderModel<Rational> = cylinder_from_h(n, k, &rat(1, 1))?;
            let sp = m.spectrum();
            let zeros = vec![Rational::from_int(0); n];
            let data = SimonsPointData::with_gauss(sp.clone(), Rational::from_int(0), zeros.clone())?;
            if !simons_rhs_general(&data).is_zero()
                || !simons_rhs_spaceform(&sp, &Rational::from_int(0), &zeros)?.is_zero()
            {
                return Ok((false, m.label()));
            }
            cylinders += 1;
        }
    }
    Ok((true, format!("{count} random points agree; {cylinders} cylinders vanish")))
}

fn immersion() -> Outcome2 {
    let opts = EvalOptions { fd: false, compare: true, compare_tol: 1e-5, steps: FdSteps::default() };
    let sphere = AnalyticShape::sphere(4, 2.0)?;
    let p = evaluate(&mut Source::Shape(&sphere), &sphere.default_point(), &opts)?;
    let sphere_ok = p.lambdas.iter().all(|l| (l - 0.5).abs() < 1e-8);
    let cyl = AnalyticShape::cylinder(4, 2, 0.5)?;
    let q = evaluate(&mut Source::Shape(&cyl), &cyl.default_point(), &opts)?;
    let cyl_ok =
        q.lambdas.iter().zip([0.0, 0.0, 2.0, 2.0]).all(|(l, e)| (l - e).abs() < 1e-8) && (q.r - 2.0 / 3.0).abs() < 1e-7;
    let diff = [&p, &q].iter().filter_map(|x| x.compare.as_ref()).map(|c| c.max_abs_diff).fold(0.0, f64::max);
    let ok = sphere_ok && cyl_ok && p.pass && q.pass;
    Ok((ok, format!("sphere {sphere_ok}, cylinder {cyl_ok}, derivative paths differ by {diff:.1e}")))
}

fn pct() -> Outcome2 {
    let tol = PctTolerance::default();
    let mixed = pct_sets(&[-1e-9, 2e-9, 0.0, 1.0, -3.0], &tol)?;
    let one_sided = pct_sets(&[0.0, 0.0, 2.0, 2.0], &tol)?;
    let violated = pct_sets(&[-1.0, 1.0], &tol)?;
    let ok = mixed.verdict == PctVerdict::Consistent
        && mixed.condition == "i"
        && one_sided.condition == "ii"
        && one_sided.verdict == PctVerdict::Consistent
        && violated.verdict == PctVerdict::Violated;
    Ok((ok, "two-signed, one-signed and violating samples".to_string()))
}

pub fn build(seed: u64, grid_points: u64, jobs: usize) -> CliResult<VerifyReport> {
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Outcome2| {
        let (pass, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        checks.push(Check { name: name.to_string(), pass, detail });
    };
    push("ladder n=3", ladder(3, &[rat(0, 1), rat(3, 4), rat(1, 1)]));
    push("ladder n=4", ladder(4, &[rat(0, 1), rat(2, 3), rat(8, 9), rat(1, 1)]));
    push("ladder n=5", ladder(5, &[rat(0, 1), rat(5, 8), rat(5, 6), rat(15, 16), rat(1, 1)]));
    push("cylinder radii", radii());
    push("bracket n=4", bracket(4, rat(4, 3)));
    push("bracket n=5", bracket(5, rat(5, 4)));
    push("classification", classify_fixtures());
    push("identities", identities(1000, seed));
    push("cubic bound", cubic_bound(2000, seed));
    push("simons forms", simons(300, seed));
    push("immersion", immersion());
    push("principal curvature sets", pct());
    let budget = ScanBudget::default().with_grid_points(grid_points);
    let exec = executor(jobs)?;
    for case in NamedCase::ALL {
        let result = case_system(case.name(), None, None).and_then(|(_, sys)| {
            let r = scan_report(&sys, &budget, seed, 64, exec.as_ref())?;
            let witness = r.exact_witness.as_ref().map(|w| {
                let parts: Vec<String> = w.iter().map(|q| q.text()).collect();
                format!(" at ({})", parts.join(", "))
            });
            let cert = r.certificate.as_ref().map_or("none", |c| c.conclusion.as_str()).to_string();
            Ok((r.pass, format!("{}{} certificate {cert}", r.status, witness.unwrap_or_default())))
        });
        push(&format!("scan {}", case.name()), result);
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    Ok(VerifyReport { seed, grid_points, checks, passed, failed, pass: failed == 0 })
}

pub fn run(args: &VerifyArgs, settings: &Settings) -> CliResult<Outcome> {
    let seed = settings.seed.unwrap_or(DEFAULT_SEED);
    let points = args.budget.or(settings.budget).unwrap_or(ScanBudget::default().grid_points);
    let report = build(seed, points, settings.jobs)?;
    finish(&report, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_checks_pass() {
        assert!(ladder(4, &[rat(0, 1), rat(2, 3), rat(8, 9), rat(1, 1)]).unwrap().0);
        assert!(!ladder(4, &[rat(0, 1)]).unwrap().0);
        assert!(radii().unwrap().0);
        assert!(bracket(4, rat(4, 3)).unwrap().0);
        assert!(!bracket(4, rat(1, 1)).unwrap().0);
        assert!(classify_fixtures().unwrap().0);
        assert!(identities(50, 1).unwrap().0);
        assert!(cubic_bound(100, 1).unwrap().0);
        assert!(simons(20, 1).unwrap().0);
        assert!(immersion().unwrap().0);
        assert!(pct().unwrap().0);
    }
}
