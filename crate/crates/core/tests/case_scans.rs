use hypercurv_core::caseverify::cases::Expectation;
use hypercurv_core::caseverify::certificate::{equality_feasible_samples, run_case, Conclusion};
use hypercurv_core::caseverify::{scan, FeasibilityStatus, NamedCase, ScanBudget, Sequential};
use hypercurv_core::scalar::{rat, Field, Rational};

fn defaults(case: NamedCase, h: &Rational) -> Rational {
    case.default_ratio() * h * h
}

#[test]
fn named_cases_at_full_budget() {
    let budget = ScanBudget::default();
    let h = rat(1, 1);
    for case in NamedCase::ALL {
        let r = defaults(case, &h);
        let t = std::time::Instant::now();
        let run = run_case(case, &h, &r, &budget, 42, &Sequential).unwrap();
        println!(
            "{case}: {} residual {:.3e} witness {:?} exact {:?} cert {} ({:?}) in {:?}",
            run.verdict.status,
            run.verdict.residual,
            run.verdict.witness,
            run.verdict.exact_witness.as_ref().map(|w| w.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
            run.certificate.conclusion.as_str(),
            run.verdict.stats,
            t.elapsed()
        );
        assert_eq!(run.agree, Some(true), "{case}");
        assert!(run.certificate.pass);
    }
}

#[test]
fn witnesses_scale_with_mean_curvature() {
    let budget = ScanBudget::default().with_grid_points(100_000);
    for h in [rat(2, 1), rat(1, 3)] {
        for case in [NamedCase::Thm1Lambda2, NamedCase::Thm2Lambda3, NamedCase::Thm2Lambda2] {
            let r = defaults(case, &h);
            let run = run_case(case, &h, &r, &budget, 7, &Sequential).unwrap();
            let Conclusion::Pinned(expected) = &run.certificate.conclusion else { panic!() };
            assert_eq!(run.verdict.exact_witness.as_ref(), Some(expected), "{case} H={h}");
        }
    }
}

#[test]
fn infeasible_off_threshold() {
    let budget = ScanBudget::default().with_grid_points(100_000);
    let h = rat(1, 1);
    for (case, r) in [
        (NamedCase::Thm1Lambda2, rat(3, 4)),
        (NamedCase::Thm2Lambda3, rat(5, 6)),
        (NamedCase::Thm2Lambda2, rat(5, 8)),
        (NamedCase::Thm1Claim, rat(8, 9)),
        (NamedCase::Thm2Claim, rat(15, 16)),
    ] {
        let run = run_case(case, &h, &r, &budget, 3, &Sequential).unwrap();
        assert_eq!(run.certificate.conclusion, Conclusion::Infeasible);
        // A witness of the relaxed system is only acceptable on the strict
        // boundary, where the certificate takes over.
        if run.verdict.status == FeasibilityStatus::Witness {
            assert!(run.verdict.exact_witness.is_none(), "{case} R={r}");
            assert!(!run.verdict.strict_boundary.is_empty(), "{case} R={r}: {:?}", run.verdict.witness);
        }
    }
}

#[test]
fn scan_is_deterministic_and_refinement_keeps_witnesses() {
    let h = rat(1, 1);
    let case = NamedCase::Thm2Lambda2;
    let sys = case.system(&h, &defaults(case, &h));
    let coarse = ScanBudget::default().with_grid_points(4_096);
    let a = scan(&sys, &coarse, 9).unwrap();
    let b = scan(&sys, &coarse, 9).unwrap();
    assert_eq!(a, b);
    for points in [4_096u64, 32_768, 262_144] {
        let v = scan(&sys, &ScanBudget::default().with_grid_points(points), 9).unwrap();
        assert_eq!(v.status, FeasibilityStatus::Witness, "{points}");
    }
}

#[test]
fn certificates_agree_with_scans_on_equality_feasible_points() {
    let h = rat(1, 1);
    let tol = ScanBudget::default().tolerance;
    for case in NamedCase::ALL {
        let r = defaults(case, &h);
        let sys = case.system(&h, &r);
        let compiled = sys.compile(ScanBudget::default().epsilon);
        let samples = equality_feasible_samples(&sys, 1000, 17);
        assert_eq!(samples.len(), 1000);
        for x in &samples {
            let feasible = compiled.violations(x).max <= tol;
            match case.expectation(&h, &r) {
                Expectation::Infeasible => assert!(!feasible, "{case} {x:?}"),
                Expectation::Pinned(w) => {
                    if feasible {
                        let near = x.iter().zip(&w).all(|(a, b)| (a - b.as_f64()).abs() < 1e-3);
                        assert!(near, "{case} {x:?}");
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}
