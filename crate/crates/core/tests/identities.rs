use hypercurv_core::scalar::{binomial, rat, Rational};
use hypercurv_core::spectrum::{
    elementary_symmetric, identity_residuals, invariants, newton_eigenvalues, newton_trace_residual,
    sigma_recursion_residuals, tr_a3_lemma_sides, CurvatureSpectrum,
};
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-50i64..=50, (-50i64..=50).prop_filter("non-zero denominator", |d| *d != 0)).prop_map(|(p, q)| rat(p, q))
}

fn spectrum() -> impl Strategy<Value = (Vec<Rational>, Rational)> {
    (3usize..=12).prop_flat_map(|n| (prop::collection::vec(rational(), n), rational()))
}

fn power_sum(x: &[Rational], k: u32) -> Rational {
    x.iter().map(|v| num_traits::pow(v.clone(), k as usize)).sum()
}

/// Elementary symmetric functions from power sums (Newton's identities),
/// independent of the product expansion used by the library.
fn oracle_sigma(x: &[Rational]) -> Vec<Rational> {
    let n = x.len();
    let p: Vec<Rational> = (0..=n as u32).map(|k| power_sum(x, k)).collect();
    let mut e = vec![Rational::from_integer(1.into())];
    for k in 1..=n {
        let mut acc = Rational::zero();
        for i in 1..=k {
            let term = &e[k - i] * &p[i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / rat(k as i64, 1));
    }
    e
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 2_000, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn exact_identities_hold((lambdas, c) in spectrum()) {
        let n = lambdas.len();
        let s = CurvatureSpectrum::new(lambdas.clone(), c.clone()).unwrap();
        let report = invariants(&s);

        // Symmetric functions against the power-sum oracle.
        prop_assert_eq!(&report.symmetric, &oracle_sigma(&lambdas));
        prop_assert_eq!(&elementary_symmetric(&lambdas), &report.symmetric);

        // One-variable recursion, every (i, r).
        for row in sigma_recursion_residuals(s.lambdas()) {
            prop_assert!(row.iter().all(Zero::is_zero));
        }

        // Gauss trace relation, recomputed from first principles.
        let nn = rat(n as i64, 1);
        let h = power_sum(&lambdas, 1) / &nn;
        let a2 = power_sum(&lambdas, 2);
        let sigma2 = (power_sum(&lambdas, 1) * power_sum(&lambdas, 1) - &a2) / rat(2, 1);
        let r = &c + &sigma2 / binomial::<Rational>(n, 2);
        prop_assert_eq!(&report.mean_curvature, &h);
        prop_assert_eq!(&report.scalar_curvature, &r);
        prop_assert!((&nn * &nn * &h * &h - &a2 - &nn * (&nn - rat(1, 1)) * (&r - &c)).is_zero());

        // Traceless part.
        let mu: Vec<Rational> = lambdas.iter().map(|l| l - &h).collect();
        prop_assert!(power_sum(&mu, 1).is_zero());
        prop_assert_eq!(power_sum(&mu, 2), &a2 - &nn * &h * &h);
        prop_assert_eq!(power_sum(&lambdas, 3), power_sum(&mu, 3) + rat(3, 1) * &h * power_sum(&mu, 2) + &nn * &h * &h * &h);

        let res = identity_residuals(&s, &report);
        prop_assert!(res.all().iter().all(|x| x.is_zero()));

        // Cubic trace lemma.
        let (lhs, rhs) = tr_a3_lemma_sides(&s);
        prop_assert_eq!(&lhs, &rhs);
        let direct = &nn * &h / rat(2, 1) * (rat(3, 1) * &a2 - &nn * &nn * &h * &h) + rat(3, 1) * &report.symmetric[3];
        prop_assert_eq!(lhs, direct);

        // Newton tensors: trace identities and explicit eigenvalues.
        for k in 0..n {
            prop_assert!(newton_trace_residual(&s, k).unwrap().is_zero());
            let p = newton_eigenvalues(&s, k).unwrap();
            let trace: Rational = p.iter().sum();
            prop_assert_eq!(trace, rat((n - k) as i64, 1) * &report.symmetric[k]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn reports_ignore_input_order((lambdas, c) in spectrum(), seed in any::<u64>()) {
        let mut shuffled = lambdas.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            shuffled.swap(i, (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize);
        }
        let a = CurvatureSpectrum::new(lambdas, c.clone()).unwrap();
        let b = CurvatureSpectrum::new(shuffled, c).unwrap();
        prop_assert_eq!(invariants(&a), invariants(&b));
        prop_assert!(a.lambdas().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn float_identities_hold_to_rounding(x in prop::collection::vec(-10.0f64..10.0, 3..=12)) {
        let s = CurvatureSpectrum::new(x, 0.0).unwrap();
        let report = invariants(&s);
        let res = identity_residuals(&s, &report);
        let scale = (1.0 + report.norm_a2).powi(2);
        prop_assert!(res.gauss_trace.abs() < 1e-7 * scale);
        prop_assert!(res.max_abs() < 1e-9 * scale * s.dim() as f64);
    }
}

#[test]
fn degenerate_dimension_two_is_accepted() {
    let s = CurvatureSpectrum::new(vec![rat(1, 1), rat(3, 1)], rat(0, 1)).unwrap();
    let r = invariants(&s);
    assert_eq!(r.mean_curvature, rat(2, 1));
    assert_eq!(r.scalar_curvature, rat(3, 1));
    assert!(identity_residuals(&s, &r).all().iter().all(|x| x.is_zero()));
    assert!(CurvatureSpectrum::new(vec![rat(1, 1)], rat(0, 1)).is_err());
}
