//! Acceptance gate: one line per criterion, each with its time budget.

use std::cmp::Ordering;
use std::process::Command;
use std::time::{Duration, Instant};

use hypercurv_core::cylinders::{cylinder_from_h, scalar_ladder};
use hypercurv_core::scalar::{rat, Rational, Tolerance};
use hypercurv_core::simons::{cmc_bracket_sign, simons_rhs_general, simons_rhs_spaceform, SimonsPointData};
use hypercurv_core::spectrum::{
    identity_residuals, invariants, newton_trace_residual, okumura_bound, sigma_recursion_residuals, tr_a3_lemma_sides,
    CurvatureSpectrum,
};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn hypercurv(args: &[&str]) -> Result<(i32, Value, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hypercurv"))
        .env_remove("HYPERCURV_SEED")
        .args(["--format", "json"])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    let value = serde_json::from_slice(&out.stdout)
        .map_err(|e| format!("{args:?}: {e}; stderr {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok((code, value, out.stdout))
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().map(|a| a.iter().filter_map(|x| x.as_str().map(String::from)).collect()).unwrap_or_default()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().map(|a| a.iter().filter_map(Value::as_f64).collect()).unwrap_or_default()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let p = rng.gen_range(-50i64..=50);
    let mut q = 0;
    while q == 0 {
        q = rng.gen_range(-50i64..=50);
    }
    rat(p, q)
}

fn ladder_reproduction() -> Check {
    let expected: [(&str, &[&str]); 3] =
        [("3", &["0", "3/4", "1"]), ("4", &["0", "2/3", "8/9", "1"]), ("5", &["0", "5/8", "5/6", "15/16", "1"])];
    for (n, want) in expected {
        let (code, v, _) = hypercurv(&["ladder", "--n", n])?;
        let got: Vec<String> =
            v["rows"].as_array().into_iter().flatten().map(|r| r["ratio"].as_str().unwrap_or("").to_string()).collect();
        ensure(code == 0 && got == want, || format!("n={n}: {got:?}"))?;
    }
    Ok("n = 3, 4, 5 exact".into())
}

fn radii() -> Check {
    let mut count = 0;
    for h in [rat(1, 1), rat(2, 1), rat(1, 3)] {
        let mut cases = vec![(4, 3, rat(3, 4)), (5, 4, rat(4, 5))];
        for n in 3..=10 {
            cases.push((n, 1, rat(1, n as i64)));
            cases.push((n, 2, rat(2, n as i64)));
        }
        for (n, k, coef) in cases {
            let m = cylinder_from_h(n, k, &h).map_err(|e| e.to_string())?;
            let want = &coef / &h;
            ensure(m.radius() == &want, || format!("n={n} k={k} H={h}: {} != {want}", m.radius()))?;
            let neg = cylinder_from_h(n, k, &-h.clone()).map_err(|e| e.to_string())?;
            ensure(neg.radius() == &want, || format!("n={n} k={k} H=-{h}"))?;
            count += 2;
        }
    }
    Ok(format!("{count} radii exact"))
}

fn bracket_vanishing() -> Check {
    for h in [rat(1, 1), rat(2, 1), rat(1, 3), rat(-3, 2)] {
        let h2 = &h * &h;
        for (n, coef) in [(4, rat(4, 3)), (5, rat(5, 4))] {
            let sign = cmc_bracket_sign(n, &Rational::zero(), &h, &(coef * &h2)).map_err(|e| e.to_string())?;
            ensure(sign == Ordering::Equal, || format!("n={n} H={h}: {sign:?}"))?;
        }
    }
    Ok("n = 4 and n = 5 brackets exactly zero".into())
}

fn identity_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let trials = 10_000;
    for t in 0..trials {
        let n = rng.gen_range(3..=12);
        let lambdas: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let c = random_rational(&mut rng);
        let s = CurvatureSpectrum::new(lambdas.clone(), c).map_err(|e| e.to_string())?;
        let fail = || format!("trial {t}: {lambdas:?}");
        ensure(sigma_recursion_residuals(s.lambdas()).iter().flatten().all(Zero::is_zero), fail)?;
        let report = invariants(&s);
        ensure(identity_residuals(&s, &report).all().iter().all(|x| x.is_zero()), fail)?;
        let (lhs, rhs) = tr_a3_lemma_sides(&s);
        ensure(lhs == rhs, fail)?;
        for r in 0..n {
            ensure(newton_trace_residual(&s, r).map_err(|e| e.to_string())?.is_zero(), fail)?;
        }
    }
    Ok(format!("{trials} exact spectra, zero failures"))
}

fn cubic_bound() -> Check {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 10_000;
    for t in 0..trials {
        let n = rng.gen_range(3..=16);
        let mut mu: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let mean = mu.iter().sum::<f64>() / n as f64;
        mu.iter_mut().for_each(|x| *x -= mean);
        let b = okumura_bound(&mu, &tol).map_err(|e| e.to_string())?;
        let beta = mu.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nf = n as f64;
        let bound = (nf - 2.0) / (nf * (nf - 1.0)).sqrt() * beta.powi(3);
        let s3: f64 = mu.iter().map(|x| x.powi(3)).sum();
        ensure(b.within && s3.abs() <= bound * (1.0 + 1e-9), || format!("trial {t}: {mu:?}"))?;
        ensure((b.upper() - bound).abs() <= 1e-9 * bound, || format!("trial {t}: bound {} vs {bound}", b.upper()))?;
    }
    let mut constructed = 0;
    for n in 3..=12 {
        for a in [1i64, -2, 3] {
            let mut mu = vec![rat(a, 1); n - 1];
            mu.push(rat(-(n as i64 - 1) * a, 1));
            let b = okumura_bound(&mu, &tol).map_err(|e| e.to_string())?;
            let f: Vec<f64> = mu.iter().map(|q| q.to_string().parse::<f64>().unwrap()).collect();
            let fb = okumura_bound(&f, &tol).map_err(|e| e.to_string())?;
            ensure(b.equality && fb.equality, || format!("equality missed: n={n} a={a}"))?;
            if n >= 4 {
                let mut off = mu.clone();
                off[0] += rat(1, 3);
                off[1] -= rat(1, 3);
                let ob = okumura_bound(&off, &tol).map_err(|e| e.to_string())?;
                let mut foff = f.clone();
                foff[0] += 1e-3;
                foff[1] -= 1e-3;
                let fob = okumura_bound(&foff, &tol).map_err(|e| e.to_string())?;
                ensure(!ob.equality && !fob.equality, || format!("false equality: n={n} a={a}"))?;
            }
            constructed += 1;
        }
    }
    Ok(format!("{trials} float vectors, {constructed} constructed equality cases"))
}

fn simons_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = 1_000;
    for t in 0..trials {
        let n = rng.gen_range(3..=8);
        let lambdas: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let c = random_rational(&mut rng);
        let grad = random_rational(&mut rng).abs();
        let hess: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let sp = CurvatureSpectrum::new(lambdas, c).map_err(|e| e.to_string())?;
        let data = SimonsPointData::with_gauss(sp.clone(), grad.clone(), hess.clone()).map_err(|e| e.to_string())?;
        let general = simons_rhs_general(&data);
        let spaceform = simons_rhs_spaceform(&sp, &grad, &hess).map_err(|e| e.to_string())?;
        ensure(general == spaceform, || format!("trial {t}: {general} != {spaceform}"))?;
    }
    let mut cylinders = 0;
    for n in 3..=10 {
        for rung in scalar_ladder(n).map_err(|e| e.to_string())?.into_iter().skip(1) {
            let sp = cylinder_from_h(n, rung.k, &rat(1, 1)).map_err(|e| e.to_string())?.spectrum();
            let zeros = vec![Rational::zero(); n];
            let data =
                SimonsPointData::with_gauss(sp.clone(), Rational::zero(), zeros.clone()).map_err(|e| e.to_string())?;
            ensure(simons_rhs_general(&data).is_zero(), || format!("general n={n} k={}", rung.k))?;
            let sf = simons_rhs_spaceform(&sp, &Rational::zero(), &zeros).map_err(|e| e.to_string())?;
            ensure(sf.is_zero(), || format!("space form n={n} k={}", rung.k))?;
            cylinders += 1;
        }
    }
    Ok(format!("{trials} exact points, {cylinders} ladder cylinders"))
}

fn case_scans() -> Check {
    let cases: [(&str, Option<[f64; 5]>, usize); 5] = [
        ("thm1-claim", None, 4),
        ("thm1-lambda2", Some([0.0, 0.0, 2.0, 2.0, 0.0]), 4),
        ("thm2-claim", None, 5),
        ("thm2-lambda3", Some([0.0, 0.0, 0.0, 2.5, 2.5]), 5),
        ("thm2-lambda2", Some([0.0, 0.0, 5.0 / 3.0, 5.0 / 3.0, 5.0 / 3.0]), 5),
    ];
    let mut lines = Vec::new();
    for (name, witness, n) in cases {
        let args = ["scan", "--case", name, "--budget", "1000000", "--seed", "42", "--jobs", "4"];
        let (code, v, first) = hypercurv(&args)?;
        let (_, _, second) = hypercurv(&args)?;
        ensure(first == second, || format!("{name}: output differs between runs"))?;
        ensure(v["grid_points"].as_u64() == Some(1_000_000), || format!("{name}: budget {}", v["grid_points"]))?;
        let cert = &v["certificate"];
        ensure(code == 0 && v["pass"] == true && cert["pass"] == true && v["agree"] == true, || {
            format!("{name}: exit {code}, status {}, certificate {}", v["status"], cert["conclusion"])
        })?;
        match witness {
            None => {
                ensure(v["status"] == "NO_WITNESS" && cert["conclusion"] == "INFEASIBLE", || {
                    format!("{name}: {} / {}", v["status"], cert["conclusion"])
                })?;
                lines.push(format!("{name} NO_WITNESS"));
            }
            Some(w) => {
                let got = floats(&v["witness"]);
                let d = max_diff(&got, &w[..n]);
                ensure(v["status"] == "WITNESS" && d <= 1e-8, || format!("{name}: {got:?} ({d:e})"))?;
                lines.push(format!("{name} ({})", strings(&v["exact_witness"]).join(",")));
            }
        }
    }
    Ok(lines.join("; "))
}

fn immersion_pipeline() -> Check {
    let (code, v, _) = hypercurv(&["immersion-eval", "--shape", "sphere", "--n", "4", "--rho", "2", "--compare"])?;
    let p = &v["points"][0];
    let l = floats(&p["lambdas"]);
    ensure(code == 0 && max_diff(&l, &[0.5; 4]) <= 1e-8, || format!("sphere: {l:?}"))?;
    let cmp = p["compare"]["max_abs_diff"].as_f64().unwrap_or(f64::INFINITY);
    ensure(cmp <= 1e-5, || format!("sphere analytic vs FD {cmp:e}"))?;

    let (code, v, _) =
        hypercurv(&["immersion-eval", "--shape", "cylinder", "--n", "4", "--k", "2", "--radius", "0.5", "--compare"])?;
    let p = &v["points"][0];
    let l = floats(&p["lambdas"]);
    ensure(code == 0 && max_diff(&l, &[0.0, 0.0, 2.0, 2.0]) <= 1e-8, || format!("cylinder: {l:?}"))?;
    let r = p["R"].as_f64().unwrap_or(f64::NAN);
    ensure((r - 2.0 / 3.0).abs() <= 1e-7, || format!("cylinder R = {r}"))?;
    let cmp2 = p["compare"]["max_abs_diff"].as_f64().unwrap_or(f64::INFINITY);
    ensure(cmp2 <= 1e-5, || format!("cylinder analytic vs FD {cmp2:e}"))?;
    Ok(format!("sphere and cylinder; analytic vs FD {:.1e}", cmp.max(cmp2)))
}

fn rigidity_annotations() -> Check {
    let mut seen = std::collections::BTreeSet::new();
    for n in 3..=6 {
        for rung in scalar_ladder(n).map_err(|e| e.to_string())? {
            let r = rung.ratio.to_string();
            let (code, v, _) = hypercurv(&["classify", "--n", &n.to_string(), "--H", "1", "--R", &r])?;
            let status = v["rigidity"].as_str().unwrap_or("").to_string();
            ensure(code == 0 && v["verdict"] == "OnLadder" && v["k"] == rung.k, || format!("n={n} k={}: {v}", rung.k))?;
            ensure(!status.is_empty() && v["note"].as_str().is_some_and(|s| !s.is_empty()), || {
                format!("n={n} k={}: no annotation", rung.k)
            })?;
            seen.insert(status);
        }
    }
    ensure(seen.contains("rigid") && seen.len() > 1, || format!("statuses {seen:?}"))?;
    Ok(format!("statuses seen: {}", seen.into_iter().collect::<Vec<_>>().join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("ladder reproduction", ladder_reproduction, Duration::from_secs(1)),
        ("cylinder radii", radii, Duration::from_secs(1)),
        ("bracket vanishing", bracket_vanishing, Duration::from_secs(1)),
        ("identity suite", identity_suite, Duration::from_secs(60)),
        ("cubic bound", cubic_bound, Duration::from_secs(30)),
        ("simons equivalence", simons_equivalence, Duration::from_secs(30)),
        ("case scans", case_scans, Duration::from_secs(300)),
        ("immersion pipeline", immersion_pipeline, Duration::from_secs(30)),
        ("rigidity annotations", rigidity_annotations, Duration::ZERO),
    ];
    let mut failed = Vec::new();
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = budget.is_zero() || elapsed < budget;
        let (ok, detail) = match result {
            Ok(d) if in_time => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(e) => (false, e),
        };
        println!("criterion {} {name}: {} in {elapsed:.2?} ({detail})", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
