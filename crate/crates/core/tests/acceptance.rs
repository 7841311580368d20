//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use foxh::bessel::rescaled_bessel;
use foxh::eval::{choose_contour, eval_h, eval_h_series, evaluate};
use foxh::foxwright::{eval_fw, mittag_leffler};
use foxh::harness::{
    chebyshev_check, check_complete_monotonicity, check_log_complete_monotonicity, check_positive_definite,
    run_theorem_suite, GridSpec, SuiteConfig,
};
use foxh::spec::{self, from_fox_wright, FoxWrightSpec, HFunctionSpec};
use foxh::transforms::{hankel_numeric, hankel_of_h, laplace_closed_form, laplace_numeric, laplace_of_h};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn random_fox_wright(rng: &mut ChaCha8Rng) -> FoxWrightSpec {
    let p = rng.random_range(1..=3);
    let q = rng.random_range(1..=2);
    let upper: Vec<(f64, f64)> = (0..p).map(|_| (rng.random_range(0.3..3.0), rng.random_range(0.25..1.5))).collect();
    let sum_a: f64 = upper.iter().map(|u| u.1).sum();
    // ΣB - ΣA in [0, 1] keeps Δ in [1, 2]
    let total = sum_a + rng.random_range(0.0..1.0);
    let shares: Vec<f64> = (0..q).map(|_| rng.random_range(0.5..1.5)).collect();
    let norm: f64 = shares.iter().sum();
    let lower = shares.iter().map(|s| (rng.random_range(0.3..3.0), total * s / norm)).collect();
    FoxWrightSpec::new(upper, lower).unwrap()
}

fn oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for i in 0..20 {
        let fw = random_fox_wright(&mut rng);
        let h = from_fox_wright(&fw).map_err(|e| e.to_string())?;
        let contour = choose_contour(&h, 1e-12).map_err(|e| e.to_string())?;
        for z in [0.25, 1.0, 4.0] {
            let c = eval_h(&h, z, contour).map_err(|e| format!("spec {i}: {e}"))?.value;
            let s = eval_h_series(&h, z, 1e-14).map_err(|e| format!("spec {i}: {e}"))?.value;
            let f = eval_fw(&fw, -z, 1e-15).map_err(|e| format!("spec {i}: {e}"))?.value;
            for (x, y) in [(c, s), (c, f), (s, f)] {
                let rel = (x - y).abs() / x.abs().max(y.abs());
                worst = worst.max(rel);
                if rel > 1e-7 {
                    bad.push(format!("spec {i} z={z}: {x} vs {y}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("60 points, worst relative gap {worst:.1e}, {:.1}s", elapsed.as_secs_f64());
    if bad.is_empty() && elapsed < Duration::from_secs(60) {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", bad.join("; ")))
    }
}

fn closed_forms() -> Outcome {
    let exp = HFunctionSpec::exponential();
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let z = 0.1 + 0.9 * k as f64;
        let v = evaluate(&exp, z, 1e-12).map_err(|e| e.to_string())?.value;
        worst = worst.max((v - (-z).exp()).abs());
    }
    for z in [-3.0, -1.0, 0.5, 1.0, 2.5] {
        let v = mittag_leffler(1.0, 1.0, 1.0, z, 1e-15).map_err(|e| e.to_string())?.value;
        worst = worst.max((v - z.exp()).abs());
    }
    let c = mittag_leffler(2.0, 1.0, 1.0, 1.0, 1e-15).map_err(|e| e.to_string())?.value;
    worst = worst.max((c - 1f64.cosh()).abs());
    let detail = format!("e^-z at 10 points, E(1,1) at 5, E(2,1)(1); worst abs error {worst:.1e}");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn property_specs() -> Vec<HFunctionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut out = vec![
        HFunctionSpec::exponential(),
        HFunctionSpec::mittag_leffler(0.6, 0.9, 1.3).unwrap(),
        HFunctionSpec::mittag_leffler(0.8, 1.2, 0.7).unwrap(),
        HFunctionSpec::new(0, 2, vec![(0.0, 1.0), (0.5, 1.0)], vec![]).unwrap(),
        HFunctionSpec::new(1, 2, vec![(0.0, 1.0), (0.3, 0.5)], vec![(0.4, 1.0), (0.2, 0.5)]).unwrap(),
    ];
    while out.len() < 10 {
        out.push(from_fox_wright(&random_fox_wright(&mut rng)).unwrap());
    }
    out
}

fn transformation_identities() -> Outcome {
    let tol = 1e-11;
    let ev = |s: &HFunctionSpec, z: f64| evaluate(s, z, tol).map(|e| e.value).map_err(|e| format!("{s}: {e}"));
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let mut record = |name: &str, i: usize, z: f64, x: f64, y: f64| {
        let rel = (x - y).abs() / x.abs().max(y.abs()).max(1e-300);
        worst = worst.max(rel);
        if rel > 1e-7 {
            bad.push(format!("{name} spec {i} z={z}: {x} vs {y}"));
        }
    };
    for (i, h) in property_specs().iter().enumerate() {
        let inv = spec::invert_argument(h);
        let (scaled, k) = spec::scale_argument(h, 1.5).map_err(|e| e.to_string())?;
        let shifted = spec::shift_power(h, 0.4);
        for z in [0.5, 1.0, 2.0] {
            let base = ev(h, z)?;
            record("inversion", i, z, base, ev(&inv, 1.0 / z)?);
            record("scaling", i, z, base, k * ev(&scaled, z.powf(k))?);
            record("power shift", i, z, z.powf(0.4) * base, ev(&shifted, z)?);
        }
    }
    let reducible = [
        (
            HFunctionSpec::new(0, 2, vec![(0.0, 1.0), (0.7, 0.5)], vec![(0.7, 0.5)]).unwrap(),
            HFunctionSpec::exponential(),
        ),
        (
            HFunctionSpec::new(2, 1, vec![(0.0, 1.0), (0.3, 0.8)], vec![(0.3, 0.8), (0.0, 0.6)]).unwrap(),
            HFunctionSpec::new(1, 1, vec![(0.0, 1.0)], vec![(0.0, 0.6)]).unwrap(),
        ),
        (
            HFunctionSpec::new(0, 3, vec![(0.0, 1.0), (0.5, 1.0), (1.2, 2.0)], vec![(1.2, 2.0)]).unwrap(),
            HFunctionSpec::new(0, 2, vec![(0.0, 1.0), (0.5, 1.0)], vec![]).unwrap(),
        ),
    ];
    let mut mismatched = Vec::new();
    for (i, (padded, expected)) in reducible.iter().enumerate() {
        let reduced = spec::reduce_matching_pair(padded).map_err(|e| format!("reducible {i}: {e}"))?;
        if &reduced != expected {
            mismatched.push(format!("reducible {i}: got {reduced}"));
        }
        for z in [0.5, 1.0, 2.0] {
            record("reduction", i, z, ev(padded, z)?, ev(&reduced, z)?);
        }
    }
    bad.extend(mismatched);
    let detail = format!("invert/scale/shift on 10 specs, reduction on 3; worst relative gap {worst:.1e}");
    if bad.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", bad.join("; ")))
    }
}

fn laplace_identity() -> Outcome {
    let specs = [
        HFunctionSpec::exponential(),
        HFunctionSpec::mittag_leffler(0.7, 1.0, 1.0).unwrap(),
        HFunctionSpec::mittag_leffler(0.5, 0.8, 1.5).unwrap(),
        HFunctionSpec::new(0, 2, vec![(0.0, 1.0), (0.5, 1.0)], vec![]).unwrap(),
        from_fox_wright(&FoxWrightSpec::new(vec![(1.5, 0.5)], vec![(1.0, 1.0)]).unwrap()).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for (i, h) in specs.iter().enumerate() {
        let big_d = spec::structural_sums(h).1;
        if !(big_d > 0.0) {
            return Err(format!("spec {i} has D = {big_d}"));
        }
        let image = laplace_of_h(h).map_err(|e| e.to_string())?;
        for s in [0.5, 1.0, 2.0] {
            let closed = laplace_closed_form(&image, s, 1e-10).map_err(|e| format!("spec {i}: {e}"))?;
            let numeric = laplace_numeric(h, s, 1e-8).map_err(|e| format!("spec {i}: {e}"))?.value;
            worst = worst.max((closed - numeric).abs());
        }
    }
    let detail = format!("5 specs at s = 0.5, 1, 2; worst gap {worst:.1e}");
    if worst <= 1e-5 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hankel_identity() -> Outcome {
    let start = Instant::now();
    let tuples = [
        (HFunctionSpec::exponential(), 1.0, 0.5, 1.0, 1.0, 1.0),
        (HFunctionSpec::new(0, 2, vec![(0.0, 1.0), (0.5, 1.0)], vec![]).unwrap(), 2.0, 1.0, 2.0, 1.0, 1.5),
        (HFunctionSpec::mittag_leffler(0.6, 1.0, 1.0).unwrap(), 0.25, 0.0, 1.0, 1.0, 2.0),
    ];
    let mut worst: f64 = 0.0;
    for (i, (h, rho, nu, sigma, b, x)) in tuples.iter().enumerate() {
        let closed = hankel_of_h(h, *rho, *nu, *sigma)
            .and_then(|img| img.evaluate(*b, *x, 1e-10))
            .map_err(|e| format!("tuple {i}: {e}"))?;
        let numeric = hankel_numeric(h, *rho, *nu, *sigma, *b, *x, 1e-8).map_err(|e| format!("tuple {i}: {e}"))?;
        worst = worst.max((closed - numeric.value).abs());
    }
    let elapsed = start.elapsed();
    let detail = format!("3 tuples, worst gap {worst:.1e}, {:.1}s", elapsed.as_secs_f64());
    if worst <= 1e-4 && elapsed < Duration::from_secs(120) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn theorem_suites() -> Outcome {
    let cfg = SuiteConfig::default();
    let mut lines = Vec::new();
    let mut all = true;
    for id in ["H1", "H2", "H3", "H8", "kummer"] {
        let start = Instant::now();
        let report = run_theorem_suite(id, 10, 42, &cfg).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let ok = report.passed && report.samples_tested == 10 && elapsed < Duration::from_secs(300);
        all &= ok;
        lines.push(format!(
            "{id} {} (margin {:.2e}, {:.1}s)",
            if ok { "pass" } else { "FAIL" },
            report.worst_margin.unwrap_or(f64::NAN),
            elapsed.as_secs_f64()
        ));
    }
    if all {
        Ok(lines.join(", "))
    } else {
        Err(lines.join(", "))
    }
}

fn checker_calibration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = GridSpec::linear(0.05, 10.0, 100);
    let mut bad = Vec::new();

    let mut mixtures: Vec<Box<dyn Fn(f64) -> f64>> = Vec::new();
    for i in 0..20 {
        let terms: Vec<(f64, f64)> =
            (0..rng.random_range(1..=4)).map(|_| (rng.random_range(0.1..2.0), rng.random_range(0.05..3.0))).collect();
        let f = move |x: f64| terms.iter().map(|&(w, r)| w * (-r * x).exp()).sum::<f64>();
        if !check_complete_monotonicity(&f, &grid, 6, 1e-6).map_err(|e| e.to_string())?.passed {
            bad.push(format!("mixture {i} rejected"));
        }
        mixtures.push(Box::new(f));
    }
    if check_complete_monotonicity(&f64::exp, &GridSpec::linear(0.05, 3.0, 50), 6, 1e-6).map_err(|e| e.to_string())?.passed {
        bad.push("e^x accepted".into());
    }

    let pd_ok = [
        ("cos", 1, Box::new(|r: f64| r.cos()) as Box<dyn Fn(f64) -> f64>),
        ("Gaussian", 3, Box::new(|r: f64| (-r * r).exp())),
        ("J_1/2", 3, Box::new(|r: f64| rescaled_bessel(0.5, r))),
        ("J_1", 4, Box::new(|r: f64| rescaled_bessel(1.0, r))),
    ];
    for (name, d, f) in &pd_ok {
        if !check_positive_definite(f, *d, 12, 20, 1e-8, &mut rng).map_err(|e| e.to_string())?.passed {
            bad.push(format!("{name} rejected"));
        }
    }
    if check_positive_definite(&|r: f64| r * r, 3, 12, 20, 1e-8, &mut rng).map_err(|e| e.to_string())?.passed {
        bad.push("‖x‖² accepted".into());
    }

    let mut reversed = 0;
    for i in 0..50 {
        let (u, v) = (rng.random_range(0.2..3.0), rng.random_range(0.2..3.0));
        let weight = rng.random_range(0.0..2.0);
        let synchronous = i % 2 == 0;
        let p = move |t: f64| (-weight * t).exp();
        let f = move |t: f64| t.powf(u);
        let out = if synchronous {
            chebyshev_check(p, f, move |t: f64| t.powf(v), 0.0, 2.0, 1e-12)
        } else {
            chebyshev_check(p, f, move |t: f64| (-v * t).exp(), 0.0, 2.0, 1e-12)
        };
        match (synchronous, out.holds, out.lhs <= out.rhs) {
            (true, true, _) => {}
            (false, _, true) => reversed += 1,
            _ => bad.push(format!("Chebyshev pair {i}: lhs {} rhs {}", out.lhs, out.rhs)),
        }
    }

    let mut log_cm = 0;
    let extra: Vec<Box<dyn Fn(f64) -> f64>> = vec![
        Box::new(|x: f64| 1.0 / (1.0 + x)),
        Box::new(|x: f64| x.powf(-0.5)),
        Box::new(|x: f64| (-x * x).exp()),
        Box::new(|x: f64| (1.0 + x).ln() / x),
    ];
    for (i, f) in mixtures.iter().chain(&extra).enumerate() {
        let l = check_log_complete_monotonicity(f, &grid, 4, 1e-6).map_err(|e| e.to_string())?;
        if l.passed {
            log_cm += 1;
            if !check_complete_monotonicity(f, &grid, 4, 1e-6).map_err(|e| e.to_string())?.passed {
                bad.push(format!("function {i} is log-CM but not CM"));
            }
        }
    }
    let detail = format!("20 mixtures, e^x, 4 PD kernels, ‖x‖², 50 Chebyshev pairs ({reversed} reversed), {log_cm} log-CM functions");
    if bad.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", bad.join("; ")))
    }
}

fn determinism() -> Outcome {
    let cfg = SuiteConfig { grid_count: 40, ..SuiteConfig::default() };
    let mut bad = Vec::new();
    for id in ["kummer", "H3", "cor-4.2"] {
        let render = || -> Result<(String, Vec<u8>), String> {
            let r = run_theorem_suite(id, 6, 1234, &cfg).map_err(|e| e.to_string())?;
            let mut csv = Vec::new();
            r.write_csv(&mut csv).map_err(|e| e.to_string())?;
            Ok((r.to_json(), csv))
        };
        let (a, b) = (render()?, render()?);
        if a != b {
            bad.push(id);
        }
    }
    let explicit: BTreeMap<String, f64> = [("tau", 0.5), ("d", 3.0)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let once = foxh::harness::run_theorem_on("h8", std::slice::from_ref(&explicit), 5, &cfg).map_err(|e| e.to_string())?;
    let twice = foxh::harness::run_theorem_on("h8", &[explicit], 5, &cfg).map_err(|e| e.to_string())?;
    if once.to_json() != twice.to_json() {
        bad.push("h8 explicit");
    }
    if bad.is_empty() {
        Ok("JSON and CSV byte-identical across repeated runs of 3 suites and one explicit sample".into())
    } else {
        Err(format!("reports differ for {}", bad.join(", ")))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle agreement", oracle_agreement),
        ("closed forms", closed_forms),
        ("transformation identities", transformation_identities),
        ("Laplace identity", laplace_identity),
        ("Hankel identity", hankel_identity),
        ("theorem suites", theorem_suites),
        ("checker calibration", checker_calibration),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
