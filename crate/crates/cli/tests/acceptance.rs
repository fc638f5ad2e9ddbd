//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use asymptolim::convergence::{
    cdf_sequence_probe, default_unit_grid, variation_limit_check, ProbeOptions,
};
use asymptolim::measure::{AtomicMeasure, HyperBox};
use asymptolim::problems::{
    dirichlet_weak, frac_limit_law, frac_n_over_i_family, frac_n_over_i_mean, interval_proportion_sin,
    polynomial_family, root_law, PolySolution, PolySpec,
};
use asymptolim::quadrature::integrate_1d;
use asymptolim::special::{
    digamma, frac_limit_cdf, frac_limit_cdf_series, frac_limit_density, hurwitz_zeta, trigamma, EULER_GAMMA,
};
use asymptolim::stieltjes::{
    delta_box, integrate_smooth, integrate_step, riemann_stieltjes_oracle, Partition1D, SmoothCdf, StepCdf,
    VariationControl,
};
use asymptolim::Exec;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: asymptolim::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn cli(args: &[&str]) -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_asymptolim"))
        .args(args)
        .env_remove("ASYMPTOLIM_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let v = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok((v, elapsed))
}

fn field(v: &Value, key: &str) -> Result<f64, String> {
    v["result"][key].as_f64().ok_or_else(|| format!("missing result.{key}"))
}

fn c1_example1() -> Outcome {
    let (v, elapsed) = cli(&["solve", "example1", "--f", "sin", "--n", "1000000", "--threads", "1"])?;
    let closed = field(&v, "closed_form")?;
    let empirical = field(&v, "empirical")?;
    check((closed - (1.0 - 1f64.cos())).abs() < 1e-12, || format!("closed_form {closed}"))?;
    check((closed - 0.459_697_69).abs() < 1e-8, || format!("closed_form {closed}"))?;
    let err = (empirical - closed).abs();
    check(err <= 5e-3, || format!("|empirical - closed_form| = {err:e}"))?;
    check(elapsed <= Duration::from_secs(10), || format!("runtime {elapsed:?}"))?;
    Ok(format!("error {err:.3e}, runtime {:.3} s single-threaded", elapsed.as_secs_f64()))
}

fn c2_example2() -> Outcome {
    let r = lib(interval_proportion_sin(1_000_000, -0.5, 0.5, &Exec::default()))?;
    check((r.closed_form - 1.0 / 3.0).abs() < 1e-15, || format!("closed_form {}", r.closed_form))?;
    let err = (r.empirical - 1.0 / 3.0).abs();
    check(err <= 5e-3, || format!("|proportion - 1/3| = {err:e}"))?;
    Ok(format!("proportion {:.7}, error {err:.3e}", r.empirical))
}

fn c3_example3() -> Outcome {
    let grid = default_unit_grid();
    let ns = [1_000u64, 10_000, 100_000, 1_000_000];
    let report = lib(cdf_sequence_probe(
        &frac_n_over_i_family(),
        &frac_limit_law(),
        &grid,
        &ns,
        &ProbeOptions::default(),
        &Exec::default(),
    ))?;
    // the target is ψ(t) + 1/t + γ
    for (t, v) in grid.iter().zip(&report.target_values) {
        let direct = lib(digamma(*t))? + 1.0 / t + EULER_GAMMA;
        check((v - direct).abs() < 1e-12, || format!("target at {t}: {v} vs {direct}"))?;
    }
    // exact counting oracle at n = 10^4: 20 (n mod i) <= j i
    let n = 10_000u64;
    for (j, phi) in (1u64..20).zip(&report.cdf_values[1]) {
        let count = (1..=n).filter(|&i| 20 * (n % i) <= j * i).count() as f64;
        check((phi - count / n as f64).abs() < 1e-12, || format!("oracle mismatch at t = {j}/20"))?;
    }
    let sup = *report.sup_errors.last().unwrap();
    check(sup <= 2e-2, || format!("sup error at 10^6 = {sup:e}"))?;
    let decays = report.monotone_decay.iter().filter(|&&d| d).count();
    check(decays >= 2, || format!("non-increasing in {decays} of 3 steps: {:?}", report.sup_errors))?;
    let sups: Vec<String> = report.sup_errors.iter().map(|e| format!("{e:.2e}")).collect();
    Ok(format!("sup errors [{}], non-increasing in {decays} of 3 steps", sups.join(", ")))
}

fn c4_example4() -> Outcome {
    let exec = Exec::default();
    let mean = lib(frac_n_over_i_mean::<fn(f64) -> f64>(1_000_000, None, &exec))?;
    check((mean.closed_form - 0.422_784_3).abs() < 1e-7, || format!("closed_form {}", mean.closed_form))?;
    check(mean.abs_error <= 5e-3, || format!("mean error {:e}", mean.abs_error))?;
    let d = lib(dirichlet_weak(1_000_000, &exec))?;
    check((d.closed_form - 0.154_431_3).abs() < 1e-7, || format!("closed_form {}", d.closed_form))?;
    check(d.abs_error <= 5e-3, || format!("dirichlet error {:e}", d.abs_error))?;
    Ok(format!("mean error {:.3e}, dirichlet error {:.3e}", mean.abs_error, d.abs_error))
}

fn c5_polynomial() -> Outcome {
    let n = 100_000_000u64;
    let spec = lib(PolySpec::new(vec![0.0, 0.0, 1.0], 2, 1.0, |x| x))?;
    check(spec.n_terms(n) == 10_000, || format!("N(n) = {}", spec.n_terms(n)))?;
    let start = Instant::now();
    let sol = lib(polynomial_family(&spec, n, &Exec::default()))?;
    let elapsed = start.elapsed();
    let PolySolution::Limit(r) = sol else {
        return Err("q = r reported divergent".into());
    };
    // limit via integrate_smooth against φ = √x
    let q = lib(integrate_smooth(|x| x[0], &lib(root_law(2))?, &lib(HyperBox::interval(0.0, 1.0))?, 1e-12))?;
    // brute-force oracle with an exact integer numerator
    let numerator: u128 = (1..=10_000u128).map(|i| i * i).sum();
    let oracle = numerator as f64 / (n as f64 * 1e4);
    check((q.value - 1.0 / 3.0).abs() < 1e-9, || format!("integrate_smooth gives {}", q.value))?;
    check((r.closed_form - 1.0 / 3.0).abs() < 1e-9, || format!("closed_form {}", r.closed_form))?;
    check((oracle - 1.0 / 3.0).abs() <= 1e-3, || format!("oracle {oracle}"))?;
    check((r.empirical - oracle).abs() < 1e-12, || format!("empirical {} vs oracle {oracle}", r.empirical))?;
    check(r.abs_error <= 1e-3, || format!("error {:e}", r.abs_error))?;
    check(elapsed < Duration::from_secs(1), || format!("runtime {elapsed:?}"))?;
    Ok(format!("empirical {:.9}, error {:.3e}, runtime {:.1} ms", r.empirical, r.abs_error, elapsed.as_secs_f64() * 1e3))
}

fn c6_special() -> Outcome {
    let g = EULER_GAMMA;
    let d1 = (lib(digamma(1.0))? + g).abs();
    let dh = (lib(digamma(0.5))? + g + 2.0 * LN_2).abs();
    let t1 = (lib(trigamma(1.0))? - PI * PI / 6.0).abs();
    let mut worst = d1.max(dh).max(t1);
    for j in 1..=10 {
        let x = j as f64 * 0.35;
        worst = worst.max((lib(hurwitz_zeta(2.0, x))? - lib(trigamma(x))?).abs());
    }
    check(worst <= 1e-10, || format!("worst special error {worst:e}"))?;
    let mut series = 0.0f64;
    for j in 0..=60 {
        let t = j as f64 / 100.0;
        let s = lib(frac_limit_cdf_series(t, 200))?;
        series = series.max((s.value - frac_limit_cdf(t)).abs());
    }
    check(series <= 1e-12, || format!("series mismatch {series:e}"))?;
    Ok(format!("worst identity error {worst:.2e}, series mismatch {series:.2e}"))
}

fn random_measure(rng: &mut StdRng, dim: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let len = rng.gen_range(1..30);
    let pts = (0..len)
        .map(|_| (0..dim).map(|_| rng.gen_range(-8i32..8) as f64 / 4.0).collect())
        .collect();
    let w = (0..len).map(|_| rng.gen_range(0.01..5.0)).collect();
    (pts, w)
}

fn random_box(rng: &mut StdRng, dim: usize) -> HyperBox {
    let lower: Vec<f64> = (0..dim).map(|_| rng.gen_range(-9i32..9) as f64 / 4.0).collect();
    let upper = lower.iter().map(|l| l + rng.gen_range(0i32..10) as f64 / 4.0).collect();
    HyperBox::new(lower, upper).unwrap()
}

fn c7_stieltjes() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_box = 0.0f64;
    let control = VariationControl::default();
    for dim in 1..=3 {
        for _ in 0..1000 {
            let (pts, w) = random_measure(&mut rng, dim);
            let m = lib(AtomicMeasure::from_points(&pts, Some(&w)))?;
            let b = random_box(&mut rng, dim);
            let direct = lib(m.measure_box(&b))?;
            let delta = lib(delta_box(|x| m.cdf_eval(x).unwrap(), &b))?;
            worst_box = worst_box.max((direct - delta).abs());
            let f = |p: &[f64]| p.iter().map(|v| (v * 1.7).sin()).sum::<f64>();
            let cdf = StepCdf::new(m.clone());
            check(lib(integrate_step(f, &cdf))? == lib(m.expectation_scalar(f))?, || {
                "integrate_step differs from expectation".into()
            })?;
            if dim == 1 {
                let v = lib(cdf.variation(&control))?;
                check((v - 1.0).abs() < 1e-12, || format!("step CDF variation {v}"))?;
            }
        }
    }
    check(worst_box <= 1e-12, || format!("box vs Δ_R worst {worst_box:e}"))?;

    // smooth cases against the Riemann–Stieltjes oracle
    type Cdf = Box<dyn Fn(f64) -> f64>;
    let exp_cdf = |t: f64| (t.exp() - 1.0) / (1f64.exp() - 1.0);
    let laws: Vec<(&str, SmoothCdf<'static>, Cdf)> = vec![
        ("uniform", lib(SmoothCdf::uniform(0.0, 1.0))?, Box::new(|t: f64| t.clamp(0.0, 1.0))),
        ("sqrt", lib(root_law(2))?, Box::new(|t: f64| t.max(0.0).sqrt())),
        ("frac-limit", frac_limit_law(), Box::new(frac_limit_cdf)),
        (
            "exp",
            lib(SmoothCdf::new_1d(0.0, 1.0, exp_cdf, Some(|t: f64| t.exp() / (1f64.exp() - 1.0))))?,
            Box::new(exp_cdf),
        ),
    ];
    let fs: Vec<(&str, fn(f64) -> f64)> = vec![
        ("sin", f64::sin),
        ("cos", f64::cos),
        ("id", |x| x),
        ("square", |x| x * x),
        ("rational", |x| 1.0 / (1.0 + x * x)),
    ];
    let mut cases = 0;
    let mut worst_ratio = 0.0f64;
    for (law_name, law, phi) in &laws {
        for (f_name, f) in &fs {
            let q = lib(integrate_smooth(|x| f(x[0]), law, &lib(HyperBox::interval(0.0, 1.0))?, 1e-12))?;
            let sums = riemann_stieltjes_oracle(f, phi, 0.0, 1.0, 18);
            let last = sums[sums.len() - 1];
            let prev = sums[sums.len() - 2];
            let combined = q.abs_error + 4.0 * (last - prev).abs() + 1e-12;
            let diff = (q.value - last).abs();
            check(diff <= combined, || {
                format!("{f_name} d{law_name}: quadrature {} vs oracle {last}, tolerance {combined:e}", q.value)
            })?;
            worst_ratio = worst_ratio.max(diff / combined);
            cases += 1;
        }
    }
    check(cases == 20, || format!("{cases} smooth cases"))?;

    let q = lib(integrate_1d(|t| Ok(trigamma(t)? - 1.0 / (t * t)), 0.0, 1.0, 1e-12, 4000))?;
    let q_stable = lib(integrate_1d(|t| Ok(frac_limit_density(t)), 0.0, 1.0, 1e-12, 4000))?;
    check((q.value - 1.0).abs() <= 1e-9 && (q_stable.value - 1.0).abs() <= 1e-9, || {
        format!("∫(ψ′ − 1/t²) = {} / {}", q.value, q_stable.value)
    })?;
    Ok(format!(
        "3000 boxes worst {worst_box:.1e}; 20 smooth cases within {:.0}% of tolerance; ∫(ψ′−1/t²) − 1 = {:+.1e}",
        worst_ratio * 100.0,
        q.value - 1.0
    ))
}

fn c8_variation_limit() -> Outcome {
    let control = VariationControl::default();
    let window = lib(Partition1D::new(vec![(-0.5, 1.5)]))?;
    let ns = [10u64, 100, 1000, 10_000];
    let cdfs: Vec<StepCdf> = ns
        .iter()
        .map(|&n| AtomicMeasure::uniform_grid(n).map(StepCdf::new))
        .collect::<asymptolim::Result<_>>()
        .map_err(|e| e.to_string())?;
    let fns: Vec<Box<dyn Fn(f64) -> f64>> =
        cdfs.iter().map(|c| Box::new(move |t| c.value_1d(t)) as Box<dyn Fn(f64) -> f64>).collect();
    let refs: Vec<&dyn Fn(f64) -> f64> = fns.iter().map(|f| f.as_ref()).collect();
    let uniform = |t: f64| t.clamp(0.0, 1.0);
    let r = lib(variation_limit_check(&refs, &uniform, &window, &control, 1e-9))?;
    check(r.var_n.iter().all(|v| (v - 1.0).abs() < 1e-12), || format!("var_n {:?}", r.var_n))?;
    check((r.var_limit - 1.0).abs() < 1e-12 && r.converged, || format!("var_limit {}", r.var_limit))?;

    let unit = lib(Partition1D::new(vec![(0.0, 1.0)]))?;
    let shrink: Vec<Box<dyn Fn(f64) -> f64>> =
        ns.iter().map(|&n| Box::new(move |t: f64| t / n as f64) as Box<dyn Fn(f64) -> f64>).collect();
    let refs: Vec<&dyn Fn(f64) -> f64> = shrink.iter().map(|f| f.as_ref()).collect();
    let r2 = lib(variation_limit_check(&refs, &|_| 0.0, &unit, &control, 1e-3))?;
    for (v, n) in r2.var_n.iter().zip(ns) {
        check((v - 1.0 / n as f64).abs() < 1e-15, || format!("Var(t/{n}) = {v}"))?;
    }
    check(r2.var_limit == 0.0 && r2.converged, || format!("limit variation {}", r2.var_limit))?;
    Ok(format!("uniform grid var_n = {:?}; t/n var_n = {:?} -> 0", r.var_n, r2.var_n))
}

fn c9_chain_rule() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (pts, w) = random_measure(&mut rng, 1);
        let m = lib(AtomicMeasure::from_points(&pts, Some(&w)))?;
        let (a, b, c) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..3.0));
        let kind = rng.gen_range(0..3);
        let g = move |x: f64| match kind {
            0 => (a * x + b).sin(),
            1 => a * x * x + b * x,
            _ => (a * x).exp() * 0.1,
        };
        let f = move |y: f64| (c * y).cos() + y * y * y;
        let direct = lib(m.expectation_scalar(|p| f(g(p[0]))))?;
        let pushed = lib(m.pushforward_scalar(g))?;
        let via_push = lib(pushed.expectation_scalar(|p| f(p[0])))?;
        let via_step = lib(integrate_step(|p| f(p[0]), &StepCdf::new(pushed)))?;
        worst = worst.max((direct - via_push).abs()).max((direct - via_step).abs());
    }
    check(worst <= 1e-12, || format!("worst {worst:e}"))?;
    Ok(format!("1000 instances, worst {worst:.1e}"))
}

fn c10_determinism() -> Outcome {
    let commands: Vec<Vec<&str>> = vec![
        vec!["solve", "example1", "--n", "1000000", "--f", "sin"],
        vec!["solve", "example2", "--n", "1000000"],
        vec!["solve", "example3", "--n", "1000000", "--t", "0.3"],
        vec!["solve", "example4", "--n", "1000000"],
        vec!["solve", "example4", "--n", "1000000", "--f", "cos"],
        vec!["solve", "dirichlet", "--n", "1000000"],
        vec!["solve", "poly", "--n", "100000000", "--coeffs", "0,0,1"],
        vec!["solve", "canonical-uniform", "--n", "1000000", "--f", "sin"],
        vec!["sweep", "example3", "--n", "1000,10000,100000"],
        vec!["sweep", "example2", "--n", "1000,100000"],
        vec!["integrate", "frac-limit", "--f", "sin"],
        vec!["special", "hurwitz-zeta", "--s", "2.5", "--x", "0.3"],
    ];
    for args in &commands {
        let mut results = Vec::new();
        for threads in ["1", "4", "8"] {
            let mut full = args.clone();
            full.extend(["--threads", threads]);
            let (v, _) = cli(&full)?;
            results.push(serde_json::to_string(&v["result"]).map_err(|e| e.to_string())?);
        }
        check(results.windows(2).all(|w| w[0] == w[1]), || format!("{args:?} differs across threads"))?;
    }
    Ok(format!("{} commands bit-identical for threads 1, 4, 8", commands.len()))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 example 1 reproduction", c1_example1),
        ("2 example 2 reproduction", c2_example2),
        ("3 example 3 reproduction", c3_example3),
        ("4 example 4 reproduction", c4_example4),
        ("5 polynomial family", c5_polynomial),
        ("6 special functions", c6_special),
        ("7 Stieltjes engine", c7_stieltjes),
        ("8 variation limit", c8_variation_limit),
        ("9 chain rule end to end", c9_chain_rule),
        ("10 determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
