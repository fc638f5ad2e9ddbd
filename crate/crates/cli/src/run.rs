use std::f64::consts::FRAC_PI_2;

use asymptolim::convergence::{cdf_sequence_probe, ConvergenceReport, MeasureFamily, ProbeOptions};
use asymptolim::measure::{AtomicMeasure, HyperBox};
use asymptolim::problems::{
    arcsine_law, dirichlet_weak, frac_limit_law, frac_n_over_i_cdf, frac_n_over_i_family, frac_n_over_i_mean,
    interval_proportion_sin, polynomial_family, polynomial_points_family, root_law, sequence_average, sin_sqrt_family,
    sqrt_frac_family,
};
use asymptolim::special::{
    digamma, frac_limit_cdf, frac_limit_cdf_series, frac_limit_density, harmonic, hurwitz_zeta, riemann_zeta,
    trigamma,
};
use asymptolim::stieltjes::integrate_smooth;
use asymptolim::{Exec, NamedFn, PolySolution, PolySpec, SmoothCdf, SolveResult};
use serde::{Deserialize, Serialize};

use crate::config::{Command, RunConfig};
use crate::error::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ToleranceNotMet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    #[serde(flatten)]
    pub report: ConvergenceReport,
    pub decay_fraction: f64,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOutcome {
    pub law: String,
    pub route: String,
    pub lo: f64,
    pub hi: f64,
    pub f: NamedFn,
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialOutcome {
    pub function: String,
    pub value: f64,
    pub truncation_bound: Option<f64>,
    pub terms: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Solve(SolveResult),
    Poly(PolySolution),
    Probe(ProbeOutcome),
    Integrate(IntegrateOutcome),
    Special(SpecialOutcome),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub version: String,
    pub status: Status,
    pub config: RunConfig,
    pub result: Outcome,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::ToleranceNotMet => 3,
        }
    }
}

fn missing(flag: &str, what: &str) -> CliError {
    CliError::Validation(format!("{what} needs --{flag}"))
}

/// Executes a validated config.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let exec = Exec {
        threads: config.threads,
    };
    let result = match config.command {
        Command::Solve => solve(config, &exec)?,
        Command::Probe => Outcome::Probe(probe(config, &exec)?),
        Command::Integrate => Outcome::Integrate(integrate(config)?),
        Command::Special => Outcome::Special(special(config)?),
    };
    let within = |err: f64| config.tolerance.is_none_or(|tol| err <= tol);
    let met = match &result {
        Outcome::Solve(r) | Outcome::Poly(PolySolution::Limit(r)) => within(r.abs_error),
        Outcome::Probe(p) => p.converged != Some(false),
        Outcome::Integrate(q) => within(q.abs_error),
        Outcome::Poly(PolySolution::Divergent { .. }) | Outcome::Special(_) => true,
    };
    Ok(Report {
        schema: SCHEMA,
        version: asymptolim::VERSION.to_string(),
        status: if met { Status::Ok } else { Status::ToleranceNotMet },
        config: config.clone(),
        result,
    })
}

fn solve(config: &RunConfig, exec: &Exec) -> Result<Outcome, CliError> {
    let n = config.n[0];
    let p = &config.params;
    let f = p.f.clone();
    let eval = |x: f64| f.as_ref().map_or(x, |f| f.eval(x));
    let r = match config.problem.as_str() {
        "example1" => sequence_average(n, &eval, exec)?,
        "example2" => interval_proportion_sin(n, p.lo.unwrap_or(-0.5), p.hi.unwrap_or(0.5), exec)?,
        "example3" => frac_n_over_i_cdf(n, p.t.ok_or_else(|| missing("t", "example3"))?, exec)?,
        "example4" => frac_n_over_i_mean(n, f.as_ref().map(|_| &eval), exec)?,
        "dirichlet" => dirichlet_weak(n, exec)?,
        "canonical-uniform" => {
            let empirical = AtomicMeasure::uniform_grid(n)?.expectation_scalar(|x| eval(x[0]))?;
            let law = SmoothCdf::uniform(0.0, 1.0)?;
            let closed = integrate_smooth(|x| eval(x[0]), &law, &HyperBox::interval(0.0, 1.0)?, 1e-12)?;
            SolveResult {
                empirical,
                closed_form: closed.value,
                abs_error: (empirical - closed.value).abs(),
                n,
                meta: "uniform{i/n} against the uniform law on [0, 1]".into(),
            }
        }
        "poly" => {
            let coeffs = p.coeffs.clone().ok_or_else(|| missing("coeffs", "poly"))?;
            let spec = PolySpec::new(
                coeffs,
                p.r.ok_or_else(|| missing("r", "poly"))?,
                p.b.ok_or_else(|| missing("b", "poly"))?,
                eval,
            )?;
            return Ok(Outcome::Poly(polynomial_family(&spec, n, exec)?));
        }
        other => return Err(CliError::Validation(format!("unknown problem '{other}'"))),
    };
    Ok(Outcome::Solve(r))
}

fn probe_target(config: &RunConfig) -> Result<(MeasureFamily<'static>, SmoothCdf<'static>), CliError> {
    Ok(match config.problem.as_str() {
        "canonical-uniform" => (MeasureFamily::uniform_grid(), SmoothCdf::uniform(0.0, 1.0)?),
        "example1" => (sqrt_frac_family(), SmoothCdf::uniform(0.0, 1.0)?),
        "example2" => (sin_sqrt_family(), arcsine_law()),
        "example3" | "example4" => (frac_n_over_i_family(), frac_limit_law()),
        "poly" => {
            let coeffs = config.params.coeffs.clone().ok_or_else(|| missing("coeffs", "poly"))?;
            let degree = PolySpec::new(coeffs.clone(), 1, 1.0, |x| x)?.degree();
            (polynomial_points_family(coeffs), root_law(degree)?)
        }
        other => return Err(CliError::Validation(format!("no CDF sequence for problem '{other}'"))),
    })
}

fn probe(config: &RunConfig, exec: &Exec) -> Result<ProbeOutcome, CliError> {
    let (family, target) = probe_target(config)?;
    let report = cdf_sequence_probe(&family, &target, &config.grid, &config.n, &ProbeOptions::default(), exec)?;
    Ok(ProbeOutcome {
        decay_fraction: report.decay_fraction(),
        converged: config.tolerance.map(|tol| report.converged(tol)),
        report,
    })
}

fn integrate(config: &RunConfig) -> Result<IntegrateOutcome, CliError> {
    let p = &config.params;
    let law = match config.problem.as_str() {
        "uniform" => SmoothCdf::uniform(0.0, 1.0)?,
        "root" => root_law(p.r.ok_or_else(|| missing("r", "integrate root"))?)?,
        "frac-limit" => frac_limit_law(),
        "arcsine" => arcsine_law(),
        other => return Err(CliError::Validation(format!("unknown law '{other}'"))),
    };
    let support = law.support();
    let lo = p.lo.unwrap_or(support.lower()[0]);
    let hi = p.hi.unwrap_or(support.upper()[0]);
    let f = p.f.clone().unwrap_or(NamedFn::Id);
    let tol = config.tolerance.ok_or_else(|| missing("tol", "integrate"))?;
    let (q, route) = if config.problem == "arcsine" {
        // push-forward of the uniform law on [-pi/2, pi/2] under sin
        let (a, b) = (lo.clamp(-1.0, 1.0).asin(), hi.clamp(-1.0, 1.0).asin());
        let uniform = SmoothCdf::uniform(-FRAC_PI_2, FRAC_PI_2)?;
        let q = integrate_smooth(|x| f.eval(x[0].sin()), &uniform, &HyperBox::interval(a, b)?, tol)?;
        (q, "f(sin u) against the uniform law on [-pi/2, pi/2]")
    } else {
        let q = integrate_smooth(|x| f.eval(x[0]), &law, &HyperBox::interval(lo, hi)?, tol)?;
        (q, "f against the law's density")
    };
    Ok(IntegrateOutcome {
        law: config.problem.clone(),
        route: route.to_string(),
        lo,
        hi,
        f,
        value: q.value,
        abs_error: q.abs_error,
        evaluations: q.evaluations,
    })
}

fn special(config: &RunConfig) -> Result<SpecialOutcome, CliError> {
    let p = &config.params;
    let name = config.problem.as_str();
    let x = || p.x.ok_or_else(|| missing("x", name));
    let s = || p.s.ok_or_else(|| missing("s", name));
    let t = || p.t.ok_or_else(|| missing("t", name));
    let plain = |value: f64| SpecialOutcome {
        function: name.to_string(),
        value,
        truncation_bound: None,
        terms: None,
    };
    Ok(match name {
        "digamma" => plain(digamma(x()?)?),
        "trigamma" => plain(trigamma(x()?)?),
        "hurwitz-zeta" => plain(hurwitz_zeta(s()?, x()?)?),
        "zeta" => plain(riemann_zeta(s()?)?),
        "harmonic" => {
            let n = match config.n.as_slice() {
                [n] => *n,
                _ => return Err(missing("n", name)),
            };
            plain(harmonic(n)?)
        }
        "frac-limit-cdf" => plain(frac_limit_cdf(t()?)),
        "frac-limit-density" => plain(frac_limit_density(t()?)),
        "frac-limit-series" => {
            let k_max = p.k_max.ok_or_else(|| missing("k-max", name))?;
            let series = frac_limit_cdf_series(t()?, k_max)?;
            SpecialOutcome {
                function: name.to_string(),
                value: series.value,
                truncation_bound: Some(series.truncation_bound),
                terms: Some(series.terms),
            }
        }
        other => return Err(CliError::Validation(format!("unknown function '{other}'"))),
    })
}
