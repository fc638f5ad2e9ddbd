use std::path::PathBuf;

use asymptolim::NamedFn;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Probe,
    Integrate,
    Special,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Problem-specific knobs. Unused ones stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub f: Option<NamedFn>,
    pub t: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub coeffs: Option<Vec<f64>>,
    pub r: Option<u32>,
    pub b: Option<f64>,
    pub x: Option<f64>,
    pub s: Option<f64>,
    pub k_max: Option<u32>,
}

/// A fully resolved invocation. Reports echo it verbatim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub problem: String,
    pub n: Vec<u64>,
    pub grid: Vec<f64>,
    pub tolerance: Option<f64>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
    pub params: Params,
}

pub const SOLVE_PROBLEMS: &[&str] = &[
    "example1",
    "example2",
    "example3",
    "example4",
    "dirichlet",
    "poly",
    "canonical-uniform",
];

pub const PROBE_PROBLEMS: &[&str] = &["example1", "example2", "example3", "example4", "poly", "canonical-uniform"];

pub const LAWS: &[&str] = &["uniform", "root", "frac-limit", "arcsine"];

pub const SPECIAL_FUNCTIONS: &[&str] = &[
    "digamma",
    "trigamma",
    "hurwitz-zeta",
    "zeta",
    "harmonic",
    "frac-limit-cdf",
    "frac-limit-density",
    "frac-limit-series",
];

/// Default quadrature tolerance for `integrate`.
pub const DEFAULT_INTEGRATE_TOL: f64 = 1e-10;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn unknown(kind: &str, got: &str, allowed: &[&str]) -> CliError {
    invalid(format!("unknown {kind} '{got}' (expected one of: {})", allowed.join(", ")))
}

impl RunConfig {
    /// Fills problem defaults so the echoed config is complete.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let p = &mut self.params;
        match (self.command, self.problem.as_str()) {
            (Command::Solve | Command::Probe, "example1") => {
                if self.command == Command::Solve {
                    p.f.get_or_insert(NamedFn::Sin);
                }
            }
            (Command::Solve, "example2") => {
                p.lo.get_or_insert(-0.5);
                p.hi.get_or_insert(0.5);
            }
            (Command::Solve, "example3") => {
                p.t.get_or_insert(0.5);
            }
            (Command::Solve | Command::Probe, "poly") => {
                p.coeffs.get_or_insert_with(|| vec![0.0, 0.0, 1.0]);
                if self.command == Command::Solve {
                    let degree = p.coeffs.as_ref().map_or(0, |c| c.len().saturating_sub(1)) as u32;
                    p.r.get_or_insert(degree.max(1));
                    p.b.get_or_insert(1.0);
                    p.f.get_or_insert(NamedFn::Id);
                }
            }
            (Command::Solve, "canonical-uniform") => {
                p.f.get_or_insert(NamedFn::Id);
            }
            (Command::Integrate, "root") => {
                p.r.get_or_insert(2);
            }
            (Command::Special, "frac-limit-series") => {
                p.k_max.get_or_insert(100_000);
            }
            _ => {}
        }
        if self.command == Command::Integrate {
            p.f.get_or_insert(NamedFn::Id);
            self.tolerance.get_or_insert(DEFAULT_INTEGRATE_TOL);
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self.command {
            Command::Solve if !SOLVE_PROBLEMS.contains(&self.problem.as_str()) => {
                return Err(unknown("problem", &self.problem, SOLVE_PROBLEMS))
            }
            Command::Probe if !PROBE_PROBLEMS.contains(&self.problem.as_str()) => {
                return Err(unknown("problem", &self.problem, PROBE_PROBLEMS))
            }
            Command::Integrate if !LAWS.contains(&self.problem.as_str()) => {
                return Err(unknown("law", &self.problem, LAWS))
            }
            Command::Special if !SPECIAL_FUNCTIONS.contains(&self.problem.as_str()) => {
                return Err(unknown("function", &self.problem, SPECIAL_FUNCTIONS))
            }
            _ => {}
        }
        if self.n.contains(&0) {
            return Err(invalid("n must be at least 1"));
        }
        match self.command {
            Command::Solve => {
                if self.n.len() != 1 {
                    return Err(invalid("solve takes exactly one value of --n"));
                }
            }
            Command::Probe => {
                if self.n.is_empty() {
                    return Err(invalid("sweep needs --n with at least one value"));
                }
                if self.n.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("--n list must be strictly increasing"));
                }
                if self.grid.is_empty() {
                    return Err(invalid("grid is empty"));
                }
                let (lo, hi) = probe_domain(&self.problem);
                if let Some(x) = self.grid.iter().find(|x| !x.is_finite() || **x < lo || **x > hi) {
                    return Err(invalid(format!("grid point {x} outside the problem domain [{lo}, {hi}]")));
                }
            }
            Command::Integrate | Command::Special => {}
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(invalid("tolerance must be positive and finite"));
            }
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        let p = &self.params;
        for (name, v) in [("t", p.t), ("lo", p.lo), ("hi", p.hi), ("b", p.b), ("x", p.x), ("s", p.s)] {
            if v.is_some_and(|v| !v.is_finite()) {
                return Err(invalid(format!("--{name} must be finite")));
            }
        }
        if let (Some(lo), Some(hi)) = (p.lo, p.hi) {
            if lo > hi {
                return Err(invalid("--lo must not exceed --hi"));
            }
        }
        if self.command == Command::Solve && self.problem == "example3" && p.t.is_some_and(|t| !(0.0..=1.0).contains(&t)) {
            return Err(invalid("--t must lie in [0, 1]"));
        }
        if let Some(c) = &p.coeffs {
            if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                return Err(invalid("--coeffs must be a non-empty list of finite numbers"));
            }
        }
        Ok(())
    }
}

/// Closed domain of the limit law used by `sweep`.
pub fn probe_domain(problem: &str) -> (f64, f64) {
    match problem {
        "example2" => (-1.0, 1.0),
        _ => (0.0, 1.0),
    }
}

pub fn default_grid(problem: &str) -> Vec<f64> {
    match problem {
        "example2" => (-19..20).step_by(2).map(|j| j as f64 / 20.0).collect(),
        _ => asymptolim::convergence::default_unit_grid(),
    }
}

/// `"a:b:step"` or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let a = parse_f64(a)?;
            let b = parse_f64(b)?;
            let step = parse_f64(step)?;
            if !(step > 0.0) {
                return Err(invalid(format!("grid step must be positive, got {step}")));
            }
            let count = ((b - a) / step + 1e-9).floor();
            if count < 0.0 {
                return Ok(Vec::new());
            }
            if count > 1e6 {
                return Err(invalid("grid has more than a million points"));
            }
            Ok((0..=count as u64).map(|k| a + k as f64 * step).collect())
        }
        [_] => s.split(',').map(parse_f64).collect(),
        _ => Err(invalid(format!("malformed grid '{s}' (expected a:b:step or a comma list)"))),
    }
}

pub fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(format!("not a finite number: '{}'", s.trim())))
}

/// Accepts integers and exact integral floats such as `1e6`.
pub fn parse_n(s: &str) -> Result<u64, CliError> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(invalid(format!("not a non-negative integer: '{s}'"))),
    }
}

pub fn parse_n_list(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',').map(parse_n).collect()
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(parse_f64).collect()
}
