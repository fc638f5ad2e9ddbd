use std::path::PathBuf;

use asymptolim::NamedFn;
use clap::{Args, Parser, Subcommand};

use crate::config::{default_grid, parse_grid, parse_list, parse_n_list, Command, OutputFormat, Params, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "asymptolim", version, about = "Limits of averages over atomic measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Solve one problem at one n
    Solve {
        /// example1, example2, example3, example4, dirichlet, poly or canonical-uniform
        problem: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// CDF convergence probe over a list of n
    #[command(alias = "probe")]
    Sweep {
        problem: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Stieltjes integral of --f against a limit law
    Integrate {
        /// uniform, root, frac-limit or arcsine
        law: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Evaluate a special function
    Special {
        /// digamma, trigamma, hurwitz-zeta, zeta, harmonic, frac-limit-cdf, frac-limit-density or frac-limit-series
        function: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Re-run the config echoed in a JSON report (or a bare config file)
    Replay {
        path: PathBuf,
        /// Override the echoed output path
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Default)]
pub struct Opts {
    /// Size parameter, or a comma list for sweep
    #[arg(long)]
    pub n: Option<String>,
    /// Integrand: sin, cos, id, const1 or poly:c0,c1,...
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<NamedFn>,
    /// CDF argument (example3, frac-limit functions)
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Interval lower end (example2, integrate)
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    /// Interval upper end (example2, integrate)
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Polynomial coefficients, ascending powers
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Normalizer exponent, or the degree for `integrate root`
    #[arg(long)]
    pub r: Option<u32>,
    /// Normalizer scale
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// "a:b:step" or a comma list
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Required accuracy; exit 3 when not met
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads; results do not depend on it
    #[arg(long, env = "ASYMPTOLIM_THREADS")]
    pub threads: Option<usize>,
    /// Argument of digamma, trigamma, hurwitz-zeta
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Zeta exponent
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Series terms for frac-limit-series
    #[arg(long)]
    pub k_max: Option<u32>,
}

impl Opts {
    fn into_config(self, command: Command, problem: String) -> Result<RunConfig, CliError> {
        let n = self.n.as_deref().map(parse_n_list).transpose()?.unwrap_or_default();
        let grid = match self.grid.as_deref() {
            Some(g) => parse_grid(g)?,
            None if command == Command::Probe => default_grid(&problem),
            None => Vec::new(),
        };
        RunConfig {
            command,
            problem,
            n,
            grid,
            tolerance: self.tol,
            output_format: self.format,
            output_path: self.output,
            threads: self.threads,
            params: Params {
                f: self.f,
                t: self.t,
                lo: self.lo,
                hi: self.hi,
                coeffs: self.coeffs.as_deref().map(parse_list).transpose()?,
                r: self.r,
                b: self.b,
                x: self.x,
                s: self.s,
                k_max: self.k_max,
            },
        }
        .resolve()
    }
}

impl Cmd {
    /// Builds the resolved and validated config.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let config = match self {
            Cmd::Solve { problem, opts } => opts.into_config(Command::Solve, problem)?,
            Cmd::Sweep { problem, opts } => opts.into_config(Command::Probe, problem)?,
            Cmd::Integrate { law, opts } => opts.into_config(Command::Integrate, law)?,
            Cmd::Special { function, opts } => opts.into_config(Command::Special, function)?,
            Cmd::Replay { path, output } => {
                let mut config = load_config(&path)?;
                if output.is_some() {
                    config.output_path = output;
                }
                config
            }
        };
        config.validate()?;
        Ok(config)
    }
}

/// Reads a report (uses its `config`) or a bare config.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let config = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(config).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}
