//! Python bindings for `asymptolim`.
//!
//! Integrands for the solvers are chosen by name (`"sin"`, `"cos"`, `"id"`,
//! `"const1"`, `"poly:c0,c1,..."`); measure methods accept Python callables.

use asymptolim::convergence::{cdf_sequence_probe, default_unit_grid, ConvergenceReport, MeasureFamily, ProbeOptions};
use asymptolim::measure::HyperBox;
use asymptolim::problems::{self, PolySolution, PolySpec};
use asymptolim::special;
use asymptolim::{Exec, NamedFn, SmoothCdf, SolveResult};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

fn err(e: asymptolim::Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn named(f: &str) -> PyResult<NamedFn> {
    f.parse().map_err(err)
}

fn exec(threads: Option<usize>) -> PyResult<Exec> {
    match threads {
        Some(0) => Err(PyValueError::new_err("threads must be at least 1")),
        threads => Ok(Exec { threads }),
    }
}

/// Calls a Python callable per atom, keeping the first raised exception.
struct Callback<'py> {
    func: Bound<'py, PyAny>,
    scalar_arg: bool,
    error: Option<PyErr>,
}

impl<'py> Callback<'py> {
    fn new(func: Bound<'py, PyAny>, dim: usize) -> Self {
        Self {
            func,
            scalar_arg: dim == 1,
            error: None,
        }
    }

    fn call(&mut self, x: &[f64]) -> Option<Bound<'py, PyAny>> {
        if self.error.is_some() {
            return None;
        }
        let result = if self.scalar_arg {
            self.func.call1((x[0],))
        } else {
            self.func.call1((x.to_vec(),))
        };
        result.map_err(|e| self.error = Some(e)).ok()
    }

    fn scalar(&mut self, x: &[f64]) -> f64 {
        self.call(x)
            .and_then(|v| v.extract::<f64>().map_err(|e| self.error = Some(e)).ok())
            .unwrap_or(0.0)
    }

    /// Accepts a float or a sequence of floats.
    fn vector(&mut self, x: &[f64]) -> Vec<f64> {
        let Some(v) = self.call(x) else {
            return vec![0.0];
        };
        if let Ok(s) = v.extract::<f64>() {
            return vec![s];
        }
        v.extract::<Vec<f64>>().map_err(|e| self.error = Some(e)).unwrap_or_else(|_| vec![0.0])
    }

    fn finish<T>(self, value: asymptolim::Result<T>) -> PyResult<T> {
        match self.error {
            Some(e) => Err(e),
            None => value.map_err(err),
        }
    }
}

#[pyclass(name = "AtomicMeasure", module = "asymptolim_py", frozen)]
pub struct PyAtomicMeasure {
    inner: asymptolim::AtomicMeasure,
}

#[pymethods]
impl PyAtomicMeasure {
    /// Points may be floats (1D) or equal-length sequences.
    #[new]
    #[pyo3(signature = (points, weights = None))]
    fn new(points: &Bound<'_, PyAny>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let pts: Vec<Vec<f64>> = match points.extract::<Vec<f64>>() {
            Ok(scalars) => scalars.into_iter().map(|v| vec![v]).collect(),
            Err(_) => points.extract()?,
        };
        let inner = asymptolim::AtomicMeasure::from_points(&pts, weights.as_deref()).map_err(err)?;
        Ok(Self { inner })
    }

    /// Uniform measure on `{i/n : 1 ≤ i ≤ n}`.
    #[staticmethod]
    fn uniform_grid(n: u64) -> PyResult<Self> {
        Ok(Self {
            inner: asymptolim::AtomicMeasure::uniform_grid(n).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn multiset_size(&self) -> usize {
        self.inner.multiset_size()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn total_weight(&self) -> f64 {
        self.inner.total_weight()
    }

    /// Distinct atoms as `(point, weight)` in lexicographic order.
    fn atoms(&self) -> Vec<(Vec<f64>, f64)> {
        self.inner.atoms().map(|(p, w)| (p.to_vec(), w)).collect()
    }

    /// Mass of the half-open box `lower < x ≤ upper`.
    fn measure_box(&self, lower: Vec<f64>, upper: Vec<f64>) -> PyResult<f64> {
        let b = HyperBox::new(lower, upper).map_err(err)?;
        self.inner.measure_box(&b).map_err(err)
    }

    fn cdf(&self, x: &Bound<'_, PyAny>) -> PyResult<f64> {
        let x: Vec<f64> = match x.extract::<f64>() {
            Ok(v) => vec![v],
            Err(_) => x.extract()?,
        };
        self.inner.cdf_eval(&x).map_err(err)
    }

    /// `Σ ω_e f(e)`; `f` receives a float in 1D and a list otherwise.
    fn expectation(&self, f: Bound<'_, PyAny>) -> PyResult<f64> {
        let mut cb = Callback::new(f, self.inner.dim());
        let value = self.inner.expectation_scalar(|x| cb.scalar(x));
        cb.finish(value)
    }

    /// Push-forward through `g`, which returns a float or a sequence.
    fn pushforward(&self, g: Bound<'_, PyAny>) -> PyResult<Self> {
        let mut cb = Callback::new(g, self.inner.dim());
        let value = self.inner.pushforward(|x| cb.vector(x));
        Ok(Self {
            inner: cb.finish(value)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "AtomicMeasure(dim={}, atoms={}, multiset_size={})",
            self.inner.dim(),
            self.inner.len(),
            self.inner.multiset_size()
        )
    }
}

#[pyclass(name = "SolveResult", module = "asymptolim_py", frozen, get_all)]
pub struct PySolveResult {
    empirical: f64,
    closed_form: f64,
    abs_error: f64,
    n: u64,
    meta: String,
    /// `"limit"` or `"divergent"`.
    verdict: String,
}

impl From<SolveResult> for PySolveResult {
    fn from(r: SolveResult) -> Self {
        Self {
            empirical: r.empirical,
            closed_form: r.closed_form,
            abs_error: r.abs_error,
            n: r.n,
            meta: r.meta,
            verdict: "limit".into(),
        }
    }
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(n={}, empirical={:?}, closed_form={:?}, abs_error={:?}, verdict={:?})",
            self.n, self.empirical, self.closed_form, self.abs_error, self.verdict
        )
    }
}

#[pyclass(name = "ConvergenceReport", module = "asymptolim_py", frozen, get_all)]
pub struct PyConvergenceReport {
    description: String,
    grid: Vec<f64>,
    n_list: Vec<u64>,
    cdf_values: Vec<Vec<f64>>,
    target_values: Vec<f64>,
    sup_errors: Vec<f64>,
    monotone_decay: Vec<bool>,
    excluded: Vec<bool>,
    decay_fraction: f64,
}

impl From<ConvergenceReport> for PyConvergenceReport {
    fn from(r: ConvergenceReport) -> Self {
        Self {
            decay_fraction: r.decay_fraction(),
            description: r.description,
            grid: r.grid,
            n_list: r.n_list,
            cdf_values: r.cdf_values,
            target_values: r.target_values,
            sup_errors: r.sup_errors,
            monotone_decay: r.monotone_decay,
            excluded: r.excluded,
        }
    }
}

#[pymethods]
impl PyConvergenceReport {
    fn __repr__(&self) -> String {
        format!("ConvergenceReport(n_list={:?}, sup_errors={:?})", self.n_list, self.sup_errors)
    }
}

/// `(1/n) Σ f({√k})` against `∫₀¹ f`.
#[pyfunction]
#[pyo3(signature = (n, f = "sin", threads = None))]
fn sequence_average(py: Python<'_>, n: u64, f: &str, threads: Option<usize>) -> PyResult<PySolveResult> {
    let f = named(f)?;
    let exec = exec(threads)?;
    let r = py.detach(|| problems::sequence_average(n, &|x| f.eval(x), &exec));
    Ok(r.map_err(err)?.into())
}

/// Share of `k ≤ n` with `sin(2π{√k})` in `[lo, hi]`.
#[pyfunction]
#[pyo3(signature = (n, lo = -0.5, hi = 0.5, threads = None))]
fn interval_proportion_sin(
    py: Python<'_>,
    n: u64,
    lo: f64,
    hi: f64,
    threads: Option<usize>,
) -> PyResult<PySolveResult> {
    let exec = exec(threads)?;
    let r = py.detach(|| problems::interval_proportion_sin(n, lo, hi, &exec));
    Ok(r.map_err(err)?.into())
}

/// Share of `i ≤ n` with `{n/i} ≤ t`.
#[pyfunction]
#[pyo3(signature = (n, t, threads = None))]
fn frac_n_over_i_cdf(py: Python<'_>, n: u64, t: f64, threads: Option<usize>) -> PyResult<PySolveResult> {
    let exec = exec(threads)?;
    let r = py.detach(|| problems::frac_n_over_i_cdf(n, t, &exec));
    Ok(r.map_err(err)?.into())
}

/// `(1/n) Σ f({n/i})`; `f = None` means the identity.
#[pyfunction]
#[pyo3(signature = (n, f = None, threads = None))]
fn frac_n_over_i_mean(py: Python<'_>, n: u64, f: Option<&str>, threads: Option<usize>) -> PyResult<PySolveResult> {
    let f = f.map(named).transpose()?;
    let exec = exec(threads)?;
    let r = py.detach(|| {
        let eval = |x: f64| f.as_ref().map_or(x, |f| f.eval(x));
        problems::frac_n_over_i_mean(n, f.as_ref().map(|_| &eval), &exec)
    });
    Ok(r.map_err(err)?.into())
}

/// `(1/n) Σ ⌊n/i⌋ − ln n` against `2γ − 1`.
#[pyfunction]
#[pyo3(signature = (n, threads = None))]
fn dirichlet_weak(py: Python<'_>, n: u64, threads: Option<usize>) -> PyResult<PySolveResult> {
    let exec = exec(threads)?;
    let r = py.detach(|| problems::dirichlet_weak(n, &exec));
    Ok(r.map_err(err)?.into())
}

/// `Σ_{P(i) ≤ n} f(P(i)/n) / (n/b)^{1/r}`; coefficients in ascending powers.
#[pyfunction]
#[pyo3(signature = (coeffs, n, r = None, b = 1.0, f = "id", threads = None))]
fn polynomial_family(
    py: Python<'_>,
    coeffs: Vec<f64>,
    n: u64,
    r: Option<u32>,
    b: f64,
    f: &str,
    threads: Option<usize>,
) -> PyResult<PySolveResult> {
    let f = named(f)?;
    let exec = exec(threads)?;
    let r = r.unwrap_or(coeffs.len().saturating_sub(1).max(1) as u32);
    let out = py.detach(|| {
        let spec = PolySpec::new(coeffs, r, b, |x| f.eval(x))?;
        problems::polynomial_family(&spec, n, &exec)
    });
    Ok(match out.map_err(err)? {
        PolySolution::Limit(res) => res.into(),
        PolySolution::Divergent { n, empirical, meta, .. } => PySolveResult {
            empirical,
            closed_form: f64::INFINITY,
            abs_error: f64::INFINITY,
            n,
            meta,
            verdict: "divergent".into(),
        },
    })
}

fn probe_target(problem: &str) -> PyResult<(MeasureFamily<'static>, SmoothCdf<'static>)> {
    Ok(match problem {
        "canonical-uniform" => (MeasureFamily::uniform_grid(), SmoothCdf::uniform(0.0, 1.0).map_err(err)?),
        "example1" => (problems::sqrt_frac_family(), SmoothCdf::uniform(0.0, 1.0).map_err(err)?),
        "example2" => (problems::sin_sqrt_family(), problems::arcsine_law()),
        "example3" | "example4" => (problems::frac_n_over_i_family(), problems::frac_limit_law()),
        other => return Err(PyValueError::new_err(format!("no CDF sequence for problem '{other}'"))),
    })
}

/// CDF convergence probe for a named problem.
#[pyfunction]
#[pyo3(signature = (problem, n_list, grid = None, threads = None))]
fn cdf_probe(
    py: Python<'_>,
    problem: &str,
    n_list: Vec<u64>,
    grid: Option<Vec<f64>>,
    threads: Option<usize>,
) -> PyResult<PyConvergenceReport> {
    let exec = exec(threads)?;
    let grid = grid.unwrap_or_else(default_unit_grid);
    let problem = problem.to_string();
    let report = py.detach(move || -> PyResult<ConvergenceReport> {
        let (family, target) = probe_target(&problem)?;
        cdf_sequence_probe(&family, &target, &grid, &n_list, &ProbeOptions::default(), &exec).map_err(err)
    })?;
    Ok(report.into())
}

#[pyfunction]
fn digamma(x: f64) -> PyResult<f64> {
    special::digamma(x).map_err(err)
}

#[pyfunction]
fn trigamma(x: f64) -> PyResult<f64> {
    special::trigamma(x).map_err(err)
}

#[pyfunction]
fn hurwitz_zeta(s: f64, x: f64) -> PyResult<f64> {
    special::hurwitz_zeta(s, x).map_err(err)
}

#[pyfunction]
fn riemann_zeta(s: f64) -> PyResult<f64> {
    special::riemann_zeta(s).map_err(err)
}

#[pyfunction]
fn harmonic(n: u64) -> PyResult<f64> {
    special::harmonic(n).map_err(err)
}

/// `ψ(t) + 1/t + γ`.
#[pyfunction]
fn frac_limit_cdf(t: f64) -> f64 {
    special::frac_limit_cdf(t)
}

/// `ψ′(t) − 1/t²`.
#[pyfunction]
fn frac_limit_density(t: f64) -> f64 {
    special::frac_limit_density(t)
}

/// Returns `(value, truncation_bound, terms)`.
#[pyfunction]
#[pyo3(signature = (t, k_max = 200))]
fn frac_limit_cdf_series(t: f64, k_max: u32) -> PyResult<(f64, f64, u32)> {
    let s = special::frac_limit_cdf_series(t, k_max).map_err(err)?;
    Ok((s.value, s.truncation_bound, s.terms))
}

#[pymodule]
fn asymptolim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", asymptolim::VERSION)?;
    m.add("EULER_GAMMA", special::EULER_GAMMA)?;
    m.add(
        "PROBE_PROBLEMS",
        PyList::new(m.py(), ["canonical-uniform", "example1", "example2", "example3", "example4"])?,
    )?;
    m.add_class::<PyAtomicMeasure>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PyConvergenceReport>()?;
    m.add_function(wrap_pyfunction!(sequence_average, m)?)?;
    m.add_function(wrap_pyfunction!(interval_proportion_sin, m)?)?;
    m.add_function(wrap_pyfunction!(frac_n_over_i_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(frac_n_over_i_mean, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_weak, m)?)?;
    m.add_function(wrap_pyfunction!(polynomial_family, m)?)?;
    m.add_function(wrap_pyfunction!(cdf_probe, m)?)?;
    m.add_function(wrap_pyfunction!(digamma, m)?)?;
    m.add_function(wrap_pyfunction!(trigamma, m)?)?;
    m.add_function(wrap_pyfunction!(hurwitz_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(riemann_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic, m)?)?;
    m.add_function(wrap_pyfunction!(frac_limit_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(frac_limit_density, m)?)?;
    m.add_function(wrap_pyfunction!(frac_limit_cdf_series, m)?)?;
    Ok(())
}
