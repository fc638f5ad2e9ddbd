//! Diagnostics for convergence in distribution of families of atomic
//! measures: CDF grids, characteristic functions, continuity sets and the
//! limit of variations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::stieltjes::{Partition1D, SmoothCdf, VariationControl};
use crate::sum::{CompensatedSum, Exec};

/// Sequence `n ↦ μ_n` of atomic measures.
pub struct MeasureFamily<'a> {
    generator: Box<dyn Fn(u64) -> Result<AtomicMeasure> + Send + Sync + 'a>,
    pub description: String,
}

impl<'a> MeasureFamily<'a> {
    pub fn new<G>(description: impl Into<String>, generator: G) -> Self
    where
        G: Fn(u64) -> Result<AtomicMeasure> + Send + Sync + 'a,
    {
        Self {
            generator: Box::new(generator),
            description: description.into(),
        }
    }

    /// `n ↦ uniform{i/n : 1 ≤ i ≤ n}`.
    pub fn uniform_grid() -> Self {
        Self::new("uniform{i/n}", AtomicMeasure::uniform_grid)
    }

    /// The same measure for every `n`.
    pub fn constant(m: AtomicMeasure) -> Self {
        Self::new("constant", move |_| Ok(m.clone()))
    }

    /// `n ↦` empirical measure of `{u_k : 1 ≤ k ≤ n}`.
    pub fn from_sequence<U>(description: impl Into<String>, term: U) -> Self
    where
        U: Fn(u64) -> f64 + Send + Sync + 'a,
    {
        Self::new(description, move |n| {
            let values: Vec<f64> = (1..=n).map(&term).collect();
            AtomicMeasure::from_scalars(&values, None)
        })
    }

    pub fn measure(&self, n: u64) -> Result<AtomicMeasure> {
        (self.generator)(n)
    }
}

/// Grid of CDF values across an `n` sweep against a target CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub description: String,
    pub grid: Vec<f64>,
    pub n_list: Vec<u64>,
    /// `cdf_values[j][i] = φ_{n_j}(grid[i])`.
    pub cdf_values: Vec<Vec<f64>>,
    pub target_values: Vec<f64>,
    /// Sup over the non-excluded grid points of `|φ_n − φ|`.
    pub sup_errors: Vec<f64>,
    /// `sup_errors[j+1] <= sup_errors[j]` for each consecutive pair.
    pub monotone_decay: Vec<bool>,
    /// Grid points where the target looks discontinuous.
    pub excluded: Vec<bool>,
}

impl ConvergenceReport {
    /// Share of consecutive pairs whose sup error did not increase.
    pub fn decay_fraction(&self) -> f64 {
        if self.monotone_decay.is_empty() {
            return 1.0;
        }
        self.monotone_decay.iter().filter(|&&d| d).count() as f64 / self.monotone_decay.len() as f64
    }

    /// Two-parameter verdict: final sup error within `abs_tol` and a decay
    /// fraction of at least `min_decay_fraction`.
    pub fn converged_with(&self, abs_tol: f64, min_decay_fraction: f64) -> bool {
        self.sup_errors.last().is_some_and(|&e| e <= abs_tol) && self.decay_fraction() >= min_decay_fraction
    }

    /// [`converged_with`](Self::converged_with) at the default decay share 0.8.
    pub fn converged(&self, abs_tol: f64) -> bool {
        self.converged_with(abs_tol, DEFAULT_DECAY_FRACTION)
    }
}

pub const DEFAULT_DECAY_FRACTION: f64 = 0.8;

/// The 19-point grid `0.05, 0.10, …, 0.95`.
pub fn default_unit_grid() -> Vec<f64> {
    (1..20).map(|j| j as f64 / 20.0).collect()
}

/// Jump detector settings for [`cdf_sequence_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub jump_step: f64,
    pub jump_tol: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            jump_step: 1e-9,
            jump_tol: 1e-6,
        }
    }
}

/// Evaluates `φ_n` on `grid` for each `n` and compares with the target.
///
/// Grid points where `target(x + h) − target(x − h)` exceeds the jump
/// tolerance are flagged and left out of the sup errors. Non-decay is
/// recorded, never treated as a failure.
pub fn cdf_sequence_probe(
    family: &MeasureFamily<'_>,
    target: &SmoothCdf<'_>,
    grid: &[f64],
    n_list: &[u64],
    options: &ProbeOptions,
    exec: &Exec,
) -> Result<ConvergenceReport> {
    if target.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: target.dim(),
        });
    }
    if grid.is_empty() {
        return Err(Error::Empty("grid"));
    }
    if n_list.is_empty() {
        return Err(Error::Empty("n list"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::Domain("n list must be positive and strictly increasing".into()));
    }
    let target_values: Vec<f64> = grid.iter().map(|&x| target.eval_1d(x)).collect();
    let excluded: Vec<bool> = grid
        .iter()
        .map(|&x| {
            let h = options.jump_step * x.abs().max(1.0);
            target.eval_1d(x + h) - target.eval_1d(x - h) > options.jump_tol
        })
        .collect();

    let rows = exec.map_ordered(n_list, |&n| -> Result<Vec<f64>> {
        let m = family.measure(n)?;
        grid.iter().map(|&x| m.cdf_eval(&[x])).collect()
    })?;
    let cdf_values = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let sup_errors: Vec<f64> = cdf_values
        .iter()
        .map(|row| {
            row.iter()
                .zip(&target_values)
                .zip(&excluded)
                .filter(|(_, &ex)| !ex)
                .map(|((v, t), _)| (v - t).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let monotone_decay = sup_errors.windows(2).map(|w| w[1] <= w[0]).collect();
    Ok(ConvergenceReport {
        description: family.description.clone(),
        grid: grid.to_vec(),
        n_list: n_list.to_vec(),
        cdf_values,
        target_values,
        sup_errors,
        monotone_decay,
        excluded,
    })
}

/// `Σ ω_e exp(i ⟨t, e⟩)`.
pub fn empirical_charfn(m: &AtomicMeasure, t: &[f64]) -> Result<Complex64> {
    if t.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: t.len(),
        });
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (p, w) in m.atoms() {
        let phase: f64 = p.iter().zip(t).map(|(a, b)| a * b).collect::<CompensatedSum>().value();
        let (s, c) = phase.sin_cos();
        re.add(w * c);
        im.add(w * s);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Max over `t_list` of `|Σ ω_e exp(i⟨t,e⟩) − target(t)|`.
pub fn charfn_compare<C>(m: &AtomicMeasure, target: C, t_list: &[Vec<f64>]) -> Result<f64>
where
    C: Fn(&[f64]) -> Complex64,
{
    let mut worst: f64 = 0.0;
    for t in t_list {
        worst = worst.max((empirical_charfn(m, t)? - target(t)).norm());
    }
    Ok(worst)
}

/// Structure of the boundary of a set whose limit probability is wanted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Boundary {
    /// Finitely many boundary points.
    Finite(Vec<Vec<f64>>),
    /// A countable union of points, described in words by the caller.
    Countable(String),
    /// The caller asserts the boundary is a limit-null set.
    DeclaredNull(String),
    /// The boundary has positive limit measure (for example an interval).
    NonNull(String),
}

/// Continuity-set criterion: under a limit law with a density, a boundary
/// made of finitely or countably many points is null.
///
/// The decision is declarative. The caller describes the boundary, and the
/// rule is applied mechanically. Without a density nothing beyond an empty
/// boundary is certified.
pub fn continuity_set_check(target_density: Option<&dyn Fn(&[f64]) -> f64>, boundary: &Boundary) -> bool {
    match boundary {
        Boundary::Finite(points) if points.is_empty() => true,
        Boundary::NonNull(_) => false,
        Boundary::DeclaredNull(_) => true,
        Boundary::Finite(points) => {
            target_density.is_some() && points.iter().all(|p| p.iter().all(|v| !v.is_nan()))
        }
        Boundary::Countable(_) => target_density.is_some(),
    }
}

/// Variations of a CDF sequence and of its pointwise limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationLimitReport {
    pub var_n: Vec<f64>,
    pub var_limit: f64,
    pub converged: bool,
}

/// Checks `Var φ_n → Var φ` on the union of the probe intervals.
///
/// `converged` holds when the last `var_n` is within `tol` of the limit's
/// variation.
pub fn variation_limit_check(
    cdf_sequence: &[&dyn Fn(f64) -> f64],
    limit: &dyn Fn(f64) -> f64,
    probe_partition: &Partition1D,
    control: &VariationControl,
    tol: f64,
) -> Result<VariationLimitReport> {
    if cdf_sequence.is_empty() {
        return Err(Error::Empty("cdf sequence"));
    }
    let var_n = cdf_sequence
        .iter()
        .map(|phi| probe_partition.variation(phi, control))
        .collect::<Result<Vec<_>>>()?;
    let var_limit = probe_partition.variation(limit, control)?;
    let converged = var_n.last().is_some_and(|v| (v - var_limit).abs() < tol);
    Ok(VariationLimitReport {
        var_n,
        var_limit,
        converged,
    })
}
