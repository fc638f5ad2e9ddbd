//! One- and multi-dimensional Stieltjes calculus.
//!
//! Box increments `Δ_R φ`, dyadic total-variation estimates, and integration
//! of `f dφ` against step CDFs (exact weighted sums) or smooth CDFs (density
//! reduction followed by adaptive quadrature). Raw Riemann–Stieltjes sums are
//! kept as an independent oracle.

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::measure::{AtomicMeasure, HyperBox};
use crate::quadrature::{self, Quadrature};
use crate::sum::CompensatedSum;

/// Boxed real-valued callback on `R^k`.
pub type Field<'a> = Box<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>;

/// Alternating sum of `phi` over the `2^k` vertices of a finite box.
///
/// A vertex taking the lower bound on `j` axes carries the sign `(-1)^j`.
pub fn delta_box<F>(phi: F, boxed: &HyperBox) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if !boxed.is_finite() {
        return Err(Error::Domain("box increment needs a finite box".into()));
    }
    let k = boxed.dim();
    if k > 24 {
        return Err(Error::Domain(format!("{k}-dimensional box has too many vertices")));
    }
    let mut vertex = vec![0.0; k];
    let mut acc = CompensatedSum::new();
    for mask in 0u32..(1 << k) {
        let mut lowers = 0;
        for (axis, v) in vertex.iter_mut().enumerate() {
            if mask & (1 << axis) != 0 {
                *v = boxed.lower()[axis];
                lowers += 1;
            } else {
                *v = boxed.upper()[axis];
            }
        }
        let value = finite("box increment vertex", phi(&vertex))?;
        acc.add(if lowers % 2 == 0 { value } else { -value });
    }
    Ok(acc.value())
}

/// Cumulative distribution of an atomic measure.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    source: AtomicMeasure,
}

impl StepCdf {
    pub fn new(source: AtomicMeasure) -> Self {
        Self { source }
    }

    pub fn source(&self) -> &AtomicMeasure {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.source.cdf_eval(x)
    }

    /// One-dimensional value; NaN when the measure is not 1D.
    pub fn value_1d(&self, x: f64) -> f64 {
        self.source.cdf_eval(&[x]).unwrap_or(f64::NAN)
    }

    /// Smallest and largest atom coordinate of a 1D step CDF.
    pub fn support_1d(&self) -> Option<(f64, f64)> {
        if self.dim() != 1 {
            return None;
        }
        let mut atoms = self.source.atoms().map(|(p, _)| p[0]);
        let first = atoms.next()?;
        let last = atoms.last().unwrap_or(first);
        Some((first, last))
    }

    /// Total variation of a 1D step CDF over a window enclosing all atoms.
    pub fn variation(&self, control: &VariationControl) -> Result<f64> {
        let (lo, hi) = self
            .support_1d()
            .ok_or(Error::DimensionMismatch { expected: 1, found: self.dim() })?;
        let pad = 1.0 + (hi - lo).abs();
        variation(|x| self.value_1d(x), lo - pad, hi + pad, control)
    }
}

/// Limit CDF given by callbacks, constant outside its support box.
///
/// Below the support (any coordinate at or under its lower bound) the value
/// is 0. Coordinates above the upper bound are clamped, so the value at the
/// top corner and beyond is whatever the callback returns there (1 for a
/// probability CDF).
pub struct SmoothCdf<'a> {
    value: Field<'a>,
    density: Option<Field<'a>>,
    support: HyperBox,
}

impl std::fmt::Debug for SmoothCdf<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothCdf")
            .field("support", &self.support)
            .field("has_density", &self.density.is_some())
            .finish()
    }
}

impl<'a> SmoothCdf<'a> {
    pub fn new<V>(support: HyperBox, value: V) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'a,
    {
        Self {
            value: Box::new(value),
            density: None,
            support,
        }
    }

    /// Attaches the mixed partial `∂^k φ / ∂x_1 … ∂x_k`.
    pub fn with_density<D>(mut self, density: D) -> Self
    where
        D: Fn(&[f64]) -> f64 + Send + Sync + 'a,
    {
        self.density = Some(Box::new(density));
        self
    }

    /// One-dimensional CDF on `[lo, hi]` with optional density.
    pub fn new_1d<V, D>(lo: f64, hi: f64, value: V, density: Option<D>) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'a,
        D: Fn(f64) -> f64 + Send + Sync + 'a,
    {
        let support = HyperBox::interval(lo, hi)?;
        let cdf = Self::new(support, move |x: &[f64]| value(x[0]));
        Ok(match density {
            Some(d) => cdf.with_density(move |x: &[f64]| d(x[0])),
            None => cdf,
        })
    }

    /// Uniform law on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Domain(format!("uniform law needs lo < hi, got [{lo}, {hi}]")));
        }
        let width = hi - lo;
        Self::new_1d(
            lo,
            hi,
            move |t| ((t - lo) / width).clamp(0.0, 1.0),
            Some(move |_t: f64| 1.0 / width),
        )
    }

    /// Product of uniform laws on a finite box.
    pub fn uniform_box(support: HyperBox) -> Result<Self> {
        if !support.is_finite() || support.volume() <= 0.0 {
            return Err(Error::Domain("uniform law needs a finite box of positive volume".into()));
        }
        let lower = support.lower().to_vec();
        let upper = support.upper().to_vec();
        let vol = support.volume();
        Ok(Self::new(support, move |x: &[f64]| {
            x.iter()
                .zip(lower.iter().zip(&upper))
                .map(|(&v, (&lo, &hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
                .product()
        })
        .with_density(move |_| 1.0 / vol))
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn support(&self) -> &HyperBox {
        &self.support
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    /// CDF value with the constant extension outside the support.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut clamped = Vec::with_capacity(x.len());
        for (i, &v) in x.iter().enumerate() {
            if v <= self.support.lower()[i] {
                return 0.0;
            }
            clamped.push(v.min(self.support.upper()[i]));
        }
        (self.value)(&clamped)
    }

    pub fn eval_1d(&self, x: f64) -> f64 {
        self.eval(&[x])
    }

    pub fn density_at(&self, x: &[f64]) -> Option<f64> {
        self.density.as_ref().map(|d| d(x))
    }
}

/// Finite list of non-overlapping closed intervals, ordered left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition1D {
    intervals: Vec<(f64, f64)>,
}

impl Partition1D {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(Error::Domain(format!("interval {i}: [{a}, {b}] is not a finite interval")));
            }
            if let Some(&(_, prev_b)) = i.checked_sub(1).map(|j| &intervals[j]) {
                if prev_b > a {
                    return Err(Error::Domain(format!("interval {i} overlaps its predecessor")));
                }
            }
        }
        Ok(Self { intervals })
    }

    /// `[a, b]` cut into `2^level` equal closed pieces.
    pub fn dyadic(a: f64, b: f64, level: u32) -> Result<Self> {
        let n = 1u64 << level;
        let pts: Vec<f64> = (0..=n).map(|j| dyadic_point(a, b, j, n)).collect();
        Self::new(pts.windows(2).map(|w| (w[0], w[1])).collect())
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// `Σ |φ(β_i) − φ(α_i)|` over the intervals.
    pub fn sum_abs_increments<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (phi(b) - phi(a)).abs())
            .collect::<CompensatedSum>()
            .value()
    }

    /// Variation of `phi` restricted to the union of the intervals.
    pub fn variation<F: Fn(f64) -> f64>(&self, phi: F, control: &VariationControl) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for &(a, b) in &self.intervals {
            acc.add(variation(&phi, a, b, control)?);
        }
        Ok(acc.value())
    }
}

#[inline]
fn dyadic_point(a: f64, b: f64, j: u64, n: u64) -> f64 {
    if j == n {
        b
    } else {
        a + (b - a) * (j as f64 / n as f64)
    }
}

/// Stopping rule for the dyadic variation estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationControl {
    /// Successive refinements must differ by less than this.
    pub tol: f64,
    pub min_level: u32,
    pub max_level: u32,
    /// Number of consecutive stable refinements required.
    pub patience: u32,
}

impl Default for VariationControl {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            min_level: 4,
            max_level: 22,
            patience: 2,
        }
    }
}

/// Total variation of `phi` on `[a, b]` from nested dyadic partitions.
///
/// Returns the sum at the first level where the last `patience` refinements
/// each changed it by less than `control.tol`. The result is a lower bound,
/// exact for piecewise monotone `phi` once the grid separates the monotone
/// pieces.
pub fn variation<F>(phi: F, a: f64, b: f64, control: &VariationControl) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("variation needs a finite interval, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let max_level = control.max_level.min(40);
    let mut prev: Option<f64> = None;
    let mut stable = 0u32;
    let mut last_change = f64::INFINITY;
    for level in 0..=max_level {
        let n = 1u64 << level;
        let mut acc = CompensatedSum::new();
        let mut left = finite("variation sample", phi(a))?;
        for j in 1..=n {
            let right = finite("variation sample", phi(dyadic_point(a, b, j, n)))?;
            acc.add((right - left).abs());
            left = right;
        }
        let v = acc.value();
        if let Some(p) = prev {
            last_change = (v - p).abs();
            if last_change < control.tol {
                stable += 1;
            } else {
                stable = 0;
            }
            if level >= control.min_level && stable >= control.patience.max(1) {
                return Ok(v);
            }
        }
        prev = Some(v);
    }
    Err(Error::VariationUnstable {
        max_level,
        last: prev.unwrap_or(0.0),
        change: last_change,
    })
}

/// `Σ |Δ_R φ|` over the `2^level`-per-axis grid of a finite box.
///
/// Lower bound for the multidimensional variation of `phi` on the box.
pub fn grid_variation<F>(phi: F, boxed: &HyperBox, level: u32) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut acc = CompensatedSum::new();
    for_each_cell(boxed, level, |cell, _| {
        acc.add(delta_box(&phi, cell)?.abs());
        Ok(())
    })?;
    Ok(acc.value())
}

fn for_each_cell<V>(boxed: &HyperBox, level: u32, mut visit: V) -> Result<()>
where
    V: FnMut(&HyperBox, &[f64]) -> Result<()>,
{
    if !boxed.is_finite() {
        return Err(Error::Domain("grid needs a finite box".into()));
    }
    let k = boxed.dim();
    let n = 1u64 << level;
    let total = (n as u128).pow(k as u32);
    if total > 1 << 26 {
        return Err(Error::Domain(format!("grid of {total} cells is too large")));
    }
    let mut idx = vec![0u64; k];
    let mut mid = vec![0.0; k];
    for _ in 0..total {
        let mut lower = Vec::with_capacity(k);
        let mut upper = Vec::with_capacity(k);
        for axis in 0..k {
            let (a, b) = (boxed.lower()[axis], boxed.upper()[axis]);
            let lo = dyadic_point(a, b, idx[axis], n);
            let hi = dyadic_point(a, b, idx[axis] + 1, n);
            mid[axis] = 0.5 * (lo + hi);
            lower.push(lo);
            upper.push(hi);
        }
        visit(&HyperBox::new(lower, upper)?, &mid)?;
        for axis in 0..k {
            idx[axis] += 1;
            if idx[axis] < n {
                break;
            }
            idx[axis] = 0;
        }
    }
    Ok(())
}

/// `∫ f dφ_n` for a step CDF: the weighted sum over its atoms.
pub fn integrate_step<F>(f: F, cdf: &StepCdf) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    cdf.source().expectation_scalar(f)
}

/// `∫_box f dφ` for a smooth CDF, computed as `∫_box f · density`.
///
/// The box is intersected with the support of `phi` (outside the support
/// the density vanishes); the intersection must be finite.
pub fn integrate_smooth<F>(f: F, phi: &SmoothCdf<'_>, boxed: &HyperBox, tol: f64) -> Result<Quadrature>
where
    F: Fn(&[f64]) -> f64,
{
    let density = phi.density.as_ref().ok_or(Error::MissingDensity)?;
    if boxed.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: boxed.dim(),
        });
    }
    let Some(domain) = boxed.intersect(phi.support()) else {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    };
    quadrature::integrate_box(
        |x| Ok(finite("integrand", f(x))? * finite("density", density(x))?),
        &domain,
        tol,
        quadrature::DEFAULT_BUDGET,
    )
}

/// `∫_a^b f dφ = [f φ]_a^b − ∫_a^b φ f′ dt`.
pub fn integrate_by_parts<F, D, P>(f: F, f_prime: D, phi: P, a: f64, b: f64, tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let boundary = finite("boundary term", f(b) * phi(b))? - finite("boundary term", f(a) * phi(a))?;
    let q = quadrature::integrate_1d(
        |t| finite("by-parts integrand", phi(t) * f_prime(t)),
        a,
        b,
        tol,
        quadrature::DEFAULT_BUDGET,
    )?;
    Ok(Quadrature {
        value: boundary - q.value,
        ..q
    })
}

/// Riemann–Stieltjes sums `Σ f(ξ_j)(φ(x_{j+1}) − φ(x_j))` on `[a, b]` for the
/// dyadic partitions of levels `0..=levels`, tagged at cell midpoints.
pub fn riemann_stieltjes_oracle<F, P>(f: F, phi: P, a: f64, b: f64, levels: u32) -> Vec<f64>
where
    F: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    (0..=levels.min(40))
        .map(|level| {
            let n = 1u64 << level;
            let mut acc = CompensatedSum::new();
            let mut left_x = a;
            let mut left_phi = phi(a);
            for j in 1..=n {
                let x = dyadic_point(a, b, j, n);
                let p = phi(x);
                acc.add(f(0.5 * (left_x + x)) * (p - left_phi));
                left_x = x;
                left_phi = p;
            }
            acc.value()
        })
        .collect()
}

/// Multidimensional Riemann–Stieltjes sum `Σ f(ξ_R) Δ_R φ` over the
/// `2^level`-per-axis grid of a finite box, tagged at cell midpoints.
pub fn riemann_stieltjes_grid<F, P>(f: F, phi: P, boxed: &HyperBox, level: u32) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&[f64]) -> f64,
{
    let mut acc = CompensatedSum::new();
    for_each_cell(boxed, level, |cell, mid| {
        acc.add(f(mid) * delta_box(&phi, cell)?);
        Ok(())
    })?;
    Ok(acc.value())
}
