//! End-to-end solvers for asymptotic limit problems.
//!
//! Each solver evaluates the finite-`n` quantity exactly (integer arithmetic
//! wherever fractional parts of rationals are involved) and pairs it with the
//! limit obtained from the limit law of the underlying atomic measures.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::convergence::{continuity_set_check, Boundary, MeasureFamily};
use crate::error::{Error, Result};
use crate::measure::{AtomicMeasure, HyperBox};
use crate::special::{frac_limit_cdf, frac_limit_density, EULER_GAMMA};
use crate::stieltjes::{integrate_smooth, SmoothCdf};
use crate::sum::Exec;

/// Largest `n` for which `{√k}` is computed reliably in double precision.
pub const MAX_SQRT_N: u64 = 1 << 52;

/// Empirical value at a finite `n` next to its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub empirical: f64,
    pub closed_form: f64,
    pub abs_error: f64,
    pub n: u64,
    pub meta: String,
}

impl SolveResult {
    fn new(n: u64, empirical: f64, closed_form: f64, meta: impl Into<String>) -> Self {
        Self {
            empirical,
            closed_form,
            abs_error: (empirical - closed_form).abs(),
            n,
            meta: meta.into(),
        }
    }
}

/// Integrands selectable by name (the CLI and Python bindings cannot pass
/// closures).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NamedFn {
    Sin,
    Cos,
    Id,
    Const1,
    /// Polynomial with coefficients in ascending powers.
    Poly(Vec<f64>),
}

impl NamedFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            NamedFn::Sin => x.sin(),
            NamedFn::Cos => x.cos(),
            NamedFn::Id => x,
            NamedFn::Const1 => 1.0,
            NamedFn::Poly(c) => c.iter().rev().fold(0.0, |acc, &a| acc * x + a),
        }
    }
}

impl fmt::Display for NamedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedFn::Sin => f.write_str("sin"),
            NamedFn::Cos => f.write_str("cos"),
            NamedFn::Id => f.write_str("id"),
            NamedFn::Const1 => f.write_str("const1"),
            NamedFn::Poly(c) => {
                f.write_str("poly:")?;
                for (i, v) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v:?}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for NamedFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sin" => Ok(NamedFn::Sin),
            "cos" => Ok(NamedFn::Cos),
            "id" => Ok(NamedFn::Id),
            "const1" => Ok(NamedFn::Const1),
            other => {
                let Some(rest) = other.strip_prefix("poly:") else {
                    return Err(Error::Domain(format!(
                        "unknown function '{other}' (expected sin, cos, id, const1 or poly:c0,c1,...)"
                    )));
                };
                let coeffs = rest
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| Error::Domain(format!("bad polynomial coefficient '{c}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(NamedFn::Poly(coeffs))
            }
        }
    }
}

impl TryFrom<String> for NamedFn {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NamedFn> for String {
    fn from(f: NamedFn) -> String {
        f.to_string()
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Domain("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `{√k}`, with the integer part from an exact integer square root.
#[inline]
pub fn sqrt_frac(k: u64) -> f64 {
    let m = k.isqrt();
    if m * m == k {
        0.0
    } else {
        (k as f64).sqrt() - m as f64
    }
}

/// `{n/i} = (n mod i)/i`.
#[inline]
pub fn frac_n_over_i(n: u64, i: u64) -> f64 {
    (n % i) as f64 / i as f64
}

/// `(1/n) |{k ≤ n : {√k} ≤ t}|`.
pub fn sqrt_frac_cdf(n: u64, t: f64, exec: &Exec) -> Result<f64> {
    check_n(n)?;
    if n > MAX_SQRT_N {
        return Err(Error::Domain(format!("n = {n} exceeds the double-precision limit {MAX_SQRT_N}")));
    }
    if t.is_nan() {
        return Err(Error::NonFinite { context: "t", value: t });
    }
    if t < 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(1.0);
    }
    let count = exec.count(1..n + 1, |k| sqrt_frac(k) <= t)?;
    Ok(count as f64 / n as f64)
}

/// `(1/n) Σ_{k ≤ n} f({√k})` against `∫_0^1 f(t) dt`.
pub fn sequence_average<F>(n: u64, f: &F, exec: &Exec) -> Result<SolveResult>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    check_n(n)?;
    if n > MAX_SQRT_N {
        return Err(Error::Domain(format!("n = {n} exceeds the double-precision limit {MAX_SQRT_N}")));
    }
    let empirical = exec.sum(1..n + 1, |k| f(sqrt_frac(k)))? / n as f64;
    let uniform = SmoothCdf::uniform(0.0, 1.0)?;
    let closed = integrate_smooth(|x| f(x[0]), &uniform, &HyperBox::interval(0.0, 1.0)?, 1e-10)?;
    Ok(SolveResult::new(
        n,
        empirical,
        closed.value,
        "(1/n) sum f({sqrt k}) -> integral of f against the uniform law on [0,1]",
    ))
}

/// CDF `arcsin(t)/π + 1/2` of `sin X` for `X` uniform on a full period.
pub fn arcsine_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t.asin() / PI + 0.5
    }
}

/// Points `x ∈ [0, 1)` with `sin(2πx) = v`.
fn sin_preimage(v: f64) -> Vec<f64> {
    let a = v.asin() / (2.0 * PI);
    let mut pts = vec![a.rem_euclid(1.0), (0.5 - a).rem_euclid(1.0)];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Proportion of `sin(2π{√k})`, `k ≤ n`, inside `[lo, hi]`.
pub fn interval_proportion_sin(n: u64, lo: f64, hi: f64, exec: &Exec) -> Result<SolveResult> {
    check_n(n)?;
    if n > MAX_SQRT_N {
        return Err(Error::Domain(format!("n = {n} exceeds the double-precision limit {MAX_SQRT_N}")));
    }
    if !(-1.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(Error::Domain(format!("interval [{lo}, {hi}] must lie inside [-1, 1]")));
    }
    // preimage of {lo, hi} under x ↦ sin(2πx) is finite: the limit law of
    // {√k} gives it no mass
    let boundary: Vec<Vec<f64>> = sin_preimage(lo)
        .into_iter()
        .chain(sin_preimage(hi))
        .map(|x| vec![x])
        .collect();
    let uniform_density = |_: &[f64]| 1.0;
    let continuity = continuity_set_check(Some(&uniform_density), &Boundary::Finite(boundary));
    if !continuity {
        return Err(Error::Domain("interval end points do not bound a continuity set".into()));
    }
    let count = exec.count(1..n + 1, |k| {
        let v = (2.0 * PI * sqrt_frac(k)).sin();
        lo <= v && v <= hi
    })?;
    let closed = arcsine_cdf(hi) - arcsine_cdf(lo);
    Ok(SolveResult::new(
        n,
        count as f64 / n as f64,
        closed,
        format!("proportion of sin(2 pi {{sqrt k}}) in [{lo}, {hi}]; continuity set certified"),
    ))
}

/// Proportion of `{n/i}`, `i ≤ n`, at most `t`, against the limit CDF
/// `ψ(t) + 1/t + γ`.
pub fn frac_n_over_i_cdf(n: u64, t: f64, exec: &Exec) -> Result<SolveResult> {
    check_n(n)?;
    if t.is_nan() {
        return Err(Error::NonFinite { context: "t", value: t });
    }
    let count = if t < 0.0 {
        0
    } else if t >= 1.0 {
        n
    } else {
        // {n/i} <= t  <=>  n mod i <= t·i
        exec.count(1..n + 1, |i| (n % i) as f64 <= t * i as f64)?
    };
    Ok(SolveResult::new(
        n,
        count as f64 / n as f64,
        frac_limit_cdf(t),
        format!("(1/n)|{{i <= n : {{n/i}} <= {t}}}| -> psi(t) + 1/t + gamma"),
    ))
}

/// Limit law of `{n/i}` as a smooth CDF on `[0, 1]`.
pub fn frac_limit_law() -> SmoothCdf<'static> {
    SmoothCdf::new_1d(0.0, 1.0, frac_limit_cdf, Some(frac_limit_density)).expect("unit interval is valid")
}

/// `(1/n) Σ_{i ≤ n} f({n/i})` against `∫_0^1 f(t)(ψ′(t) − 1/t²) dt`.
///
/// `f = None` means the identity, whose limit is `1 − γ`.
pub fn frac_n_over_i_mean<F>(n: u64, f: Option<&F>, exec: &Exec) -> Result<SolveResult>
where
    F: Fn(f64) -> f64 + Sync + ?Sized,
{
    check_n(n)?;
    match f {
        None => {
            let empirical = exec.sum(1..n + 1, |i| frac_n_over_i(n, i))? / n as f64;
            Ok(SolveResult::new(
                n,
                empirical,
                1.0 - EULER_GAMMA,
                "(1/n) sum {n/i} -> 1 - gamma",
            ))
        }
        Some(f) => {
            let empirical = exec.sum(1..n + 1, |i| f(frac_n_over_i(n, i)))? / n as f64;
            let closed = integrate_smooth(|x| f(x[0]), &frac_limit_law(), &HyperBox::interval(0.0, 1.0)?, 1e-9)?;
            Ok(SolveResult::new(
                n,
                empirical,
                closed.value,
                "(1/n) sum f({n/i}) -> integral of f (psi'(t) - 1/t^2) dt on (0,1)",
            ))
        }
    }
}

/// `Σ_{i ≤ n} ⌊n/i⌋`, exact.
pub fn divisor_summatory(n: u64, exec: &Exec) -> Result<u128> {
    exec.sum_u128(1..n + 1, |i| (n / i) as u128)
}

/// `(1/n) Σ ⌊n/i⌋ − ln n` against `2γ − 1`.
pub fn dirichlet_weak(n: u64, exec: &Exec) -> Result<SolveResult> {
    check_n(n)?;
    let total = divisor_summatory(n, exec)?;
    let empirical = total as f64 / n as f64 - (n as f64).ln();
    Ok(SolveResult::new(
        n,
        empirical,
        2.0 * EULER_GAMMA - 1.0,
        "(1/n) sum floor(n/i) - ln n -> 2 gamma - 1",
    ))
}

/// `lim (1/h(n)) Σ_{i ≤ N(n)} f(P(i)/n)` with `N(n)` the largest `i` such
/// that `P(i) ≤ n` and normalizer `h(n) ~ (n/b)^{1/r}`.
pub struct PolySpec<'a> {
    /// Coefficients of `P` in ascending powers; the last one is positive.
    pub p_coeffs: Vec<f64>,
    pub norm_r: u32,
    pub norm_b: f64,
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
}

impl fmt::Debug for PolySpec<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolySpec")
            .field("p_coeffs", &self.p_coeffs)
            .field("norm_r", &self.norm_r)
            .field("norm_b", &self.norm_b)
            .finish_non_exhaustive()
    }
}

impl<'a> PolySpec<'a> {
    pub fn new<F>(p_coeffs: Vec<f64>, norm_r: u32, norm_b: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'a,
    {
        if p_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("polynomial coefficients must be finite".into()));
        }
        let spec = Self {
            p_coeffs,
            norm_r,
            norm_b,
            f: Box::new(f),
        };
        if spec.degree() < 1 || !(spec.leading() > 0.0) {
            return Err(Error::Domain(
                "P needs degree >= 1 and a positive leading coefficient".into(),
            ));
        }
        if norm_r < 1 || !(norm_b > 0.0 && norm_b.is_finite()) {
            return Err(Error::Domain("normalizer needs r >= 1 and b > 0".into()));
        }
        Ok(spec)
    }

    /// Degree `q` of `P` (trailing zero coefficients ignored).
    pub fn degree(&self) -> u32 {
        self.p_coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0) as u32
    }

    /// Leading coefficient `a` of `P`.
    pub fn leading(&self) -> f64 {
        self.p_coeffs[self.degree() as usize]
    }

    pub fn eval_p(&self, i: f64) -> f64 {
        self.p_coeffs.iter().rev().fold(0.0, |acc, &a| acc * i + a)
    }

    /// `N(n)`: greatest `i ≥ 1` with `P(i) ≤ n`, or 0 if there is none.
    ///
    /// Starts from `⌈(n/a)^{1/q}⌉` and scans locally, which assumes `P` is
    /// increasing from there on.
    pub fn n_terms(&self, n: u64) -> u64 {
        let q = self.degree() as f64;
        let nf = n as f64;
        let mut i = (nf / self.leading()).powf(1.0 / q).ceil().max(1.0) as u64;
        while i >= 1 && self.eval_p(i as f64) > nf {
            i -= 1;
        }
        while self.eval_p((i + 1) as f64) <= nf {
            i += 1;
        }
        i
    }

    /// `h(n) = (n/b)^{1/r}`.
    pub fn normalizer(&self, n: u64) -> f64 {
        (n as f64 / self.norm_b).powf(1.0 / self.norm_r as f64)
    }
}

/// Outcome of the polynomial family: a finite limit or divergence to +∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PolySolution {
    Limit(SolveResult),
    Divergent {
        n: u64,
        n_terms: u64,
        empirical: f64,
        meta: String,
    },
}

/// Limit law `x^{1/q}` of the measures on `{P(i)/n}`.
pub fn root_law(q: u32) -> Result<SmoothCdf<'static>> {
    if q == 0 {
        return Err(Error::Domain("degree must be >= 1".into()));
    }
    let inv = 1.0 / q as f64;
    SmoothCdf::new_1d(
        0.0,
        1.0,
        move |x| x.max(0.0).powf(inv),
        Some(move |x: f64| inv * x.powf(inv - 1.0)),
    )
}

pub fn polynomial_family(spec: &PolySpec<'_>, n: u64, exec: &Exec) -> Result<PolySolution> {
    check_n(n)?;
    let n_terms = spec.n_terms(n);
    if n_terms == 0 {
        return Err(Error::Domain(format!("N(n) = 0 at n = {n}: no i >= 1 with P(i) <= n")));
    }
    let nf = n as f64;
    let f = &spec.f;
    let raw = exec.sum(1..n_terms + 1, |i| f(spec.eval_p(i as f64) / nf))?;
    let empirical = raw / spec.normalizer(n);
    let q = spec.degree();
    let r = spec.norm_r;
    let meta = format!("P degree q = {q}, a = {}, normalizer r = {r}, b = {}, N(n) = {n_terms}", spec.leading(), spec.norm_b);
    if q > r {
        return Ok(PolySolution::Divergent {
            n,
            n_terms,
            empirical,
            meta: format!("{meta}; q > r: the normalized sum diverges to +infinity"),
        });
    }
    if q < r {
        return Ok(PolySolution::Limit(SolveResult::new(n, empirical, 0.0, format!("{meta}; q < r: limit 0"))));
    }
    let law = root_law(q)?;
    let integral = integrate_smooth(|x| f(x[0]), &law, &HyperBox::interval(0.0, 1.0)?, 1e-9)?;
    let scale = (spec.norm_b / spec.leading()).powf(1.0 / q as f64);
    Ok(PolySolution::Limit(SolveResult::new(
        n,
        empirical,
        scale * integral.value,
        format!("{meta}; q = r: (b/a)^(1/q) * integral of f d(x^(1/q))"),
    )))
}

/// `n ↦` empirical measure of `{√k}`, `k ≤ n`.
pub fn sqrt_frac_family() -> MeasureFamily<'static> {
    MeasureFamily::from_sequence("{sqrt k}, k <= n", sqrt_frac)
}

/// `n ↦` empirical measure of `sin(2π{√k})`, `k ≤ n`.
pub fn sin_sqrt_family() -> MeasureFamily<'static> {
    MeasureFamily::from_sequence("sin(2 pi {sqrt k}), k <= n", |k| (2.0 * PI * sqrt_frac(k)).sin())
}

/// `n ↦` push-forward of `uniform{i/n}` under `x ↦ {1/x}`, i.e. the
/// empirical measure of `{n/i}`, computed with exact remainders.
pub fn frac_n_over_i_family() -> MeasureFamily<'static> {
    MeasureFamily::new("{n/i}, i <= n", |n| {
        let values: Vec<f64> = (1..=n).map(|i| frac_n_over_i(n, i)).collect();
        AtomicMeasure::from_scalars(&values, None)
    })
}

/// `n ↦` empirical measure of `P(i)/n`, `i ≤ N(n)`.
pub fn polynomial_points_family<'a>(p_coeffs: Vec<f64>) -> MeasureFamily<'a> {
    MeasureFamily::new("P(i)/n, i <= N(n)", move |n| {
        let spec = PolySpec::new(p_coeffs.clone(), 1, 1.0, |x| x)?;
        let nt = spec.n_terms(n);
        if nt == 0 {
            return Err(Error::Domain(format!("N(n) = 0 at n = {n}")));
        }
        let values: Vec<f64> = (1..=nt).map(|i| spec.eval_p(i as f64) / n as f64).collect();
        AtomicMeasure::from_scalars(&values, None)
    })
}

/// Arcsine law of `sin X`, `X` uniform on a period.
pub fn arcsine_law() -> SmoothCdf<'static> {
    SmoothCdf::new_1d(
        -1.0,
        1.0,
        arcsine_cdf,
        Some(|t: f64| 1.0 / (PI * ((1.0 - t) * (1.0 + t)).sqrt())),
    )
    .expect("[-1, 1] is valid")
}
