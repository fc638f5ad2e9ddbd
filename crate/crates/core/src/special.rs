//! Digamma, trigamma, Hurwitz zeta, harmonic numbers and the limit law of
//! the fractional parts `{n/i}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_43;

/// Constants used by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialConstants {
    pub gamma: f64,
    pub pi: f64,
}

impl SpecialConstants {
    pub const VALUES: SpecialConstants = SpecialConstants {
        gamma: EULER_GAMMA,
        pi: std::f64::consts::PI,
    };
}

/// Bernoulli numbers B_2, B_4, …, B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const RECURRENCE_THRESHOLD: f64 = 6.0;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} needs a finite x > 0, got {x}")))
    }
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
///
/// Shifts upward with `ψ(x) = ψ(x+1) − 1/x` until `x ≥ 6`, then applies the
/// asymptotic expansion with Bernoulli terms through B₁₄.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    Ok(digamma_positive(x))
}

pub(crate) fn digamma_positive(mut x: f64) -> f64 {
    let mut shift = CompensatedSum::new();
    while x < RECURRENCE_THRESHOLD {
        shift.add(-1.0 / x);
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    // Horner over B_{2k}/(2k) x^{-2k}, k = 7 down to 1
    for k in (1..=7).rev() {
        series = (series + BERNOULLI_EVEN[k - 1] / (2 * k) as f64) * inv2;
    }
    let mut acc = shift;
    acc.add(x.ln());
    acc.add(-0.5 / x);
    acc.add(-series);
    acc.value()
}

/// Trigamma `ψ′(x) = Σ_{m≥0} (m + x)^{-2}` for `x > 0`.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    Ok(trigamma_positive(x))
}

pub(crate) fn trigamma_positive(mut x: f64) -> f64 {
    let mut shift = CompensatedSum::new();
    while x < RECURRENCE_THRESHOLD {
        shift.add(1.0 / (x * x));
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    for k in (1..=8).rev() {
        series = (series + BERNOULLI_EVEN[k - 1]) * inv2;
    }
    let mut acc = shift;
    acc.add(inv);
    acc.add(0.5 * inv2);
    acc.add(series * inv);
    acc.value()
}

/// Hurwitz zeta `ζ(s, x) = Σ_{m≥0} (m + x)^{-s}` for `s > 1`, `x > 0`.
///
/// Euler–Maclaurin summation: twelve direct terms, the integral and
/// endpoint corrections, and Bernoulli corrections through B₁₈. The first
/// omitted correction is checked against a relative bound of 1e-15.
pub fn hurwitz_zeta(s: f64, x: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::Domain(format!("hurwitz_zeta needs s > 1, got {s}")));
    }
    check_positive("hurwitz_zeta", x)?;
    const DIRECT: u32 = 12;
    let mut acc = CompensatedSum::new();
    for m in 0..DIRECT {
        acc.add((x + m as f64).powf(-s));
    }
    let a = x + DIRECT as f64;
    let a_pow = a.powf(-s);
    acc.add(a * a_pow / (s - 1.0));
    acc.add(0.5 * a_pow);
    // term_k = B_{2k}/(2k)! · s(s+1)…(s+2k−2) · a^{−s−2k+1}
    let mut rising = s; // s(s+1)…(s+2k−2)
    let mut factorial = 2.0; // (2k)!
    let mut power = a_pow / a; // a^{−s−2k+1}
    let mut last = 0.0;
    for k in 1..=10usize {
        let term = BERNOULLI_EVEN[k - 1] / factorial * rising * power;
        if k == 10 {
            last = term;
            break;
        }
        acc.add(term);
        let kk = k as f64;
        rising *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
        factorial *= (2.0 * kk + 1.0) * (2.0 * kk + 2.0);
        power /= a * a;
    }
    let value = acc.value();
    if last.abs() > 1e-15 * value.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "hurwitz_zeta({s}, {x}) remainder {last:e} exceeds the accuracy target"
        )));
    }
    Ok(value)
}

/// Riemann zeta `ζ(s) = ζ(s, 1)` for `s > 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// `H_n = Σ_{i ≤ n} 1/i`.
pub fn harmonic(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("harmonic number needs n >= 1".into()));
    }
    // smallest terms first
    Ok((1..=n).rev().map(|i| 1.0 / i as f64).collect::<CompensatedSum>().value())
}

/// Limit CDF of the fractional parts `{n/i}`, `1 ≤ i ≤ n`:
/// `ψ(t) + 1/t + γ` on `(0, 1)`, 0 below and 1 above.
///
/// Evaluated as `ψ(1 + t) + γ`, which is the same function without the
/// cancellation between `ψ(t)` and `1/t` near 0.
pub fn frac_limit_cdf(t: f64) -> f64 {
    if t.is_nan() {
        f64::NAN
    } else if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        (digamma_positive(1.0 + t) + EULER_GAMMA).clamp(0.0, 1.0)
    }
}

/// Density of [`frac_limit_cdf`]: `ψ′(t) − 1/t² = ψ′(1 + t)` on `(0, 1)`.
pub fn frac_limit_density(t: f64) -> f64 {
    if t > 0.0 && t < 1.0 {
        trigamma_positive(1.0 + t)
    } else {
        0.0
    }
}

/// Partial sum of a power series with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    pub truncation_bound: f64,
    pub terms: u32,
}

/// `−Σ_{k=1}^{k_max} ζ(k+1) (−t)^k`, the Taylor series of
/// [`frac_limit_cdf`] at 0, for `|t| < 1`.
///
/// For `t ≥ 0` the series alternates with decreasing terms and the bound is
/// the first omitted term; for `t < 0` it is that term over `1 − |t|`.
pub fn frac_limit_cdf_series(t: f64, k_max: u32) -> Result<SeriesSum> {
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "series for the limit CDF converges only for |t| < 1, got {t}"
        )));
    }
    let mut acc = CompensatedSum::new();
    let mut power = 1.0;
    for k in 1..=k_max {
        power *= -t;
        acc.add(-riemann_zeta(k as f64 + 1.0)? * power);
    }
    let next = riemann_zeta(k_max as f64 + 2.0)? * t.abs().powi(k_max as i32 + 1);
    let truncation_bound = if t >= 0.0 { next } else { next / (1.0 - t.abs()) };
    Ok(SeriesSum {
        value: acc.value(),
        truncation_bound,
        terms: k_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    /// `−γ + Σ_{n<N} (1/(n+1) − 1/(n+x))` plus the Euler–Maclaurin tail of
    /// the remaining terms.
    fn digamma_series_oracle(x: f64, terms: u64) -> f64 {
        let mut acc = CompensatedSum::new();
        acc.add(-EULER_GAMMA);
        for n in 0..terms {
            let nf = n as f64;
            acc.add(1.0 / (nf + 1.0) - 1.0 / (nf + x));
        }
        // Σ_{n≥N} (1/(n+1) − 1/(n+x)) ≈ ln((N+x)/(N+1)) + corrections
        let big_n = terms as f64;
        acc.add(((big_n + x) / (big_n + 1.0)).ln());
        acc.add(0.5 / (big_n + 1.0) - 0.5 / (big_n + x));
        acc.value()
    }

    #[test]
    fn digamma_reference_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        let half = -EULER_GAMMA - 2.0 * LN_2;
        let oracle = digamma_series_oracle(0.5, 10_000_000);
        assert!((oracle - half).abs() < 1e-12, "oracle {oracle}");
        assert!((digamma(0.5).unwrap() - oracle).abs() < 1e-12);
        assert!((digamma(0.5).unwrap() - (-1.963_510_026_021_423_5)).abs() < 1e-12);
    }

    #[test]
    fn digamma_against_oracle_on_grid() {
        for x in [0.1, 0.37, 1.5, 3.25, 7.0, 12.5, 49.0] {
            let o = digamma_series_oracle(x, 2_000_000);
            assert!((digamma(x).unwrap() - o).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
        assert!(trigamma(f64::NAN).is_err());
        assert!(hurwitz_zeta(1.0, 1.0).is_err());
        assert!(hurwitz_zeta(2.0, 0.0).is_err());
        assert!(harmonic(0).is_err());
        assert!(frac_limit_cdf_series(1.0, 10).is_err());
    }

    #[test]
    fn trigamma_against_direct_sums() {
        // Σ_{m≤M} 1/m² + tail bounded between 1/(M+1) and 1/M
        let m_max = 2_000_000u64;
        let partial = (1..=m_max).rev().map(|m| 1.0 / (m as f64).powi(2)).collect::<CompensatedSum>().value();
        let mf = m_max as f64;
        let tail = 1.0 / mf - 0.5 / (mf * mf) + 1.0 / (6.0 * mf.powi(3));
        let oracle = partial + tail;
        assert!((oracle - PI * PI / 6.0).abs() < 1e-13);
        assert!((trigamma(1.0).unwrap() - oracle).abs() < 1e-12);

        // ψ′(0.5) − 4 = Σ_{m≥1} (m + 1/2)^{-2}
        let direct = (1..=m_max)
            .rev()
            .map(|m| 1.0 / (m as f64 + 0.5).powi(2))
            .collect::<CompensatedSum>()
            .value();
        let a = mf + 0.5;
        let tail = 1.0 / a - 0.5 / (a * a) + 1.0 / (6.0 * a.powi(3));
        assert!((trigamma(0.5).unwrap() - 4.0 - (direct + tail)).abs() < 1e-10);
    }

    #[test]
    fn hurwitz_matches_trigamma_and_riemann() {
        for x in [0.25, 0.5, 1.0, 1.5, 3.0, 4.75] {
            let z = hurwitz_zeta(2.0, x).unwrap();
            assert!((z - trigamma(x).unwrap()).abs() < 1e-12, "x={x}");
        }
        assert!((riemann_zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((riemann_zeta(80.0).unwrap() - 1.0).abs() < 1e-20 + f64::EPSILON);
    }

    #[test]
    fn hurwitz_integral_oracle() {
        // ζ(2, x) = ∫_0^∞ t e^{−tx} / (1 − e^{−t}) dt
        for x in [0.5, 1.0, 2.5] {
            let q = crate::quadrature::integrate_1d(
                |t| Ok(if t == 0.0 { 1.0 } else { t * (-t * x).exp() / -(-t).exp_m1() }),
                0.0,
                80.0 / x,
                1e-9,
                4000,
            )
            .unwrap();
            assert!((q.value - hurwitz_zeta(2.0, x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1).unwrap(), 1.0);
        assert!((harmonic(4).unwrap() - 25.0 / 12.0).abs() < 1e-15);
        for n in [100u64, 10_000, 1_000_000] {
            let gap = harmonic(n).unwrap() - (n as f64).ln() - EULER_GAMMA;
            assert!(gap > 0.0 && gap < 1.0 / n as f64, "n={n} gap={gap}");
        }
    }

    /// `Σ_{m≥1} (1/m − 1/(m+t))` summed directly with the `t/m²`-type tail.
    fn frac_series_oracle(t: f64, terms: u64) -> f64 {
        let direct = (1..=terms)
            .rev()
            .map(|m| {
                let m = m as f64;
                t / (m * (m + t))
            })
            .collect::<CompensatedSum>()
            .value();
        let n = terms as f64;
        // Σ_{m>N} t/(m(m+t)) ≈ t/(N + 1/2 + t/2)
        direct + t / (n + 0.5 + 0.5 * t)
    }

    #[test]
    fn frac_limit_values() {
        assert_eq!(frac_limit_cdf(1.0), 1.0);
        assert_eq!(frac_limit_cdf(0.0), 0.0);
        assert_eq!(frac_limit_cdf(-3.0), 0.0);
        assert_eq!(frac_limit_cdf(7.0), 1.0);
        let oracle = frac_series_oracle(0.5, 10_000_000);
        assert!((oracle - (2.0 - 2.0 * LN_2)).abs() < 1e-12);
        assert!((frac_limit_cdf(0.5) - oracle).abs() < 1e-12);
        let tiny = frac_limit_cdf(1e-6);
        assert!(tiny > 0.0 && tiny <= 2e-6);
        assert!(tiny <= 1e-6 * PI * PI / 6.0 + 1e-15);
        // continuity at the ends
        assert!(frac_limit_cdf(1.0 - 1e-12) > 1.0 - 1e-11);
        assert!(frac_limit_cdf(1e-14) < 1e-13);
    }

    #[test]
    fn frac_limit_monotone_and_normalized() {
        let mut prev = 0.0;
        for j in 0..=1000 {
            let v = frac_limit_cdf(j as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
        let q = crate::quadrature::integrate_1d(|t| Ok(frac_limit_density(t)), 0.0, 1.0, 1e-12, 1000).unwrap();
        assert!((q.value - 1.0).abs() < 1e-9);
        assert!((frac_limit_density(1e-9) - (PI * PI / 6.0)).abs() < 1e-8);
    }

    #[test]
    fn series_agrees_with_closed_form() {
        assert_eq!(frac_limit_cdf_series(0.0, 10).unwrap().value, 0.0);
        let s = frac_limit_cdf_series(0.5, 60).unwrap();
        assert!((s.value - frac_limit_cdf(0.5)).abs() < 1e-12);
        assert!(s.truncation_bound < 1e-18);
        for j in 0..=60 {
            let t = j as f64 / 100.0;
            let s = frac_limit_cdf_series(t, 80).unwrap();
            assert!((s.value - frac_limit_cdf(t)).abs() < 1e-12, "t={t}");
        }
        let t = 1e-4;
        let s = frac_limit_cdf_series(t, 1).unwrap();
        assert!((s.value - PI * PI / 6.0 * t).abs() < 1e-15);
        let neg = frac_limit_cdf_series(-0.5, 40).unwrap();
        assert!((neg.value - (digamma(0.5).unwrap() + EULER_GAMMA)).abs() < 1e-10);
    }
}
