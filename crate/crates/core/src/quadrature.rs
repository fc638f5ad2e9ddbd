//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals and
//! its tensorized extension to boxes.
//!
//! The panel with the largest error estimate is bisected until the summed
//! estimate drops below the absolute tolerance or the panel budget runs out.
//! Nodes are interior only, so integrable endpoint singularities (such as
//! `x^{-1/2}` at 0) are handled by repeated bisection toward the endpoint.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::measure::HyperBox;
use crate::sum::CompensatedSum;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default panel budget per one-dimensional adaptive run.
pub const DEFAULT_BUDGET: usize = 4000;

/// Value of a quadrature together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // ties broken by position so the refinement order is reproducible
        self.error
            .total_cmp(&other.error)
            .then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = finite("quadrature integrand", f(center)?)?;
    let mut kronrod = CompensatedSum::new();
    let mut gauss = CompensatedSum::new();
    kronrod.add(WGK[7] * fc);
    gauss.add(WG[3] * fc);
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = finite("quadrature integrand", f(center - dx)?)?;
        let f2 = finite("quadrature integrand", f(center + dx)?)?;
        kronrod.add(WGK[j] * (f1 + f2));
        if j % 2 == 1 {
            gauss.add(WG[j / 2] * (f1 + f2));
        }
    }
    let k = kronrod.value() * half;
    let g = gauss.value() * half;
    Ok(Panel {
        a,
        b,
        value: k,
        error: (k - g).abs(),
    })
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, tol: f64, budget: usize) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "quadrature needs a finite interval, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut heap = BinaryHeap::new();
    heap.push(gk15(&mut f, lo, hi)?);
    let mut evaluations = 15;
    let mut total_error = heap.peek().map_or(0.0, |p| p.error);
    let budget = budget.max(1);
    while total_error > tol && heap.len() < budget {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // interval exhausted at machine precision
            heap.push(worst);
            break;
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // re-sum occasionally to keep the running estimate honest
        if heap.len() % 64 == 0 {
            total_error = heap.iter().map(|p| p.error).collect::<CompensatedSum>().value();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).collect::<CompensatedSum>().value();
    let abs_error = panels.iter().map(|p| p.error).collect::<CompensatedSum>().value();
    if abs_error > tol {
        return Err(Error::QuadratureBudget {
            tol,
            budget,
            value: sign * value,
            error: abs_error,
        });
    }
    Ok(Quadrature {
        value: sign * value,
        abs_error,
        evaluations,
    })
}

/// Tensorized adaptive integral of `f` over a finite box.
///
/// Axis 0 is the outermost integral. Each inner integral runs at a tolerance
/// scaled by the width of the enclosing axes so the absolute errors add up
/// to at most `tol`.
pub fn integrate_box<F>(f: F, domain: &HyperBox, tol: f64, budget: usize) -> Result<Quadrature>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !domain.is_finite() {
        return Err(Error::Domain("quadrature needs a finite box".into()));
    }
    let mut point = vec![0.0; domain.dim()];
    let mut evaluations = 0usize;
    let value = nested(&f, domain, 0, &mut point, tol, budget, &mut evaluations)?;
    Ok(Quadrature {
        value: value.value,
        abs_error: value.abs_error,
        evaluations,
    })
}

fn nested<F>(
    f: &F,
    domain: &HyperBox,
    axis: usize,
    point: &mut Vec<f64>,
    tol: f64,
    budget: usize,
    evaluations: &mut usize,
) -> Result<Quadrature>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let a = domain.lower()[axis];
    let b = domain.upper()[axis];
    if axis + 1 == domain.dim() {
        let q = integrate_1d(
            |x| {
                point[axis] = x;
                f(point)
            },
            a,
            b,
            tol,
            budget,
        )?;
        *evaluations += q.evaluations;
        return Ok(q);
    }
    let width = (b - a).abs().max(f64::MIN_POSITIVE);
    let inner_tol = 0.5 * tol / width;
    let mut inner_error: f64 = 0.0;
    let outer = {
        let point_cell = std::cell::RefCell::new(std::mem::take(point));
        let evals = std::cell::Cell::new(0usize);
        let q = integrate_1d(
            |x| {
                let mut p = point_cell.borrow_mut();
                p[axis] = x;
                let mut ev = 0;
                let inner = nested(f, domain, axis + 1, &mut p, inner_tol, budget, &mut ev)?;
                evals.set(evals.get() + ev);
                inner_error = inner_error.max(inner.abs_error);
                Ok(inner.value)
            },
            a,
            b,
            0.5 * tol,
            budget,
        );
        *point = point_cell.into_inner();
        *evaluations += evals.get();
        q?
    };
    Ok(Quadrature {
        value: outer.value,
        abs_error: outer.abs_error + width * inner_error,
        evaluations: *evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok<F: Fn(f64) -> f64>(f: F) -> impl FnMut(f64) -> Result<f64> {
        move |x| Ok(f(x))
    }

    #[test]
    fn polynomials_are_exact() {
        let q = integrate_1d(ok(|x| x * x * x - 2.0 * x), -1.0, 2.0, 1e-12, 10).unwrap();
        assert!((q.value - (15.0 / 4.0 - 3.0)).abs() < 1e-14);
        assert_eq!(q.evaluations, 15);
    }

    #[test]
    fn smooth_and_reversed() {
        let q = integrate_1d(ok(f64::sin), 0.0, 1.0, 1e-12, 100).unwrap();
        assert!((q.value - (1.0 - 1f64.cos())).abs() < 1e-14);
        let r = integrate_1d(ok(f64::sin), 1.0, 0.0, 1e-12, 100).unwrap();
        assert_eq!(r.value, -q.value);
    }

    #[test]
    fn endpoint_singularity() {
        let q = integrate_1d(ok(|x| 0.5 / x.sqrt()), 0.0, 1.0, 1e-10, DEFAULT_BUDGET).unwrap();
        assert!((q.value - 1.0).abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let e = integrate_1d(ok(|x| (1.0 / x).sin()), 1e-6, 1.0, 1e-14, 5).unwrap_err();
        assert!(matches!(e, Error::QuadratureBudget { .. }));
        assert!(integrate_1d(ok(|x| x), 0.0, f64::INFINITY, 1e-6, 10).is_err());
        assert!(integrate_1d(ok(|x| x), 0.0, 1.0, 0.0, 10).is_err());
    }

    #[test]
    fn box_integral_2d_and_3d() {
        let b = HyperBox::new(vec![1.0, 0.0], vec![2.0, 3.0]).unwrap();
        let q = integrate_box(|p| Ok(2.0 * p[0]), &b, 1e-10, 100).unwrap();
        assert!((q.value - 9.0).abs() < 1e-12);
        let c = HyperBox::unit(3).unwrap();
        let q = integrate_box(|p| Ok((p[0] + p[1] * p[2]).exp()), &c, 1e-9, 200).unwrap();
        // ∫∫∫ e^{x+yz} = (e-1) ∫∫ e^{yz} dy dz, inner = Σ 1/(k! (k+1)^2)
        let mut series = 0.0;
        let mut fact = 1.0;
        for k in 0..30 {
            if k > 0 {
                fact *= k as f64;
            }
            series += 1.0 / (fact * ((k + 1) as f64).powi(2));
        }
        let expected = (1f64.exp() - 1.0) * series;
        assert!((q.value - expected).abs() < 1e-9, "{} vs {}", q.value, expected);
    }
}
