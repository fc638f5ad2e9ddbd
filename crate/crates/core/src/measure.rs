//! Finitely distributed atomic probabilities built from weighted multisets.
//!
//! An [`AtomicMeasure`] is `Σ ω_e δ_e` over the distinct points of a finite
//! multiset. Equal points are folded at construction by summing their
//! weights; equality is exact bit equality of the coordinates (after mapping
//! `-0.0` to `0.0`), so callers that want tolerance merging must quantize
//! their points first.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::sum::CompensatedSum;

/// Axis-aligned box `{x : lower[i] < x[i] <= upper[i]}`.
///
/// Lower bounds are exclusive and upper bounds inclusive, so that the
/// measure of a box equals the alternating vertex sum of the CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl HyperBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Empty("box bounds"));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() {
                return Err(Error::NonFinite {
                    context: "box bound",
                    value: f64::NAN,
                });
            }
            if lo > hi {
                return Err(Error::Domain(format!(
                    "box axis {i}: lower {lo} exceeds upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// One-dimensional interval `(lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    /// The orthant `A_x = (-inf, x_1] x ... x (-inf, x_k]`.
    pub fn below(x: &[f64]) -> Result<Self> {
        Self::new(vec![f64::NEG_INFINITY; x.len()], x.to_vec())
    }

    /// The unit cube `(0, 1]^dim`.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&lo, &hi))| lo < v && v <= hi)
    }

    /// Closed-box containment, used for "inside the support" checks.
    pub fn encloses(&self, other: &HyperBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim())
                .all(|i| self.lower[i] <= other.lower[i] && other.upper[i] <= self.upper[i])
    }

    /// Componentwise intersection; `None` when empty.
    pub fn intersect(&self, other: &HyperBox) -> Option<HyperBox> {
        if self.dim() != other.dim() {
            return None;
        }
        let lower: Vec<f64> = (0..self.dim())
            .map(|i| self.lower[i].max(other.lower[i]))
            .collect();
        let upper: Vec<f64> = (0..self.dim())
            .map(|i| self.upper[i].min(other.upper[i]))
            .collect();
        HyperBox::new(lower, upper).ok()
    }

    /// Splits along `axis` at `at` into the lower and upper halves.
    pub fn split(&self, axis: usize, at: f64) -> Result<(HyperBox, HyperBox)> {
        if axis >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: axis + 1,
            });
        }
        let mut low_upper = self.upper.clone();
        low_upper[axis] = at;
        let mut high_lower = self.lower.clone();
        high_lower[axis] = at;
        Ok((
            HyperBox::new(self.lower.clone(), low_upper)?,
            HyperBox::new(high_lower, self.upper.clone())?,
        ))
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Atom {
    point: Vec<f64>,
    weight: f64,
}

fn canonical(v: f64) -> f64 {
    // -0.0 and 0.0 are the same point
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

/// Probability `Σ ω_e δ_e` concentrated on finitely many points of `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    /// Distinct points in lexicographic order.
    atoms: Vec<Atom>,
    /// Size of the multiset before folding (`||E_n||`).
    multiset_size: usize,
    /// Prefix sums of the weights, used by the 1D CDF.
    cumulative: Vec<f64>,
}

impl AtomicMeasure {
    /// Builds the measure of a weighted multiset.
    ///
    /// Without weights every element gets `1/||E||`. Weights are normalized
    /// to sum to one and equal points are folded.
    pub fn from_points(points: &[Vec<f64>], weights: Option<&[f64]>) -> Result<Self> {
        let first = points.first().ok_or(Error::Empty("points"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::Empty("point coordinates"));
        }
        if let Some(w) = weights {
            if w.len() != points.len() {
                return Err(Error::DimensionMismatch {
                    expected: points.len(),
                    found: w.len(),
                });
            }
        }
        let mut atoms = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            let point = p
                .iter()
                .map(|&v| finite("point coordinate", v).map(canonical))
                .collect::<Result<Vec<_>>>()?;
            let weight = match weights {
                Some(w) => {
                    let wi = finite("weight", w[i])?;
                    if wi < 0.0 {
                        return Err(Error::NegativeWeight { index: i, weight: wi });
                    }
                    wi
                }
                None => 1.0,
            };
            atoms.push(Atom { point, weight });
        }
        Self::fold(dim, atoms, points.len())
    }

    /// Convenience constructor for one-dimensional multisets.
    pub fn from_scalars(values: &[f64], weights: Option<&[f64]>) -> Result<Self> {
        let points: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        Self::from_points(&points, weights)
    }

    /// The uniform sampling `{i/n : 1 <= i <= n}` of `[0, 1]`.
    pub fn uniform_grid(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("uniform grid with n = 0"));
        }
        let values: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        Self::from_scalars(&values, None)
    }

    fn fold(dim: usize, mut atoms: Vec<Atom>, multiset_size: usize) -> Result<Self> {
        atoms.sort_by(|a, b| lex_cmp(&a.point, &b.point).then(a.weight.total_cmp(&b.weight)));
        let mut folded: Vec<(Vec<f64>, CompensatedSum)> = Vec::new();
        let mut total = CompensatedSum::new();
        for atom in atoms {
            total.add(atom.weight);
            match folded.last_mut() {
                Some((p, w)) if same_point(p, &atom.point) => w.add(atom.weight),
                _ => {
                    let mut w = CompensatedSum::new();
                    w.add(atom.weight);
                    folded.push((atom.point, w));
                }
            }
        }
        let total = total.value();
        if total <= 0.0 {
            return Err(Error::ZeroTotalWeight);
        }
        let atoms: Vec<Atom> = folded
            .into_iter()
            .map(|(point, w)| Atom {
                point,
                weight: w.value() / total,
            })
            .filter(|a| a.weight > 0.0)
            .collect();
        let mut cumulative = Vec::new();
        if dim == 1 {
            let mut run = CompensatedSum::new();
            cumulative.reserve(atoms.len());
            for a in &atoms {
                run.add(a.weight);
                cumulative.push(run.value());
            }
        }
        Ok(Self {
            dim,
            atoms,
            multiset_size,
            cumulative,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct atoms after folding.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `||E_n||`, the multiset size before folding.
    pub fn multiset_size(&self) -> usize {
        self.multiset_size
    }

    /// Iterates `(point, weight)` in lexicographic point order.
    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.atoms.iter().map(|a| (a.point.as_slice(), a.weight))
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).collect::<CompensatedSum>().value()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            })
        } else {
            Ok(())
        }
    }

    /// Mass of the atoms inside `boxed` (half-open-below rule).
    pub fn measure_box(&self, boxed: &HyperBox) -> Result<f64> {
        self.check_dim(boxed.dim())?;
        if self.dim == 1 {
            let lo = self.cdf_1d(boxed.lower()[0]);
            let hi = self.cdf_1d(boxed.upper()[0]);
            return Ok((hi - lo).max(0.0));
        }
        Ok(self
            .atoms
            .iter()
            .filter(|a| boxed.contains(&a.point))
            .map(|a| a.weight)
            .collect::<CompensatedSum>()
            .value())
    }

    /// CDF `x -> mu((-inf, x_1] x ... x (-inf, x_k])`.
    pub fn cdf_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        if self.dim == 1 {
            return Ok(self.cdf_1d(x[0]));
        }
        Ok(self
            .atoms
            .iter()
            .filter(|a| a.point.iter().zip(x).all(|(p, v)| p <= v))
            .map(|a| a.weight)
            .collect::<CompensatedSum>()
            .value())
    }

    fn cdf_1d(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let count = self.atoms.partition_point(|a| a.point[0] <= x);
        if count == 0 {
            0.0
        } else if count == self.atoms.len() {
            // the last prefix sum can be off by an ulp; the total mass is 1
            1.0
        } else {
            self.cumulative[count - 1]
        }
    }

    /// Push-forward through `g`: atoms `g(e)` with inherited weights, folded.
    pub fn pushforward<G>(&self, mut g: G) -> Result<AtomicMeasure>
    where
        G: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut out_dim = None;
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let image = g(&a.point);
            let d = *out_dim.get_or_insert(image.len());
            if image.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: image.len(),
                });
            }
            let point = image
                .into_iter()
                .map(|v| finite("push-forward image", v).map(canonical))
                .collect::<Result<Vec<_>>>()?;
            atoms.push(Atom {
                point,
                weight: a.weight,
            });
        }
        let dim = out_dim.unwrap_or(0);
        if dim == 0 {
            return Err(Error::Empty("push-forward image coordinates"));
        }
        Self::fold(dim, atoms, self.multiset_size)
    }

    /// Push-forward through a scalar map of a one-dimensional measure.
    pub fn pushforward_scalar<G>(&self, mut g: G) -> Result<AtomicMeasure>
    where
        G: FnMut(f64) -> f64,
    {
        self.pushforward(|p| vec![g(p[0])])
    }

    /// `Σ ω_e f(e)` for a vector-valued `f`.
    pub fn expectation<F>(&self, mut f: F) -> Result<Vec<f64>>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut acc: Vec<CompensatedSum> = Vec::new();
        for a in &self.atoms {
            let v = f(&a.point);
            if acc.is_empty() {
                acc = vec![CompensatedSum::new(); v.len()];
            } else if v.len() != acc.len() {
                return Err(Error::DimensionMismatch {
                    expected: acc.len(),
                    found: v.len(),
                });
            }
            for (s, x) in acc.iter_mut().zip(v) {
                s.add(a.weight * finite("integrand", x)?);
            }
        }
        Ok(acc.iter().map(CompensatedSum::value).collect())
    }

    /// `Σ ω_e f(e)` for a scalar `f`.
    pub fn expectation_scalar<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut acc = CompensatedSum::new();
        for a in &self.atoms {
            acc.add(a.weight * finite("integrand", f(&a.point))?);
        }
        Ok(acc.value())
    }
}
