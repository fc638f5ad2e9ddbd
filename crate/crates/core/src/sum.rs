//! Compensated summation and deterministic chunked reduction.
//!
//! Every accumulation of weights or integrand values in this crate goes
//! through [`CompensatedSum`] (Neumaier's variant of Kahan summation). The
//! parallel helpers in [`Exec`] cut an index range into chunks whose
//! boundaries depend only on the range, never on the thread count, and merge
//! the per-chunk partial sums in chunk order. Results are therefore
//! bit-identical for any number of threads.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Running sum carrying the low-order bits lost by each addition.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one.
    #[inline]
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of an iterator of values.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Number of indices per reduction chunk.
pub const CHUNK: u64 = 1 << 14;

/// Execution policy for the index loops of the solvers.
///
/// `threads = None` uses rayon's global pool, `Some(1)` runs inline on the
/// calling thread. The numeric result never depends on the choice.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Exec {
    pub threads: Option<usize>,
}

impl Exec {
    pub const fn sequential() -> Self {
        Self { threads: Some(1) }
    }

    pub const fn with_threads(threads: usize) -> Self {
        Self { threads: Some(threads) }
    }

    fn chunks(range: &Range<u64>) -> Vec<Range<u64>> {
        let mut out = Vec::new();
        let mut lo = range.start;
        while lo < range.end {
            let hi = range.end.min(lo.saturating_add(CHUNK));
            out.push(lo..hi);
            lo = hi;
        }
        out
    }

    fn map_chunks<T, F>(&self, range: Range<u64>, per_chunk: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(Range<u64>) -> T + Sync + Send,
    {
        let chunks = Self::chunks(&range);
        match self.threads {
            Some(1) => Ok(chunks.into_iter().map(per_chunk).collect()),
            Some(0) | None => Ok(chunks.into_par_iter().map(per_chunk).collect()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::ThreadPool(e.to_string()))?;
                Ok(pool.install(|| chunks.into_par_iter().map(per_chunk).collect()))
            }
        }
    }

    /// Compensated sum of `f(i)` over `range`, reduced in fixed chunk order.
    pub fn sum<F>(&self, range: Range<u64>, f: F) -> Result<f64>
    where
        F: Fn(u64) -> f64 + Sync + Send,
    {
        let partials = self.map_chunks(range, |r| r.map(&f).collect::<CompensatedSum>())?;
        let mut total = CompensatedSum::new();
        for p in &partials {
            total.merge(p);
        }
        Ok(total.value())
    }

    /// Number of indices in `range` satisfying `pred`.
    pub fn count<F>(&self, range: Range<u64>, pred: F) -> Result<u64>
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        let partials = self.map_chunks(range, |r| r.filter(|&i| pred(i)).count() as u64)?;
        Ok(partials.into_iter().sum())
    }

    /// Exact integer sum of `f(i)` over `range`.
    pub fn sum_u128<F>(&self, range: Range<u64>, f: F) -> Result<u128>
    where
        F: Fn(u64) -> u128 + Sync + Send,
    {
        let partials = self.map_chunks(range, |r| r.map(&f).sum::<u128>())?;
        Ok(partials.into_iter().sum())
    }

    /// Applies `f` to each item, preserving order.
    pub fn map_ordered<T, U, F>(&self, items: &[T], f: F) -> Result<Vec<U>>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self.threads {
            Some(1) => Ok(items.iter().map(f).collect()),
            Some(0) | None => Ok(items.par_iter().map(f).collect()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::ThreadPool(e.to_string()))?;
                Ok(pool.install(|| items.par_iter().map(f).collect()))
            }
        }
    }
}
