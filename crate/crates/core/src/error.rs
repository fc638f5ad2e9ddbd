use thiserror::Error;

/// Errors raised by the measure, integration and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative weight {weight} at index {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("all weights are zero")]
    ZeroTotalWeight,

    #[error("non-finite value {value} ({context})")]
    NonFinite { context: &'static str, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing density for smooth integration")]
    MissingDensity,

    #[error("quadrature tolerance {tol:e} not reached within {budget} panels (estimate {value}, error {error:e})")]
    QuadratureBudget {
        tol: f64,
        budget: usize,
        value: f64,
        error: f64,
    },

    #[error("variation did not stabilize within {max_level} dyadic levels (last {last}, change {change:e})")]
    VariationUnstable {
        max_level: u32,
        last: f64,
        change: f64,
    },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// True for failures caused by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureBudget { .. } | Error::VariationUnstable { .. } | Error::NonFinite { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(context: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { context, value })
    }
}
