//! Asymptotic limit problems through atomic probabilities.
//!
//! A finite multiset `E_n` defines the atomic probability
//! `μ_n = Σ ω_e δ_e` ([`measure`]). When the CDFs `φ_n` converge pointwise
//! to some `φ`, limits of averages and proportions over `E_n` become
//! Stieltjes integrals `∫ f dφ` ([`stieltjes`]), checked with the
//! diagnostics in [`convergence`]. [`problems`] solves concrete families
//! (fractional parts of `√k` and `n/i`, polynomial samplings, the weak
//! Dirichlet asymptotic) and [`special`] holds the digamma-type functions
//! their limits are expressed with.

pub mod convergence;
pub mod error;
pub mod measure;
pub mod problems;
pub mod quadrature;
pub mod special;
pub mod stieltjes;
pub mod sum;

pub use convergence::{ConvergenceReport, MeasureFamily};
pub use error::{Error, Result};
pub use measure::{AtomicMeasure, HyperBox};
pub use problems::{NamedFn, PolySolution, PolySpec, SolveResult};
pub use quadrature::Quadrature;
pub use stieltjes::{Partition1D, SmoothCdf, StepCdf, VariationControl};
pub use sum::{CompensatedSum, Exec};

/// Crate version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
