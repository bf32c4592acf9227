//! Exact computations on finite metric spaces: `(n, δ)`-hyperbolicity
//! constants, the tight span (injective hull) as a polyhedral complex, and
//! ℓ∞-orthoplex witnesses inside it.
//!
//! All arithmetic is over exact rationals ([`Scalar`]).

pub mod family;
pub mod fixtures;
pub mod generate;
pub mod hyperbolicity;
pub mod io;
pub mod lp;
pub mod metric;
pub mod scalar;
pub mod tightspan;
pub mod witness;

pub use family::{IndexPermutation, PairedFamily};
pub use metric::{linf_product, validate_metric, FiniteMetricSpace, MetricError, Violation};
pub use scalar::Scalar;
pub use tightspan::{MetricFunction, TightSpanComplex};
pub use witness::{BestScale, OrthoplexWitness};
