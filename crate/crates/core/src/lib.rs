//! Fixed-point toolkit for partial metric spaces.
//!
//! * [`metric`]: partial metrics, the induced metric, balls, axiom checks
//!   and sequence predicates.
//! * [`spaces`]: set and map descriptors and the example catalog.
//! * [`contraction`]: sampled certificates for contraction hypotheses.
//! * [`solver`]: Picard iteration, rate fitting and set distances.
//! * [`cli`]: the `pmfix` command-line front end.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix the
//! common choices.

pub mod cli;
pub mod contraction;
pub mod error;
pub mod metric;
pub mod scalar;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default point-equality tolerance.
pub const DEFAULT_TOL_EQ: f64 = 1e-9;
/// Default solver tolerance on induced-metric steps.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default grid density.
pub const DEFAULT_DENSITY: usize = 100;

/// Exact rational scalar.
pub type Exact = num_rational::Ratio<i64>;

pub type PartialMetric64 = metric::PartialMetric<f64>;
pub type PartialMetric32 = metric::PartialMetric<f32>;
pub type PartialMetricExact = metric::PartialMetric<Exact>;
pub type SetDescriptor64 = spaces::SetDescriptor<f64>;
pub type SetDescriptorExact = spaces::SetDescriptor<Exact>;
pub type PiecewiseMap64 = spaces::PiecewiseMap<f64>;
pub type PiecewiseMapExact = spaces::PiecewiseMap<Exact>;
pub type CatalogEntry64 = spaces::CatalogEntry<f64>;
pub type CatalogEntryExact = spaces::CatalogEntry<Exact>;
pub type Certificate64 = contraction::Certificate<f64>;
pub type SolveResult64 = solver::SolveResult<f64>;
pub type SolveResultExact = solver::SolveResult<Exact>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
