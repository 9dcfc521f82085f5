//! Set, map and space descriptors, and the catalog of worked examples.

mod catalog;
mod map;
mod set;

pub use catalog::{
    catalog, make_counterexample, make_hybrid_unit, make_k3_cycle, make_max_space,
    make_rationals_max, max_entry, CatalogEntry, CATALOG_NAMES,
};
pub use map::{MapRule, Piece, PiecewiseMap};
pub use set::{sample_intersection, Grid, Interval, SetDescriptor, SetFlags, UNBOUNDED_SPAN};

pub(crate) use set::sort_dedup;
