use serde::Serialize;

use crate::contraction::CyclicDecomposition;
use crate::error::{Error, Result};
use crate::metric::{MetricRule, PartialMetric};
use crate::scalar::Scalar;
use crate::spaces::{Grid, Interval, MapRule, PiecewiseMap, SetDescriptor};

/// Names accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 4] = ["max", "rationals-max", "hybrid-unit", "counterexample"];

/// A space with optional map and cyclic decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry<S> {
    pub name: String,
    pub space: PartialMetric<S>,
    pub map: Option<PiecewiseMap<S>>,
    pub decomposition: Option<CyclicDecomposition<S>>,
    /// Completeness status and other facts stated for the example.
    pub notes: Vec<String>,
    /// Values supplied here where the source definition leaves the map open.
    pub extensions: Vec<String>,
}

impl<S: Scalar> CatalogEntry<S> {
    pub fn map(&self) -> Result<&PiecewiseMap<S>> {
        self.map
            .as_ref()
            .ok_or_else(|| Error::Argument(format!("`{}` has no attached map", self.name)))
    }

    pub fn decomposition(&self) -> Result<&CyclicDecomposition<S>> {
        self.decomposition
            .as_ref()
            .ok_or_else(|| Error::Argument(format!("`{}` has no cyclic decomposition", self.name)))
    }
}

/// Looks up a catalog entry by name.
pub fn catalog<S: Scalar>(name: &str) -> Option<CatalogEntry<S>> {
    match name {
        "max" => Some(max_entry()),
        "rationals-max" => Some(make_rationals_max()),
        "hybrid-unit" => Some(make_hybrid_unit()),
        "counterexample" => Some(make_counterexample()),
        _ => None,
    }
}

/// `p(x, y) = max{x, y}` on a nonnegative domain.
pub fn make_max_space<S: Scalar>(domain: SetDescriptor<S>) -> Result<PartialMetric<S>> {
    if domain.is_empty() {
        return Err(Error::Argument("max space needs a nonempty domain".into()));
    }
    if !domain.is_nonnegative() {
        return Err(Error::Argument(format!(
            "max space domain must lie in [0, inf), got {domain}"
        )));
    }
    Ok(PartialMetric::new("max", domain, MetricRule::Max))
}

/// `max` on `[0, inf)` with `T(x) = x/2`.
pub fn max_entry<S: Scalar>() -> CatalogEntry<S> {
    let domain = SetDescriptor::from_interval(Interval::at_least(S::zero())).declare_closed();
    CatalogEntry {
        name: "max".into(),
        space: make_max_space(domain).expect("nonnegative domain"),
        map: Some(PiecewiseMap::scaling(1, 2)),
        decomposition: None,
        notes: vec!["complete partial metric space".into()],
        extensions: vec![],
    }
}

/// `max` on the nonnegative rationals, sampled on a dyadic grid, with
/// `f(x) = x/2`.
pub fn make_rationals_max<S: Scalar>() -> CatalogEntry<S> {
    let domain =
        SetDescriptor::from_interval(Interval::at_least(S::zero())).with_grid(Grid::Dyadic);
    let mut space = make_max_space(domain).expect("nonnegative domain");
    space.name = "rationals-max".into();
    CatalogEntry {
        name: "rationals-max".into(),
        space,
        map: Some(PiecewiseMap::scaling(1, 2)),
        decomposition: None,
        notes: vec![
            "0-complete partial metric space which is not complete".into(),
            "samples are dyadic rationals".into(),
        ],
        extensions: vec![],
    }
}

/// `X = [0, 1]` with `p = |x - y|` on `[0, 1)^2` and `max` otherwise;
/// `T = 1/2` on `[0, 1)`, `T(1) = 0`; `A = [0, 1/2]`, `B = [1/2, 1]`.
pub fn make_hybrid_unit<S: Scalar>() -> CatalogEntry<S> {
    let (zero, half, one) = (S::zero(), S::ratio(1, 2), S::one());
    let map = PiecewiseMap::new()
        .piece(
            SetDescriptor::from_interval(Interval::closed_open(zero, one)),
            MapRule::constant(half),
        )
        .piece(SetDescriptor::from_points([one]), MapRule::constant(zero));
    let a = SetDescriptor::closed(zero, half).declare_zero_compact();
    let b = SetDescriptor::closed(half, one);
    CatalogEntry {
        name: "hybrid-unit".into(),
        space: PartialMetric::new(
            "hybrid-unit",
            SetDescriptor::closed(zero, one),
            MetricRule::HybridUnit,
        ),
        map: Some(map),
        decomposition: Some(CyclicDecomposition::new(vec![a, b]).expect("two sets")),
        notes: vec![
            "complete partial metric space".into(),
            "claimed cyclic contraction constant alpha = 3/4".into(),
            "A and B meet only at 1/2".into(),
        ],
        extensions: vec![],
    }
}

/// `A = [0, 1]`, `B = [3, 4] U {3/2}`, `p = max` on `A U B`, and
/// `T = 3/2` on `[0, 1)`, `T(3/2) = 1/2`, `T(x) = (x - 2)/2` on `[3, 4]`.
/// `T(1)` is not given by the example; it is set to 3/2.
pub fn make_counterexample<S: Scalar>() -> CatalogEntry<S> {
    let (zero, half, one, three_halves) = (S::zero(), S::ratio(1, 2), S::one(), S::ratio(3, 2));
    let (three, four) = (S::from_i64(3).unwrap(), S::from_i64(4).unwrap());
    let a = SetDescriptor::closed(zero, one);
    let b = SetDescriptor::closed(three, four).with_point(three_halves);
    let map = PiecewiseMap::new()
        .piece(
            SetDescriptor::from_interval(Interval::closed_open(zero, one)),
            MapRule::constant(three_halves),
        )
        .piece(
            SetDescriptor::from_points([one]),
            MapRule::constant(three_halves),
        )
        .piece(
            SetDescriptor::from_points([three_halves]),
            MapRule::constant(half),
        )
        .piece(
            SetDescriptor::closed(three, four),
            MapRule::affine(half, -one),
        );
    let mut space = make_max_space(a.union(&b)).expect("nonnegative domain");
    space.name = "counterexample".into();
    CatalogEntry {
        name: "counterexample".into(),
        space,
        map: Some(map),
        decomposition: Some(CyclicDecomposition::new(vec![a, b]).expect("two sets")),
        notes: vec![
            "complete partial metric space".into(),
            "A and B are disjoint".into(),
        ],
        extensions: vec!["T(1) = 3/2 (continuous extension of the first piece; the rule leaves 1 unassigned)".into()],
    }
}

/// Three-set cycle on `max` over `[0, 1]`: `A = ([0, 1], [0, 1/2], [0, 1/4])`
/// with `T(x) = x/4`.
pub fn make_k3_cycle<S: Scalar>() -> CatalogEntry<S> {
    let zero = S::zero();
    let sets = vec![
        SetDescriptor::closed(zero, S::one()),
        SetDescriptor::closed(zero, S::ratio(1, 2)),
        SetDescriptor::closed(zero, S::ratio(1, 4)),
    ];
    let mut space =
        make_max_space(SetDescriptor::closed(zero, S::one())).expect("nonnegative domain");
    space.name = "k3-cycle".into();
    CatalogEntry {
        name: "k3-cycle".into(),
        space,
        map: Some(PiecewiseMap::scaling(1, 4)),
        decomposition: Some(CyclicDecomposition::new(sets).expect("three sets")),
        notes: vec!["fixed point 0 lies in every set".into()],
        extensions: vec![],
    }
}
