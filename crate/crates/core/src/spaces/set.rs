use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Width of the window sampled on an interval with no upper bound.
pub const UNBOUNDED_SPAN: i64 = 4;

/// A real interval. `hi = None` means unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<S> {
    pub lo: S,
    pub hi: Option<S>,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: Option<S>, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if let Some(h) = hi {
            if lo > h {
                return Err(Error::Argument(format!(
                    "interval bounds reversed: {lo} > {h}"
                )));
            }
        }
        Ok(Self {
            lo,
            hi,
            lo_closed,
            hi_closed: hi.is_some() && hi_closed,
        })
    }

    /// `[lo, hi]`
    pub fn closed(lo: S, hi: S) -> Self {
        Self::new(lo, Some(hi), true, true).expect("lo <= hi")
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: S, hi: S) -> Self {
        Self::new(lo, Some(hi), true, false).expect("lo <= hi")
    }

    /// `[lo, ∞)`
    pub fn at_least(lo: S) -> Self {
        Self::new(lo, None, true, false).expect("unbounded")
    }

    pub fn is_empty(&self) -> bool {
        match self.hi {
            Some(h) => self.lo > h || (self.lo == h && !(self.lo_closed && self.hi_closed)),
            None => false,
        }
    }

    pub fn contains(&self, x: S) -> bool {
        let above_lo = x > self.lo || (self.lo_closed && x == self.lo);
        let below_hi = match self.hi {
            None => true,
            Some(h) => x < h || (self.hi_closed && x == h),
        };
        above_lo && below_hi
    }

    /// Distance from `x` to the closure of the interval.
    pub fn distance(&self, x: S) -> S {
        if x < self.lo {
            return self.lo - x;
        }
        match self.hi {
            Some(h) if x > h => x - h,
            _ => S::zero(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = match (self.hi, other.hi) {
            (None, None) => (None, false),
            (Some(h), None) => (Some(h), self.hi_closed),
            (None, Some(h)) => (Some(h), other.hi_closed),
            (Some(a), Some(b)) if a < b => (Some(a), self.hi_closed),
            (Some(a), Some(b)) if b < a => (Some(b), other.hi_closed),
            (Some(a), Some(_)) => (Some(a), self.hi_closed && other.hi_closed),
        };
        let out = Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        };
        (!out.is_empty()).then_some(out)
    }

    /// The part of `self` strictly outside `other`, as at most two intervals.
    fn subtract(&self, other: &Self) -> Vec<Self> {
        if self.intersect(other).is_none() {
            return vec![*self];
        }
        let mut parts = Vec::with_capacity(2);
        // below other.lo
        let below = Self {
            lo: self.lo,
            lo_closed: self.lo_closed,
            hi: Some(other.lo),
            hi_closed: !other.lo_closed,
        };
        if let Some(part) = below.intersect(self) {
            parts.push(part);
        }
        // above other.hi
        if let Some(h) = other.hi {
            let above = Self {
                lo: h,
                lo_closed: !other.hi_closed,
                hi: self.hi,
                hi_closed: self.hi_closed,
            };
            if let Some(part) = above.intersect(self) {
                parts.push(part);
            }
        }
        parts
    }

    /// Removes a single point, splitting the interval if needed.
    fn puncture(&self, p: S) -> Vec<Self> {
        let hole = Self {
            lo: p,
            hi: Some(p),
            lo_closed: true,
            hi_closed: true,
        };
        self.subtract(&hole)
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        match self.hi {
            Some(h) => {
                let close = if self.hi_closed { ']' } else { ')' };
                write!(f, "{open}{}, {h}{close}", self.lo)
            }
            None => write!(f, "{open}{}, inf)", self.lo),
        }
    }
}

/// Properties asserted about a set rather than computed from it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SetFlags {
    pub closed: bool,
    pub zero_compact: bool,
}

/// How interval grids are laid out by [`SetDescriptor::sample`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grid {
    /// `density` equally spaced points including closed endpoints.
    #[default]
    Uniform,
    /// Multiples of a power-of-two step, so every sample is a dyadic rational.
    Dyadic,
}

/// A finite union of intervals plus isolated points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetDescriptor<S> {
    pub intervals: Vec<Interval<S>>,
    pub points: Vec<S>,
    pub flags: SetFlags,
    pub grid: Grid,
}

impl<S: Scalar> Default for SetDescriptor<S> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<S: Scalar> SetDescriptor<S> {
    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
            points: Vec::new(),
            flags: SetFlags::default(),
            grid: Grid::Uniform,
        }
    }

    pub fn from_interval(interval: Interval<S>) -> Self {
        Self::empty().with_interval(interval)
    }

    /// `[lo, hi]`, declared closed.
    pub fn closed(lo: S, hi: S) -> Self {
        Self::from_interval(Interval::closed(lo, hi)).declare_closed()
    }

    pub fn from_points(points: impl IntoIterator<Item = S>) -> Self {
        let mut set = Self::empty();
        set.points.extend(points);
        set
    }

    pub fn with_interval(mut self, interval: Interval<S>) -> Self {
        if !interval.is_empty() {
            self.intervals.push(interval);
        }
        self
    }

    pub fn with_point(mut self, p: S) -> Self {
        self.points.push(p);
        self
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn declare_closed(mut self) -> Self {
        self.flags.closed = true;
        self
    }

    pub fn declare_zero_compact(mut self) -> Self {
        self.flags.zero_compact = true;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    /// Membership: intervals respect endpoint closedness exactly, isolated
    /// points match within the point-equality tolerance.
    pub fn contains(&self, x: S) -> bool {
        let tol = S::tol_eq();
        self.intervals.iter().any(|i| i.contains(x)) || self.points.iter().any(|&p| p.near(x, tol))
    }

    /// Distance from `x` to the closure of the set; `None` for the empty set.
    pub fn distance(&self, x: S) -> Option<S> {
        self.intervals
            .iter()
            .map(|i| i.distance(x))
            .chain(self.points.iter().map(|&p| p.dist(x)))
            .reduce(S::min_of)
    }

    /// Membership with `slack` of room around every boundary.
    pub fn contains_within(&self, x: S, slack: S) -> bool {
        self.contains(x) || self.distance(x).is_some_and(|d| d <= slack)
    }

    /// True if every point of `self` lies in `[0, ∞)`.
    pub fn is_nonnegative(&self) -> bool {
        self.intervals.iter().all(|i| i.lo >= S::zero())
            && self.points.iter().all(|&p| p >= S::zero())
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.intervals.extend(other.intervals.iter().copied());
        out.points.extend(other.points.iter().copied());
        out.flags.closed = self.flags.closed && other.flags.closed;
        out.flags.zero_compact = self.flags.zero_compact && other.flags.zero_compact;
        out
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Self::empty().with_grid(self.grid);
        for a in &self.intervals {
            for b in &other.intervals {
                if let Some(i) = a.intersect(b) {
                    out.intervals.push(i);
                }
            }
        }
        out.points
            .extend(self.points.iter().copied().filter(|&p| other.contains(p)));
        let extra: Vec<S> = other
            .points
            .iter()
            .copied()
            .filter(|&p| self.contains(p) && !out.points.contains(&p))
            .collect();
        out.points.extend(extra);
        out.flags.closed = self.flags.closed && other.flags.closed;
        out
    }

    /// Set difference `self \ other`.
    pub fn difference(&self, other: &Self) -> Self {
        let mut pieces = self.intervals.clone();
        for cut in &other.intervals {
            pieces = pieces.iter().flat_map(|i| i.subtract(cut)).collect();
        }
        for &p in &other.points {
            pieces = pieces.iter().flat_map(|i| i.puncture(p)).collect();
        }
        let mut out = Self::empty().with_grid(self.grid);
        out.intervals = pieces;
        out.points = self
            .points
            .iter()
            .copied()
            .filter(|&p| !other.contains(p))
            .collect();
        out
    }

    /// Deterministic grid over the set.
    ///
    /// Each interval contributes `density` points (at least two when it has
    /// positive length). Closed endpoints are always included; open
    /// endpoints are replaced by a point one `tol_eq` inside. Intervals with
    /// no upper bound are sampled over a window of width [`UNBOUNDED_SPAN`].
    /// Isolated points are appended and the result is sorted with
    /// near-duplicates removed.
    pub fn sample(&self, density: usize) -> Vec<S> {
        let tol = S::tol_eq();
        let mut out = Vec::new();
        for interval in &self.intervals {
            match self.grid {
                Grid::Uniform => sample_uniform(interval, density, tol, &mut out),
                Grid::Dyadic => sample_dyadic(interval, density, &mut out),
            }
        }
        out.extend(self.points.iter().copied());
        sort_dedup(&mut out, tol);
        out
    }
}

fn upper_for_sampling<S: Scalar>(interval: &Interval<S>) -> (S, bool) {
    match interval.hi {
        Some(h) => (h, interval.hi_closed),
        None => (interval.lo + S::from_i64(UNBOUNDED_SPAN).unwrap(), true),
    }
}

fn sample_uniform<S: Scalar>(interval: &Interval<S>, density: usize, tol: S, out: &mut Vec<S>) {
    let (hi, hi_closed) = upper_for_sampling(interval);
    let lo = interval.lo;
    if lo == hi {
        if interval.lo_closed && hi_closed {
            out.push(lo);
        }
        return;
    }
    let n = density.max(2) as i64;
    for k in 0..n {
        let x = if k == 0 {
            if interval.lo_closed {
                lo
            } else {
                lo + tol
            }
        } else if k == n - 1 {
            if hi_closed {
                hi
            } else {
                hi - tol
            }
        } else {
            lo + (hi - lo) * S::ratio(k, n - 1)
        };
        out.push(x);
    }
}

fn sample_dyadic<S: Scalar>(interval: &Interval<S>, density: usize, out: &mut Vec<S>) {
    let (hi, hi_closed) = upper_for_sampling(interval);
    let lo = interval.lo;
    if lo == hi {
        if interval.lo_closed && hi_closed {
            out.push(lo);
        }
        return;
    }
    let n = density.max(2) as i64;
    let target = (hi - lo) / S::from_i64(n - 1).unwrap();
    let two = S::from_i64(2).unwrap();
    let mut step = S::one();
    while step > target {
        step = step / two;
    }
    while step * two <= target {
        step = step * two;
    }
    for k in 0..n {
        let x = lo + step * S::from_i64(k).unwrap();
        if interval.contains(x) && (x < hi || hi_closed) {
            out.push(x);
        }
    }
    if hi_closed && interval.hi.is_some() {
        out.push(hi);
    }
}

/// Sorts ascending and drops points within `tol` of their predecessor.
pub(crate) fn sort_dedup<S: Scalar>(xs: &mut Vec<S>, tol: S) {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("sample points are ordered"));
    xs.dedup_by(|b, a| b.near(*a, tol));
}

/// Points of `a` that also occur in `b` (within `tol`).
pub fn sample_intersection<S: Scalar>(a: &[S], b: &[S], tol: S) -> Vec<S> {
    a.iter()
        .copied()
        .filter(|&x| b.iter().any(|&y| x.near(y, tol)))
        .collect()
}

impl<S: Scalar> fmt::Display for SetDescriptor<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        let mut parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        if !self.points.is_empty() {
            let pts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
            parts.push(format!("{{{}}}", pts.join(", ")));
        }
        write!(f, "{}", parts.join(" U "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn closed_unit_interval_grid() {
        let s = SetDescriptor::closed(0.0, 1.0);
        assert_eq!(s.sample(5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn half_open_excludes_upper_endpoint() {
        let s = SetDescriptor::from_interval(Interval::closed_open(0.0, 1.0));
        assert_eq!(s.sample(2), vec![0.0, 1.0 - 1e-9]);
        assert!(!s.contains(1.0));
        assert!(s.contains(1.0 - 1e-9));
    }

    #[test]
    fn interval_plus_isolated_point() {
        let b = SetDescriptor::closed(3.0, 4.0).with_point(1.5);
        assert_eq!(b.sample(3), vec![1.5, 3.0, 3.5, 4.0]);
        assert!(b.contains(1.5));
        assert!(!b.contains(2.0));
    }

    #[test]
    fn empty_set_samples_nothing() {
        assert!(SetDescriptor::<f64>::empty().sample(10).is_empty());
    }

    #[test]
    fn reversed_bounds_rejected() {
        assert!(Interval::new(1.0, Some(0.0), true, true).is_err());
    }

    #[test]
    fn dyadic_grid_is_exact() {
        let s = SetDescriptor::from_interval(Interval::at_least(Ratio::<i64>::from_integer(0)))
            .with_grid(Grid::Dyadic);
        let pts = s.sample(50);
        assert_eq!(pts.len(), 50);
        for p in pts {
            assert!((*p.denom() as u64).is_power_of_two(), "{p}");
        }
    }

    #[test]
    fn intersection_of_touching_intervals() {
        let a = SetDescriptor::closed(0.0, 0.5);
        let b = SetDescriptor::closed(0.5, 1.0);
        let i = a.intersect(&b);
        assert_eq!(i.sample(7), vec![0.5]);
        assert!(SetDescriptor::closed(0.0, 1.0)
            .intersect(&SetDescriptor::closed(3.0, 4.0).with_point(1.5))
            .is_empty());
    }

    #[test]
    fn difference_punctures_and_trims() {
        let b = SetDescriptor::closed(0.5, 1.0);
        let a = SetDescriptor::closed(0.0, 0.5);
        let d = b.difference(&a);
        assert!(!d.contains(0.5));
        assert!(d.contains(0.5 + 1e-6));
        assert!(d.contains(1.0));
        let d2 = SetDescriptor::closed(0.0, 1.0).difference(&SetDescriptor::from_points([0.5]));
        assert!(!d2.contains(0.5));
        assert!(d2.contains(0.0) && d2.contains(1.0));
    }

    #[test]
    fn boundary_slack() {
        let a = SetDescriptor::closed(0.0, 0.5);
        assert!(a.contains_within(0.5 + 1e-10, 1e-9));
        assert!(!a.contains_within(0.6, 1e-9));
    }
}
