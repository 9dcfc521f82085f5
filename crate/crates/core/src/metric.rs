//! Partial metrics on real domains.
//!
//! A partial metric `p` may assign a positive self-distance `p(x, x)`. It
//! must satisfy, for all `x, y, z`:
//!
//! * P1 `p(x, y) = p(y, x)`
//! * P2 `p(x, x) = p(x, y) = p(y, y)` implies `x = y`
//! * P3 `p(x, x) <= p(x, y)`
//! * P4 `p(x, z) + p(y, y) <= p(x, y) + p(y, z)`
//!
//! Every partial metric induces an ordinary metric
//! `p^s(x, y) = 2 p(x, y) - p(x, x) - p(y, y)`.
//!
//! Axioms and sequence properties are checked on finite samples and finite
//! prefixes only: a passing report means no counterexample was found.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::SetDescriptor;

/// Linear combination `c + a x + b y + k |x - y| + m max{x, y}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PairExpr<S> {
    pub constant: S,
    pub x: S,
    pub y: S,
    pub abs_diff: S,
    pub max: S,
}

impl<S: Scalar> PairExpr<S> {
    pub fn zero() -> Self {
        Self {
            constant: S::zero(),
            x: S::zero(),
            y: S::zero(),
            abs_diff: S::zero(),
            max: S::zero(),
        }
    }

    pub fn abs_diff() -> Self {
        Self {
            abs_diff: S::one(),
            ..Self::zero()
        }
    }

    pub fn max() -> Self {
        Self {
            max: S::one(),
            ..Self::zero()
        }
    }

    pub fn eval(&self, x: S, y: S) -> S {
        self.constant + self.x * x + self.y * y + self.abs_diff * x.dist(y) + self.max * x.max_of(y)
    }

    pub fn plus(self, o: Self) -> Self {
        Self {
            constant: self.constant + o.constant,
            x: self.x + o.x,
            y: self.y + o.y,
            abs_diff: self.abs_diff + o.abs_diff,
            max: self.max + o.max,
        }
    }

    pub fn scale(self, k: S) -> Self {
        Self {
            constant: self.constant * k,
            x: self.x * k,
            y: self.y * k,
            abs_diff: self.abs_diff * k,
            max: self.max * k,
        }
    }
}

impl<S: Scalar> fmt::Display for PairExpr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (self.x, "x"),
            (self.y, "y"),
            (self.abs_diff, "|x-y|"),
            (self.max, "max(x,y)"),
        ];
        let mut parts: Vec<String> = terms
            .iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, name)| {
                if c.is_one() {
                    name.to_string()
                } else {
                    format!("{c}*{name}")
                }
            })
            .collect();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A piece of a custom rule: applies when both points lie in `guard`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairPiece<S> {
    pub guard: SetDescriptor<S>,
    pub expr: PairExpr<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricRule<S> {
    /// `max{x, y}`
    Max,
    /// `|x - y|`
    Abs,
    /// `|x - y|` when both points lie in `[0, 1)`, `max{x, y}` otherwise.
    HybridUnit,
    CustomPiecewise {
        pieces: Vec<PairPiece<S>>,
        otherwise: PairExpr<S>,
    },
}

impl<S: Scalar> MetricRule<S> {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Max => "max",
            Self::Abs => "abs",
            Self::HybridUnit => "hybrid-unit",
            Self::CustomPiecewise { .. } => "custom-piecewise",
        }
    }

    fn eval(&self, x: S, y: S) -> S {
        match self {
            Self::Max => x.max_of(y),
            Self::Abs => x.dist(y),
            Self::HybridUnit => {
                let unit = |v: S| v >= S::zero() && v < S::one();
                if unit(x) && unit(y) {
                    x.dist(y)
                } else {
                    x.max_of(y)
                }
            }
            Self::CustomPiecewise { pieces, otherwise } => pieces
                .iter()
                .find(|p| p.guard.contains(x) && p.guard.contains(y))
                .map_or(otherwise, |p| &p.expr)
                .eval(x, y),
        }
    }
}

/// A named partial metric on a real domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialMetric<S> {
    pub name: String,
    pub domain: SetDescriptor<S>,
    pub rule: MetricRule<S>,
}

impl<S: Scalar> PartialMetric<S> {
    pub fn new(name: impl Into<String>, domain: SetDescriptor<S>, rule: MetricRule<S>) -> Self {
        Self {
            name: name.into(),
            domain,
            rule,
        }
    }

    fn check_member(&self, coordinate: &'static str, v: S) -> Result<()> {
        if self.domain.contains(v) {
            Ok(())
        } else {
            Err(Error::Domain {
                space: self.name.clone(),
                coordinate,
                value: v.to_string(),
            })
        }
    }

    /// `p(x, y)`.
    pub fn eval(&self, x: S, y: S) -> Result<S> {
        self.check_member("x", x)?;
        self.check_member("y", y)?;
        let v = self.rule.eval(x, y);
        if v < S::zero() {
            return Err(Error::NegativeDistance {
                x: x.to_string(),
                y: y.to_string(),
                value: v.to_string(),
            });
        }
        Ok(v)
    }

    /// `p^s(x, y) = 2 p(x, y) - p(x, x) - p(y, y)`.
    pub fn induced(&self, x: S, y: S) -> Result<S> {
        let two = S::one() + S::one();
        Ok(two * self.eval(x, y)? - self.eval(x, x)? - self.eval(y, y)?)
    }

    /// Open ball membership: `p(center, y) < p(center, center) + eps`.
    pub fn ball_contains(&self, center: S, eps: S, y: S) -> Result<bool> {
        if eps <= S::zero() {
            return Err(Error::Argument(format!(
                "ball radius must be positive, got {eps}"
            )));
        }
        Ok(self.eval(center, y)? < self.eval(center, center)? + eps)
    }

    /// Exhaustive check of P1..P4 over `sample` (pairs for P1..P3, ordered
    /// triples for P4). Distances are compared with slack `tol`; P2's
    /// conclusion `x = y` uses the point-equality tolerance.
    pub fn check_axioms(&self, sample: &[S], tol: S) -> Result<AxiomReport<S>> {
        if sample.is_empty() {
            return Err(Error::Argument(
                "axiom check needs a nonempty sample".into(),
            ));
        }
        let n = sample.len();
        let mut table = Vec::with_capacity(n * n);
        for &x in sample {
            for &y in sample {
                table.push(self.eval(x, y)?);
            }
        }
        let p = |i: usize, j: usize| table[i * n + j];
        let tol_eq = S::tol_eq();
        let mut violations = Vec::new();

        for i in 0..n {
            for j in 0..n {
                let (x, y) = (sample[i], sample[j]);
                if i < j {
                    if p(i, j).dist(p(j, i)) > tol {
                        violations.push(Violation::new(Axiom::P1, vec![x, y], p(i, j), p(j, i)));
                    }
                    let all_equal = p(i, i).near(p(i, j), tol) && p(j, j).near(p(i, j), tol);
                    if all_equal && !x.near(y, tol_eq) {
                        violations.push(Violation::new(
                            Axiom::P2,
                            vec![x, y],
                            x.dist(y),
                            S::zero(),
                        ));
                    }
                }
                if i != j && p(i, i) > p(i, j) + tol {
                    violations.push(Violation::new(Axiom::P3, vec![x, y], p(i, i), p(i, j)));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = p(i, k) + p(j, j);
                    let rhs = p(i, j) + p(j, k);
                    if lhs > rhs + tol {
                        violations.push(Violation::new(
                            Axiom::P4,
                            vec![sample[i], sample[j], sample[k]],
                            lhs,
                            rhs,
                        ));
                    }
                }
            }
        }
        Ok(AxiomReport {
            passed: violations.is_empty(),
            violations,
        })
    }

    /// Convergence of a prefix to `limit` in the partial-metric sense:
    /// `p(limit, x_n) -> p(limit, limit)`. The residual is the mean of
    /// `|p(limit, limit) - p(limit, x_n)|` over the tail window.
    pub fn check_convergence(&self, prefix: &[S], limit: S, tol: S) -> Result<SequenceVerdict<S>> {
        self.check_convergence_with(prefix, limit, tol, Window::default())
    }

    pub fn check_convergence_with(
        &self,
        prefix: &[S],
        limit: S,
        tol: S,
        window: Window,
    ) -> Result<SequenceVerdict<S>> {
        if prefix.len() < 2 {
            return Err(Error::Argument(format!(
                "convergence check needs at least 2 terms, got {}",
                prefix.len()
            )));
        }
        let target = self.eval(limit, limit)?;
        let tail = window.tail(prefix);
        let mut total = S::zero();
        for &x in tail {
            total = total + target.dist(self.eval(limit, x)?);
        }
        let residual = total / S::from_usize(tail.len()).expect("window length");
        Ok(SequenceVerdict::new(
            SequenceKind::Converges,
            residual,
            tol,
            prefix.len(),
        ))
    }

    /// Cauchy verdicts under `p` and under `p^s` over all pairs of the tail
    /// window, plus the 0-Cauchy verdict (`p(x_m, x_n) -> 0`).
    ///
    /// The `p` residual is the half-spread of the pair values, i.e. the
    /// deviation from the best constant limit.
    pub fn check_cauchy_dual(&self, prefix: &[S], tol: S) -> Result<CauchyVerdicts<S>> {
        self.check_cauchy_dual_with(prefix, tol, Window::default())
    }

    pub fn check_cauchy_dual_with(
        &self,
        prefix: &[S],
        tol: S,
        window: Window,
    ) -> Result<CauchyVerdicts<S>> {
        if prefix.len() < 4 {
            return Err(Error::Argument(format!(
                "Cauchy check needs at least 4 terms, got {}",
                prefix.len()
            )));
        }
        let tail = window.tail(prefix);
        let tail = if tail.len() < 2 {
            &prefix[prefix.len() - 2..]
        } else {
            tail
        };
        let mut lo: Option<S> = None;
        let mut hi: Option<S> = None;
        let mut ps_max = S::zero();
        for (m, &xm) in tail.iter().enumerate() {
            for &xn in &tail[m..] {
                let v = self.eval(xm, xn)?;
                lo = Some(lo.map_or(v, |l| l.min_of(v)));
                hi = Some(hi.map_or(v, |h| h.max_of(v)));
                ps_max = ps_max.max_of(self.induced(xm, xn)?);
            }
        }
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        let two = S::one() + S::one();
        let len = prefix.len();
        Ok(CauchyVerdicts {
            p: SequenceVerdict::new(SequenceKind::Cauchy, (hi - lo) / two, tol, len),
            zero: SequenceVerdict::new(SequenceKind::ZeroCauchy, hi, tol, len),
            ps: SequenceVerdict::new(SequenceKind::Cauchy, ps_max, tol, len),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    P1,
    P2,
    P3,
    P4,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<S> {
    pub axiom: Axiom,
    pub witness: Vec<S>,
    pub lhs: S,
    pub rhs: S,
}

impl<S> Violation<S> {
    fn new(axiom: Axiom, witness: Vec<S>, lhs: S, rhs: S) -> Self {
        Self {
            axiom,
            witness,
            lhs,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport<S> {
    pub passed: bool,
    pub violations: Vec<Violation<S>>,
}

impl<S: Scalar> AxiomReport<S> {
    pub fn first(&self, axiom: Axiom) -> Option<&Violation<S>> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

/// Which part of a prefix a sequence predicate inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// The last `num/den` of the prefix, rounded up.
    Fraction {
        num: usize,
        den: usize,
    },
    Last(usize),
}

impl Default for Window {
    fn default() -> Self {
        Self::Fraction { num: 1, den: 4 }
    }
}

impl Window {
    pub fn size(&self, len: usize) -> usize {
        let n = match *self {
            Self::Fraction { num, den } => (len * num).div_ceil(den),
            Self::Last(n) => n,
        };
        n.clamp(1, len.max(1))
    }

    pub fn tail<'a, T>(&self, xs: &'a [T]) -> &'a [T] {
        &xs[xs.len() - self.size(xs.len())..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    Converges,
    Cauchy,
    ZeroCauchy,
}

/// Result of a sequence predicate on a finite prefix. `holds` means the
/// prefix is consistent with the property, not that it is proved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceVerdict<S> {
    pub kind: SequenceKind,
    pub holds: bool,
    pub residual: S,
    pub prefix_length: usize,
}

impl<S: Scalar> SequenceVerdict<S> {
    fn new(kind: SequenceKind, residual: S, tol: S, prefix_length: usize) -> Self {
        Self {
            kind,
            holds: residual <= tol,
            residual,
            prefix_length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CauchyVerdicts<S> {
    /// Cauchy under `p` (pair values approach some limit).
    pub p: SequenceVerdict<S>,
    /// 0-Cauchy under `p` (pair values approach zero).
    pub zero: SequenceVerdict<S>,
    /// Cauchy under the induced metric.
    pub ps: SequenceVerdict<S>,
}

impl<S> CauchyVerdicts<S> {
    pub fn agree(&self) -> bool {
        self.p.holds == self.ps.holds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Interval, SetDescriptor};
    use crate::Exact;

    fn max_space() -> PartialMetric<f64> {
        PartialMetric::new(
            "max",
            SetDescriptor::from_interval(Interval::at_least(0.0)),
            MetricRule::Max,
        )
    }

    fn hybrid() -> PartialMetric<f64> {
        PartialMetric::new(
            "hybrid-unit",
            SetDescriptor::closed(0.0, 1.0),
            MetricRule::HybridUnit,
        )
    }

    #[test]
    fn eval_examples() {
        assert_eq!(max_space().eval(2.0, 5.0).unwrap(), 5.0);
        assert_eq!(max_space().eval(0.3, 0.3).unwrap(), 0.3);
        assert_eq!(hybrid().eval(0.5, 1.0).unwrap(), 1.0);
        assert!((hybrid().eval(0.9, 0.95).unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let err = hybrid().eval(0.5, 1.5).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Domain {
                    coordinate: "y",
                    ..
                }
            ),
            "{err}"
        );
        let err = max_space().eval(-1.0, 0.0).unwrap_err();
        assert!(matches!(
            err,
            Error::Domain {
                coordinate: "x",
                ..
            }
        ));
    }

    #[test]
    fn induced_examples() {
        assert_eq!(max_space().induced(2.0, 5.0).unwrap(), 3.0);
        assert_eq!(max_space().induced(0.7, 0.7).unwrap(), 0.0);
        assert!((hybrid().induced(0.2, 0.7).unwrap() - 1.0).abs() < 1e-12);
        let exact = PartialMetric::new(
            "hybrid-unit",
            SetDescriptor::closed(Exact::from_integer(0), Exact::from_integer(1)),
            MetricRule::HybridUnit,
        );
        assert_eq!(
            exact.induced(Exact::new(1, 5), Exact::new(7, 10)).unwrap(),
            Exact::from_integer(1)
        );
    }

    #[test]
    fn ball_examples() {
        let m = max_space();
        assert!(m.ball_contains(2.0, 1.0, 2.5).unwrap());
        assert!(!m.ball_contains(2.0, 1.0, 3.5).unwrap());
        assert!(!m.ball_contains(2.0, 1.0, 3.0).unwrap());
        assert!(hybrid().ball_contains(0.5, 0.2, 0.6).unwrap());
        assert!(matches!(
            m.ball_contains(2.0, 0.0, 2.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn axioms_hold_for_max() {
        let grid = SetDescriptor::closed(0.0, 1.0).sample(50);
        let report = max_space().check_axioms(&grid, 1e-12).unwrap();
        assert!(report.passed, "{:?}", report.violations.first());
        assert!(max_space().check_axioms(&[0.0], 1e-12).unwrap().passed);
    }

    #[test]
    fn sum_rule_breaks_small_self_distances() {
        let q = PartialMetric::new(
            "sum",
            SetDescriptor::closed(0.0, 1.0),
            MetricRule::CustomPiecewise {
                pieces: vec![],
                otherwise: PairExpr {
                    x: 1.0,
                    y: 1.0,
                    ..PairExpr::zero()
                },
            },
        );
        let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let report = q.check_axioms(&grid, 1e-12).unwrap();
        assert!(!report.passed);
        assert!(report.violations.iter().all(|v| v.axiom == Axiom::P3));
        // every ordered pair with x > y fails
        assert_eq!(report.violations.len(), 45);
        let w = report
            .violations
            .iter()
            .find(|v| v.witness == vec![1.0, 0.1])
            .expect("witness (1.0, 0.1)");
        assert_eq!(w.lhs, 2.0);
        assert!((w.rhs - 1.1).abs() < 1e-15);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(matches!(
            max_space().check_axioms(&[], 1e-12),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn p2_contrapositive_catches_collapsed_points() {
        let zero = PartialMetric::new(
            "zero",
            SetDescriptor::closed(0.0, 1.0),
            MetricRule::CustomPiecewise {
                pieces: vec![],
                otherwise: PairExpr::zero(),
            },
        );
        let report = zero.check_axioms(&[0.0, 1.0], 1e-12).unwrap();
        let v = report.first(Axiom::P2).unwrap();
        assert_eq!(v.witness, vec![0.0, 1.0]);
    }

    #[test]
    fn convergence_examples() {
        let prefix: Vec<f64> = (1..=200).map(|n| 0.5 + 1.0 / (n as f64 + 2.0)).collect();
        let v = hybrid().check_convergence(&prefix, 0.5, 1e-2).unwrap();
        assert!(v.holds, "{v:?}");

        let v = max_space()
            .check_convergence(&[0.7; 10], 0.7, 1e-12)
            .unwrap();
        assert!(v.holds);
        assert_eq!(v.residual, 0.0);

        let orbit: Vec<f64> = (0..100)
            .map(|n| if n % 2 == 0 { 1.5 } else { 0.5 })
            .collect();
        let v = max_space().check_convergence(&orbit, 0.5, 1e-2).unwrap();
        assert!(!v.holds);
        // 25-term window: 12 terms at 3/2 (defect 1), 13 at the limit
        assert_eq!(v.residual, 0.48);

        assert!(matches!(
            max_space().check_convergence(&[1.0], 1.0, 1.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn cauchy_examples() {
        let prefix: Vec<f64> = (1..=500).map(|n| 1.0 / n as f64).collect();
        let v = max_space().check_cauchy_dual(&prefix, 1e-2).unwrap();
        assert!(v.p.holds && v.ps.holds && v.zero.holds);

        let v = max_space().check_cauchy_dual(&[0.3; 8], 1e-12).unwrap();
        assert!(v.p.holds && v.ps.holds);
        assert!(!v.zero.holds);

        let orbit: Vec<f64> = (0..100)
            .map(|n| if n % 2 == 0 { 1.5 } else { 0.5 })
            .collect();
        let v = max_space().check_cauchy_dual(&orbit, 1e-2).unwrap();
        assert!(!v.p.holds && !v.ps.holds);
        assert!(v.agree());

        assert!(max_space()
            .check_cauchy_dual(&[1.0, 0.5, 0.25], 1e-2)
            .is_err());
    }

    #[test]
    fn window_sizes() {
        assert_eq!(Window::default().size(200), 50);
        assert_eq!(Window::default().size(5), 2);
        assert_eq!(Window::Last(10).size(3), 3);
    }
}
