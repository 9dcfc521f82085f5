//! Contraction-type hypotheses checked on sampled sets.
//!
//! Each verifier scans a deterministic grid and returns a [`Certificate`]
//! holding the worst case found. A passing certificate means no violation
//! at the recorded density. Worst-case ties are broken by lexicographic
//! order of the witness points, so results do not depend on scan order.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::PartialMetric;
use crate::scalar::{lex_less, Scalar};
use crate::spaces::{sample_intersection, sort_dedup, PiecewiseMap, SetDescriptor};

/// Ordered sets `A_1, ..., A_k` with `A_{k+1} = A_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclicDecomposition<S> {
    pub sets: Vec<SetDescriptor<S>>,
}

impl<S: Scalar> CyclicDecomposition<S> {
    pub fn new(sets: Vec<SetDescriptor<S>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Argument(
                "a cyclic decomposition needs at least one set".into(),
            ));
        }
        if let Some(i) = sets.iter().position(|s| s.is_empty()) {
            return Err(Error::Argument(format!(
                "decomposition set A_{} is empty",
                i + 1
            )));
        }
        Ok(Self { sets })
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    /// `A_{i+1}` with wrap-around (zero-based `i`).
    pub fn next(&self, i: usize) -> &SetDescriptor<S> {
        &self.sets[(i + 1) % self.sets.len()]
    }

    pub fn union(&self) -> SetDescriptor<S> {
        self.sets[1..]
            .iter()
            .fold(self.sets[0].clone(), |acc, s| acc.union(s))
    }

    /// Sample of every set, in order.
    pub fn samples(&self, density: usize) -> Vec<Vec<S>> {
        self.sets.iter().map(|s| s.sample(density)).collect()
    }

    /// Sample of the union of all sets.
    pub fn union_sample(&self, density: usize) -> Vec<S> {
        let mut all: Vec<S> = self.samples(density).into_iter().flatten().collect();
        sort_dedup(&mut all, S::tol_eq());
        all
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `T(A_i) ⊆ A_{i+1}`
    C1,
    /// `p(Tx, Ty) <= α p(x, y)` across consecutive sets.
    C2,
    /// `p(Tx, Ty) <= max{α p(x, y), p(x, x), p(y, y)}` across two sets.
    PC2,
    /// `p(Tx, T²x) <= α p(x, Tx)`
    #[serde(rename = "ORBITAL")]
    Orbital,
    /// `p(Tx, Ty) < p(x, y)` across consecutive sets.
    #[serde(rename = "STRICT")]
    Strict,
    /// PC2 with both sets equal to the whole domain.
    #[serde(rename = "RAKO-PC2")]
    RakoPc2,
    /// `p(f(x), g(y)) <= α p(x, y)` for a glued pair.
    #[serde(rename = "PAIR")]
    Pair,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::C1 => "C1",
            Self::C2 => "C2",
            Self::PC2 => "PC2",
            Self::Orbital => "ORBITAL",
            Self::Strict => "STRICT",
            Self::RakoPc2 => "RAKO-PC2",
            Self::Pair => "PAIR",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness<S> {
    pub points: Vec<S>,
    pub lhs: S,
    pub rhs: S,
}

/// Outcome of a sampled verification.
///
/// `margin` is `rhs - lhs` at the worst case, or `None` when no case was
/// checked (the condition then holds vacuously).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate<S> {
    pub condition: Condition,
    pub holds: bool,
    pub alpha_used: Option<S>,
    pub witness: Option<Witness<S>>,
    pub margin: Option<S>,
    pub density: Option<usize>,
    pub checked: usize,
    pub skipped: usize,
}

impl<S: Scalar> Certificate<S> {
    /// One-line `key=value` record.
    pub fn to_record(&self) -> String {
        let opt = |v: Option<S>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
        let (points, lhs, rhs) = match &self.witness {
            Some(w) => {
                let pts: Vec<String> = w.points.iter().map(|p| p.to_string()).collect();
                (pts.join(","), w.lhs.to_string(), w.rhs.to_string())
            }
            None => ("none".into(), "none".into(), "none".into()),
        };
        format!(
            "condition={} holds={} alpha={} witness={} lhs={} rhs={} margin={} density={} checked={} skipped={}",
            self.condition,
            self.holds,
            opt(self.alpha_used),
            points,
            lhs,
            rhs,
            opt(self.margin),
            self.density.map_or_else(|| "none".to_string(), |d| d.to_string()),
            self.checked,
            self.skipped,
        )
    }
}

/// Tracks the smallest `rhs - lhs` seen, ties broken lexicographically.
struct Worst<S> {
    margin: Option<S>,
    witness: Option<Witness<S>>,
    checked: usize,
    skipped: usize,
}

impl<S: Scalar> Worst<S> {
    fn new() -> Self {
        Self {
            margin: None,
            witness: None,
            checked: 0,
            skipped: 0,
        }
    }

    fn observe(&mut self, points: &[S], lhs: S, rhs: S) {
        self.checked += 1;
        let margin = rhs - lhs;
        let replace = match (self.margin, &self.witness) {
            (Some(m), Some(w)) => margin < m || (margin == m && lex_less(points, &w.points)),
            _ => true,
        };
        if replace {
            self.margin = Some(margin);
            self.witness = Some(Witness {
                points: points.to_vec(),
                lhs,
                rhs,
            });
        }
    }

    /// Non-strict conditions accept a margin down to `-tol_eq` so that
    /// rounding in `α p(x, y)` does not flip a boundary case.
    fn finish(
        self,
        condition: Condition,
        alpha: Option<S>,
        density: Option<usize>,
        strict: bool,
    ) -> Certificate<S> {
        let holds = match self.margin {
            None => true,
            Some(m) if strict => m > S::zero(),
            Some(m) => m >= -S::tol_eq(),
        };
        Certificate {
            condition,
            holds,
            alpha_used: alpha,
            witness: self.witness,
            margin: self.margin,
            density,
            checked: self.checked,
            skipped: self.skipped,
        }
    }
}

fn check_alpha<S: Scalar>(alpha: S) -> Result<()> {
    if alpha > S::zero() && alpha < S::one() {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

/// Applies `t` to every sample point after checking that exactly one piece
/// matches each of them.
fn images<S: Scalar>(t: &PiecewiseMap<S>, xs: &[S]) -> Result<Vec<S>> {
    t.check_total(xs)?;
    xs.iter().map(|&x| t.apply(x)).collect()
}

/// C1: every sampled `x ∈ A_i` maps into `A_{i+1}`. Images within `tol_eq`
/// of the target set count as inside; the witness is the first failure and
/// the margin is minus the largest distance to the target.
pub fn verify_inclusions<S: Scalar>(
    t: &PiecewiseMap<S>,
    decomp: &CyclicDecomposition<S>,
    density: usize,
) -> Result<Certificate<S>> {
    let tol = S::tol_eq();
    let mut margin = S::zero();
    let mut witness = None;
    let mut checked = 0;
    for (i, xs) in decomp.samples(density).iter().enumerate() {
        let target = decomp.next(i);
        for (&x, tx) in xs.iter().zip(images(t, xs)?) {
            checked += 1;
            if target.contains_within(tx, tol) {
                continue;
            }
            let d = target.distance(tx).unwrap_or(S::zero());
            margin = margin.min_of(-d);
            if witness.is_none() {
                witness = Some(Witness {
                    points: vec![x, tx],
                    lhs: d,
                    rhs: S::zero(),
                });
            }
        }
    }
    Ok(Certificate {
        condition: Condition::C1,
        holds: witness.is_none(),
        alpha_used: None,
        witness,
        margin: Some(margin),
        density: Some(density),
        checked,
        skipped: 0,
    })
}

/// Best contraction constant over sampled pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum AlphaHat<S> {
    Finite(S),
    /// Some pair has `p(x, y) ≈ 0` but `p(Tx, Ty) > 0`.
    Infinite,
}

impl<S: Scalar> AlphaHat<S> {
    pub fn finite(&self) -> Option<S> {
        match *self {
            Self::Finite(a) => Some(a),
            Self::Infinite => None,
        }
    }

    /// True if some `α < 1` works on the sample.
    pub fn is_contraction(&self) -> bool {
        self.finite().is_some_and(|a| a < S::one())
    }
}

impl<S: Scalar> fmt::Display for AlphaHat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(a) => write!(f, "{a}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaEstimate<S> {
    pub alpha_hat: AlphaHat<S>,
    /// The pair attaining the supremum.
    pub witness: Option<(S, S)>,
    pub pairs: usize,
    pub skipped: usize,
}

struct RatioScan<S> {
    best: Option<(S, (S, S))>,
    infinite: Option<(S, S)>,
    pairs: usize,
    skipped: usize,
}

impl<S: Scalar> RatioScan<S> {
    fn new() -> Self {
        Self {
            best: None,
            infinite: None,
            pairs: 0,
            skipped: 0,
        }
    }

    fn observe(&mut self, x: S, y: S, num: S, den: S) {
        let tol = S::tol_eq();
        if den <= tol {
            if num > tol {
                if self.infinite.is_none_or(|w| lex_less(&[x, y], &[w.0, w.1])) {
                    self.infinite = Some((x, y));
                }
            } else {
                self.skipped += 1;
            }
            return;
        }
        self.pairs += 1;
        let r = num / den;
        let replace = match self.best {
            None => true,
            Some((b, w)) => r > b || (r == b && lex_less(&[x, y], &[w.0, w.1])),
        };
        if replace {
            self.best = Some((r, (x, y)));
        }
    }

    fn finish(self) -> AlphaEstimate<S> {
        let (alpha_hat, witness) = match (self.infinite, self.best) {
            (Some(w), _) => (AlphaHat::Infinite, Some(w)),
            (None, Some((r, w))) => (AlphaHat::Finite(r), Some(w)),
            (None, None) => (AlphaHat::Finite(S::zero()), None),
        };
        AlphaEstimate {
            alpha_hat,
            witness,
            pairs: self.pairs,
            skipped: self.skipped,
        }
    }
}

/// Supremum of `p(Tx, Ty) / p(x, y)` over sampled `x ∈ a`, `y ∈ b`.
///
/// Pairs with `p(x, y) <= tol_eq` are skipped unless `p(Tx, Ty) > tol_eq`,
/// which makes the estimate infinite.
pub fn estimate_alpha<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    a: &SetDescriptor<S>,
    b: &SetDescriptor<S>,
    density: usize,
) -> Result<AlphaEstimate<S>> {
    let mut scan = RatioScan::new();
    scan_ratio(space, t, &a.sample(density), &b.sample(density), &mut scan)?;
    Ok(scan.finish())
}

/// [`estimate_alpha`] over every consecutive pair `(A_i, A_{i+1})`.
pub fn estimate_alpha_cyclic<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    decomp: &CyclicDecomposition<S>,
    density: usize,
) -> Result<AlphaEstimate<S>> {
    let samples = decomp.samples(density);
    let mut scan = RatioScan::new();
    for i in 0..decomp.k() {
        scan_ratio(
            space,
            t,
            &samples[i],
            &samples[(i + 1) % decomp.k()],
            &mut scan,
        )?;
    }
    Ok(scan.finish())
}

fn scan_ratio<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    xs: &[S],
    ys: &[S],
    scan: &mut RatioScan<S>,
) -> Result<()> {
    let (txs, tys) = (images(t, xs)?, images(t, ys)?);
    for (&x, &tx) in xs.iter().zip(&txs) {
        for (&y, &ty) in ys.iter().zip(&tys) {
            scan.observe(x, y, space.eval(tx, ty)?, space.eval(x, y)?);
        }
    }
    Ok(())
}

/// C2 at a given `α`: `p(Tx, Ty) <= α p(x, y)` for sampled `x ∈ A_i`,
/// `y ∈ A_{i+1}`.
pub fn verify_c2<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    decomp: &CyclicDecomposition<S>,
    alpha: S,
    density: usize,
) -> Result<Certificate<S>> {
    check_alpha(alpha)?;
    let samples = decomp.samples(density);
    let mut worst = Worst::new();
    for i in 0..decomp.k() {
        let (xs, ys) = (&samples[i], &samples[(i + 1) % decomp.k()]);
        let (txs, tys) = (images(t, xs)?, images(t, ys)?);
        for (&x, &tx) in xs.iter().zip(&txs) {
            for (&y, &ty) in ys.iter().zip(&tys) {
                worst.observe(&[x, y], space.eval(tx, ty)?, alpha * space.eval(x, y)?);
            }
        }
    }
    Ok(worst.finish(Condition::C2, Some(alpha), Some(density), false))
}

fn scan_partial<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    xs: &[S],
    ys: &[S],
    alpha: S,
    worst: &mut Worst<S>,
) -> Result<()> {
    let (txs, tys) = (images(t, xs)?, images(t, ys)?);
    for (&x, &tx) in xs.iter().zip(&txs) {
        for (&y, &ty) in ys.iter().zip(&tys) {
            let rhs = (alpha * space.eval(x, y)?)
                .max_of(space.eval(x, x)?)
                .max_of(space.eval(y, y)?);
            worst.observe(&[x, y], space.eval(tx, ty)?, rhs);
        }
    }
    Ok(())
}

/// PC2: `p(Tx, Ty) <= max{α p(x, y), p(x, x), p(y, y)}` for sampled
/// `x ∈ a`, `y ∈ b`.
pub fn verify_partial_cyclic<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    a: &SetDescriptor<S>,
    b: &SetDescriptor<S>,
    alpha: S,
    density: usize,
) -> Result<Certificate<S>> {
    check_alpha(alpha)?;
    let mut worst = Worst::new();
    scan_partial(
        space,
        t,
        &a.sample(density),
        &b.sample(density),
        alpha,
        &mut worst,
    )?;
    Ok(worst.finish(Condition::PC2, Some(alpha), Some(density), false))
}

/// The PC2 inequality over the whole domain (both sets equal to `X`).
pub fn verify_partial_contraction<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    alpha: S,
    density: usize,
) -> Result<Certificate<S>> {
    check_alpha(alpha)?;
    let xs = space.domain.sample(density);
    let mut worst = Worst::new();
    scan_partial(space, t, &xs, &xs, alpha, &mut worst)?;
    Ok(worst.finish(Condition::RakoPc2, Some(alpha), Some(density), false))
}

/// Orbital condition `p(Tx, T²x) <= α p(x, Tx)` at each sampled `x`.
pub fn verify_orbital<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    sample: &[S],
    alpha: S,
) -> Result<Certificate<S>> {
    check_alpha(alpha)?;
    let step = |x: S| -> Result<S> {
        let tx = t.apply(x)?;
        if space.domain.contains(tx) {
            Ok(tx)
        } else {
            Err(Error::MapUndefined(format!(
                "{x} (image {tx} is outside the domain)"
            )))
        }
    };
    let mut worst = Worst::new();
    for &x in sample {
        let tx = step(x)?;
        let ttx = step(tx)?;
        worst.observe(&[x], space.eval(tx, ttx)?, alpha * space.eval(x, tx)?);
    }
    Ok(worst.finish(Condition::Orbital, Some(alpha), None, false))
}

/// Strict contraction `p(Tx, Ty) < p(x, y)` across consecutive sets.
/// Pairs with `p(x, y) <= tol_eq` cannot satisfy a strict inequality and
/// are skipped (counted in `skipped`).
pub fn verify_strict<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    decomp: &CyclicDecomposition<S>,
    density: usize,
) -> Result<Certificate<S>> {
    let samples = decomp.samples(density);
    let tol = S::tol_eq();
    let mut worst = Worst::new();
    for i in 0..decomp.k() {
        let (xs, ys) = (&samples[i], &samples[(i + 1) % decomp.k()]);
        let (txs, tys) = (images(t, xs)?, images(t, ys)?);
        for (&x, &tx) in xs.iter().zip(&txs) {
            for (&y, &ty) in ys.iter().zip(&tys) {
                let rhs = space.eval(x, y)?;
                if rhs <= tol {
                    worst.skipped += 1;
                    continue;
                }
                worst.observe(&[x, y], space.eval(tx, ty)?, rhs);
            }
        }
    }
    Ok(worst.finish(Condition::Strict, None, Some(density), true))
}

/// Glues `f` on `a` and `g` on `b` into one map of `a ∪ b`, after checking
/// that they agree on the sampled intersection.
///
/// The result uses `f` on `a` and `g` on `b \ a`.
pub fn glue_pair<S: Scalar>(
    f: &PiecewiseMap<S>,
    g: &PiecewiseMap<S>,
    a: &SetDescriptor<S>,
    b: &SetDescriptor<S>,
    density: usize,
) -> Result<PiecewiseMap<S>> {
    let tol = S::tol_eq();
    let (xa, xb) = (a.sample(density), b.sample(density));
    f.check_total(&xa)?;
    g.check_total(&xb)?;
    let mut shared = sample_intersection(&xa, &xb, tol);
    shared.extend(a.intersect(b).sample(density));
    sort_dedup(&mut shared, tol);
    for x in shared {
        let (fx, gx) = (f.apply(x)?, g.apply(x)?);
        if !fx.near(gx, tol) {
            return Err(Error::Gluing {
                point: x.to_string(),
                f: fx.to_string(),
                g: gx.to_string(),
            });
        }
    }
    let mut glued = f.restrict(a);
    glued.pieces.extend(g.restrict(&b.difference(a)).pieces);
    Ok(glued)
}

/// `p(f(x), g(y)) <= α p(x, y)` for sampled `x ∈ a`, `y ∈ b`.
pub fn verify_pair<S: Scalar>(
    space: &PartialMetric<S>,
    f: &PiecewiseMap<S>,
    g: &PiecewiseMap<S>,
    a: &SetDescriptor<S>,
    b: &SetDescriptor<S>,
    alpha: S,
    density: usize,
) -> Result<Certificate<S>> {
    check_alpha(alpha)?;
    let (xs, ys) = (a.sample(density), b.sample(density));
    let (fxs, gys) = (images(f, &xs)?, images(g, &ys)?);
    let mut worst = Worst::new();
    for (&x, &fx) in xs.iter().zip(&fxs) {
        for (&y, &gy) in ys.iter().zip(&gys) {
            worst.observe(&[x, y], space.eval(fx, gy)?, alpha * space.eval(x, y)?);
        }
    }
    Ok(worst.finish(Condition::Pair, Some(alpha), Some(density), false))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalSelfDistance<S> {
    /// Smallest `p(x, y)` over sampled pairs.
    pub rho_p: S,
    /// Sampled points whose self-distance equals `rho_p`.
    pub xp: Vec<S>,
}

/// `rho_p = min p(x, y)` over the sample and the points attaining it as a
/// self-distance.
pub fn compute_xp<S: Scalar>(
    space: &PartialMetric<S>,
    sample: &[S],
) -> Result<MinimalSelfDistance<S>> {
    if sample.is_empty() {
        return Err(Error::Argument("rho_p needs a nonempty sample".into()));
    }
    let mut rho: Option<S> = None;
    for &x in sample {
        for &y in sample {
            let v = space.eval(x, y)?;
            rho = Some(rho.map_or(v, |r| r.min_of(v)));
        }
    }
    let rho_p = rho.expect("nonempty");
    let tol = S::tol_eq();
    let mut xp = Vec::new();
    for &x in sample {
        if space.eval(x, x)?.near(rho_p, tol) {
            xp.push(x);
        }
    }
    Ok(MinimalSelfDistance { rho_p, xp })
}
