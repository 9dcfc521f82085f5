use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::SetDescriptor;

/// Right-hand side of a map piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapRule<S> {
    Constant {
        c: S,
    },
    /// `a * x + b`
    Affine {
        a: S,
        b: S,
    },
}

impl<S: Scalar> MapRule<S> {
    pub fn constant(c: S) -> Self {
        Self::Constant { c }
    }

    pub fn affine(a: S, b: S) -> Self {
        Self::Affine { a, b }
    }

    pub fn identity() -> Self {
        Self::Affine {
            a: S::one(),
            b: S::zero(),
        }
    }

    pub fn apply(&self, x: S) -> S {
        match *self {
            Self::Constant { c } => c,
            Self::Affine { a, b } => a * x + b,
        }
    }
}

impl<S: Scalar> fmt::Display for MapRule<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { c } => write!(f, "{c}"),
            Self::Affine { a, b } => write!(f, "{a}*x + {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece<S> {
    pub guard: SetDescriptor<S>,
    pub rule: MapRule<S>,
}

/// A self-map given as ordered `(guard, rule)` pieces.
///
/// The first piece whose guard contains `x` is applied; if none does, the
/// fallback rule (if any) is used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseMap<S> {
    pub pieces: Vec<Piece<S>>,
    pub fallback: Option<MapRule<S>>,
}

impl<S: Scalar> PiecewiseMap<S> {
    pub fn new() -> Self {
        Self {
            pieces: Vec::new(),
            fallback: None,
        }
    }

    /// A map given by one rule on the whole line.
    pub fn everywhere(rule: MapRule<S>) -> Self {
        Self {
            pieces: Vec::new(),
            fallback: Some(rule),
        }
    }

    pub fn piece(mut self, guard: SetDescriptor<S>, rule: MapRule<S>) -> Self {
        self.pieces.push(Piece { guard, rule });
        self
    }

    /// `T(x) = x / d`
    pub fn scaling(num: i64, den: i64) -> Self {
        Self::everywhere(MapRule::affine(S::ratio(num, den), S::zero()))
    }

    pub fn identity() -> Self {
        Self::everywhere(MapRule::identity())
    }

    fn matching(&self, x: S) -> impl Iterator<Item = usize> + '_ {
        self.pieces
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.guard.contains(x))
            .map(|(i, _)| i)
    }

    pub fn apply(&self, x: S) -> Result<S> {
        if let Some(i) = self.matching(x).next() {
            return Ok(self.pieces[i].rule.apply(x));
        }
        self.fallback
            .map(|r| r.apply(x))
            .ok_or_else(|| Error::MapUndefined(x.to_string()))
    }

    /// Checks that each sample point matches exactly one piece (or only
    /// the fallback).
    pub fn check_total(&self, sample: &[S]) -> Result<()> {
        for &x in sample {
            let mut hits = self.matching(x);
            match (hits.next(), hits.next()) {
                (None, _) if self.fallback.is_none() => {
                    return Err(Error::MapUndefined(x.to_string()))
                }
                (Some(first), Some(second)) => {
                    return Err(Error::MapAmbiguous {
                        point: x.to_string(),
                        first,
                        second,
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Restricts every piece to `region`. A fallback becomes a piece
    /// guarded by `region` itself.
    pub fn restrict(&self, region: &SetDescriptor<S>) -> Self {
        let mut out = Self::new();
        for p in &self.pieces {
            let guard = p.guard.intersect(region);
            if !guard.is_empty() {
                out.pieces.push(Piece {
                    guard,
                    rule: p.rule,
                });
            }
        }
        if let Some(rule) = self.fallback {
            let covered = self
                .pieces
                .iter()
                .fold(SetDescriptor::empty(), |acc, p| acc.union(&p.guard));
            let rest = region.difference(&covered);
            if !rest.is_empty() {
                out.pieces.push(Piece { guard: rest, rule });
            }
        }
        out
    }
}

impl<S: Scalar> Default for PiecewiseMap<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> fmt::Display for PiecewiseMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("{}: {}", p.guard, p.rule))
            .collect();
        if let Some(r) = &self.fallback {
            parts.push(r.to_string());
        }
        write!(f, "{}", parts.join("; "))
    }
}
