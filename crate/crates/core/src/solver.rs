//! Picard iteration with convergence, cycle and exhaustion verdicts.
//!
//! Convergence is declared on steps of the induced metric `p^s`, since raw
//! `p` steps need not vanish when self-distances are positive.

use std::fmt::Write as _;
use std::thread;

use serde::Serialize;

use crate::contraction::CyclicDecomposition;
use crate::error::{Error, Result};
use crate::metric::PartialMetric;
use crate::scalar::{lex_less, Scalar};
use crate::spaces::{PiecewiseMap, SetDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<S> {
    /// Threshold on `p^s` steps.
    pub tol: S,
    pub max_iter: usize,
    /// Longest cycle period searched for.
    pub cycle_window: usize,
    /// Point-equality tolerance.
    pub tol_eq: S,
    /// Consecutive small steps required to declare convergence.
    pub stall_count: usize,
}

impl<S: Scalar> Default for SolverConfig<S> {
    fn default() -> Self {
        Self {
            tol: S::lit(crate::DEFAULT_TOL),
            max_iter: 10_000,
            cycle_window: 16,
            tol_eq: S::tol_eq(),
            stall_count: 3,
        }
    }
}

impl<S: Scalar> SolverConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if self.tol <= S::zero() || self.tol_eq <= S::zero() {
            return Err(Error::Argument("tolerances must be positive".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::Argument("max_iter must be at least 1".into()));
        }
        if self.cycle_window < 2 {
            return Err(Error::Argument("cycle_window must be at least 2".into()));
        }
        if self.stall_count < 1 {
            return Err(Error::Argument("stall_count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Iterates `x_0, x_1 = T(x_0), ...` with per-step distances.
///
/// `p_step[n] = p(x_n, x_{n+1})`, `ps_step[n] = p^s(x_n, x_{n+1})` and
/// `self_dist[n] = p(x_n, x_n)`; the step lists are one shorter than
/// `iterates`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitTrace<S> {
    pub iterates: Vec<S>,
    pub p_step: Vec<S>,
    pub ps_step: Vec<S>,
    pub self_dist: Vec<S>,
}

impl<S: Scalar> OrbitTrace<S> {
    pub fn steps(&self) -> usize {
        self.p_step.len()
    }

    /// CSV with header `n,x_n,p_step,ps_step,self_dist`. The final iterate
    /// has no step, so its step columns are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x_n,p_step,ps_step,self_dist\n");
        for (n, x) in self.iterates.iter().enumerate() {
            let step = |v: &[S]| v.get(n).map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{n},{x},{},{},{}",
                step(&self.p_step),
                step(&self.ps_step),
                self.self_dist[n]
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolveStatus<S> {
    Converged {
        u: S,
        p_uu: S,
        /// `|p(Tu, u) - p(Tu, Tu)|`
        orbital_residual: S,
    },
    Cycle {
        period: usize,
        orbit: Vec<S>,
    },
    Exhausted,
}

impl<S> SolveStatus<S> {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Converged { .. } => "converged",
            Self::Cycle { .. } => "cycle",
            Self::Exhausted => "exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult<S> {
    pub status: SolveStatus<S>,
    pub trace: OrbitTrace<S>,
    /// `u ∈ A_i` for each set, when solved against a decomposition and converged.
    pub membership: Option<Vec<bool>>,
}

impl<S: Scalar> SolveResult<S> {
    pub fn fixed_point(&self) -> Option<S> {
        match self.status {
            SolveStatus::Converged { u, .. } => Some(u),
            _ => None,
        }
    }

    /// True if the limit lies in every set of the decomposition.
    pub fn in_all_sets(&self) -> Option<bool> {
        self.membership.as_ref().map(|m| m.iter().all(|&b| b))
    }
}

/// Smallest period `q` in `2..=window` such that the last `2q` iterates
/// are two copies of one non-constant block.
fn detect_cycle<S: Scalar>(xs: &[S], window: usize, tol: S) -> Option<usize> {
    let n = xs.len();
    (2..=window).find(|&q| {
        if n < 2 * q {
            return false;
        }
        let block = &xs[n - q..];
        let repeats = (0..q).all(|j| xs[n - 1 - j].near(xs[n - 1 - j - q], tol));
        let moving = block.iter().any(|&a| !a.near(block[0], tol));
        repeats && moving
    })
}

/// Picard iteration from `x0`.
///
/// Stops with `Converged` once `stall_count` consecutive `p^s` steps fall
/// below `tol` (or at once if an iterate is mapped to itself within
/// `tol_eq`), with `Cycle` when a periodic orbit of period at most
/// `cycle_window` has repeated twice, and with `Exhausted` after
/// `max_iter` steps.
pub fn picard<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    x0: S,
    config: &SolverConfig<S>,
) -> Result<SolveResult<S>> {
    config.validate()?;
    if !space.domain.contains(x0) {
        return Err(Error::DomainEscape {
            index: 0,
            value: x0.to_string(),
        });
    }
    let mut trace = OrbitTrace {
        iterates: vec![x0],
        p_step: Vec::new(),
        ps_step: Vec::new(),
        self_dist: vec![space.eval(x0, x0)?],
    };
    let mut stall = 0;
    for n in 0..config.max_iter {
        let x = trace.iterates[n];
        let tx = t.apply(x)?;
        if !space.domain.contains(tx) {
            return Err(Error::DomainEscape {
                index: n + 1,
                value: tx.to_string(),
            });
        }
        let ps = space.induced(x, tx)?;
        trace.p_step.push(space.eval(x, tx)?);
        trace.ps_step.push(ps);
        trace.self_dist.push(space.eval(tx, tx)?);
        trace.iterates.push(tx);

        stall = if ps < config.tol { stall + 1 } else { 0 };
        let fixed = stall > 0 && tx.near(x, config.tol_eq);
        if fixed || stall >= config.stall_count {
            let u = tx;
            let tu = t.apply(u)?;
            let status = SolveStatus::Converged {
                u,
                p_uu: space.eval(u, u)?,
                orbital_residual: space.eval(tu, u)?.dist(space.eval(tu, tu)?),
            };
            return Ok(SolveResult {
                status,
                trace,
                membership: None,
            });
        }
        if let Some(period) = detect_cycle(&trace.iterates, config.cycle_window, config.tol_eq) {
            let orbit = trace.iterates[trace.iterates.len() - period..].to_vec();
            return Ok(SolveResult {
                status: SolveStatus::Cycle { period, orbit },
                trace,
                membership: None,
            });
        }
    }
    Ok(SolveResult {
        status: SolveStatus::Exhausted,
        trace,
        membership: None,
    })
}

/// Picard iteration for a cyclic map, reporting on convergence whether the
/// limit lies in each `A_i` (with `tol_eq` slack at set boundaries).
pub fn solve_cyclic<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    decomp: &CyclicDecomposition<S>,
    x0: S,
    config: &SolverConfig<S>,
) -> Result<SolveResult<S>> {
    if !decomp.sets.iter().any(|a| a.contains(x0)) {
        return Err(Error::Argument(format!(
            "x0 = {x0} lies in none of the decomposition sets"
        )));
    }
    let mut result = picard(space, t, x0, config)?;
    if let Some(u) = result.fixed_point() {
        result.membership = Some(
            decomp
                .sets
                .iter()
                .map(|a| a.contains_within(u, config.tol_eq))
                .collect(),
        );
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    /// `exp(slope)` of `log(ps_step)` against the step index.
    pub rate: f64,
    pub r_squared: f64,
    pub steps_used: usize,
}

/// Geometric rate of the `p^s` steps, by least squares on their logarithm.
///
/// Uses the first run of consecutive steps above `tol_eq`; at least four
/// are required.
pub fn rate_fit<S: Scalar>(trace: &OrbitTrace<S>) -> Result<RateFit> {
    const NEEDED: usize = 4;
    let tol = S::tol_eq();
    let start = trace.ps_step.iter().position(|&s| s > tol);
    let run: Vec<(f64, f64)> = match start {
        Some(s) => trace.ps_step[s..]
            .iter()
            .take_while(|&&v| v > tol)
            .enumerate()
            .map(|(i, v)| ((s + i) as f64, v.as_f64().ln()))
            .collect(),
        None => Vec::new(),
    };
    if run.len() < NEEDED {
        return Err(Error::InsufficientData {
            qualifying: run.len(),
            needed: NEEDED,
        });
    }
    let n = run.len() as f64;
    let mean_x = run.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = run.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = run.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = run.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = run
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let ss_tot: f64 = run.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(RateFit {
        rate: slope.exp(),
        r_squared,
        steps_used: run.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetDistance<S> {
    pub delta: S,
    pub witness: (S, S),
}

/// `min p(x, y)` over sampled `x ∈ a`, `y ∈ b`.
pub fn set_distance<S: Scalar>(
    space: &PartialMetric<S>,
    a: &SetDescriptor<S>,
    b: &SetDescriptor<S>,
    density: usize,
) -> Result<SetDistance<S>> {
    let (xs, ys) = (a.sample(density), b.sample(density));
    let mut best: Option<SetDistance<S>> = None;
    for &x in &xs {
        for &y in &ys {
            let v = space.eval(x, y)?;
            let better = match &best {
                None => true,
                Some(b) => {
                    v < b.delta || (v == b.delta && lex_less(&[x, y], &[b.witness.0, b.witness.1]))
                }
            };
            if better {
                best = Some(SetDistance {
                    delta: v,
                    witness: (x, y),
                });
            }
        }
    }
    best.ok_or_else(|| Error::Argument("set distance needs two nonempty samples".into()))
}

/// Runs [`picard`] from every start (in parallel) and returns the limits
/// of converged orbits together with their spread.
pub fn uniqueness_probe<S: Scalar>(
    space: &PartialMetric<S>,
    t: &PiecewiseMap<S>,
    starts: &[S],
    config: &SolverConfig<S>,
) -> Result<UniquenessProbe<S>> {
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(starts.len().max(1));
    let chunk = starts.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<SolveResult<S>>>> = thread::scope(|scope| {
        let handles: Vec<_> = starts
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&x0| picard(space, t, x0, config))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("probe worker panicked"))
            .collect()
    });
    let mut limits = Vec::with_capacity(starts.len());
    let mut unconverged = Vec::new();
    let mut solved = Vec::with_capacity(starts.len());
    for part in results {
        solved.extend(part?);
    }
    for (r, &x0) in solved.iter().zip(starts) {
        match r.fixed_point() {
            Some(u) => limits.push(u),
            None => unconverged.push(x0),
        }
    }
    let spread = match (
        limits.iter().copied().reduce(S::min_of),
        limits.iter().copied().reduce(S::max_of),
    ) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => S::zero(),
    };
    Ok(UniquenessProbe {
        limits,
        unconverged,
        spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessProbe<S> {
    pub limits: Vec<S>,
    /// Starts whose orbit did not converge.
    pub unconverged: Vec<S>,
    /// `max - min` of the limits.
    pub spread: S,
}
