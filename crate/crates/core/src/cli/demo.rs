//! Scripted scenarios that recompute the catalog's headline facts.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::contraction::{self, CyclicDecomposition};
use crate::error::Result;
use crate::metric::{MetricRule, PartialMetric};
use crate::solver::{self, SolveStatus, SolverConfig};
use crate::spaces::{make_counterexample, make_hybrid_unit, make_k3_cycle, PiecewiseMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemoName {
    /// Hybrid metric on [0,1]: cyclic contraction with fixed point 1/2
    #[value(name = "example-2.4")]
    Example24,
    /// Counterexample: partial cyclic contraction with a 2-cycle
    #[value(name = "example-2.5")]
    Example25,
    /// Distance between the sets for strict contractions
    EdelsteinDelta,
    /// Three-set decomposition of [0,1] under x/4
    K3Cycle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub statement: String,
    pub reproduced: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub name: DemoName,
    pub claims: Vec<Claim>,
    pub notes: Vec<String>,
}

impl DemoReport {
    pub fn reproduced(&self) -> bool {
        self.claims.iter().all(|c| c.reproduced)
    }

    pub fn to_text(&self) -> String {
        let name = self
            .name
            .to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default();
        let mut s = format!("demo {name}\n");
        for c in &self.claims {
            let mark = if c.reproduced { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "  [{mark}] {}: {}", c.statement, c.detail);
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        let _ = writeln!(
            s,
            "{}",
            if self.reproduced() {
                "all claims reproduced"
            } else {
                "some claims NOT reproduced"
            }
        );
        s
    }
}

fn claim(statement: impl Into<String>, reproduced: bool, detail: impl Into<String>) -> Claim {
    Claim {
        statement: statement.into(),
        reproduced,
        detail: detail.into(),
    }
}

const DENSITY: usize = 100;

pub fn run_demo(name: DemoName) -> Result<DemoReport> {
    let (claims, notes) = match name {
        DemoName::Example24 => example_24()?,
        DemoName::Example25 => example_25()?,
        DemoName::EdelsteinDelta => edelstein_delta()?,
        DemoName::K3Cycle => k3_cycle()?,
    };
    Ok(DemoReport {
        name,
        claims,
        notes,
    })
}

type Parts = (Vec<Claim>, Vec<String>);

fn example_24() -> Result<Parts> {
    let e = make_hybrid_unit::<f64>();
    let (t, d) = (e.map()?, e.decomposition()?);
    let mut claims = Vec::new();

    let c1 = contraction::verify_inclusions(t, d, DENSITY)?;
    claims.push(claim(
        "T maps A into B and B into A",
        c1.holds,
        format!("{} points checked", c1.checked),
    ));

    let est = contraction::estimate_alpha_cyclic(&e.space, t, d, DENSITY)?;
    let ah = est.alpha_hat.finite();
    claims.push(claim(
        "smallest admissible alpha is 1/2",
        ah.is_some_and(|a| (a - 0.5).abs() <= 1e-9),
        format!("alpha_hat = {:?}", ah),
    ));

    let c2 = contraction::verify_c2(&e.space, t, d, 0.75, DENSITY)?;
    claims.push(claim(
        "cyclic contraction holds with alpha = 3/4",
        c2.holds,
        format!("margin {:?}", c2.margin),
    ));

    let abs = PartialMetric::new("abs", e.space.domain.clone(), MetricRule::Abs);
    let c2_abs = contraction::verify_c2(&abs, t, d, 0.75, DENSITY)?;
    claims.push(claim(
        "the same map is not a cyclic contraction for |x-y|",
        !c2_abs.holds,
        format!(
            "witness {:?}",
            c2_abs
                .witness
                .as_ref()
                .map(|w| w.points.clone())
                .unwrap_or_default()
        ),
    ));

    let cfg = SolverConfig::default();
    for x0 in [0.0, 0.3, 1.0] {
        let r = solver::solve_cyclic(&e.space, t, d, x0, &cfg)?;
        let ok = matches!(r.status, SolveStatus::Converged { u, p_uu, .. } if (u - 0.5).abs() <= 1e-12 && p_uu == 0.0)
            && r.in_all_sets() == Some(true);
        claims.push(claim(
            format!("orbit from {x0} reaches the fixed point 1/2 in A and B"),
            ok,
            format!("{} after {} steps", r.status.kind(), r.trace.steps()),
        ));
    }
    Ok((claims, e.notes))
}

fn example_25() -> Result<Parts> {
    let e = make_counterexample::<f64>();
    let (t, d) = (e.map()?, e.decomposition()?);
    let (a, b) = (&d.sets[0], &d.sets[1]);
    let mut claims = Vec::new();

    for alpha in [0.1, 0.5, 0.9] {
        let c = contraction::verify_partial_cyclic(&e.space, t, a, b, alpha, DENSITY)?;
        claims.push(claim(
            format!("partial cyclic contraction holds with alpha = {alpha}"),
            c.holds,
            format!("{} pairs, margin {:?}", c.checked, c.margin),
        ));
    }

    let r = solver::solve_cyclic(&e.space, t, d, 1.5, &SolverConfig::default())?;
    let ok = match &r.status {
        SolveStatus::Cycle { period: 2, orbit } => {
            let mut o = orbit.clone();
            o.sort_by(f64::total_cmp);
            (o[0] - 0.5).abs() <= 1e-12 && (o[1] - 1.5).abs() <= 1e-12
        }
        _ => false,
    };
    claims.push(claim(
        "T has no fixed point: orbits settle on {1/2, 3/2}",
        ok,
        r.status.kind(),
    ));

    let empty = [10, 100, 1000].iter().all(|&n| {
        crate::spaces::sample_intersection(&a.sample(n), &b.sample(n), crate::DEFAULT_TOL_EQ)
            .is_empty()
    });
    claims.push(claim(
        "A and B do not intersect",
        empty,
        "checked at densities 10, 100, 1000",
    ));

    let est = contraction::estimate_alpha_cyclic(&e.space, t, d, DENSITY)?;
    claims.push(claim(
        "T is not a cyclic contraction (alpha_hat >= 1)",
        !est.alpha_hat.is_contraction(),
        format!("alpha_hat = {:?}", est.alpha_hat),
    ));

    let mut notes = e.notes;
    notes.extend(e.extensions);
    Ok((claims, notes))
}

fn edelstein_delta() -> Result<Parts> {
    let mut claims = Vec::new();

    let ce = make_counterexample::<f64>();
    let d = ce.decomposition()?;
    let dist = solver::set_distance(&ce.space, &d.sets[0], &d.sets[1], DENSITY)?;
    claims.push(claim(
        "distance between A and B is 3/2 for the counterexample",
        (dist.delta - 1.5).abs() <= 1e-12,
        format!("delta = {} at {:?}", dist.delta, dist.witness),
    ));
    let strict = contraction::verify_strict(&ce.space, ce.map()?, d, DENSITY)?;
    claims.push(claim(
        "its map is not strictly contractive",
        !strict.holds,
        format!("margin {:?}", strict.margin),
    ));

    let hy = make_hybrid_unit::<f64>();
    let hd = hy.decomposition()?;
    let dist = solver::set_distance(&hy.space, &hd.sets[0], &hd.sets[1], DENSITY)?;
    claims.push(claim(
        "distance between A and B is 0 for the hybrid example",
        dist.delta == 0.0,
        format!("delta = {} at {:?}", dist.delta, dist.witness),
    ));

    let k3 = make_k3_cycle::<f64>();
    let whole = CyclicDecomposition::new(vec![k3.space.domain.clone(), k3.space.domain.clone()])?;
    let half =
        contraction::verify_strict(&k3.space, &PiecewiseMap::scaling(1, 2), &whole, DENSITY)?;
    claims.push(claim(
        "x/2 is strictly contractive for max(x,y)",
        half.holds,
        format!("margin {:?}", half.margin),
    ));
    let id = contraction::verify_strict(&k3.space, &PiecewiseMap::identity(), &whole, DENSITY)?;
    claims.push(claim(
        "the identity is not",
        !id.holds,
        format!("margin {:?}", id.margin),
    ));

    Ok((claims, vec![]))
}

fn k3_cycle() -> Result<Parts> {
    let e = make_k3_cycle::<f64>();
    let (t, d) = (e.map()?, e.decomposition()?);
    let mut claims = Vec::new();

    let c1 = contraction::verify_inclusions(t, d, DENSITY)?;
    claims.push(claim(
        "T maps each A_i into A_(i+1)",
        c1.holds,
        format!("{} points checked", c1.checked),
    ));
    let est = contraction::estimate_alpha_cyclic(&e.space, t, d, DENSITY)?;
    let ah = est.alpha_hat.finite();
    claims.push(claim(
        "smallest admissible alpha is 1/4",
        ah.is_some_and(|a| (a - 0.25).abs() <= 1e-9),
        format!("alpha_hat = {:?}", ah),
    ));
    let r = solver::solve_cyclic(&e.space, t, d, 1.0, &SolverConfig::default())?;
    let ok = matches!(r.status, SolveStatus::Converged { u, .. } if u.abs() <= 1e-9)
        && r.in_all_sets() == Some(true);
    claims.push(claim(
        "orbit from 1 converges to 0, which lies in every A_i",
        ok,
        format!("{} after {} steps", r.status.kind(), r.trace.steps()),
    ));
    Ok((claims, e.notes))
}
