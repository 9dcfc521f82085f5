//! Helpers shared by the integration suites: hand-written distance oracles
//! for the catalog spaces and seeded sequence generators.

#![allow(dead_code)]

use pmfix::metric::PartialMetric;
use pmfix::spaces::{catalog, CatalogEntry, CATALOG_NAMES};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn builtins() -> Vec<CatalogEntry<f64>> {
    CATALOG_NAMES.iter().map(|n| catalog(n).unwrap()).collect()
}

/// Closed-form partial metric of a catalog space, written out independently
/// of the library's rule evaluation.
pub fn oracle(name: &str, x: f64, y: f64) -> f64 {
    match name {
        "hybrid-unit" if (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y) => (x - y).abs(),
        _ => {
            if x > y {
                x
            } else {
                y
            }
        }
    }
}

/// A point `z` with `p(z, z) = 0` for the named space.
pub fn zero_point(name: &str, rng: &mut ChaCha8Rng) -> f64 {
    match name {
        "hybrid-unit" => rng.gen_range(0.05..0.9),
        _ => 0.0,
    }
}

/// A 'len'-term sequence converging to `z` inside the space's domain,
/// either geometric or `c / n^2`, approaching from a random side where
/// the domain allows it.
pub fn sequence_towards(
    space: &PartialMetric<f64>,
    z: f64,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let c: f64 = rng.gen_range(0.01..0.05);
    let geometric = rng.gen_bool(0.5);
    let r: f64 = rng.gen_range(0.5..0.95);
    let side = if z > 0.05 && rng.gen_bool(0.5) {
        -1.0
    } else {
        1.0
    };
    (0..len)
        .map(|n| {
            let gap = if geometric {
                c * r.powi(n as i32)
            } else {
                c / ((n + 1) as f64).powi(2)
            };
            let x = z + side * gap;
            assert!(space.domain.contains(x), "{x} outside {}", space.domain);
            x
        })
        .collect()
}

/// Mean of `|p(x_n, y) - p(z, y)|` over the last quarter of `xs`.
pub fn tail_residual(name: &str, xs: &[f64], z: f64, y: f64) -> f64 {
    let tail = &xs[xs.len() - xs.len().div_ceil(4)..];
    tail.iter()
        .map(|&x| (oracle(name, x, y) - oracle(name, z, y)).abs())
        .sum::<f64>()
        / tail.len() as f64
}
