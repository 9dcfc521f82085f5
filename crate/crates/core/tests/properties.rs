mod common;

use pmfix::cli::parse::parse_metric;
use pmfix::contraction::{
    compute_xp, estimate_alpha_cyclic, glue_pair, verify_c2, verify_partial_cyclic, verify_strict,
    CyclicDecomposition,
};
use pmfix::metric::{MetricRule, PartialMetric};
use pmfix::solver::{picard, set_distance, solve_cyclic, SolveStatus, SolverConfig};
use pmfix::spaces::{catalog, make_counterexample, MapRule, PiecewiseMap, SetDescriptor};
use pmfix::{Error, Exact};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec![
        "max",
        "rationals-max",
        "hybrid-unit",
        "counterexample",
    ])
}

/// A point of the named space's domain.
fn point_in(name: &'static str) -> BoxedStrategy<f64> {
    match name {
        "hybrid-unit" => (0.0..=1.0f64).boxed(),
        "counterexample" => prop_oneof![0.0..=1.0f64, 3.0..=4.0f64, Just(1.5)].boxed(),
        _ => (0.0..8.0f64).boxed(),
    }
}

fn space_and_triple() -> impl Strategy<Value = (&'static str, f64, f64, f64)> {
    space_name().prop_flat_map(|n| (Just(n), point_in(n), point_in(n), point_in(n)))
}

fn scaling_map(r: f64) -> PiecewiseMap<f64> {
    PiecewiseMap::everywhere(MapRule::affine(r, 0.0))
}

fn unit_max() -> PartialMetric<f64> {
    PartialMetric::new("max", SetDescriptor::closed(0.0, 1.0), MetricRule::Max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn library_matches_oracle((name, x, y, _z) in space_and_triple()) {
        let e = catalog::<f64>(name).unwrap();
        prop_assert_eq!(e.space.eval(x, y).unwrap(), common::oracle(name, x, y));
    }

    #[test]
    fn induced_is_a_metric((name, x, y, z) in space_and_triple()) {
        let s = catalog::<f64>(name).unwrap().space;
        let d = |a, b| s.induced(a, b).unwrap();
        let tol = 1e-12;
        prop_assert!(d(x, x).abs() <= tol);
        prop_assert!((d(x, y) - d(y, x)).abs() <= tol);
        prop_assert!(d(x, y) >= -tol);
        prop_assert!(d(x, z) <= d(x, y) + d(y, z) + tol);
    }

    #[test]
    fn axioms_imply_nonnegative_induced(a in -1.0..2.0f64, b in -1.0..2.0f64, c in -0.5..0.5f64) {
        let rule = parse_metric::<f64>(&format!("{a}*max(x,y) + {b}*|x-y| + {c}")).unwrap();
        let space = PartialMetric::new("q", SetDescriptor::closed(0.0, 1.0), rule);
        let sample = space.domain.sample(12);
        if let Ok(report) = space.check_axioms(&sample, 1e-12) {
            if report.passed {
                for &x in &sample {
                    for &y in &sample {
                        prop_assert!(space.induced(x, y).unwrap() >= -1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn c2_implies_pc2_and_strict(r in 0.05..0.95f64, t in 0.0..1.0f64) {
        let space = unit_max();
        let map = scaling_map(r);
        let d = CyclicDecomposition::new(vec![space.domain.clone(), space.domain.clone()]).unwrap();
        let alpha_hat = estimate_alpha_cyclic(&space, &map, &d, 20).unwrap().alpha_hat.finite().unwrap();
        prop_assert!((alpha_hat - r).abs() <= 1e-9);
        let alpha = (alpha_hat + t * (1.0 - alpha_hat)).min(0.999_999);
        prop_assert!(verify_c2(&space, &map, &d, alpha, 20).unwrap().holds);
        prop_assert!(verify_partial_cyclic(&space, &map, &d.sets[0], &d.sets[1], alpha, 20).unwrap().holds);
        prop_assert!(verify_strict(&space, &map, &d, 20).unwrap().holds);
    }

    #[test]
    fn c2_is_monotone_in_alpha(a1 in 0.01..0.99f64, a2 in 0.01..0.99f64, which in 0usize..2) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let e = if which == 0 { catalog::<f64>("hybrid-unit").unwrap() } else { make_counterexample() };
        let (t, d) = (e.map().unwrap(), e.decomposition().unwrap());
        let at_lo = verify_c2(&e.space, t, d, lo, 15).unwrap();
        let at_hi = verify_c2(&e.space, t, d, hi, 15).unwrap();
        prop_assert!(!at_lo.holds || at_hi.holds);
        prop_assert!(at_hi.margin.unwrap() >= at_lo.margin.unwrap());
    }

    #[test]
    fn rho_p_bounds_self_distances(name in space_name(), density in 3usize..30) {
        let s = catalog::<f64>(name).unwrap().space;
        let sample = s.domain.sample(density);
        let m = compute_xp(&s, &sample).unwrap();
        for &x in &sample {
            prop_assert!(m.rho_p <= s.eval(x, x).unwrap());
        }
        for &x in &m.xp {
            prop_assert_eq!(s.eval(x, x).unwrap(), m.rho_p);
        }
    }

    #[test]
    fn glued_map_restricts_to_its_parts(
        a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64,
        x in 0.0..2.0f64, skew in 0.1..1.0f64,
    ) {
        let (set_a, set_b) = (SetDescriptor::closed(0.0, 1.0), SetDescriptor::closed(0.5, 2.0));
        let f = PiecewiseMap::everywhere(MapRule::affine(a, b));
        let mut g = PiecewiseMap::new().piece(SetDescriptor::closed(0.5, 1.0), MapRule::affine(a, b));
        g.fallback = Some(MapRule::affine(c, d));
        let glued = glue_pair(&f, &g, &set_a, &set_b, 20).unwrap();
        let expected = if x <= 1.0 { a * x + b } else { c * x + d };
        prop_assert!((glued.apply(x).unwrap() - expected).abs() <= 1e-12);

        let clash = PiecewiseMap::everywhere(MapRule::affine(a + skew, b));
        prop_assert!(matches!(glue_pair(&f, &clash, &set_a, &set_b, 20), Err(Error::Gluing { .. })), "disagreement must be reported");
    }

    #[test]
    fn set_distance_is_symmetric(a0 in 0.0..5.0f64, a1 in 0.0..5.0f64, b0 in 0.0..5.0f64, b1 in 0.0..5.0f64) {
        let space = PartialMetric::new("max", SetDescriptor::closed(0.0, 5.0), MetricRule::Max);
        let a = SetDescriptor::closed(a0.min(a1), a0.max(a1));
        let b = SetDescriptor::closed(b0.min(b1), b0.max(b1));
        let ab = set_distance(&space, &a, &b, 25).unwrap();
        let ba = set_distance(&space, &b, &a, 25).unwrap();
        prop_assert_eq!(ab.delta, ba.delta);
        prop_assert_eq!(ab.witness, (ba.witness.1, ba.witness.0));
        // max{x, y} is minimised at the two left endpoints
        prop_assert_eq!(ab.delta, a0.min(a1).max(b0.min(b1)));
    }

    #[test]
    fn reported_cycles_are_genuine(c in 1.0..5.0f64, u in 0.0..1.0f64) {
        let x0 = u * c;
        prop_assume!((x0 - c / 2.0).abs() > 1e-3);
        let space = PartialMetric::new("abs", SetDescriptor::closed(0.0, c), MetricRule::Abs);
        let map = PiecewiseMap::everywhere(MapRule::affine(-1.0, c));
        let r = picard(&space, &map, x0, &SolverConfig::default()).unwrap();
        match r.status {
            SolveStatus::Cycle { period, orbit } => {
                prop_assert_eq!(period, 2);
                prop_assert_eq!(orbit.len(), period);
                prop_assert!((orbit[0] - orbit[1]).abs() > 1e-9);
                for i in 0..period {
                    let next = map.apply(orbit[i]).unwrap();
                    prop_assert!((next - orbit[(i + 1) % period]).abs() <= 1e-9);
                }
            }
            other => prop_assert!(false, "expected a cycle, got {:?}", other),
        }
    }

    #[test]
    fn counterexample_orbits_cycle_or_stop(x0 in prop_oneof![0.0..1.0f64, 3.0..=4.0f64, Just(1.5)]) {
        let e = make_counterexample::<f64>();
        let r = picard(&e.space, e.map().unwrap(), x0, &SolverConfig::default()).unwrap();
        match r.status {
            SolveStatus::Cycle { period, mut orbit } => {
                prop_assert_eq!(period, 2);
                orbit.sort_by(f64::total_cmp);
                prop_assert_eq!(orbit, vec![0.5, 1.5]);
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn induced_steps_shrink_geometrically(r in 0.05..0.95f64, x0 in 0.0..=1.0f64) {
        let space = unit_max();
        let map = scaling_map(r);
        let d = CyclicDecomposition::new(vec![space.domain.clone(), space.domain.clone()]).unwrap();
        let alpha_hat = estimate_alpha_cyclic(&space, &map, &d, 30).unwrap().alpha_hat.finite().unwrap();
        let res = solve_cyclic(&space, &map, &d, x0, &SolverConfig::default()).unwrap();
        for w in res.trace.ps_step.windows(2) {
            prop_assert!(w[1] <= alpha_hat * w[0] + 4e-9, "{} > {} * {}", w[1], alpha_hat, w[0]);
        }
        prop_assert!(res.fixed_point().is_some());
    }

    #[test]
    fn continuous_images_of_convergent_sequences(z in 0.0..3.0f64, seed in any::<u64>()) {
        // T(x) = x/2 on the max space is continuous everywhere
        let space = PartialMetric::new("max", SetDescriptor::closed(0.0, 4.0), MetricRule::Max);
        let map = scaling_map(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = common::sequence_towards(&space, z, 200, &mut rng);
        prop_assert!(space.check_convergence(&xs, z, 1e-3).unwrap().holds);
        let tz = map.apply(z).unwrap();
        let images: Vec<f64> = xs.iter().map(|&x| map.apply(x).unwrap()).collect();
        let v = space.check_convergence(&images, tz, 1e-3).unwrap();
        prop_assert!(v.holds, "residual {}", v.residual);
    }

    #[test]
    fn cauchy_verdicts_agree(name in space_name(), seed in any::<u64>(), oscillate in any::<bool>()) {
        let e = catalog::<f64>(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = common::zero_point(name, &mut rng);
        let mut xs = common::sequence_towards(&e.space, z, 120, &mut rng);
        if oscillate {
            // alternate with a far point so the tail never settles
            let far = if name == "hybrid-unit" { 1.0 } else { 0.9 };
            for x in xs.iter_mut().skip(1).step_by(2) {
                *x = far;
            }
        }
        let v = e.space.check_cauchy_dual(&xs, 1e-3).unwrap();
        prop_assert!(v.agree(), "{:?}", v);
        prop_assert_eq!(v.ps.holds, !oscillate);
    }

    #[test]
    fn exact_induced_metric(num in 0i64..40, den in 1i64..40, num2 in 0i64..40) {
        let e = catalog::<Exact>("hybrid-unit").unwrap();
        let x = Exact::new(num.min(den), den);
        let y = Exact::new(num2.min(den), den);
        let two = Exact::from_integer(2);
        let expected = two * e.space.eval(x, y).unwrap() - e.space.eval(x, x).unwrap() - e.space.eval(y, y).unwrap();
        prop_assert_eq!(e.space.induced(x, y).unwrap(), expected);
        prop_assert!(e.space.induced(x, y).unwrap() >= Exact::from_integer(0));
    }
}

#[test]
fn exact_picard_reaches_one_half() {
    let e = catalog::<Exact>("hybrid-unit").unwrap();
    let cfg = SolverConfig {
        tol: Exact::new(1, 1_000_000_000),
        tol_eq: Exact::new(1, 1_000_000_000),
        ..SolverConfig::default()
    };
    let r = solve_cyclic(
        &e.space,
        e.map().unwrap(),
        e.decomposition().unwrap(),
        Exact::from_integer(1),
        &cfg,
    )
    .unwrap();
    assert_eq!(r.fixed_point(), Some(Exact::new(1, 2)));
}

#[test]
fn single_precision_max_space() {
    let e = catalog::<f32>("max").unwrap();
    let r = picard(&e.space, e.map().unwrap(), 1.0f32, &SolverConfig::default()).unwrap();
    assert!(r.fixed_point().unwrap() < 1e-5);
}
