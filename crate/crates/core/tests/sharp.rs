use hardylab::gridfn::WeightSpec;
use hardylab::sharp::{self, EstimatorConfig};
use proptest::prelude::*;

fn cfg(eps: f64, l: f64, n: usize, p: f64) -> EstimatorConfig {
    EstimatorConfig { eps, l, n, p, max_iter: 20_000, tol: 1e-13 }
}

fn isq(p: f64) -> WeightSpec {
    WeightSpec::power(1.0, -p)
}

#[test]
fn zero_weight_gives_a_zero_sandwich() {
    let s = sharp::sandwich(&WeightSpec::constant(1.0), &WeightSpec::zero(), &cfg(1e-3, 1e3, 200, 2.0)).unwrap();
    assert_eq!((s.lower, s.estimate, s.upper), (0.0, 0.0, 0.0));
    assert!(s.ordered);
    let e = sharp::best_constant_general_p(&WeightSpec::constant(1.0), &WeightSpec::zero(), &cfg(1e-3, 1e3, 200, 3.0))
        .unwrap();
    assert_eq!(e.value, 0.0);
}

#[test]
fn indicator_weight_is_strictly_sandwiched() {
    let w = WeightSpec::indicator(1.0, 2.0).unwrap();
    let s = sharp::sandwich(&WeightSpec::constant(1.0), &w, &cfg(1e-3, 1e3, 1200, 2.0)).unwrap();
    assert!(s.ordered && s.converged);
    assert!(s.upper.is_finite() && s.lower > 0.0);
    assert!(s.lower < s.estimate && s.estimate < s.upper, "{s:?}");
}

#[test]
fn inverse_square_stays_below_four() {
    let s = sharp::sandwich(&WeightSpec::constant(1.0), &isq(2.0), &cfg(1e-3, 1e3, 800, 2.0)).unwrap();
    assert!((s.lower - 2.0).abs() < 1e-8 && (s.upper - 4.0).abs() < 1e-8);
    assert!(s.ordered && s.estimate < 4.0);
}

#[test]
fn p3_inverse_cube_band() {
    let e = sharp::best_constant_general_p(&WeightSpec::constant(1.0), &isq(3.0), &cfg(1e-6, 1e6, 2000, 3.0)).unwrap();
    assert!(e.value > 2.03 && e.value <= 3.375, "{}", e.value);
    assert!(e.quotients.windows(2).all(|q| q[1] >= q[0]));
}

#[test]
fn general_p_agrees_with_p2_solver() {
    let v = WeightSpec::power(1.0, 0.5);
    let w = WeightSpec::piecewise(vec![
        (0.0, 1.0, vec![hardylab::gridfn::Term::new(1.0, 0.0, 0.0)]),
        (1.0, f64::INFINITY, vec![hardylab::gridfn::Term::new(1.0, -2.0, 0.0)]),
    ])
    .unwrap();
    let c = cfg(1e-3, 1e3, 600, 2.0);
    let a = sharp::best_constant_p2(&v, &w, &c).unwrap().value;
    let b = sharp::best_constant_general_p(&v, &w, &c).unwrap().value;
    assert!((a - b).abs() <= 1e-6 * a);
}

#[test]
fn enlarging_the_domain_never_decreases_the_estimate() {
    // equal log spacing, so each grid is a sub-grid of the next
    let v = WeightSpec::constant(1.0);
    let mut last = 0.0;
    for (k, n) in [(1, 101), (2, 201), (3, 301), (4, 401)] {
        let span = 10f64.powi(k);
        let e = sharp::best_constant_p2(&v, &isq(2.0), &cfg(1.0 / span, span, n, 2.0)).unwrap().value;
        assert!(e >= last * (1.0 - 1e-12), "k={k}: {e} < {last}");
        last = e;
    }
}

#[test]
fn invalid_configs() {
    let v = WeightSpec::constant(1.0);
    assert!(sharp::best_constant_p2(&v, &isq(2.0), &cfg(1.0, 0.5, 100, 2.0)).is_err());
    assert!(sharp::best_constant_p2(&v, &isq(2.0), &cfg(1e-2, 1e2, 8, 2.0)).is_err());
    assert!(sharp::best_constant_p2(&v, &isq(3.0), &cfg(1e-2, 1e2, 100, 3.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn estimates_scale_with_w(t in 0.01f64..100.0, a in -2.5f64..-1.5, pi in 0usize..2) {
        let p = [2.0, 3.0][pi];
        let v = WeightSpec::constant(1.0);
        let w = WeightSpec::power(1.0, a);
        let c = cfg(1e-2, 1e2, 200, p);
        let base = sharp::best_constant_general_p(&v, &w, &c).unwrap();
        let scaled = sharp::best_constant_general_p(&v, &w.scale(t), &c).unwrap();
        prop_assert!(base.quotients.windows(2).all(|q| q[1] >= q[0]));
        prop_assert!((scaled.value - t * base.value).abs() <= 1e-10 * t * base.value,
            "{} vs {}", scaled.value, t * base.value);
    }
}
