use hardylab::gridfn::energy::lp_energy_profile;
use hardylab::gridfn::{lp_energy, Extension, GridFunction, LogGrid, StepFunction};
use hardylab::hardy::{self, Side};
use proptest::prelude::*;

fn min_r_1() -> GridFunction {
    GridFunction::new(LogGrid::new(vec![0.5, 1.0, 2.0]).unwrap(), vec![0.5, 1.0, 1.0], Extension::LinearToZeroAtOrigin)
        .unwrap()
}

fn zero() -> GridFunction {
    GridFunction::new(LogGrid::new(vec![1.0, 2.0]).unwrap(), vec![0.0, 0.0], Extension::ZeroOutside).unwrap()
}

/// Improved integrand sampled densely (nodes included, so the running
/// maxima are exact at the samples), trapezoid rule in `r`, analytic pieces
/// on `(0, lo)` and `(hi, ∞)`.
fn brute_force_improved(u: &GridFunction, p: f64) -> f64 {
    let x = u.nodes();
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let m = 200_000;
    let mut t: Vec<f64> = (0..=m).map(|k| lo * (hi / lo).powf(k as f64 / m as f64)).collect();
    t.extend_from_slice(x);
    t.sort_by(f64::total_cmp);
    t.dedup();
    let n = t.len();
    let au: Vec<f64> = t.iter().map(|&r| u.eval(r).abs()).collect();
    let mut pre = vec![0.0; n];
    let mut run: f64 = 0.0;
    for k in 0..n {
        run = run.max(au[k]);
        pre[k] = run;
    }
    let mut suf = vec![0.0; n];
    let mut run: f64 = 0.0;
    for k in (0..n).rev() {
        run = run.max(au[k] / t[k]);
        suf[k] = run;
    }
    let f: Vec<f64> = (0..n).map(|k| (pre[k] / t[k]).powf(p).max(suf[k].powf(p))).collect();
    let mut total: f64 = (1..n).map(|k| 0.5 * (f[k] + f[k - 1]) * (t[k] - t[k - 1])).sum();
    // (0, lo): u is linear through the origin, so both sups are constant there
    total += lo * suf[0].powf(p);
    // (hi, ∞): u is constant and the left sup dominates
    total += hi * (pre[n - 1] / hi).powf(p) / (p - 1.0);
    total
}

#[test]
fn examples_min_r_1() {
    let h = hardy::hardy_integrals(&min_r_1(), 2.0).unwrap();
    for v in [h.classical, h.left, h.right, h.improved] {
        assert!((v - 2.0).abs() < 1e-12);
    }
    let report = hardy::verify(&min_r_1(), 2.0).unwrap();
    assert!((report.rhs_energy - 1.0).abs() < 1e-14);
    assert_eq!(report.sharp_factor, 4.0);
    assert!(report.holds());
    assert!((hardy::one_sided_lhs(&min_r_1(), 2.0, Side::Left).unwrap() - 2.0).abs() < 1e-12);
    assert!((hardy::one_sided_lhs(&min_r_1(), 2.0, Side::Right).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn zero_function() {
    let r = hardy::verify(&zero(), 3.0).unwrap();
    assert_eq!((r.classical_lhs, r.improved_lhs, r.rhs_energy), (0.0, 0.0, 0.0));
    assert!(r.holds());
}

#[test]
fn exponent_range() {
    assert!(hardy::verify(&min_r_1(), 1.0).is_err());
    assert!(hardy::verify(&min_r_1(), 65.0).is_err());
    assert!(hardy::verify(&min_r_1(), 64.0).is_ok());
}

#[test]
fn improved_matches_dense_sampling() {
    let g = LogGrid::new(vec![0.3, 0.8, 1.1, 2.5, 4.0, 7.0]).unwrap();
    let u = GridFunction::new(g, vec![0.2, -0.9, 0.4, 1.3, -0.2, 0.5], Extension::LinearToZeroAtOrigin).unwrap();
    for p in [1.5, 2.0, 3.0] {
        let exact = hardy::improved_lhs(&u, p).unwrap();
        let brute = brute_force_improved(&u, p);
        assert!((exact - brute).abs() <= 1e-8 * exact, "p={p}: {exact} vs {brute}");
    }
}

#[test]
fn integral_form_examples() {
    let f = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
    assert!((hardy::integral_form_lhs(&f, 2.0).unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(hardy::integral_form_lhs(&StepFunction::zero(), 2.0).unwrap(), 0.0);
    // a nonnegative f gives the improved lhs of its primitive
    let f = StepFunction::on_cells(&[0.5, 1.0, 3.0, 4.0], &[2.0, 0.5, 1.0]).unwrap();
    let u = GridFunction::new(
        LogGrid::new(vec![0.5, 1.0, 3.0, 4.0]).unwrap(),
        vec![0.0, 1.0, 2.0, 3.0],
        Extension::LinearToZeroAtOrigin,
    )
    .unwrap();
    let a = hardy::integral_form_lhs(&f, 2.0).unwrap();
    let b = hardy::improved_lhs(&u, 2.0).unwrap();
    assert!((a - b).abs() <= 1e-12 * b);
}

#[test]
fn rearrangement_fixed_point() {
    let f = StepFunction::new(vec![0.0, 1.0, 2.5, 3.0], vec![4.0, 2.0, 1.0, 0.0]).unwrap();
    assert_eq!(hardy::decreasing_rearrangement(&f).fstar, f);
}

#[test]
fn kernel_identity_zero() {
    assert_eq!(hardy::sup_kernel_identity_check(&StepFunction::zero(), 3.0).unwrap(), (0.0, 0.0));
}

fn random_u(vals: Vec<f64>, lo: f64, span: f64) -> GridFunction {
    let g = LogGrid::geometric(lo, lo * span, vals.len()).unwrap();
    GridFunction::new(g, vals, Extension::LinearToZeroAtOrigin).unwrap()
}

fn step_strategy() -> impl Strategy<Value = StepFunction> {
    prop::collection::vec((0.01f64..2.0, -3.0f64..3.0), 1..40).prop_map(|cells| {
        let mut breaks = vec![0.1];
        let mut values = Vec::new();
        for (len, v) in cells {
            breaks.push(breaks.last().unwrap() + len);
            values.push(v);
        }
        values.push(0.0);
        StepFunction::new(breaks, values).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn improved_dominates_and_obeys_the_bound(
        vals in prop::collection::vec(-1.0f64..1.0, 2..60),
        lo in 1e-3f64..1.0,
        span in 2.0f64..1e4,
        pi in 0usize..3,
    ) {
        let p = [1.5, 2.0, 3.0][pi];
        let u = random_u(vals, lo, span);
        let h = hardy::hardy_integrals(&u, p).unwrap();
        prop_assert!(h.improved >= h.classical && h.improved >= h.left && h.improved >= h.right);
        prop_assert!(h.left >= h.classical * (1.0 - 1e-12) && h.right >= h.classical * (1.0 - 1e-12));
        let bound = hardy::sharp_factor(p) * lp_energy(&u, p, None).unwrap().value;
        prop_assert!(h.improved <= bound * (1.0 + 1e-9));
    }

    #[test]
    fn boundary_lemma(vals in prop::collection::vec(-1.0f64..1.0, 2..50), lo in 1e-2f64..1.0) {
        let mut vals = vals;
        vals[0] = 0.0;
        let g = LogGrid::geometric(lo, lo * 1e3, vals.len()).unwrap();
        let u = GridFunction::new(g, vals, Extension::ZeroOutside).unwrap();
        let cells = lp_energy_profile(&u, 2.0);
        let mut energy = 0.0;
        for (i, &r) in u.nodes().iter().enumerate().skip(1) {
            energy += cells[i - 1];
            let v = u.values()[i];
            prop_assert!(v * v / r <= energy * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn rearrangement_contract(f in step_strategy(), p in 1.1f64..4.0) {
        let r = hardy::decreasing_rearrangement(&f);
        // same multiset of (value, length) cells
        let mut before: Vec<(f64, f64)> = hardy::level_cells(&f).iter().map(|c| (c.value, c.length)).collect();
        let mut after: Vec<(f64, f64)> = r.cells.iter().map(|c| (c.value, c.length)).collect();
        before.sort_by(|a, b| a.partial_cmp(b).unwrap());
        after.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert_eq!(&before, &after);
        prop_assert_eq!(hardy::cells_lp_norm_p(&hardy::level_cells(&f), p), hardy::cells_lp_norm_p(&r.cells, p));
        // ∫_0^s |f| <= ∫_0^s f* at every break of either function
        let af = f.abs();
        for &s in f.breaks().iter().chain(r.fstar.breaks()) {
            prop_assert!(af.primitive(s) <= r.fstar.primitive(s) * (1.0 + 1e-12) + 1e-12);
        }
        let lhs_f = hardy::integral_form_lhs(&af, p).unwrap();
        let lhs_star = hardy::integral_form_lhs(&r.fstar, p).unwrap();
        prop_assert!(lhs_f <= lhs_star * (1.0 + 1e-9));
    }

    #[test]
    fn kernel_identity_on_nonincreasing(f in step_strategy(), r in 0.01f64..50.0) {
        let fstar = hardy::decreasing_rearrangement(&f).fstar;
        let (lhs, rhs) = hardy::sup_kernel_identity_check(&fstar, r).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }
}
