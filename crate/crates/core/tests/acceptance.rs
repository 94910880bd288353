//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hardylab::constants::{self, Anchor, ConstantVariant, Kind};
use hardylab::duality::{self, ExtremizerFamily};
use hardylab::gridfn::{Extension, GridFunction, LogGrid, StepFunction, Term, WeightSpec};
use hardylab::hardy;
use hardylab::schrodinger::{self, OutsideOptions, PruferOptions, RadialPotential, Status};
use hardylab::sharp::{self, EstimatorConfig};
use hardylab::transform;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

fn sorted_breaks(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut b: Vec<f64> = (0..n).map(|_| log_uniform(rng, lo, hi)).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// Piecewise power weight, integrable at the origin.
fn random_weight(rng: &mut StdRng, tail: std::ops::Range<f64>) -> WeightSpec {
    let k = rng.gen_range(1..=3);
    let cuts = sorted_breaks(rng, k - 1, 0.05, 20.0);
    let mut edges = vec![0.0];
    edges.extend(cuts);
    edges.push(f64::INFINITY);
    let mut pieces = Vec::new();
    for i in 0..edges.len() - 1 {
        if i > 0 && rng.gen_bool(0.2) {
            continue;
        }
        let a = if i == 0 { rng.gen_range(-0.9..1.0) } else { rng.gen_range(tail.clone()) };
        pieces.push((edges[i], edges[i + 1], vec![Term::new(log_uniform(rng, 0.1, 10.0), a, 0.0)]));
    }
    WeightSpec::piecewise(pieces).unwrap()
}

fn random_v(rng: &mut StdRng, p: f64) -> WeightSpec {
    if rng.gen_bool(0.3) {
        WeightSpec::constant(log_uniform(rng, 0.1, 10.0))
    } else {
        WeightSpec::power(log_uniform(rng, 0.1, 10.0), rng.gen_range(-0.5..0.8 * (p - 1.0)))
    }
}

fn random_u(rng: &mut StdRng, lo: f64, hi: f64, n: usize) -> GridFunction {
    let grid = LogGrid::geometric(lo, hi, n).unwrap();
    let mut vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    vals[n - 1] = 0.0;
    GridFunction::new(grid, vals, Extension::LinearToZeroAtOrigin).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst_ratio: f64 = 0.0;
    let mut dominance_ok = true;
    let mut bound_ok = true;
    let mut count = 0;
    for p in [1.5, 2.0, 3.0] {
        for _ in 0..1000 {
            let grid = LogGrid::geometric(1e-4, 1e4, 200).unwrap();
            let vals: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = GridFunction::new(grid, vals, Extension::LinearToZeroAtOrigin).unwrap();
            let h = hardy::hardy_integrals(&u, p).unwrap();
            let e = hardylab::gridfn::lp_energy(&u, p, None).unwrap().value;
            let bound = hardy::sharp_factor(p) * e;
            worst_ratio = worst_ratio.max(h.improved / bound);
            bound_ok &= h.improved <= bound * (1.0 + 1e-9);
            dominance_ok &= h.improved >= h.classical;
            count += 1;
        }
    }
    outcome(
        bound_ok && dominance_ok,
        format!("{count} functions, max improved/bound {worst_ratio:.6}, improved >= classical everywhere: {dominance_ok}"),
    )
}

fn criterion_2() -> Outcome {
    let grid = LogGrid::new(vec![1.0, 2.0]).unwrap();
    let tent = GridFunction::new(grid, vec![1.0, 0.0], Extension::LinearToZeroAtOrigin).unwrap();
    let h = hardy::hardy_integrals(&tent, 2.0).unwrap();
    let classical = 1.0 + 3.0 - 4.0 * 2f64.ln();
    let ok = (h.classical - classical).abs() <= 1e-9 && (h.improved - 2.0).abs() <= 1e-9;
    outcome(ok, format!("classical {:.12} (want {classical:.12}), improved {:.12} (want 2)", h.classical, h.improved))
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [1.5f64, 2.0, 3.0] {
        let v = WeightSpec::constant(1.0);
        let w = WeightSpec::power(1.0, -p);
        let bo = constants::overline(&v, &w, p).unwrap();
        let bu = constants::underline(&v, &w, p).unwrap();
        let target = (p / (p - 1.0)).powf(p);
        ok &= rel(bo.value, 1.0 / (p - 1.0)) <= 1e-6
            && rel(bu.value, 1.0) <= 1e-6
            && rel(bo.upper_bound_on_c, target) <= 1e-6
            && rel(bu.upper_bound_on_c, target) <= 1e-6;
        parts.push(format!("p={p}: B̄={:.9} B̲={:.9}", bo.value, bu.value));
    }
    outcome(ok, parts.join(", "))
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut ok = true;
    let mut checked = 0;
    let mut infinite = 0;
    let mut worst: f64 = 0.0;
    for p in [1.5f64, 2.0, 3.0] {
        let ku = (p / (p - 1.0)).powf(p);
        let ko = p.powf(p) / (p - 1.0).powf(p - 1.0);
        for _ in 0..200 {
            let v = random_v(&mut rng, p);
            // tails at or below a_V - p keep most constants finite
            let av = v.segments()[0].terms[0].a;
            let w = random_weight(&mut rng, av - p - 1.0..av - p + 0.2);
            let bo = constants::overline(&v, &w, p).unwrap().value;
            let bu = constants::underline(&v, &w, p).unwrap().value;
            checked += 1;
            if bo.is_infinite() || bu.is_infinite() {
                infinite += 1;
                ok &= bo.is_infinite() && bu.is_infinite();
                continue;
            }
            ok &= bo <= ku * bu * (1.0 + 1e-9) + 1e-9 && bu <= ko * bo * (1.0 + 1e-9) + 1e-9;
            worst = worst.max(bo / (ku * bu)).max(bu / (ko * bo));
        }
    }
    outcome(ok, format!("{checked} weight pairs ({infinite} with both constants infinite), max ratio {worst:.6}"))
}

fn random_g(rng: &mut StdRng, n: usize) -> StepFunction {
    let breaks = sorted_breaks(rng, n, 1e-3, 1e3);
    let mut values: Vec<f64> = breaks.iter().map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..1.0) }).collect();
    *values.last_mut().unwrap() = 0.0;
    StepFunction::new(breaks, values).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut gap_worst: f64 = 0.0;
    for i in 0..1000 {
        let g = random_g(&mut rng, 500);
        let family = if i % 2 == 0 { ExtremizerFamily::Lower } else { ExtremizerFamily::Upper };
        let param = rng.gen_range(0.1..3.0);
        let d = duality::duality_gap(&g, family, param, g.breaks()).unwrap();
        gap_worst = gap_worst.max(rel(d.sup_pairing, d.functional_value));
    }
    let mut slack_worst: f64 = 0.0;
    for i in 0..1000 {
        let f = random_g(&mut rng, 60);
        let g = random_g(&mut rng, 60);
        let family = if i % 2 == 0 { ExtremizerFamily::Lower } else { ExtremizerFamily::Upper };
        let param = rng.gen_range(0.1..3.0);
        let slack = duality::pairing_bound_check(&f, &g, family, param).unwrap();
        let scale = f.pairing(&g).max(1e-300);
        slack_worst = slack_worst.min(slack / scale);
    }
    let unit = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
    let mu = duality::mu_lower(&unit, 0.5).unwrap();
    let ok = gap_worst <= 1e-10 && slack_worst >= -1e-10 && mu == f64::INFINITY;
    outcome(
        ok,
        format!("max relative gap {gap_worst:.2e} over 1000 g, min relative slack {slack_worst:.2e} over 1000 pairs, μ̲_α(1_(0,1)) = {mu}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut equi = true;
    let mut norms = true;
    let mut dominance = true;
    for _ in 0..300 {
        let breaks = sorted_breaks(&mut rng, 80, 1e-2, 1e2);
        let mut values: Vec<f64> = breaks.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();
        if rng.gen_bool(0.7) {
            *values.last_mut().unwrap() = 0.0;
        } else {
            *values.last_mut().unwrap() = rng.gen_range(-0.5..0.5);
        }
        let f = StepFunction::new(breaks, values).unwrap();
        let r = hardy::decreasing_rearrangement(&f);
        let key = |c: &hardy::Cell| (c.value.to_bits(), c.length.to_bits());
        let mut a: Vec<_> = hardy::level_cells(&f).iter().map(key).collect();
        let mut b: Vec<_> = r.cells.iter().map(key).collect();
        a.sort();
        b.sort();
        equi &= a == b;
        for p in [1.5, 2.0, 3.0] {
            norms &= hardy::cells_lp_norm_p(&hardy::level_cells(&f), p) == hardy::cells_lp_norm_p(&r.cells, p);
        }
        let fa = f.abs();
        for &x in f.breaks().iter().chain(r.fstar.breaks()) {
            let (lhs, rhs) = (fa.primitive(x), r.fstar.primitive(x));
            dominance &= lhs <= rhs * (1.0 + 1e-12);
        }
    }
    let mut kernel_worst: f64 = 0.0;
    for _ in 0..1000 {
        let breaks = sorted_breaks(&mut rng, 30, 1e-2, 1e2);
        let values: Vec<f64> = breaks.iter().map(|_| rng.gen_range(0.0..3.0)).collect();
        let f = StepFunction::new(breaks, values).unwrap();
        let fstar = hardy::decreasing_rearrangement(&f).fstar;
        let x = log_uniform(&mut rng, 1e-3, 1e3);
        let (lhs, rhs) = hardy::sup_kernel_identity_check(&fstar, x).unwrap();
        kernel_worst = kernel_worst.max(rel(lhs, rhs));
    }
    let ok = equi && norms && dominance && kernel_worst <= 1e-12;
    outcome(
        ok,
        format!("equimeasurable {equi}, p-norms identical {norms}, prefix dominance {dominance}, kernel identity max error {kernel_worst:.2e}"),
    )
}

/// `ν X = π - atan(2ν)` solved by bisection: the lowest mode of
/// `-u'' = μ u/r²` on `(eps, L)` with `u(eps) = 0`, `u'(L) = 0`, written as
/// `u = r^{1/2} sin(ν ln(r/eps))`; the constant is `1/(1/4 + ν²)`.
fn truncation_oracle(eps: f64, l: f64) -> f64 {
    let x = (l / eps).ln();
    let (mut a, mut b) = (1e-12, PI / x);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m * x - (PI - (2.0 * m).atan()) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let nu = 0.5 * (a + b);
    1.0 / (0.25 + nu * nu)
}

fn criterion_7() -> Outcome {
    let cfg = EstimatorConfig::new(2.0);
    let s = sharp::sandwich(&WeightSpec::constant(1.0), &WeightSpec::power(1.0, -2.0), &cfg).unwrap();
    let oracle = truncation_oracle(cfg.eps, cfg.l);
    let ok = (s.estimate - oracle).abs() <= 0.05 && s.lower <= s.estimate && s.estimate <= s.upper && s.converged;
    outcome(
        ok,
        format!(
            "estimate {:.6} vs oracle {oracle:.6}, sandwich {:.6} <= est <= {:.6}, {} iterations",
            s.estimate, s.lower, s.upper, s.iterations
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut sub_worst: f64 = 0.0;
    for i in 0..100 {
        let p = [1.5, 2.0, 3.0][i % 3];
        let v = random_v(&mut rng, p);
        let w = WeightSpec::power(log_uniform(&mut rng, 0.1, 10.0), rng.gen_range(-2.5..0.5));
        let u = random_u(&mut rng, 1e-2, 1e2, 40);
        let s = transform::substitute(&u, &v, &w, p).unwrap();
        sub_worst = sub_worst.max(rel(s.energy_r, s.energy_rho)).max(rel(s.mass_r, s.mass_rho));
    }
    let mut mirror_worst: f64 = 0.0;
    for i in 0..60 {
        let p = [1.5, 2.0, 3.0][i % 3];
        let v = random_v(&mut rng, p);
        let w = random_weight(&mut rng, -3.0..0.5);
        let (vi, wi) = transform::invert_halfline(&v, &w, p).unwrap();
        let direct = constants::overline(&v, &w, p).unwrap().value;
        let mirrored = constants::constant(&vi, &wi, p, ConstantVariant::full(Kind::Overline, Anchor::Infinity)).unwrap().value;
        if !(direct.is_infinite() && mirrored.is_infinite()) {
            mirror_worst = mirror_worst.max(rel(direct, mirrored));
        }
    }
    let mut peel_worst: f64 = 0.0;
    for d in [1, 3, 4, 5] {
        for _ in 0..10 {
            let u = random_u(&mut rng, 1.0, 1e3, 80);
            let pe = transform::peel_hardy(&u, d, 1.0).unwrap();
            peel_worst = peel_worst.max(rel(pe.lhs, pe.rhs));
        }
    }
    let ok = sub_worst <= 1e-6 && mirror_worst <= 1e-8 && peel_worst <= 1e-8;
    outcome(
        ok,
        format!("substitute max error {sub_worst:.2e}, mirror B̄ vs B̄' {mirror_worst:.2e}, peel identity {peel_worst:.2e}"),
    )
}

fn inverse_square(c: f64) -> RadialPotential {
    let q = WeightSpec::piecewise(vec![(1.0, f64::INFINITY, vec![Term::new(c, -2.0, 0.0)])]).unwrap();
    RadialPotential::new(q, 3).unwrap()
}

fn criterion_9() -> Outcome {
    let ladder = [1e2, 1e3, 1e4];
    let o = PruferOptions::default();
    let sub = inverse_square(0.2);
    let cert = schrodinger::certify_finiteness(&sub, &Default::default()).unwrap();
    let totals: Vec<u64> = ladder
        .iter()
        .map(|&l| {
            (0..=8)
                .map(|ell| schrodinger::multiplicity(3, ell) * schrodinger::count_negative_eigenvalues_radial(&sub, ell, l, &o).unwrap().count)
                .sum()
        })
        .collect();
    let first = cert.status == Status::FiniteCertified && totals.windows(2).all(|w| w[0] == w[1]);

    let c = 0.35;
    let sup = inverse_square(c);
    let sectors: Vec<_> = ladder.iter().map(|&l| schrodinger::count_negative_eigenvalues_radial(&sup, 0, l, &o).unwrap()).collect();
    let counts: Vec<u64> = sectors.iter().map(|s| s.count).collect();
    let rate = (c - 0.25f64).sqrt() / PI * 10f64.ln();
    let increments: Vec<i64> = counts.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect();
    let second = increments.iter().all(|&k| k > 0 && ((k as f64) - rate).abs() <= 0.3 * rate);
    let phase_gain = (sectors[2].phase - sectors[0].phase) / 2.0;
    outcome(
        first && second,
        format!(
            "c=0.2: {:?}, totals {totals:?}; c=0.35: l=0 counts {counts:?}, oracle {rate:.4}/decade, mean phase gain {phase_gain:.4}/decade",
            cert.status
        ),
    )
}

fn criterion_10() -> Outcome {
    let p = inverse_square(0.25);
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [1e2, 1e3, 1e4] {
        let e = schrodinger::outside_form_nonnegativity(&p, 1.0, &OutsideOptions { truncation: t, per_decade: 64 }).unwrap();
        ok &= e >= -1e-8;
        parts.push(format!("L={t:e}: {e:.3e}"));
    }
    outcome(ok, format!("min eigenvalue {}", parts.join(", ")))
}

/// Name, check, and optional time limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<f64>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("improved Hardy inequality on random functions", criterion_1, Some(10.0)),
        ("strict improvement on the tent function", criterion_2, None),
        ("closed-form constants for W = r^-p", criterion_3, None),
        ("comparability of the two constants", criterion_4, None),
        ("duality identities and pairing bound", criterion_5, None),
        ("decreasing rearrangement", criterion_6, None),
        ("sharp-constant estimate for the inverse square weight", criterion_7, Some(30.0)),
        ("change-of-variables conservation", criterion_8, None),
        ("spectral thresholds for inverse square potentials", criterion_9, Some(60.0)),
        ("outside form at the critical coupling", criterion_10, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = run();
        let secs = t.elapsed().as_secs_f64();
        let in_time = limit.is_none_or(|l| secs < l);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map(|l| format!(" (limit {l} s)")).unwrap_or_default();
        println!(
            "[{}] {:>2} {name}: {}; {secs:.2} s{budget}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
