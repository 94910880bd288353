//! Integrals of power-log weights, exact where a closed form exists.

use super::quad::{self, QuadOptions, Quadrature};
use super::weight::{Term, WeightSpec};
use crate::error::{input, Result};

/// `∫_lo^hi W(r) dr` for `0 <= lo <= hi <= ∞`. Divergence is reported as
/// an infinite value, never as an error.
pub fn integrate(w: &WeightSpec, lo: f64, hi: f64) -> Result<Quadrature> {
    check_range(lo, hi)?;
    let mut total = Quadrature::ZERO;
    for s in w.segments() {
        let x = s.lo.max(lo);
        let y = s.hi.min(hi);
        if x >= y {
            continue;
        }
        for t in &s.terms {
            total = total + term_integral(t, x, y);
            if total.is_divergent() {
                return Ok(total);
            }
        }
    }
    Ok(total)
}

/// `∫_lo^hi W(r)·g(r) dr` for a continuous, bounded `g`. Divergence is
/// decided from `W` alone.
pub fn integrate_with<G: Fn(f64) -> f64>(w: &WeightSpec, lo: f64, hi: f64, g: G) -> Result<Quadrature> {
    check_range(lo, hi)?;
    let mut total = Quadrature::ZERO;
    for s in w.segments() {
        let x = s.lo.max(lo);
        let y = s.hi.min(hi);
        if x >= y {
            continue;
        }
        for t in &s.terms {
            if t.c == 0.0 {
                continue;
            }
            if term_integral(t, x, y).is_divergent() {
                return Ok(Quadrature::divergent());
            }
            total = total + term_integral_with(t, x, y, &g);
        }
    }
    Ok(total)
}

/// As [`integrate_with`], but leaves convergence to the caller: `g` may
/// vanish fast enough at an end where `W` alone is not integrable.
pub fn integrate_with_unchecked<G: Fn(f64) -> f64>(w: &WeightSpec, lo: f64, hi: f64, g: G) -> Result<Quadrature> {
    check_range(lo, hi)?;
    let mut total = Quadrature::ZERO;
    for s in w.segments() {
        let x = s.lo.max(lo);
        let y = s.hi.min(hi);
        if x < y {
            for t in &s.terms {
                total = total + term_integral_with(t, x, y, &g);
            }
        }
    }
    Ok(total)
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo >= 0.0) || !(hi >= lo) || lo.is_infinite() {
        return input(format!("integration range ({lo}, {hi}) is not 0 <= lo <= hi"));
    }
    Ok(())
}

/// Whether `∫_x^y c·r^a·|ln r|^b dr` diverges, for `c > 0`.
fn term_diverges(t: &Term, x: f64, y: f64) -> bool {
    let (a, b) = (t.a, t.b);
    let log_tail_ok = a == -1.0 && b < -1.0;
    if y.is_infinite() && !(a < -1.0 || log_tail_ok) {
        return true;
    }
    if x == 0.0 && !(a > -1.0 || log_tail_ok) {
        return true;
    }
    b <= -1.0 && x <= 1.0 && 1.0 <= y
}

/// `∫_x^y c·r^a·|ln r|^b dr` over a range inside one segment.
pub fn term_integral(t: &Term, x: f64, y: f64) -> Quadrature {
    if t.c == 0.0 || x >= y {
        return Quadrature::ZERO;
    }
    if t.c.is_infinite() || term_diverges(t, x, y) {
        return Quadrature::divergent();
    }
    let (a, b) = (t.a, t.b);
    if b == 0.0 {
        return Quadrature::exact(t.c * power_integral(a, x, y));
    }
    if a == -1.0 {
        // ∫ |s|^b ds in s = ln r
        let (s1, s2) = (log_or_inf(x), log_or_inf(y));
        return Quadrature::exact(t.c * abs_power_integral(b, s1, s2));
    }
    // ∫ e^{(a+1)s} |s|^b ds, split at s = 0
    let k = a + 1.0;
    let g = move |s: f64| {
        let v = (k * s).exp() * s.abs().powf(b);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let opts = QuadOptions::default();
    let (s1, s2) = (log_or_inf(x), log_or_inf(y));
    let piece = |lo: f64, hi: f64| -> Quadrature {
        match (lo.is_infinite(), hi.is_infinite()) {
            (false, false) => quad::integrate(g, lo, hi, opts),
            (true, false) => quad::integrate_lower(g, hi, opts),
            (false, true) => quad::integrate_upper(g, lo, opts),
            (true, true) => quad::integrate_lower(g, 0.0, opts) + quad::integrate_upper(g, 0.0, opts),
        }
    };
    let q = if s1 < 0.0 && s2 > 0.0 { piece(s1, 0.0) + piece(0.0, s2) } else { piece(s1, s2) };
    q.scale(t.c)
}

fn log_or_inf(r: f64) -> f64 {
    if r == 0.0 {
        f64::NEG_INFINITY
    } else {
        r.ln()
    }
}

/// `∫_x^y r^a dr` for a convergent range.
fn power_integral(a: f64, x: f64, y: f64) -> f64 {
    if a == -1.0 {
        return (y / x).ln();
    }
    let k = a + 1.0;
    if x == 0.0 {
        return y.powf(k) / k;
    }
    if y.is_infinite() {
        return -x.powf(k) / k;
    }
    // x^k·(e^{k·ln(y/x)} - 1)/k keeps full accuracy on short ranges
    x.powf(k) * (k * (y / x).ln()).exp_m1() / k
}

/// `∫_{s1}^{s2} |s|^b ds` for a convergent range.
fn abs_power_integral(b: f64, s1: f64, s2: f64) -> f64 {
    if s1 < 0.0 && s2 > 0.0 {
        return abs_power_integral(b, s1, 0.0) + abs_power_integral(b, 0.0, s2);
    }
    let (u, v) = if s2 <= 0.0 { (-s2, -s1) } else { (s1, s2) };
    if b == -1.0 {
        return (v / u).ln();
    }
    let k = b + 1.0;
    if v.is_infinite() {
        return -u.powf(k) / k;
    }
    if u == 0.0 {
        return v.powf(k) / k;
    }
    u.powf(k) * (k * (v / u).ln()).exp_m1() / k
}

fn term_integral_with<G: Fn(f64) -> f64>(t: &Term, x: f64, y: f64, g: &G) -> Quadrature {
    let f = |r: f64| t.eval(r) * g(r);
    let opts = QuadOptions::default();
    if t.b != 0.0 && x < 1.0 && 1.0 < y {
        quad::integrate_radial(f, x, 1.0, opts) + quad::integrate_radial(f, 1.0, y, opts)
    } else {
        quad::integrate_radial(f, x, y, opts)
    }
}
