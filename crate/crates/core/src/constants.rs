//! Muckenhoupt–Tomaselli type constants `B̄`, `B̲` for the doubly weighted
//! inequality `∫W|u|^p <= C ∫V|u'|^p`, in all anchor/interval variants.
//!
//! Every variant is evaluated on a domain `(lo, hi)` with an anchor end
//! (where `u` is pinned) and a far end. With `U = V^{-1/(p-1)}` and
//! `Φ(s) = M + |∫_anchor^s U|`,
//!
//! * overline:  `sup_s Φ(s)^{p-1} |∫_s^far W|`
//! * underline: `sup_s Φ(s)^{-1} |∫_anchor^s W Φ^p|`
//!
//! The origin anchor gives the constants of the half-line inequality and its
//! interval corollaries; the infinity anchor gives the mirrored ones.
//! Weights are extended by zero outside the domain.

use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, input, precondition, Result};
use crate::gridfn::integrate::integrate_with_unchecked;
use crate::gridfn::{integrate, integrate_with, lp_energy, weighted_mass, GridFunction, WeightSpec};
use crate::real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Overline,
    Underline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Origin,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Interval {
    Full,
    /// `(0, R)`
    OriginInterval { r: f64 },
    /// `(R, ∞)`
    TailInterval { r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantVariant {
    pub kind: Kind,
    pub anchor: Anchor,
    pub interval: Interval,
    /// Boundary offset, present exactly for the interval forms whose anchor
    /// is the interior endpoint `R`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
}

impl ConstantVariant {
    pub fn full(kind: Kind, anchor: Anchor) -> Self {
        ConstantVariant { kind, anchor, interval: Interval::Full, m: None }
    }

    pub fn needs_m(&self) -> bool {
        matches!(
            (self.anchor, self.interval),
            (Anchor::Origin, Interval::TailInterval { .. }) | (Anchor::Infinity, Interval::OriginInterval { .. })
        )
    }

    fn validate(&self) -> Result<()> {
        match self.interval {
            Interval::Full => {}
            Interval::OriginInterval { r } | Interval::TailInterval { r } => {
                if !(r > 0.0) || !r.is_finite() {
                    return input(format!("interval radius R = {r} must be finite and positive"));
                }
            }
        }
        match (self.needs_m(), self.m) {
            (true, None) => input("this interval variant needs a boundary offset M"),
            (true, Some(m)) if !(m > 0.0) || !m.is_finite() => input(format!("M = {m} must be finite and positive")),
            (false, Some(_)) => input("M only applies to the interval variants anchored at R"),
            _ => Ok(()),
        }
    }

    /// Prefactor turning the constant into a bound on the best `C`.
    pub fn prefactor(&self, p: f64) -> f64 {
        match self.kind {
            Kind::Overline => p.powf(p) / (p - 1.0).powf(p - 1.0),
            Kind::Underline => (p / (p - 1.0)).powf(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantResult {
    #[serde(with = "real")]
    pub value: f64,
    #[serde(with = "real")]
    pub argmax_s: f64,
    pub variant: ConstantVariant,
    #[serde(rename = "upper_bound_on_C", with = "real")]
    pub upper_bound_on_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Objective {
    Over,
    Under,
    Sum,
}

/// Domain, anchor, offset and the reciprocal power of `V`.
struct Setup {
    lo: f64,
    hi: f64,
    anchor_at_lo: bool,
    m0: f64,
    p: f64,
    u: WeightSpec,
    w: WeightSpec,
}

fn between(w: &WeightSpec, x: f64, y: f64) -> f64 {
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    integrate(w, a, b).map(|q| q.value).unwrap_or(f64::INFINITY)
}

impl Setup {
    fn new(v: &WeightSpec, w: &WeightSpec, p: f64, variant: &ConstantVariant) -> Result<Self> {
        check_exponent(p)?;
        variant.validate()?;
        let (lo, hi) = match variant.interval {
            Interval::Full => (0.0, f64::INFINITY),
            Interval::OriginInterval { r } => (0.0, r),
            Interval::TailInterval { r } => (r, f64::INFINITY),
        };
        let setup = Setup {
            lo,
            hi,
            anchor_at_lo: variant.anchor == Anchor::Origin,
            m0: variant.m.unwrap_or(0.0),
            p,
            u: v.power_of_inverse(p)?,
            w: w.restricted(lo, hi),
        };
        setup.check_hypothesis()?;
        Ok(setup)
    }

    fn anchor(&self) -> f64 {
        if self.anchor_at_lo {
            self.lo
        } else {
            self.hi
        }
    }

    fn far(&self) -> f64 {
        if self.anchor_at_lo {
            self.hi
        } else {
            self.lo
        }
    }

    /// `∫ U` must be finite between the anchor and every interior point.
    fn check_hypothesis(&self) -> Result<()> {
        for s in self.u.segments() {
            let x = s.lo.max(self.lo);
            let y = s.hi.min(self.hi);
            if x >= y {
                continue;
            }
            // the far end may diverge; trim a neighbourhood of it
            let (x, y) = if self.anchor_at_lo && y == self.hi {
                if y.is_infinite() {
                    (x, (2.0 * x).max(2.0))
                } else {
                    (x, y - 1e-6 * (y - x))
                }
            } else if !self.anchor_at_lo && x == self.lo {
                if x == 0.0 {
                    ((0.5 * y).min(0.5), y)
                } else {
                    (x + 1e-6 * (y - x), y)
                }
            } else {
                (x, y)
            };
            if !between(&self.u, x, y).is_finite() {
                let side = if self.anchor_at_lo { "from the left end" } else { "up to the right end" };
                return precondition(format!(
                    "V^(-1/(p-1)) is not integrable {side} on ({}, {}); the hypothesis of the inequality fails",
                    s.lo.max(self.lo),
                    s.hi.min(self.hi)
                ));
            }
        }
        Ok(())
    }

    /// Radii where the integrands change form.
    fn interesting_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .u
            .kinks()
            .into_iter()
            .chain(self.w.kinks())
            .chain(std::iter::once(1.0))
            .filter(|&r| r > self.lo && r < self.hi)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Running values of `Φ`, the far integral `T(s) = |∫_s^far W|` and the
/// anchored integral `I(s) = |∫_anchor^s W Φ^p|` on a grid ordered from the
/// anchor outward.
struct Profile<'a> {
    setup: &'a Setup,
    s: Vec<f64>,
    phi: Vec<f64>,
    t: Vec<f64>,
    i: Vec<f64>,
}

impl<'a> Profile<'a> {
    fn build(setup: &'a Setup, mut s: Vec<f64>, want_i: bool) -> Self {
        if !setup.anchor_at_lo {
            s.reverse();
        }
        let n = s.len();
        let a = setup.anchor();
        let mut phi = Vec::with_capacity(n);
        let mut i_acc = Vec::with_capacity(n);
        phi.push(setup.m0 + between(&setup.u, a, s[0]));
        if want_i {
            let first = if a == 0.0 || a.is_infinite() {
                if end_mass_converges(setup) {
                    let g = |t: f64| between(&setup.u, a, t).powf(setup.p);
                    let (x, y) = if a == 0.0 { (0.0, s[0]) } else { (s[0], a) };
                    integrate_with_unchecked(&setup.w, x, y, g).map(|q| q.value).unwrap_or(f64::INFINITY)
                } else {
                    f64::INFINITY
                }
            } else {
                anchored_mass(setup, a, setup.m0, s[0])
            };
            i_acc.push(first);
        }
        for k in 1..n {
            let prev = phi[k - 1];
            phi.push(prev + between(&setup.u, s[k - 1], s[k]));
            if want_i {
                let inc = anchored_mass(setup, s[k - 1], prev, s[k]);
                i_acc.push(i_acc[k - 1] + inc);
            }
        }
        let mut t = vec![0.0; n];
        t[n - 1] = between(&setup.w, s[n - 1], setup.far());
        for k in (0..n - 1).rev() {
            t[k] = t[k + 1] + between(&setup.w, s[k], s[k + 1]);
        }
        Profile { setup, s, phi, t, i: i_acc }
    }

    fn objective_at(&self, k: usize, obj: Objective) -> f64 {
        combine(self.setup.p, self.phi[k], self.t[k], self.i.get(k).copied().unwrap_or(0.0), obj)
    }

    /// Objective at an arbitrary radius between grid points `k` and `k+1`.
    fn objective_between(&self, k: usize, x: f64, obj: Objective) -> f64 {
        let st = self.setup;
        let phi = self.phi[k] + between(&st.u, self.s[k], x);
        let t = self.t[k + 1] + between(&st.w, x, self.s[k + 1]);
        let i = if obj == Objective::Over { 0.0 } else { self.i[k] + anchored_mass(st, self.s[k], self.phi[k], x) };
        combine(st.p, phi, t, i, obj)
    }
}

fn combine(p: f64, phi: f64, t: f64, i: f64, obj: Objective) -> f64 {
    let over = || if t == 0.0 { 0.0 } else { phi.powf(p - 1.0) * t };
    let under = || if i == 0.0 { 0.0 } else { i / phi };
    match obj {
        Objective::Over => over(),
        Objective::Under => under(),
        Objective::Sum => over() + under(),
    }
}

/// Whether `∫ W Φ^p` converges at an anchor end `0` or `∞`, decided from the
/// leading power-log behaviour of `Φ` and `W` there.
fn end_mass_converges(st: &Setup) -> bool {
    let at_zero = st.anchor() == 0.0;
    let pick = |w: &WeightSpec| {
        let segs = w.segments();
        if at_zero {
            segs[0].clone()
        } else {
            segs[segs.len() - 1].clone()
        }
    };
    let useg = pick(&st.u);
    let wseg = pick(&st.w);
    if wseg.terms.is_empty() {
        return true;
    }
    // Φ(t) ≍ t^e |ln t|^f near the end
    let (e, f) = match useg.terms.first() {
        None => return true,
        Some(t) if t.a == -1.0 => (0.0, t.b + 1.0),
        Some(t) => (t.a + 1.0, t.b),
    };
    wseg.terms.iter().all(|t| {
        let a = t.a + st.p * e;
        let b = t.b + st.p * f;
        if a == -1.0 {
            b < -1.0
        } else if at_zero {
            a > -1.0
        } else {
            a < -1.0
        }
    })
}

/// `|∫_x^y W Φ^p|` where `Φ(t) = phi_x + |∫_x^t U|`.
fn anchored_mass(st: &Setup, x: f64, phi_x: f64, y: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    if !integrate(&st.w, a, b).map(|q| q.value > 0.0).unwrap_or(true) {
        return 0.0;
    }
    let g = |t: f64| (phi_x + between(&st.u, x, t)).powf(st.p);
    integrate_with(&st.w, a, b, g).map(|q| q.value).unwrap_or(f64::INFINITY)
}

/// Growth `e^{αx} x^β` in `x = |ln s|` as `s` tends to an end of the
/// half-line; `None` means identically zero there.
type Growth = Option<(f64, f64)>;

const GROWTH_TOL: f64 = 1e-9;
// ∫ dx/x grows like ln x; weaker than any power of x
const LOG_LOG: f64 = 1e-6;

fn end_growth(w: &WeightSpec, at_zero: bool) -> Growth {
    let segs = w.segments();
    let seg = if at_zero { segs.first() } else { segs.last() }?;
    if (at_zero && seg.lo != 0.0) || (!at_zero && seg.hi.is_finite()) {
        return None;
    }
    seg.terms
        .iter()
        .filter(|t| t.c != 0.0)
        .map(|t| (if at_zero { -t.a } else { t.a }, t.b))
        .max_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)))
}

/// Density against `dx` of a function of `s`.
fn with_measure(g: Growth, at_zero: bool) -> Growth {
    g.map(|(a, b)| (if at_zero { a - 1.0 } else { a + 1.0 }, b))
}

/// `∫_fixed^s` as `s` runs to the end.
fn toward(d: Growth) -> Growth {
    Some(match d {
        Some((a, b)) if a > GROWTH_TOL => (a, b),
        Some((a, b)) if a.abs() <= GROWTH_TOL && b > -1.0 + GROWTH_TOL => (0.0, b + 1.0),
        Some((a, b)) if a.abs() <= GROWTH_TOL && (b + 1.0).abs() <= GROWTH_TOL => (0.0, LOG_LOG),
        _ => (0.0, 0.0),
    })
}

/// `∫_s^end`; infinite when it diverges.
fn tail(d: Growth) -> Growth {
    d.map(|(a, b)| {
        if a < -GROWTH_TOL {
            (a, b)
        } else if a.abs() <= GROWTH_TOL && b < -1.0 - GROWTH_TOL {
            (0.0, b + 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    })
}

fn times(g: Growth, h: Growth) -> Growth {
    let (a, b) = g?;
    let (c, d) = h?;
    Some((a + c, b + d))
}

fn power(g: Growth, k: f64) -> Growth {
    g.map(|(a, b)| (k * a, k * b))
}

fn grows(g: Growth) -> bool {
    matches!(g, Some((a, b)) if a > GROWTH_TOL || (a.abs() <= GROWTH_TOL && b > GROWTH_TOL))
}

/// Whether the objective is unbounded towards the end `0` or `∞`, read off
/// from the leading power-log terms of `V^{-1/(p-1)}` and `W` there.
fn unbounded_at(st: &Setup, obj: Objective, at_zero: bool) -> bool {
    let is_anchor = (st.anchor() == 0.0) == at_zero;
    let ug = with_measure(end_growth(&st.u, at_zero), at_zero);
    let wg = end_growth(&st.w, at_zero);
    let phi = if !is_anchor {
        toward(ug)
    } else if st.m0 > 0.0 {
        Some((0.0, 0.0))
    } else {
        tail(ug)
    };
    let t = if is_anchor { toward(with_measure(wg, at_zero)) } else { tail(with_measure(wg, at_zero)) };
    let dens = with_measure(times(wg, power(phi, st.p)), at_zero);
    let i = if is_anchor { tail(dens) } else { toward(dens) };
    let over = times(power(phi, st.p - 1.0), t);
    let under = times(i, power(phi, -1.0));
    match obj {
        Objective::Over => grows(over),
        Objective::Under => grows(under),
        Objective::Sum => grows(over) || grows(under),
    }
}

const PER_DECADE: f64 = 512.0;
const PAD_DECADES: f64 = 6.0;
const MAX_DECADES: f64 = 150.0;

fn log_grid(lo: f64, hi: f64) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * PER_DECADE).ceil().max(1.0) as usize;
    let q = (hi / lo).ln() / n as f64;
    (0..=n).map(|k| lo * (q * k as f64).exp()).collect()
}

fn candidate_radii(st: &Setup, pad_lo: f64, pad_hi: f64) -> Vec<f64> {
    let pts = st.interesting_points();
    let (pmin, pmax) = if pts.is_empty() { (1.0, 1.0) } else { (pts[0], pts[pts.len() - 1]) };
    let smin = if st.lo > 0.0 { st.lo } else { pmin * 10f64.powf(-pad_lo) };
    let smax = if st.hi.is_finite() { st.hi } else { pmax * 10f64.powf(pad_hi) };
    let mut s = log_grid(smin, smax);
    s.extend(pts);
    let far = st.far();
    if far > 0.0 && far.is_finite() {
        // the far end is excluded but approached geometrically
        s.retain(|&x| x != far);
        let dir = if far == st.hi { -1.0 } else { 1.0 };
        for j in 16..=192 {
            s.push(far * (1.0 + dir * 10f64.powf(-(j as f64) / 16.0)));
        }
    }
    s.retain(|&x| x > st.lo && x < st.hi || (x == st.anchor() && st.m0 > 0.0));
    let anchor = st.anchor();
    if anchor > 0.0 && anchor.is_finite() && st.m0 > 0.0 && !s.contains(&anchor) {
        s.push(anchor);
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

/// Maximizes the objective over the candidate grid and refines the best
/// bracket by golden-section search in `ln s`.
fn maximize(st: &Setup, obj: Objective) -> (f64, f64) {
    if st.lo == 0.0 && unbounded_at(st, obj, true) {
        return (f64::INFINITY, 0.0);
    }
    if st.hi.is_infinite() && unbounded_at(st, obj, false) {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut pad_lo = PAD_DECADES;
    let mut pad_hi = PAD_DECADES;
    loop {
        let s = candidate_radii(st, pad_lo, pad_hi);
        let prof = Profile::build(st, s, obj != Objective::Over);
        let n = prof.s.len();
        let vals: Vec<f64> = (0..n).map(|k| prof.objective_at(k, obj)).collect();
        let mut best = 0;
        for k in 1..n {
            if vals[k] > vals[best] || vals[best].is_nan() {
                best = k;
            }
        }
        let vbest = vals[best];
        if vbest.is_infinite() {
            return (f64::INFINITY, prof.s[best]);
        }
        // grow the window when the maximum sits at a free end and still rises
        let lo_free = st.lo == 0.0;
        let hi_free = st.hi.is_infinite();
        let first_is_lo = st.anchor_at_lo;
        let at_end = |k: usize| k == 0 || k == n - 1;
        if at_end(best) && n > 1 {
            let nb = if best == 0 { 1 } else { n - 2 };
            let rising = vals[best] > vals[nb] * (1.0 + 1e-12);
            let end_is_lo = (best == 0) == first_is_lo;
            let free = if end_is_lo { lo_free } else { hi_free };
            let pad = if end_is_lo { &mut pad_lo } else { &mut pad_hi };
            if rising && free && *pad < MAX_DECADES {
                *pad = (*pad + 24.0).min(MAX_DECADES);
                continue;
            }
        }
        return refine(&prof, &vals, best, obj);
    }
}

fn refine(prof: &Profile, vals: &[f64], best: usize, obj: Objective) -> (f64, f64) {
    let n = prof.s.len();
    let mut value = vals[best];
    let mut arg = prof.s[best];
    for k in [best.wrapping_sub(1), best] {
        if k >= n - 1 {
            continue;
        }
        let (a, b) = (prof.s[k], prof.s[k + 1]);
        let f = |x: f64| prof.objective_between(k, x, obj);
        let (x, v) = golden_max(f, a, b);
        if v > value {
            value = v;
            arg = x;
        }
    }
    (value, arg)
}

/// Golden-section maximization on `[a, b]` in the logarithmic variable.
fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a.min(b).ln(), a.max(b).ln());
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1.exp());
    let mut f2 = f(x2.exp());
    for _ in 0..60 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1.exp());
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2.exp());
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    if f1 >= f2 {
        (x1.exp(), f1)
    } else {
        (x2.exp(), f2)
    }
}

/// The constant of the given variant for the pair `(V, W)`.
pub fn constant(v: &WeightSpec, w: &WeightSpec, p: f64, variant: ConstantVariant) -> Result<ConstantResult> {
    let st = Setup::new(v, w, p, &variant)?;
    let prefactor = variant.prefactor(p);
    if st.w.is_zero() {
        return Ok(ConstantResult { value: 0.0, argmax_s: 1.0, variant, upper_bound_on_c: 0.0 });
    }
    let obj = match variant.kind {
        Kind::Overline => Objective::Over,
        Kind::Underline => Objective::Under,
    };
    let (value, argmax_s) = maximize(&st, obj);
    Ok(ConstantResult { value, argmax_s, variant, upper_bound_on_c: value * prefactor })
}

/// `B̄` on the half-line, origin anchor.
pub fn overline(v: &WeightSpec, w: &WeightSpec, p: f64) -> Result<ConstantResult> {
    constant(v, w, p, ConstantVariant::full(Kind::Overline, Anchor::Origin))
}

/// `B̲` on the half-line, origin anchor.
pub fn underline(v: &WeightSpec, w: &WeightSpec, p: f64) -> Result<ConstantResult> {
    constant(v, w, p, ConstantVariant::full(Kind::Underline, Anchor::Origin))
}

/// Lower bound on any admissible constant `C`, from testing the inequality
/// against `u_s(r) = ∫_0^min(r,s) V^{-1/(p-1)}`: the supremum over `s` of the
/// sum of the two objectives.
pub fn converse_lower_bound(v: &WeightSpec, w: &WeightSpec, p: f64) -> Result<f64> {
    let variant = ConstantVariant::full(Kind::Overline, Anchor::Origin);
    let st = Setup::new(v, w, p, &variant)?;
    if st.w.is_zero() {
        return Ok(0.0);
    }
    Ok(maximize(&st, Objective::Sum).0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparability {
    pub ok: bool,
    #[serde(with = "real")]
    pub overline: f64,
    #[serde(with = "real")]
    pub underline: f64,
    /// `B̄ / ((p/(p-1))^p B̲)` and `B̲ / (p^p/(p-1)^{p-1} B̄)`; each must be at most 1.
    #[serde(with = "real::vec")]
    pub ratios: Vec<f64>,
}

/// Checks `B̄ <= (p/(p-1))^p B̲` and `B̲ <= p^p/(p-1)^{p-1} B̄`.
pub fn comparability_check(v: &WeightSpec, w: &WeightSpec, p: f64) -> Result<Comparability> {
    let bo = overline(v, w, p)?.value;
    let bu = underline(v, w, p)?.value;
    let k_under = (p / (p - 1.0)).powf(p);
    let k_over = p.powf(p) / (p - 1.0).powf(p - 1.0);
    let ratio = |num: f64, den: f64| {
        if num == 0.0 {
            0.0
        } else {
            num / den
        }
    };
    let r1 = ratio(bo, k_under * bu);
    let r2 = ratio(bu, k_over * bo);
    let ok = if bo.is_infinite() || bu.is_infinite() {
        bo.is_infinite() && bu.is_infinite()
    } else {
        bo <= k_under * bu * (1.0 + 1e-9) + 1e-300 && bu <= k_over * bo * (1.0 + 1e-9) + 1e-300
    };
    Ok(Comparability { ok, overline: bo, underline: bu, ratios: vec![r1, r2] })
}

/// Both sides of the doubly weighted inequality for one function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedReport {
    pub p: f64,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub energy: f64,
    pub overline: ConstantResult,
    pub underline: ConstantResult,
    #[serde(with = "real")]
    pub bound_overline: f64,
    #[serde(with = "real")]
    pub bound_underline: f64,
    pub holds_overline: bool,
    pub holds_underline: bool,
}

fn bound(c: f64, energy: f64) -> f64 {
    if c == 0.0 || energy == 0.0 {
        0.0
    } else {
        c * energy
    }
}

pub fn verify_weighted(u: &GridFunction, p: f64, v: &WeightSpec, w: &WeightSpec) -> Result<WeightedReport> {
    if !u.vanishes_at_origin() {
        return precondition("u must vanish at the origin");
    }
    let lhs = weighted_mass(u, p, w)?.value;
    let energy = lp_energy(u, p, Some(v))?.value;
    let over = overline(v, w, p)?;
    let under = underline(v, w, p)?;
    let bo = bound(over.upper_bound_on_c, energy);
    let bu = bound(under.upper_bound_on_c, energy);
    Ok(WeightedReport {
        p,
        lhs,
        energy,
        overline: over,
        underline: under,
        bound_overline: bo,
        bound_underline: bu,
        holds_overline: lhs <= bo * (1.0 + 1e-9),
        holds_underline: lhs <= bu * (1.0 + 1e-9),
    })
}
