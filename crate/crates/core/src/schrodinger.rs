//! Negative spectrum of `-Δ - Q` for radial `Q ≥ 0`: Birman-type integral
//! conditions beyond a radius `R`, the outside quadratic form with its
//! Robin term, and an independent zero counter for each angular sector.

use serde::{Deserialize, Serialize};

use crate::error::{input, precondition, Result};
use crate::gridfn::integrate::term_integral;
use crate::gridfn::quad::kronrod_nodes;
use crate::gridfn::{integrate, GridFunction, LogGrid, Term, WeightSpec};
use crate::real;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    pub q: WeightSpec,
    pub d: u32,
}

impl RadialPotential {
    pub fn new(q: WeightSpec, d: u32) -> Result<Self> {
        if d == 0 {
            return input("dimension must be at least 1");
        }
        Ok(RadialPotential { q, d })
    }

    fn k(&self) -> f64 {
        (self.d as f64 - 2.0) / 2.0
    }
}

/// `c_R`: `1/R` for `d = 1`, `1/ln R` for `d = 2`, `0` for `d ≥ 3`.
pub fn robin_constant(d: u32, r: f64) -> f64 {
    match d {
        1 => 1.0 / r,
        2 => 1.0 / r.ln(),
        _ => 0.0,
    }
}

/// `c_R = (1/ln R - (d-2)/2) R^{d-2}`, the boundary term of the improved
/// route; `+inf` at `R = 1`.
pub fn improved_robin_constant(d: u32, r: f64) -> f64 {
    let k = (d as f64 - 2.0) / 2.0;
    (1.0 / r.ln() - k) * r.powf(d as f64 - 2.0)
}

/// A signed power-log sum `Σ c_j s^{a_j} |ln s|^{b_j}` on one segment.
#[derive(Debug, Clone)]
struct Combo {
    lo: f64,
    hi: f64,
    terms: Vec<(f64, f64, f64)>,
}

impl Combo {
    fn eval(&self, s: f64) -> f64 {
        self.terms.iter().map(|&(c, a, b)| c * s.powf(a) * s.ln().abs().powf(b)).sum()
    }

    fn is_nonnegative(&self) -> bool {
        self.terms.iter().all(|t| t.0 >= 0.0)
    }

    /// The term that dominates as `s → ∞`.
    fn dominant(&self) -> Option<(f64, f64, f64)> {
        self.terms.iter().copied().max_by(|x, y| x.1.total_cmp(&y.1).then(x.2.total_cmp(&y.2)))
    }

    /// `∫_x^y Σ c_j s^{a_j}|ln s|^{b_j}` on a range where the sum is positive.
    fn signed_integral(&self, x: f64, y: f64) -> f64 {
        let mut total = 0.0;
        for &(c, a, b) in &self.terms {
            let q = term_integral(&Term::new(1.0, a, b), x, y);
            if q.is_divergent() {
                return f64::INFINITY;
            }
            total += c * q.value;
        }
        total.max(0.0)
    }

    /// `∫_x^y (sum)_+` over a subrange of the segment.
    fn positive_integral(&self, x: f64, y: f64) -> f64 {
        if x >= y || self.terms.is_empty() {
            return 0.0;
        }
        if self.is_nonnegative() {
            return self.signed_integral(x, y);
        }
        let mut cuts = vec![x];
        let finite_end = if y.is_finite() { y } else { x * 1e16 };
        let n = ((finite_end / x).log10() * 64.0).ceil().max(8.0) as usize;
        let q = (finite_end / x).ln() / n as f64;
        let mut prev = (x, self.eval(x));
        for i in 1..=n {
            let s = if i == n { finite_end } else { x * (q * i as f64).exp() };
            let cur = (s, self.eval(s));
            if (prev.1 > 0.0) != (cur.1 > 0.0) {
                cuts.push(self.root(prev.0, cur.0));
            }
            prev = cur;
        }
        if y.is_infinite() {
            // the sign far out follows the dominant term; look for a last
            // change by doubling ln s
            let dom_pos = self.dominant().map(|t| t.0 > 0.0).unwrap_or(false);
            if (prev.1 > 0.0) != dom_pos {
                let mut t = prev.0.ln();
                let mut hi = prev.0;
                for _ in 0..12 {
                    t *= 2.0;
                    hi = t.exp();
                    if !hi.is_finite() || (self.eval(hi) > 0.0) == dom_pos {
                        break;
                    }
                }
                if hi.is_finite() && (self.eval(hi) > 0.0) == dom_pos {
                    cuts.push(self.root(prev.0, hi));
                }
            }
        }
        cuts.push(y);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a >= b {
                continue;
            }
            let mid = if b.is_finite() { (a * b).sqrt() } else { a * 2.0 };
            if self.eval(mid) > 0.0 {
                total += self.signed_integral(a, b);
            }
        }
        total
    }

    fn root(&self, a: f64, b: f64) -> f64 {
        let pos_a = self.eval(a) > 0.0;
        let (mut lo, mut hi) = (a.ln(), b.ln());
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if (self.eval(mid.exp()) > 0.0) == pos_a {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * lo.abs().max(1.0) {
                break;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

/// `s^e·Q(s) - k2·s^{e-2}` segment by segment, with equal exponents merged.
fn combos(q: &WeightSpec, e: f64, k2: f64) -> Vec<Combo> {
    q.segments()
        .iter()
        .map(|seg| {
            let mut terms: Vec<(f64, f64, f64)> = Vec::new();
            let mut push = |c: f64, a: f64, b: f64| {
                if let Some(t) = terms.iter_mut().find(|t| t.1 == a && t.2 == b) {
                    t.0 += c;
                } else {
                    terms.push((c, a, b));
                }
            };
            for t in &seg.terms {
                push(t.c, t.a + e, t.b);
            }
            if k2 != 0.0 {
                push(-k2, e - 2.0, 0.0);
            }
            terms.retain(|t| t.0 != 0.0);
            Combo { lo: seg.lo, hi: seg.hi, terms }
        })
        .collect()
}

fn combos_integral(cs: &[Combo], x: f64, y: f64) -> f64 {
    let mut total = 0.0;
    for c in cs {
        let (a, b) = (c.lo.max(x), c.hi.min(y));
        if a < b {
            total += c.positive_integral(a, b);
            if total.is_infinite() {
                break;
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Birman,
    Improved,
}

/// `margin(r) = K r^γ (ln r)^δ ∫_r^∞ (integrand)_+`.
struct MarginForm {
    combos: Vec<Combo>,
    k: f64,
    gamma: f64,
    delta: f64,
    /// Whether the form needs `r > 1`.
    log_scaled: bool,
}

impl MarginForm {
    fn new(p: &RadialPotential, criterion: Criterion) -> Self {
        let m = (p.d as f64 - 2.0).abs();
        match criterion {
            Criterion::Birman if p.d != 2 => MarginForm {
                combos: combos(&p.q, 1.0 - m, 0.0),
                k: 4.0 / m,
                gamma: m,
                delta: 0.0,
                log_scaled: false,
            },
            Criterion::Birman => MarginForm { combos: combos(&p.q, 1.0, 0.0), k: 4.0, gamma: 0.0, delta: 1.0, log_scaled: true },
            Criterion::Improved => {
                let kk = p.k() * p.k();
                MarginForm { combos: combos(&p.q, 1.0, kk), k: 4.0, gamma: 0.0, delta: 1.0, log_scaled: true }
            }
        }
    }

    fn scale(&self, r: f64) -> f64 {
        self.k * r.powf(self.gamma) * r.ln().powf(self.delta)
    }

    fn margin_from(&self, r: f64, tail: f64) -> f64 {
        if tail == 0.0 {
            return 0.0;
        }
        if self.log_scaled && !(r > 1.0) {
            return f64::INFINITY;
        }
        self.scale(r) * tail
    }

    /// `lim_{r→∞} margin(r)`, from the power-log tail of the last segment.
    fn tail_limit(&self) -> f64 {
        let last = self.combos.last().expect("a weight has segments");
        let dom = match last.dominant() {
            None => return 0.0,
            Some(t) => t,
        };
        if dom.0 < 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        for &(c, a, b) in &last.terms {
            let (e, f, coef) = if a < -1.0 {
                (a + 1.0 + self.gamma, b + self.delta, self.k * c / (a + 1.0).abs())
            } else if a == -1.0 && b < -1.0 {
                (self.gamma, b + 1.0 + self.delta, self.k * c / (b + 1.0).abs())
            } else {
                (1.0, 0.0, c.signum() * f64::INFINITY)
            };
            let lim = if e < 0.0 || (e == 0.0 && f < 0.0) {
                0.0
            } else if e > 0.0 || f > 0.0 {
                c.signum() * f64::INFINITY
            } else {
                coef
            };
            total += lim;
        }
        total.max(0.0)
    }
}

/// Condition (Birman form) at `r`; at most `1` means it holds there.
pub fn birman_margin(p: &RadialPotential, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return input(format!("radius {r} must be finite and positive"));
    }
    if p.d == 2 && !(r > 1.0) {
        return precondition("the two-dimensional condition needs r > 1");
    }
    let f = MarginForm::new(p, Criterion::Birman);
    Ok(f.margin_from(r, combos_integral(&f.combos, r, f64::INFINITY)))
}

/// Condition with the critical inverse-square part removed, at `r > 1`.
pub fn improved_margin(p: &RadialPotential, r: f64) -> Result<f64> {
    if !(r > 1.0) || !r.is_finite() {
        return precondition(format!("the improved condition needs r > 1, got {r}"));
    }
    let f = MarginForm::new(p, Criterion::Improved);
    Ok(f.margin_from(r, combos_integral(&f.combos, r, f64::INFINITY)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    FiniteCertified,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginProfile {
    #[serde(with = "real::vec")]
    pub r: Vec<f64>,
    #[serde(with = "real::vec")]
    pub value: Vec<f64>,
    /// `lim_{r→∞}` of the margin.
    #[serde(with = "real")]
    pub tail_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub status: Status,
    pub criterion: Option<Criterion>,
    #[serde(rename = "R", with = "real::option")]
    pub r: Option<f64>,
    #[serde(rename = "c_R", with = "real::option")]
    pub c_r: Option<f64>,
    pub margin: MarginProfile,
    #[serde(with = "real::option")]
    pub outside_form_min_eig: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyOptions {
    /// Smallest candidate `R`.
    pub r_min: f64,
    /// Largest candidate `R`.
    pub r_max: f64,
    /// Margins are sampled out to `horizon·r_max`, then the tail is
    /// handled analytically.
    pub horizon: f64,
    pub per_decade: usize,
    /// Candidate `R` every this many sample points.
    pub candidate_stride: usize,
    pub outside: OutsideOptions,
    pub tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            r_min: 1.0,
            r_max: 1e6,
            horizon: 1e6,
            per_decade: 64,
            candidate_stride: 8,
            outside: OutsideOptions::default(),
            tol: 1e-8,
        }
    }
}

/// Samples the margin of one criterion on `nodes`, summing cell integrals
/// from the right.
fn margin_profile(form: &MarginForm, nodes: &[f64]) -> MarginProfile {
    let n = nodes.len();
    let mut tail = vec![0.0; n];
    tail[n - 1] = combos_integral(&form.combos, nodes[n - 1], f64::INFINITY);
    for i in (0..n - 1).rev() {
        tail[i] = tail[i + 1] + combos_integral(&form.combos, nodes[i], nodes[i + 1]);
    }
    let value = nodes.iter().zip(&tail).map(|(&r, &t)| form.margin_from(r, t)).collect();
    MarginProfile { r: nodes.to_vec(), value, tail_limit: form.tail_limit() }
}

/// Scans candidate radii `R` and certifies with the first criterion whose
/// margin stays at most `1` beyond `R` and whose outside form is
/// nonnegative.
pub fn certify_finiteness(p: &RadialPotential, opts: &CertifyOptions) -> Result<Certificate> {
    if !(opts.r_min > 0.0 && opts.r_max >= opts.r_min && opts.horizon >= 1.0) {
        return input("bad certification range");
    }
    let far = (opts.r_max * opts.horizon).max(100.0 * p.q.kinks().last().copied().unwrap_or(1.0));
    let grid = LogGrid::per_decade(opts.r_min, far, opts.per_decade)?;
    let nodes = grid.nodes();
    let slack = 1.0 + 1e-12;
    let mut fallback = None;
    for criterion in [Criterion::Birman, Criterion::Improved] {
        let form = MarginForm::new(p, criterion);
        let prof = margin_profile(&form, nodes);
        if fallback.is_none() {
            fallback = Some(prof.clone());
        }
        if !(prof.tail_limit <= slack) {
            continue;
        }
        let mut suffix = vec![0.0; nodes.len()];
        let mut m: f64 = 0.0;
        for i in (0..nodes.len()).rev() {
            m = m.max(prof.value[i]);
            if prof.value[i].is_nan() {
                m = f64::INFINITY;
            }
            suffix[i] = m;
        }
        for i in (0..nodes.len()).step_by(opts.candidate_stride.max(1)) {
            let r = nodes[i];
            if r > opts.r_max * slack {
                break;
            }
            if !(suffix[i] <= slack) {
                continue;
            }
            let c_r = match criterion {
                Criterion::Birman if p.d == 2 && !(r > 1.0) => continue,
                Criterion::Birman => robin_constant(p.d, r),
                Criterion::Improved => improved_robin_constant(p.d, r),
            };
            let eig = outside_form_min_eig(p, r, c_r, &opts.outside)?;
            if eig >= -opts.tol {
                let margin = MarginProfile {
                    r: prof.r[i..].to_vec(),
                    value: prof.value[i..].to_vec(),
                    tail_limit: prof.tail_limit,
                };
                return Ok(Certificate {
                    status: Status::FiniteCertified,
                    criterion: Some(criterion),
                    r: Some(r),
                    c_r: Some(c_r),
                    margin,
                    outside_form_min_eig: Some(eig),
                });
            }
        }
    }
    Ok(Certificate {
        status: Status::Undecided,
        criterion: None,
        r: None,
        c_r: None,
        margin: fallback.expect("at least one criterion ran"),
        outside_form_min_eig: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutsideOptions {
    /// The form lives on `(R, truncation·R)`, Dirichlet at the far end.
    pub truncation: f64,
    pub per_decade: usize,
}

impl Default for OutsideOptions {
    fn default() -> Self {
        OutsideOptions { truncation: 1e4, per_decade: 64 }
    }
}

/// Tridiagonal stiffness `A` (form) and mass `B` on a grid.
struct Pencil {
    a_diag: Vec<f64>,
    a_off: Vec<f64>,
    b_diag: Vec<f64>,
    b_off: Vec<f64>,
}

impl Pencil {
    /// Negative eigenvalues of `A - σB`, by the signs of the `LDLᵀ` pivots.
    fn negatives(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut piv = 0.0;
        for i in 0..self.a_diag.len() {
            let d = self.a_diag[i] - sigma * self.b_diag[i];
            piv = if i == 0 {
                d
            } else {
                let e = self.a_off[i - 1] - sigma * self.b_off[i - 1];
                d - e * e / piv
            };
            if piv == 0.0 {
                piv = -f64::EPSILON * d.abs().max(f64::MIN_POSITIVE);
            }
            if piv < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn min_eig(&self) -> f64 {
        let mut hi = 1.0;
        while self.negatives(hi) == 0 {
            hi *= 2.0;
            if hi > 1e300 {
                return hi;
            }
        }
        let mut lo = if self.negatives(0.0) == 0 { 0.0 } else { -1.0 };
        while self.negatives(lo) > 0 {
            lo *= 2.0;
            if lo < -1e300 {
                return f64::NEG_INFINITY;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.negatives(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

fn assemble(p: &RadialPotential, nodes: &[f64], c_r: f64) -> Result<Pencil> {
    let n = nodes.len();
    let dd = p.d as f64;
    let rw = p.q.mul_power(dd - 1.0);
    let mut a_diag = vec![0.0; n];
    let mut a_off = vec![0.0; n - 1];
    let mut b_diag = vec![0.0; n];
    let mut b_off = vec![0.0; n - 1];
    for i in 0..n - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let h = b - a;
        if integrate(&rw, a, b)?.is_divergent() {
            return input(format!("Q r^(d-1) is not integrable on ({a}, {b})"));
        }
        // ∫ r^{d-1} over the cell, exactly
        let kin = a.powf(dd) * (dd * (b / a).ln()).exp_m1() / dd / (h * h);
        let (mut q00, mut q01, mut q11) = (0.0, 0.0, 0.0);
        let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
        for (r, wt) in kronrod_nodes(a, b) {
            let lam = (r - a) / h;
            let (f0, f1) = (1.0 - lam, lam);
            let rd = r.powf(dd - 1.0);
            let qr = p.q.eval(r) * rd * wt;
            q00 += qr * f0 * f0;
            q01 += qr * f0 * f1;
            q11 += qr * f1 * f1;
            let mr = rd * wt;
            m00 += mr * f0 * f0;
            m01 += mr * f0 * f1;
            m11 += mr * f1 * f1;
        }
        a_diag[i] += kin - q00;
        a_diag[i + 1] += kin - q11;
        a_off[i] += -kin - q01;
        b_diag[i] += m00;
        b_diag[i + 1] += m11;
        b_off[i] += m01;
    }
    // Dirichlet at the far end; Robin (or Dirichlet for infinite c_R) at R
    let keep_first = c_r.is_finite();
    if keep_first {
        a_diag[0] += c_r;
    }
    let lo = if keep_first { 0 } else { 1 };
    let hi = n - 1;
    Ok(Pencil {
        a_diag: a_diag[lo..hi].to_vec(),
        a_off: a_off[lo..hi - 1].to_vec(),
        b_diag: b_diag[lo..hi].to_vec(),
        b_off: b_off[lo..hi - 1].to_vec(),
    })
}

fn outside_grid(p: &RadialPotential, r: f64, opts: &OutsideOptions) -> Result<LogGrid> {
    if !(opts.truncation > 1.0) || opts.per_decade < 2 {
        return input("outside form needs truncation > 1 and at least 2 nodes per decade");
    }
    let far = r * opts.truncation;
    let kinks: Vec<f64> = p.q.kinks().into_iter().filter(|&k| k > r && k < far).collect();
    Ok(LogGrid::per_decade(r, far, opts.per_decade)?.refined(&kinks))
}

/// Smallest generalized eigenvalue of
/// `∫_R (|u'|² - Q|u|²) r^{d-1} + c_R|u(R)|²` against `∫_R |u|² r^{d-1}`.
pub fn outside_form_min_eig(p: &RadialPotential, r: f64, c_r: f64, opts: &OutsideOptions) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return precondition(format!("R = {r} must be finite and positive"));
    }
    let grid = outside_grid(p, r, opts)?;
    Ok(assemble(p, grid.nodes(), c_r)?.min_eig())
}

/// [`outside_form_min_eig`] with the dimension's own `c_R`.
pub fn outside_form_nonnegativity(p: &RadialPotential, r: f64, opts: &OutsideOptions) -> Result<f64> {
    if p.d == 2 && !(r > 1.0) {
        return precondition("the two-dimensional form needs R > 1");
    }
    outside_form_min_eig(p, r, robin_constant(p.d, r), opts)
}

/// The outside form evaluated on one piecewise-linear `u`, using the nodes
/// of `u` from `R` on.
pub fn outside_form_value(p: &RadialPotential, r: f64, c_r: f64, u: &GridFunction) -> Result<f64> {
    let mut nodes = vec![r];
    nodes.extend(u.nodes().iter().copied().filter(|&x| x > r));
    if nodes.len() < 2 {
        return input("u has no nodes beyond R");
    }
    let vals: Vec<f64> = nodes.iter().map(|&x| u.eval(x)).collect();
    let dd = p.d as f64;
    let mut total = c_r * vals[0] * vals[0];
    for i in 0..nodes.len() - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let s = (vals[i + 1] - vals[i]) / (b - a);
        total += s * s * a.powf(dd) * (dd * (b / a).ln()).exp_m1() / dd;
        let (ua, rw) = (vals[i], p.q.mul_power(dd - 1.0));
        total -= crate::gridfn::integrate_with(&rw, a, b, |x| (ua + s * (x - a)).powi(2))?.value;
    }
    Ok(total)
}

/// Number of spherical harmonics of degree `ell` in dimension `d`.
pub fn multiplicity(d: u32, ell: u32) -> u64 {
    if d == 1 {
        return u64::from(ell <= 1);
    }
    let binom = |n: i64, k: i64| -> u64 {
        if n < k || k < 0 {
            return 0;
        }
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc as u64
    };
    let (l, dd) = (ell as i64, d as i64);
    binom(l + dd - 1, dd - 1) - binom(l + dd - 3, dd - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruferOptions {
    /// Local error tolerance on the phase.
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for PruferOptions {
    fn default() -> Self {
        PruferOptions { tol: 1e-10, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorCount {
    pub ell: u32,
    #[serde(rename = "L", with = "real")]
    pub l: f64,
    pub count: u64,
    /// Final Prüfer phase over `π`; the count is its integer part.
    #[serde(with = "real")]
    pub phase: f64,
}

/// Zeros in `(0, L)` of the regular zero-energy solution in sector `ell`,
/// which is the number of negative Dirichlet eigenvalues on the ball of
/// radius `L`. Works in `t = ln r` with `y = r^{1/2} z`, so that
/// `z'' = (s² - r²Q) z` with `s = ell + (d-2)/2`, and follows the phase of
/// `z + i z'`.
pub fn count_negative_eigenvalues_radial(p: &RadialPotential, ell: u32, l: f64, opts: &PruferOptions) -> Result<SectorCount> {
    if !(l > 0.0) || !l.is_finite() {
        return input(format!("truncation L = {l} must be finite and positive"));
    }
    let s = ell as f64 + p.k();
    let first = &p.q.segments()[0];
    for t in &first.terms {
        if t.a < -2.0 || (t.a == -2.0 && t.b > 0.0) || (t.a == -2.0 && t.b == 0.0 && t.c >= s * s && t.c > 0.0) {
            return precondition("Q is too singular at the origin for a regular solution");
        }
    }
    let kinks: Vec<f64> = p.q.kinks().into_iter().filter(|&k| k < l).collect();
    let r0 = 1e-8 * kinks.first().copied().unwrap_or(1.0).min(1.0).min(l);
    let s_eff = {
        let e2 = s * s - r0 * r0 * p.q.eval(r0);
        s.signum() * e2.max(0.0).sqrt()
    };
    let mut theta = 1.0_f64.atan2(s_eff);
    let q = |t: f64| {
        let r = t.exp();
        r * r * p.q.eval(r) - s * s
    };
    let mut stops: Vec<f64> = kinks.iter().filter(|&&k| k > r0).map(|k| k.ln()).collect();
    stops.push(l.ln());
    let mut t = r0.ln();
    let mut steps = 0;
    for &stop in &stops {
        if stop <= t {
            continue;
        }
        // evaluate q strictly inside the piece
        let (lo, hi) = (t, stop);
        let qc = |x: f64| q(x.clamp(lo + 1e-14 * lo.abs().max(1.0), hi - 1e-14 * hi.abs().max(1.0)));
        theta = dopri(&|x, th| th_rhs(qc(x), th), t, stop, theta, opts, &mut steps)?;
        t = stop;
    }
    let phase = theta / std::f64::consts::PI;
    Ok(SectorCount { ell, l, count: phase.floor().max(0.0) as u64, phase })
}

fn th_rhs(q: f64, th: f64) -> f64 {
    let (sn, cs) = th.sin_cos();
    cs * cs + q * sn * sn
}

/// Dormand-Prince 5(4) for a scalar equation.
fn dopri(f: &dyn Fn(f64, f64) -> f64, t0: f64, t1: f64, y0: f64, opts: &PruferOptions, steps: &mut usize) -> Result<f64> {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];
    let mut t = t0;
    let mut y = y0;
    let mut h = ((t1 - t0) / 100.0).min(0.05);
    while t < t1 {
        if *steps >= opts.max_steps {
            return Err(crate::Error::Precondition("phase integration did not finish within the step budget".into()));
        }
        *steps += 1;
        h = h.min(t1 - t);
        let mut k = [0.0; 7];
        for i in 0..7 {
            let yi = y + h * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
            k[i] = f(t + C[i] * h, yi);
        }
        let y_new = y + h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let err = (h * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
        let scale = opts.tol * (1.0 + y.abs().max(y_new.abs()));
        if err <= scale || h < 1e-12 {
            t += h;
            y = y_new;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(y)
}
