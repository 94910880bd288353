//! Changes of variables: `ρ = φ(r)`, the mirror `r ↦ 1/r`, `x = ln r`, and
//! `ũ = r^{(d-2)/2} u`.

use serde::Serialize;

use crate::error::{check_exponent, input, precondition, Result};
use crate::gridfn::quad::{self, QuadOptions};
use crate::gridfn::{integrate, lp_energy, weighted_mass, Extension, GridFunction, LogGrid, Segment, Term, WeightSpec};
use crate::real;

/// `φ(r) = ∫_0^r V^{-1/(p-1)}`, its inverse `ψ`, and `L = φ(∞)`.
#[derive(Debug, Clone)]
pub struct PhiMap {
    v: WeightSpec,
    /// `V^{-1/(p-1)}`
    dual: WeightSpec,
    p: f64,
    l: f64,
}

impl PhiMap {
    pub fn new(v: &WeightSpec, p: f64) -> Result<Self> {
        check_exponent(p)?;
        let dual = v.power_of_inverse(p)?;
        // every finite piece must be integrable; only the far end may diverge
        let reach = 2.0 * dual.kinks().into_iter().fold(1.0, f64::max);
        if integrate(&dual, 0.0, reach)?.is_divergent() {
            return precondition("V^{-1/(p-1)} is not integrable near the origin or across an interior point");
        }
        let l = integrate(&dual, 0.0, f64::INFINITY)?.value;
        Ok(PhiMap { v: v.clone(), dual, p, l })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn v(&self) -> &WeightSpec {
        &self.v
    }

    /// `φ(∞)`, possibly infinite.
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn phi(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return input(format!("phi needs a positive radius, got {r}"));
        }
        Ok(integrate(&self.dual, 0.0, r)?.value)
    }

    /// `ψ'(ρ) = V(ψ(ρ))^{1/(p-1)}`, given `r = ψ(ρ)`.
    pub fn psi_prime_at(&self, r: f64) -> f64 {
        1.0 / self.dual.eval(r)
    }

    pub fn psi(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !(rho < self.l) {
            return precondition(format!("psi needs 0 < rho < L = {}, got {rho}", self.l));
        }
        let (mut lo, mut hi) = (1.0, 1.0);
        while self.phi(lo)? > rho {
            lo *= 0.125;
            if lo < 1e-300 {
                return Ok(lo);
            }
        }
        while self.phi(hi)? < rho {
            hi *= 8.0;
            if hi > 1e300 {
                return Ok(hi);
            }
        }
        let base = self.phi(lo)?;
        Ok(self.invert_on(rho, lo, hi, base))
    }

    /// Solves `φ(r) = rho` for `r` in `[lo, hi]` given `φ(lo)`. Bisection
    /// in `ln r`, accelerated by Newton steps that stay inside the bracket.
    fn invert_on(&self, rho: f64, lo: f64, hi: f64, phi_lo: f64) -> f64 {
        let target = rho - phi_lo;
        let g = |r: f64| integrate(&self.dual, lo, r).map(|q| q.value).unwrap_or(f64::INFINITY) - target;
        let (mut a, mut b) = (lo.ln(), hi.ln());
        let mut t = 0.5 * (a + b);
        for _ in 0..200 {
            let r = t.exp();
            let gv = g(r);
            if gv == 0.0 {
                return r;
            }
            if gv < 0.0 {
                a = t;
            } else {
                b = t;
            }
            if b - a <= 1e-15 * a.abs().max(b.abs()).max(1.0) {
                break;
            }
            let slope = self.dual.eval(r) * r;
            let newton = t - gv / slope;
            t = if newton > a && newton < b && slope.is_finite() && slope > 0.0 {
                newton
            } else {
                0.5 * (a + b)
            };
        }
        t.exp()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Substitution {
    #[serde(skip)]
    pub u_tilde: GridFunction,
    #[serde(skip)]
    pub w_tilde: GridFunction,
    #[serde(with = "real")]
    pub l: f64,
    /// `∫ V|u'|^p dr`
    #[serde(with = "real")]
    pub energy_r: f64,
    /// `∫ |ũ'|^p dρ`
    #[serde(with = "real")]
    pub energy_rho: f64,
    /// `∫ W|u|^p dr`
    #[serde(with = "real")]
    pub mass_r: f64,
    /// `∫ W̃|ũ|^p dρ`
    #[serde(with = "real")]
    pub mass_rho: f64,
}

/// Pulls `u` and `W` over to the `ρ = φ(r)` side. The two integrals on
/// each side are computed independently (the `ρ` side by quadrature in
/// `ρ`) so they can be compared.
pub fn substitute(u: &GridFunction, v: &WeightSpec, w: &WeightSpec, p: f64) -> Result<Substitution> {
    let map = PhiMap::new(v, p)?;
    let x = u.nodes();
    let n = x.len();
    let mut rho = Vec::with_capacity(n);
    let mut acc = map.phi(x[0])?;
    rho.push(acc);
    for i in 0..n - 1 {
        acc += integrate(&map.dual, x[i], x[i + 1])?.value;
        rho.push(acc);
    }
    let grid = LogGrid::new(rho.clone())?;
    let u_tilde = GridFunction::new(grid.clone(), u.values().to_vec(), u.extension())?;
    let w_nodes: Vec<f64> = x.iter().map(|&r| w.eval(r) * map.psi_prime_at(r)).collect();
    let w_tilde = GridFunction::new(grid, w_nodes, Extension::ZeroOutside)?;

    let energy_r = lp_energy(u, p, Some(v))?.value;
    let mass_r = weighted_mass(u, p, w)?.value;

    let opts = QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() };
    let mut kinks = v.kinks();
    kinks.extend(w.kinks());
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();

    // quadrature in ρ over the image of [a, b], split at images of kinks
    let over_cell = |a: f64, b: f64, rho_a: f64, f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let mut cuts = vec![(a, rho_a)];
        for &k in kinks.iter().filter(|&&k| k > a && k < b) {
            let rk = rho_a + integrate(&map.dual, a, k)?.value;
            cuts.push((k, rk));
        }
        cuts.push((b, rho_a + integrate(&map.dual, a, b)?.value));
        let mut total = 0.0;
        for win in cuts.windows(2) {
            let ((lo, rlo), (hi, rhi)) = (win[0], win[1]);
            if rhi <= rlo {
                continue;
            }
            let g = |s: f64| f(map.invert_on(s, lo, hi, rlo));
            total += quad::integrate(g, rlo, rhi, opts).value;
        }
        Ok(total)
    };

    let mut energy_rho = 0.0;
    let mut mass_rho = 0.0;
    let vals = u.values();
    if u.extension() == Extension::LinearToZeroAtOrigin && vals[0] != 0.0 {
        let s = vals[0] / x[0];
        energy_rho += over_cell(f64::MIN_POSITIVE, x[0], 0.0, &|r| (s * map.psi_prime_at(r)).abs().powf(p))?;
        if mass_r.is_finite() {
            mass_rho += over_cell(f64::MIN_POSITIVE, x[0], 0.0, &|r| {
                w.eval(r) * map.psi_prime_at(r) * (s * r).abs().powf(p)
            })?;
        }
    }
    if u.extension() == Extension::ConstantOutside && vals[0] != 0.0 && mass_r.is_finite() {
        let c = vals[0].abs().powf(p);
        mass_rho += over_cell(f64::MIN_POSITIVE, x[0], 0.0, &|r| w.eval(r) * map.psi_prime_at(r) * c)?;
    }
    for i in 0..n - 1 {
        let (a, b) = (x[i], x[i + 1]);
        let s = u.slope(i);
        if s != 0.0 {
            energy_rho += over_cell(a, b, rho[i], &|r| (s * map.psi_prime_at(r)).abs().powf(p))?;
        }
        if mass_r.is_finite() && (vals[i] != 0.0 || vals[i + 1] != 0.0) {
            let ua = vals[i];
            mass_rho += over_cell(a, b, rho[i], &|r| {
                w.eval(r) * map.psi_prime_at(r) * (ua + s * (r - a)).abs().powf(p)
            })?;
        }
    }
    let tail = vals[n - 1];
    if u.extension() != Extension::ZeroOutside && tail != 0.0 && mass_r.is_finite() {
        let c = tail.abs().powf(p);
        let phi_n = rho[n - 1];
        let g = |s: f64| -> f64 {
            if s >= map.l {
                return 0.0;
            }
            match map.psi(s) {
                Ok(r) => w.eval(r) * map.psi_prime_at(r) * c,
                Err(_) => 0.0,
            }
        };
        mass_rho += if map.l.is_finite() {
            quad::integrate(g, phi_n, map.l, opts).value
        } else {
            quad::integrate_upper(g, phi_n, opts).value
        };
    }
    if !mass_r.is_finite() {
        mass_rho = f64::INFINITY;
    }
    Ok(Substitution { u_tilde, w_tilde, l: map.l, energy_r, energy_rho, mass_r, mass_rho })
}

fn mirror(w: &WeightSpec, shift: impl Fn(f64) -> f64) -> Result<WeightSpec> {
    let segments = w
        .segments()
        .iter()
        .rev()
        .map(|s| {
            let terms = s.terms.iter().map(|t| Term::new(t.c, shift(t.a), t.b)).collect();
            Segment::new(1.0 / s.hi, 1.0 / s.lo, terms)
        })
        .collect();
    WeightSpec::from_segments(segments)
}

/// `(V(1/ρ)ρ^{2p-2}, W(1/ρ)ρ^{-2})`, exact on the power-log terms.
pub fn invert_halfline(v: &WeightSpec, w: &WeightSpec, p: f64) -> Result<(WeightSpec, WeightSpec)> {
    check_exponent(p)?;
    Ok((mirror(v, |a| -a + 2.0 * p - 2.0)?, mirror(w, |a| -a - 2.0)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct LogMap {
    #[serde(skip)]
    pub f: GridFunction,
    /// `e^{2x} W(e^x)` on the `x` nodes.
    #[serde(skip)]
    pub w: GridFunction,
    #[serde(with = "real")]
    pub x0: f64,
    /// `∫_R^∞ |u'|² r dr + c_R |u(R)|²` with `c_R = (ln R)^{-1}`.
    #[serde(with = "real")]
    pub lhs: f64,
    /// `∫_X^∞ |f'|² dx + X^{-1} |f(X)|²`.
    #[serde(with = "real")]
    pub rhs: f64,
}

/// `f(x) = u(e^x)` for `r >= R`. The `x` side is integrated in `x`.
pub fn log_map(u: &GridFunction, w: &WeightSpec, r_big: f64) -> Result<LogMap> {
    if !(r_big > 1.0) || !r_big.is_finite() {
        return precondition(format!("the log substitution needs R > 1, got {r_big}"));
    }
    if let Some((lo, _)) = w.support() {
        if lo < r_big {
            return precondition(format!("W must vanish below R = {r_big}"));
        }
    }
    let x0 = r_big.ln();
    let mut nodes = vec![r_big];
    nodes.extend(u.nodes().iter().copied().filter(|&r| r > r_big));
    if nodes.len() < 2 {
        return input("u has no nodes beyond R");
    }
    let xs: Vec<f64> = nodes.iter().map(|r| r.ln()).collect();
    let fv: Vec<f64> = nodes.iter().map(|&r| u.eval(r)).collect();
    let xgrid = LogGrid::new(xs.clone())?;
    let f = GridFunction::new(xgrid.clone(), fv.clone(), Extension::ConstantOutside)?;
    let wv = xs.iter().map(|&x| (2.0 * x).exp() * w.eval(x.exp())).collect();
    let wx = GridFunction::new(xgrid, wv, Extension::ZeroOutside)?;

    let opts = QuadOptions::default();
    let boundary = fv[0] * fv[0] / x0;
    let (mut lhs, mut rhs) = (boundary, boundary);
    for i in 0..nodes.len() - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let s = (fv[i + 1] - fv[i]) / (b - a);
        if s == 0.0 {
            continue;
        }
        lhs += s * s * (b - a) * (b + a) / 2.0;
        rhs += quad::integrate(|x: f64| s * s * (2.0 * x).exp(), xs[i], xs[i + 1], opts).value;
    }
    Ok(LogMap { f, w: wx, x0, lhs, rhs })
}

#[derive(Debug, Clone, Serialize)]
pub struct Peel {
    #[serde(skip)]
    pub u_tilde: GridFunction,
    #[serde(with = "real")]
    pub k: f64,
    /// `∫_R^{r_N} |u'|² r^{d-1} dr`
    #[serde(with = "real")]
    pub lhs: f64,
    /// `∫|ũ'|² r + k² ∫|ũ|²/r + k|ũ(R)|² - k|ũ(r_N)|²` over the same range.
    #[serde(with = "real")]
    pub rhs: f64,
}

/// `ũ = r^k u` with `k = (d-2)/2`, on the nodes of `u` from `R` on. The
/// boundary term at the last node vanishes when `u` does.
pub fn peel_hardy(u: &GridFunction, d: u32, r_big: f64) -> Result<Peel> {
    if d == 0 {
        return input("dimension must be at least 1");
    }
    if !(r_big > 0.0) || !r_big.is_finite() {
        return input(format!("R = {r_big} must be finite and positive"));
    }
    let k = (d as f64 - 2.0) / 2.0;
    let mut nodes = vec![r_big];
    nodes.extend(u.nodes().iter().copied().filter(|&r| r > r_big));
    if nodes.len() < 2 {
        return input("u has no nodes beyond R");
    }
    let uv: Vec<f64> = nodes.iter().map(|&r| u.eval(r)).collect();
    let tilde: Vec<f64> = nodes.iter().zip(&uv).map(|(&r, &v)| r.powf(k) * v).collect();
    let u_tilde = GridFunction::new(LogGrid::new(nodes.clone())?, tilde.clone(), u.extension())?;

    let opts = QuadOptions { rel_tol: 1e-13, ..QuadOptions::default() };
    let dd = d as f64;
    let n = nodes.len();
    let mut lhs = 0.0;
    let mut rhs = k * tilde[0] * tilde[0] - k * tilde[n - 1] * tilde[n - 1];
    for i in 0..n - 1 {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let ua = uv[i];
        let s = (uv[i + 1] - ua) / (b - a);
        if s != 0.0 {
            lhs += s * s * a.powf(dd) * (dd * (b / a).ln()).exp_m1() / dd;
        }
        let g = |r: f64| {
            let val = ua + s * (r - a);
            let rk = r.powf(k);
            let dt = k * rk / r * val + rk * s;
            let t = rk * val;
            dt * dt * r + k * k * t * t / r
        };
        rhs += quad::integrate_radial(g, a, b, opts).value;
    }
    Ok(Peel { u_tilde, k, lhs, rhs })
}
