//! Variational estimate of the best constant `C` in
//! `∫ W|u|^p ≤ C ∫ V|u'|^p`, for piecewise-linear `u` on a truncated log
//! grid with `u(eps) = 0` and a free end at `L`.
//!
//! The iteration is inverse iteration for the discrete `p`-Laplacian: given
//! `u`, solve `-(V|w'|^{p-2}w')' = W|u|^{p-2}u` and rescale. On a 1D grid
//! with one Dirichlet end and one free end the flux of `w` is a suffix sum
//! of the right-hand side, so each step is an exact `O(N)` solve, and the
//! quotient never decreases.

use serde::Serialize;

use crate::constants::{converse_lower_bound, overline, underline};
use crate::error::{check_exponent, input, precondition, Result};
use crate::gridfn::quad::{self, kronrod_nodes, QuadOptions};
use crate::gridfn::{integrate, Extension, GridFunction, LogGrid, WeightSpec};
use crate::real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub eps: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub p: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl EstimatorConfig {
    pub fn new(p: f64) -> Self {
        EstimatorConfig { eps: 1e-6, l: 1e6, n: 4000, p, max_iter: 20_000, tol: 1e-12 }
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent(self.p)?;
        if !(self.eps > 0.0 && self.l > self.eps && self.l.is_finite()) {
            return input(format!("need 0 < eps < L < inf, got eps = {}, L = {}", self.eps, self.l));
        }
        if self.n < 16 {
            return input(format!("need at least 16 nodes, got {}", self.n));
        }
        if !(self.tol > 0.0) {
            return input("tol must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    #[serde(with = "real")]
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// The quotient after each step; nondecreasing.
    #[serde(skip)]
    pub quotients: Vec<f64>,
    /// Final iterate, normalized to unit energy.
    #[serde(skip)]
    pub profile: GridFunction,
}

/// Discretized problem: nodes, cell widths, `∫V` per cell, and per-cell
/// quadrature of `W` against the hat functions.
struct Problem {
    nodes: Vec<f64>,
    h: Vec<f64>,
    stiff: Vec<f64>,
    /// `(W(r_q)·weight_q, λ_q)` with `λ_q` the position inside the cell.
    quad: Vec<[(f64, f64); 21]>,
    p: f64,
}

impl Problem {
    fn new(v: &WeightSpec, w: &WeightSpec, cfg: &EstimatorConfig) -> Result<Self> {
        cfg.validate()?;
        let mut extra: Vec<f64> = v.kinks();
        extra.extend(w.kinks());
        extra.retain(|&k| k > cfg.eps && k < cfg.l);
        let grid = LogGrid::geometric(cfg.eps, cfg.l, cfg.n)?.refined(&extra);
        let nodes = grid.nodes().to_vec();
        let mut h = Vec::with_capacity(nodes.len() - 1);
        let mut stiff = Vec::with_capacity(nodes.len() - 1);
        let mut quad_cells = Vec::with_capacity(nodes.len() - 1);
        for win in nodes.windows(2) {
            let (a, b) = (win[0], win[1]);
            let c = integrate(v, a, b)?.value;
            if !(c > 0.0) || !c.is_finite() {
                return input(format!("V gives a singular stiffness on the cell ({a}, {b})"));
            }
            let mut q = [(0.0, 0.0); 21];
            for (k, (r, wt)) in kronrod_nodes(a, b).enumerate() {
                let wr = w.eval(r);
                if !wr.is_finite() {
                    return input(format!("W is not finite at {r}"));
                }
                q[k] = (wr * wt, (r - a) / (b - a));
            }
            h.push(b - a);
            stiff.push(c);
            quad_cells.push(q);
        }
        Ok(Problem { nodes, h, stiff, quad: quad_cells, p: cfg.p })
    }

    fn energy(&self, u: &[f64]) -> f64 {
        (0..self.h.len()).map(|i| self.stiff[i] * ((u[i + 1] - u[i]) / self.h[i]).abs().powf(self.p)).sum()
    }

    fn mass(&self, u: &[f64]) -> f64 {
        let p = self.p;
        let mut total = 0.0;
        for (i, q) in self.quad.iter().enumerate() {
            let (ua, ub) = (u[i], u[i + 1]);
            for &(om, lam) in q {
                total += om * (ua + lam * (ub - ua)).abs().powf(p);
            }
        }
        total
    }

    /// `∇ mass / p` at `u`.
    fn mass_gradient(&self, u: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut g = vec![0.0; u.len()];
        for (i, q) in self.quad.iter().enumerate() {
            let (ua, ub) = (u[i], u[i + 1]);
            for &(om, lam) in q {
                let x = ua + lam * (ub - ua);
                let f = om * x.abs().powf(p - 2.0) * x;
                if f != 0.0 {
                    g[i] += f * (1.0 - lam);
                    g[i + 1] += f * lam;
                }
            }
        }
        g
    }

    /// The minimizer of `energy(w)/p - <g, w>` with `w_0 = 0`.
    fn solve(&self, g: &[f64]) -> Vec<f64> {
        let m = self.h.len();
        let e = 1.0 / (self.p - 1.0);
        let mut w = vec![0.0; m + 1];
        let mut flux = vec![0.0; m];
        let mut acc = 0.0;
        for i in (0..m).rev() {
            acc += g[i + 1];
            flux[i] = acc;
        }
        for i in 0..m {
            let q = flux[i];
            let s = q.signum() * (q.abs() * self.h[i] / self.stiff[i]).powf(e);
            w[i + 1] = w[i] + s * self.h[i];
        }
        w
    }

    fn normalize(&self, u: &mut [f64]) {
        let d = self.energy(u);
        if d > 0.0 {
            let k = d.powf(-1.0 / self.p);
            u.iter_mut().for_each(|x| *x *= k);
        }
    }

    /// `φ(r)^{(p-1)/p}` with `φ(r) = ∫_eps^r V^{-1/(p-1)}`.
    fn start(&self, v: &WeightSpec) -> Vec<f64> {
        let e = -1.0 / (self.p - 1.0);
        let opts = QuadOptions { rel_tol: 1e-8, ..QuadOptions::default() };
        let mut u = vec![0.0; self.nodes.len()];
        for i in 0..self.h.len() {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            let cell = quad::integrate(|r: f64| v.eval(r).powf(e), a, b, opts).value;
            u[i + 1] = u[i] + if cell.is_finite() { cell } else { b - a };
        }
        let k = (self.p - 1.0) / self.p;
        u.iter_mut().for_each(|x| *x = x.powf(k));
        u
    }
}

fn iterate(v: &WeightSpec, w: &WeightSpec, cfg: &EstimatorConfig) -> Result<Estimate> {
    let pb = Problem::new(v, w, cfg)?;
    let mut u = pb.start(v);
    pb.normalize(&mut u);
    let mut q = pb.mass(&u);
    let mut quotients = vec![q];
    let mut converged = q == 0.0;
    let mut iterations = 0;
    while !converged && iterations < cfg.max_iter {
        iterations += 1;
        let mut next = pb.solve(&pb.mass_gradient(&u));
        pb.normalize(&mut next);
        let mut q_next = pb.mass(&next);
        if !(q_next >= q) {
            // rounding at the fixed point; damp toward the current iterate
            let mut t = 0.5;
            let mut found = false;
            for _ in 0..40 {
                let mut trial: Vec<f64> = u.iter().zip(&next).map(|(a, b)| a + t * (b - a)).collect();
                pb.normalize(&mut trial);
                let qt = pb.mass(&trial);
                if qt > q {
                    next = trial;
                    q_next = qt;
                    found = true;
                    break;
                }
                t *= 0.5;
            }
            if !found {
                converged = (q - q_next).abs() <= 1e3 * f64::EPSILON * q;
                break;
            }
        }
        let delta = q_next - q;
        u = next;
        q = q_next;
        quotients.push(q);
        if delta <= cfg.tol * q {
            converged = true;
        }
    }
    let grid = LogGrid::new(pb.nodes.clone())?;
    let profile = GridFunction::new(grid, u, Extension::ConstantOutside)?;
    Ok(Estimate { value: q, converged, iterations, quotients, profile })
}

/// Largest generalized Rayleigh quotient `∫W u² / ∫V u'²`.
pub fn best_constant_p2(v: &WeightSpec, w: &WeightSpec, cfg: &EstimatorConfig) -> Result<Estimate> {
    if cfg.p != 2.0 {
        return precondition(format!("best_constant_p2 needs p = 2, got {}", cfg.p));
    }
    iterate(v, w, cfg)
}

/// Largest `∫W|u|^p / ∫V|u'|^p` for any `p > 1`.
pub fn best_constant_general_p(v: &WeightSpec, w: &WeightSpec, cfg: &EstimatorConfig) -> Result<Estimate> {
    iterate(v, w, cfg)
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichResult {
    #[serde(with = "real")]
    pub lower: f64,
    #[serde(with = "real")]
    pub estimate: f64,
    #[serde(with = "real")]
    pub upper: f64,
    pub converged: bool,
    pub iterations: usize,
    /// `lower ≤ estimate ≤ upper` up to `tol`.
    pub ordered: bool,
}

pub fn sandwich(v: &WeightSpec, w: &WeightSpec, cfg: &EstimatorConfig) -> Result<SandwichResult> {
    let p = cfg.p;
    cfg.validate()?;
    let lower = converse_lower_bound(v, w, p)?;
    let bo = overline(v, w, p)?.upper_bound_on_c;
    let bu = underline(v, w, p)?.upper_bound_on_c;
    let upper = bo.min(bu);
    let est = if p == 2.0 { best_constant_p2(v, w, cfg)? } else { best_constant_general_p(v, w, cfg)? };
    let t = 1.0 + cfg.tol.max(1e-9);
    let ordered = lower <= est.value * t && est.value <= upper * t;
    Ok(SandwichResult {
        lower,
        estimate: est.value,
        upper,
        converged: est.converged,
        iterations: est.iterations,
        ordered,
    })
}
