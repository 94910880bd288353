//! The running-supremum functionals `μ̲_α`, `μ̄_β` and the tail/head
//! functionals `ν̄_α`, `ν̲_β`, evaluated exactly on step functions.
//!
//! ```text
//! μ̲_α(f) = ∫ sup_{s<=r} f(s) r^{-1-α} dr      ν̄_α(g) = sup_r r^α ∫_r^∞ g
//! μ̄_β(f) = ∫ sup_{s>=r} f(s) r^{β-1} dr       ν̲_β(g) = sup_r r^{-β} ∫_0^r g
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{input, precondition, Result};
use crate::gridfn::StepFunction;
use crate::real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    MuLower,
    MuUpper,
    NuUpper,
    NuLower,
}

impl std::str::FromStr for Family {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu_lower" => Ok(Family::MuLower),
            "mu_upper" => Ok(Family::MuUpper),
            "nu_upper" => Ok(Family::NuUpper),
            "nu_lower" => Ok(Family::NuLower),
            _ => input(format!("unknown family {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityFunctional {
    pub family: Family,
    pub parameter: f64,
}

impl DualityFunctional {
    pub fn new(family: Family, parameter: f64) -> Result<Self> {
        if !(parameter > 0.0) || !parameter.is_finite() {
            return precondition(format!("parameter {parameter} must be positive"));
        }
        Ok(DualityFunctional { family, parameter })
    }
}

/// Which extremizer family pairs with a functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremizerFamily {
    /// `f_s = α s^α 1_(s,∞)`, normalized for `μ̲_α`.
    Lower,
    /// `f_s = β s^{-β} 1_(0,s)`, normalized for `μ̄_β`.
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    #[serde(with = "real")]
    pub value: f64,
    /// Where the supremum of a `ν` functional is attained (`None` for `μ`,
    /// or when it is only approached at `0` or `∞`).
    #[serde(with = "real::option")]
    pub argmax_r: Option<f64>,
}

fn check_nonnegative(f: &StepFunction) -> Result<()> {
    if !f.is_nonnegative() {
        return precondition("functionals are defined for nonnegative functions");
    }
    Ok(())
}

/// `sup_{s<=r} f(s)` as a step function on the same breaks.
pub fn prefix_sup_step(f: &StepFunction) -> StepFunction {
    let start = if f.breaks()[0] > 0.0 { 0.0 } else { f64::NEG_INFINITY };
    let mut m = start;
    let values = f
        .values()
        .iter()
        .map(|&v| {
            m = m.max(v);
            m
        })
        .collect();
    StepFunction::new(f.breaks().to_vec(), values).expect("same breaks")
}

/// `sup_{s>=r} f(s)` as a step function; on `(0, b_0)` it equals the
/// overall maximum (at least zero).
pub fn suffix_sup_step(f: &StepFunction) -> StepFunction {
    let mut values = f.values().to_vec();
    for i in (0..values.len().saturating_sub(1)).rev() {
        values[i] = values[i].max(values[i + 1]);
    }
    let mut breaks = f.breaks().to_vec();
    if breaks[0] > 0.0 {
        breaks.insert(0, 0.0);
        values.insert(0, values[0].max(0.0));
    }
    StepFunction::new(breaks, values).expect("same breaks")
}

/// `∫_x^y r^{-1-α} dr`.
fn neg_power_integral(alpha: f64, x: f64, y: f64) -> f64 {
    if y.is_infinite() {
        return x.powf(-alpha) / alpha;
    }
    x.powf(-alpha) * -(-alpha * (y / x).ln()).exp_m1() / alpha
}

/// `∫_x^y r^{β-1} dr`.
fn pos_power_integral(beta: f64, x: f64, y: f64) -> f64 {
    if x == 0.0 {
        return y.powf(beta) / beta;
    }
    x.powf(beta) * (beta * (y / x).ln()).exp_m1() / beta
}

pub fn mu_lower(f: &StepFunction, alpha: f64) -> Result<f64> {
    check_nonnegative(f)?;
    DualityFunctional::new(Family::MuLower, alpha)?;
    let fs = prefix_sup_step(f);
    let b = fs.breaks();
    let v = fs.values();
    if b[0] == 0.0 && v[0] > 0.0 {
        // bounded below near the origin against a non-integrable r^{-1-α}
        return Ok(f64::INFINITY);
    }
    let mut acc = 0.0;
    for i in 0..b.len() {
        if v[i] == 0.0 {
            continue;
        }
        let hi = b.get(i + 1).copied().unwrap_or(f64::INFINITY);
        acc += v[i] * neg_power_integral(alpha, b[i], hi);
    }
    Ok(acc)
}

pub fn mu_upper(f: &StepFunction, beta: f64) -> Result<f64> {
    check_nonnegative(f)?;
    DualityFunctional::new(Family::MuUpper, beta)?;
    if f.tail() > 0.0 {
        return Ok(f64::INFINITY);
    }
    let fs = suffix_sup_step(f);
    let b = fs.breaks();
    let v = fs.values();
    let mut acc = 0.0;
    for i in 0..b.len() - 1 {
        if v[i] != 0.0 {
            acc += v[i] * pos_power_integral(beta, b[i], b[i + 1]);
        }
    }
    Ok(acc)
}

/// Cells `(lo, hi, value)` including the zero lead-in and the tail.
fn all_cells(g: &StepFunction) -> Vec<(f64, f64, f64)> {
    let mut cells: Vec<(f64, f64, f64)> = g.cells().collect();
    cells.push((g.breaks()[g.breaks().len() - 1], f64::INFINITY, g.tail()));
    cells
}

fn consider(best: &mut Evaluation, value: f64, r: Option<f64>) {
    if value > best.value || (value == best.value && best.argmax_r.is_none() && r.is_some()) {
        *best = Evaluation { value, argmax_r: r };
    }
}

pub fn nu_upper(g: &StepFunction, alpha: f64) -> Result<Evaluation> {
    check_nonnegative(g)?;
    DualityFunctional::new(Family::NuUpper, alpha)?;
    if g.tail() > 0.0 {
        return Ok(Evaluation { value: f64::INFINITY, argmax_r: None });
    }
    let cells = all_cells(g);
    // T at the right end of each cell, accumulated from the right
    let mut t_right = vec![0.0; cells.len()];
    for k in (0..cells.len() - 1).rev() {
        let (lo, hi, v) = cells[k + 1];
        t_right[k] = t_right[k + 1] + if v == 0.0 || hi.is_infinite() { 0.0 } else { v * (hi - lo) };
    }
    let mut best = Evaluation { value: 0.0, argmax_r: None };
    for (k, &(lo, hi, v)) in cells.iter().enumerate() {
        if hi.is_infinite() {
            break;
        }
        let h = |r: f64| r.powf(alpha) * (t_right[k] + v * (hi - r));
        if lo > 0.0 {
            consider(&mut best, h(lo), Some(lo));
        }
        consider(&mut best, h(hi), Some(hi));
        if v > 0.0 {
            let c = t_right[k] + v * hi;
            let rs = alpha * c / ((alpha + 1.0) * v);
            if rs > lo && rs < hi {
                consider(&mut best, h(rs), Some(rs));
            }
        }
    }
    Ok(best)
}

pub fn nu_lower(g: &StepFunction, beta: f64) -> Result<Evaluation> {
    check_nonnegative(g)?;
    DualityFunctional::new(Family::NuLower, beta)?;
    let cells = all_cells(g);
    let mut best = Evaluation { value: 0.0, argmax_r: None };
    let mut g_left = 0.0;
    for &(lo, hi, v) in &cells {
        let d = g_left - v * lo;
        let h = |r: f64| r.powf(-beta) * (g_left + v * (r - lo));
        if lo > 0.0 {
            consider(&mut best, h(lo), Some(lo));
        } else if v > 0.0 {
            // r → 0 on a cell starting at the origin: h ~ v r^{1-β}
            let lim = if beta < 1.0 {
                0.0
            } else if beta == 1.0 {
                v
            } else {
                f64::INFINITY
            };
            consider(&mut best, lim, None);
        }
        if hi.is_finite() {
            consider(&mut best, h(hi), Some(hi));
        } else {
            // r → ∞: h ~ v r^{1-β} + d r^{-β}
            let lim = if v == 0.0 || beta > 1.0 {
                0.0
            } else if beta == 1.0 {
                v
            } else {
                f64::INFINITY
            };
            consider(&mut best, lim, None);
        }
        if v > 0.0 && beta != 1.0 {
            let rs = beta * d / ((1.0 - beta) * v);
            if rs > lo && rs < hi {
                consider(&mut best, h(rs), Some(rs));
            }
        }
        if hi.is_finite() {
            g_left += v * (hi - lo);
        }
    }
    Ok(best)
}

pub fn evaluate(func: DualityFunctional, f: &StepFunction) -> Result<Evaluation> {
    let DualityFunctional { family, parameter } = func;
    match family {
        Family::MuLower => Ok(Evaluation { value: mu_lower(f, parameter)?, argmax_r: None }),
        Family::MuUpper => Ok(Evaluation { value: mu_upper(f, parameter)?, argmax_r: None }),
        Family::NuUpper => nu_upper(f, parameter),
        Family::NuLower => nu_lower(f, parameter),
    }
}

/// `α s^α 1_(s,∞)` (lower) or `β s^{-β} 1_(0,s)` (upper).
pub fn extremizer(family: ExtremizerFamily, s: f64, parameter: f64) -> Result<StepFunction> {
    if !(s > 0.0) || !s.is_finite() {
        return precondition("s must be a finite positive radius");
    }
    if !(parameter > 0.0) || !parameter.is_finite() {
        return precondition("parameter must be positive");
    }
    match family {
        ExtremizerFamily::Lower => StepFunction::new(vec![s], vec![parameter * s.powf(parameter)]),
        ExtremizerFamily::Upper => StepFunction::new(vec![0.0, s], vec![parameter * s.powf(-parameter), 0.0]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityGap {
    /// `sup_s ∫ f_s g` over the supplied radii and the functional's argmax.
    #[serde(with = "real")]
    pub sup_pairing: f64,
    #[serde(with = "real")]
    pub argmax_s: f64,
    /// `α ν̄_α(g)` (lower family) or `β ν̲_β(g)` (upper family).
    #[serde(with = "real")]
    pub functional_value: f64,
}

pub fn duality_gap(g: &StepFunction, family: ExtremizerFamily, parameter: f64, s_grid: &[f64]) -> Result<DualityGap> {
    let eval = match family {
        ExtremizerFamily::Lower => nu_upper(g, parameter)?,
        ExtremizerFamily::Upper => nu_lower(g, parameter)?,
    };
    let mut sup = 0.0;
    let mut arg = f64::NAN;
    let candidates = s_grid.iter().copied().chain(eval.argmax_r).chain(g.breaks().iter().copied());
    for s in candidates.filter(|&s| s > 0.0 && s.is_finite()) {
        let v = extremizer(family, s, parameter)?.pairing(g);
        if v > sup || arg.is_nan() {
            sup = v.max(sup);
            arg = s;
        }
    }
    Ok(DualityGap { sup_pairing: sup, argmax_s: arg, functional_value: parameter * eval.value })
}

/// `α μ̲_α(f) ν̄_α(g) - ∫ f g` (lower) or `β μ̄_β(f) ν̲_β(g) - ∫ f g` (upper),
/// with `0·∞ = 0`; nonnegative by the pairing inequality.
pub fn pairing_bound_check(f: &StepFunction, g: &StepFunction, family: ExtremizerFamily, parameter: f64) -> Result<f64> {
    check_nonnegative(f)?;
    check_nonnegative(g)?;
    let (mu, nu) = match family {
        ExtremizerFamily::Lower => (mu_lower(f, parameter)?, nu_upper(g, parameter)?.value),
        ExtremizerFamily::Upper => (mu_upper(f, parameter)?, nu_lower(g, parameter)?.value),
    };
    let bound = if mu == 0.0 || nu == 0.0 { 0.0 } else { parameter * mu * nu };
    if bound.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(bound - f.pairing(g))
}

/// `f̃(ρ) = f(ρ^γ)`.
pub fn rescale(f: &StepFunction, gamma: f64) -> Result<StepFunction> {
    if !(gamma > 0.0) {
        return precondition("gamma must be positive");
    }
    let breaks = f.breaks().iter().map(|&b| b.powf(1.0 / gamma)).collect();
    StepFunction::new(breaks, f.values().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> StepFunction {
        StepFunction::indicator(0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn paper_examples() {
        assert_eq!(mu_lower(&unit(), 0.5).unwrap(), f64::INFINITY);
        assert!((mu_upper(&unit(), 1.0).unwrap() - 1.0).abs() < 1e-15);
        let e = nu_upper(&unit(), 1.0).unwrap();
        assert!((e.value - 0.25).abs() < 1e-15);
        assert_eq!(e.argmax_r, Some(0.5));
    }

    #[test]
    fn extremizers_are_normalized() {
        let f = extremizer(ExtremizerFamily::Lower, 1.0, 1.0).unwrap();
        assert!((mu_lower(&f, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let f = extremizer(ExtremizerFamily::Upper, 2.0, 2.0).unwrap();
        assert_eq!(f.values()[0], 0.5);
        assert!((mu_upper(&f, 2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lower_family_gap_on_unit_indicator() {
        let d = duality_gap(&unit(), ExtremizerFamily::Lower, 1.0, &[0.25, 0.75]).unwrap();
        assert!((d.sup_pairing - 0.25).abs() < 1e-15);
        assert!((d.functional_value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pairing_bound_equality_case() {
        let s = pairing_bound_check(&unit(), &unit(), ExtremizerFamily::Upper, 1.0).unwrap();
        assert!(s.abs() < 1e-15);
        let z = StepFunction::zero();
        assert_eq!(pairing_bound_check(&z, &unit(), ExtremizerFamily::Lower, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_input_rejected() {
        let f = StepFunction::indicator(0.0, 1.0, -1.0).unwrap();
        assert!(mu_upper(&f, 1.0).is_err());
    }
}
