//! Both sides of the classical, improved and one-sided Hardy inequalities
//! for piecewise-linear functions, the integral form, and the decreasing
//! rearrangement.
//!
//! On a cell where `u(r) = α + βr`, write `a` for the running maximum of
//! `|u|` over earlier nodes and `b` for the running maximum of `|u(s)|/s`
//! over later nodes. Because `|u|` is convex and `|u(s)|/s` is monotone in
//! `1/s` on the cell, the two one-sided suprema are exactly
//! `max((a/r)^p, |u/r|^p)` and `max(b^p, |u/r|^p)`. Splitting the cell at
//! the closed-form crossings of `a/r`, `b` and `|u/r|` leaves pieces on
//! which one of the three curves dominates, so the improved integrand is
//! integrated without any root finding.

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{check_exponent, precondition, Result};
use crate::gridfn::quad::{gk21, integrate, QuadOptions};
use crate::gridfn::{lp_energy, Extension, GridFunction, LogGrid, StepFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The four left-hand sides for one function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyIntegrals {
    pub classical: f64,
    pub left: f64,
    pub right: f64,
    pub improved: f64,
}

fn check_admissible(u: &GridFunction) -> Result<()> {
    if !u.vanishes_at_origin() {
        return precondition(
            "u must vanish at the origin: use the linear-to-zero-at-origin extension or set u(r_1) = 0",
        );
    }
    if u.extension() == Extension::ZeroOutside && *u.values().last().unwrap() != 0.0 {
        return precondition("zero-outside extension needs u(r_N) = 0 to stay continuous");
    }
    Ok(())
}

/// `∫_c^d (a/r)^p dr`.
fn power_piece(a: f64, p: f64, c: f64, d: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if d.is_infinite() {
        return c * (a / c).powf(p) / (p - 1.0);
    }
    c * (a / c).powf(p) * -((p - 1.0) * (c / d).ln()).exp_m1() / (p - 1.0)
}

/// `∫_c^d |u(r)/r|^p dr` with `u(r) = uc + β(r - c)` and no sign change.
fn linear_piece(uc: f64, beta: f64, p: f64, c: f64, d: f64) -> f64 {
    if uc == 0.0 && beta == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        let alpha = uc - beta * c;
        let t1 = alpha * alpha * (d - c) / (c * d);
        let t2 = 2.0 * alpha * beta * (d / c).ln();
        let t3 = beta * beta * (d - c);
        let v = t1 + t2 + t3;
        if v.abs() > 1e-6 * (t1.abs() + t2.abs() + t3.abs()) {
            return v;
        }
    }
    // a root at an endpoint makes |u|^p nonsmooth there; r = root ± L t² smooths it
    let len = d - c;
    let ud = uc + beta * len;
    let g = |t: f64| -> f64 {
        if uc.abs() <= 1e-12 * ud.abs() {
            let x = len * t * t;
            (beta * x / (c + x)).abs().powf(p) * 2.0 * len * t
        } else if ud.abs() <= 1e-12 * uc.abs() {
            let x = len * t * t;
            (beta * x / (d - x)).abs().powf(p) * 2.0 * len * t
        } else {
            let r = c + len * t;
            ((uc + beta * len * t) / r).abs().powf(p) * len
        }
    };
    let (v, e) = gk21(&g, 0.0, 1.0);
    if e <= 1e-12 * v.abs() {
        return v;
    }
    let opts = QuadOptions { rel_tol: 1e-12, ..QuadOptions::default() };
    integrate(g, 0.0, 1.0, opts).value
}

/// All four left-hand sides at once; they share the per-piece integrals so
/// that `improved >= max(classical, left, right)` holds exactly in floating
/// point.
pub fn hardy_integrals(u: &GridFunction, p: f64) -> Result<HardyIntegrals> {
    check_exponent(p)?;
    check_admissible(u)?;
    let x = u.nodes();
    let v = u.values();
    let n = x.len();

    let mut prefix = Vec::with_capacity(n);
    let mut m = 0.0f64;
    for &vi in v {
        m = m.max(vi.abs());
        prefix.push(m);
    }
    let mut suffix = vec![0.0; n];
    let mut m = 0.0f64;
    for i in (0..n).rev() {
        m = m.max(v[i].abs() / x[i]);
        suffix[i] = m;
    }

    let mut out = HardyIntegrals { classical: 0.0, left: 0.0, right: 0.0, improved: 0.0 };

    // (0, r_1): u is linear through the origin or identically zero
    let slope0 = if u.extension() == Extension::LinearToZeroAtOrigin { v[0].abs() / x[0] } else { 0.0 };
    let il = x[0] * slope0.powf(p);
    let ib = x[0] * suffix[0].powf(p);
    out.classical += il;
    out.left += il;
    out.right += ib.max(il);
    out.improved += ib.max(il);

    let mut cuts = Vec::with_capacity(8);
    for i in 0..n - 1 {
        let (c0, d0) = (x[i], x[i + 1]);
        let beta = (v[i + 1] - v[i]) / (d0 - c0);
        let alpha = v[i] - beta * c0;
        let a = prefix[i];
        let b = suffix[i + 1];
        cuts.clear();
        cuts.push(c0);
        let mut cand = |r: f64| {
            if r > c0 && r < d0 {
                cuts.push(r);
            }
        };
        if beta != 0.0 {
            cand(-alpha / beta);
            cand((a - alpha) / beta);
            cand((-a - alpha) / beta);
        }
        if b - beta != 0.0 {
            cand(alpha / (b - beta));
        }
        if -b - beta != 0.0 {
            cand(alpha / (-b - beta));
        }
        if b > 0.0 {
            cand(a / b);
        }
        cuts.push(d0);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (c, d) = (w[0], w[1]);
            let uc = if c == c0 { v[i] } else { alpha + beta * c };
            let il = linear_piece(uc, beta, p, c, d);
            let ia = power_piece(a, p, c, d);
            let ib = b.powf(p) * (d - c);
            out.classical += il;
            out.left += ia.max(il);
            out.right += ib.max(il);
            out.improved += ia.max(ib).max(il);
        }
    }

    // (r_N, ∞): u is constant c (zero for the zero extension)
    let c = if u.extension() == Extension::ZeroOutside { 0.0 } else { v[n - 1].abs() };
    let tail_l = power_piece(c, p, x[n - 1], f64::INFINITY);
    let tail_a = power_piece(prefix[n - 1], p, x[n - 1], f64::INFINITY);
    out.classical += tail_l;
    out.right += tail_l;
    out.left += tail_a.max(tail_l);
    out.improved += tail_a.max(tail_l);
    Ok(out)
}

/// `∫ |u|^p r^{-p} dr`.
pub fn classical_lhs(u: &GridFunction, p: f64) -> Result<f64> {
    Ok(hardy_integrals(u, p)?.classical)
}

/// `∫ max{sup_{s<=r} |u(s)|^p/r^p, sup_{s>=r} |u(s)|^p/s^p} dr`.
pub fn improved_lhs(u: &GridFunction, p: f64) -> Result<f64> {
    Ok(hardy_integrals(u, p)?.improved)
}

pub fn one_sided_lhs(u: &GridFunction, p: f64, side: Side) -> Result<f64> {
    let h = hardy_integrals(u, p)?;
    Ok(match side {
        Side::Left => h.left,
        Side::Right => h.right,
    })
}

/// `G(r) = ∫_0^r f` as a grid function vanishing at the origin and constant
/// beyond the last break.
pub fn primitive_function(f: &StepFunction) -> Result<GridFunction> {
    let mut nodes: Vec<f64> = f.breaks().to_vec();
    let mut g = f.primitive_at_breaks();
    if nodes[0] == 0.0 {
        nodes.remove(0);
        g.remove(0);
    }
    if nodes.is_empty() {
        nodes.push(1.0);
        g.push(0.0);
    }
    if nodes.len() < 2 {
        nodes.push(2.0 * nodes[0]);
        g.push(g[0]);
    }
    GridFunction::new(LogGrid::new(nodes)?, g, Extension::LinearToZeroAtOrigin)
}

/// `∫ sup_s |min(1/r, 1/s) ∫_0^s f|^p dr` for a step function `f`.
pub fn integral_form_lhs(f: &StepFunction, p: f64) -> Result<f64> {
    if f.tail() != 0.0 {
        return precondition("f must be p-integrable; its value beyond the last break must be 0");
    }
    improved_lhs(&primitive_function(f)?, p)
}

/// Both sides of the improved inequality and its weaker relatives.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub p: f64,
    pub classical_lhs: f64,
    pub improved_lhs: f64,
    pub left_sided_lhs: f64,
    pub right_sided_lhs: f64,
    pub rhs_energy: f64,
    pub sharp_factor: f64,
}

const REL_TOL: f64 = 1e-9;

impl HardyReport {
    pub fn bound(&self) -> f64 {
        if self.rhs_energy == 0.0 {
            0.0
        } else {
            self.sharp_factor * self.rhs_energy
        }
    }

    fn holds_for(&self, lhs: f64) -> bool {
        let bound = self.bound();
        lhs <= bound + REL_TOL * bound.abs() || (lhs == 0.0 && bound == 0.0)
    }

    pub fn holds_classical(&self) -> bool {
        self.holds_for(self.classical_lhs)
    }

    pub fn holds_improved(&self) -> bool {
        self.holds_for(self.improved_lhs)
    }

    pub fn holds_left_sided(&self) -> bool {
        self.holds_for(self.left_sided_lhs)
    }

    pub fn holds_right_sided(&self) -> bool {
        self.holds_for(self.right_sided_lhs)
    }

    pub fn holds(&self) -> bool {
        self.holds_improved() && self.holds_classical() && self.holds_left_sided() && self.holds_right_sided()
    }

    /// `improved_lhs / bound`, the fraction of the sharp bound used.
    pub fn ratio(&self) -> f64 {
        let b = self.bound();
        if b == 0.0 {
            0.0
        } else {
            self.improved_lhs / b
        }
    }
}

impl Serialize for HardyReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Holds {
            classical: bool,
            improved: bool,
            left_sided: bool,
            right_sided: bool,
        }
        let mut st = s.serialize_struct("HardyReport", 10)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("classical_lhs", &self.classical_lhs)?;
        st.serialize_field("improved_lhs", &self.improved_lhs)?;
        st.serialize_field("left_sided_lhs", &self.left_sided_lhs)?;
        st.serialize_field("right_sided_lhs", &self.right_sided_lhs)?;
        st.serialize_field("rhs_energy", &self.rhs_energy)?;
        st.serialize_field("sharp_factor", &self.sharp_factor)?;
        st.serialize_field("bound", &self.bound())?;
        st.serialize_field("ratio", &self.ratio())?;
        st.serialize_field(
            "holds",
            &Holds {
                classical: self.holds_classical(),
                improved: self.holds_improved(),
                left_sided: self.holds_left_sided(),
                right_sided: self.holds_right_sided(),
            },
        )?;
        st.end()
    }
}

pub fn sharp_factor(p: f64) -> f64 {
    (p / (p - 1.0)).powf(p)
}

pub fn verify(u: &GridFunction, p: f64) -> Result<HardyReport> {
    let h = hardy_integrals(u, p)?;
    let e = lp_energy(u, p, None)?;
    Ok(HardyReport {
        p,
        classical_lhs: h.classical,
        improved_lhs: h.improved,
        left_sided_lhs: h.left,
        right_sided_lhs: h.right,
        rhs_energy: e.value,
        sharp_factor: sharp_factor(p),
    })
}

/// A `(value, length)` level cell of a step function.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Cell {
    pub value: f64,
    pub length: f64,
}

/// The nonincreasing rearrangement of `|f|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    /// Value of `|f|` on its unbounded tail; `f*` never drops below it.
    pub tail: f64,
    /// The cells of `f*` from the origin outwards.
    pub cells: Vec<Cell>,
    pub fstar: StepFunction,
}

/// Cells of `|f|` that lie strictly above the tail level, in spatial order.
pub fn level_cells(f: &StepFunction) -> Vec<Cell> {
    let tail = f.tail().abs();
    f.cells()
        .filter(|&(_, _, v)| v.abs() > tail)
        .map(|(a, b, v)| Cell { value: v.abs(), length: b - a })
        .collect()
}

/// Lays the level cells of `|f|` out from the origin in order of decreasing
/// value. Cell lengths are copied, not recomputed, so the result is exactly
/// equimeasurable with `|f|`.
pub fn decreasing_rearrangement(f: &StepFunction) -> Rearrangement {
    let tail = f.tail().abs();
    let mut cells = level_cells(f);
    cells.sort_by(|x, y| y.value.total_cmp(&x.value));
    let mut breaks = Vec::with_capacity(cells.len() + 1);
    let mut values = Vec::with_capacity(cells.len() + 1);
    let mut at = 0.0;
    for c in &cells {
        breaks.push(at);
        values.push(c.value);
        at += c.length;
    }
    breaks.push(at);
    values.push(tail);
    // zero-length cells cannot occur: level cells come from strictly increasing breaks
    let fstar = StepFunction::new(breaks, values).expect("rearranged breaks are increasing");
    Rearrangement { tail, cells, fstar }
}

/// Rearrangement of the piecewise-constant shadow of a grid function.
pub fn rearrange_grid(f: &GridFunction) -> Rearrangement {
    decreasing_rearrangement(&StepFunction::shadow(f))
}

/// `Σ value^p · length` summed in a canonical order, so that equimeasurable
/// cell lists give bit-identical results.
pub fn cells_lp_norm_p(cells: &[Cell], p: f64) -> f64 {
    let mut sorted = cells.to_vec();
    sorted.sort_by(|x, y| y.value.total_cmp(&x.value).then(x.length.total_cmp(&y.length)));
    sorted.iter().map(|c| c.value.powf(p) * c.length).sum()
}

/// `(sup_s min(1/r, 1/s) ∫_0^s f*, (1/r) ∫_0^r f*)` for nonincreasing,
/// nonnegative `f*`.
pub fn sup_kernel_identity_check(fstar: &StepFunction, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) || !r.is_finite() {
        return precondition("r must be a finite positive radius");
    }
    let v = fstar.values();
    if v.iter().any(|&x| x < 0.0) {
        return precondition("f* must be nonnegative");
    }
    let lead_zero = fstar.breaks()[0] > 0.0;
    if v.windows(2).any(|w| w[1] > w[0]) || (lead_zero && v.iter().any(|&x| x > 0.0)) {
        return precondition("f* must be nonincreasing");
    }
    let rhs = fstar.primitive(r) / r;
    let mut lhs = rhs;
    for &b in fstar.breaks() {
        if b > 0.0 {
            let k = if b <= r { 1.0 / r } else { 1.0 / b };
            lhs = lhs.max(k * fstar.primitive(b));
        }
    }
    // s → ∞: G(s)/s → tail
    lhs = lhs.max(fstar.tail());
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp() -> GridFunction {
        GridFunction::new(LogGrid::new(vec![1.0, 2.0]).unwrap(), vec![1.0, 1.0], Extension::LinearToZeroAtOrigin)
            .unwrap()
    }

    fn tent() -> GridFunction {
        GridFunction::new(LogGrid::new(vec![1.0, 2.0]).unwrap(), vec![1.0, 0.0], Extension::LinearToZeroAtOrigin)
            .unwrap()
    }

    #[test]
    fn ramp_all_sides_equal_two() {
        let h = hardy_integrals(&ramp(), 2.0).unwrap();
        for v in [h.classical, h.left, h.right, h.improved] {
            assert!((v - 2.0).abs() < 1e-14, "{h:?}");
        }
    }

    #[test]
    fn tent_closed_forms() {
        let h = hardy_integrals(&tent(), 2.0).unwrap();
        assert!((h.classical - (4.0 - 4.0 * 2f64.ln())).abs() < 1e-12);
        assert!((h.improved - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonvanishing_origin_is_rejected() {
        let u = ramp().with_extension(Extension::ConstantOutside);
        assert!(hardy_integrals(&u, 2.0).is_err());
    }

    #[test]
    fn report_flags() {
        let r = verify(&tent(), 2.0).unwrap();
        assert_eq!(r.rhs_energy, 2.0);
        assert!(r.holds());
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["holds"]["improved"], true);
    }

    #[test]
    fn rearrangement_sorts_cells() {
        let f = StepFunction::on_cells(&[1.0, 2.0, 3.0, 4.0], &[3.0, 1.0, 2.0]).unwrap();
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.fstar.values(), &[3.0, 2.0, 1.0, 0.0]);
        assert_eq!(r.fstar.breaks(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn kernel_identity_examples() {
        let f = StepFunction::indicator(0.0, 1.0, 1.0).unwrap();
        assert_eq!(sup_kernel_identity_check(&f, 2.0).unwrap(), (0.5, 0.5));
        assert_eq!(sup_kernel_identity_check(&f, 0.5).unwrap(), (1.0, 1.0));
        let up = StepFunction::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(sup_kernel_identity_check(&up, 1.0).is_err());
    }
}
