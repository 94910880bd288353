use super::grid::{Extension, GridFunction};
use super::integrate::{integrate, integrate_with};
use super::quad::Quadrature;
use super::weight::WeightSpec;
use crate::error::{check_exponent, Result};

/// `∫ V|u'|^p dr` (`V = 1` when `None`). The slope is constant per cell, so
/// each cell contributes `|slope|^p ∫ V` exactly.
pub fn lp_energy(u: &GridFunction, p: f64, v: Option<&WeightSpec>) -> Result<Quadrature> {
    check_exponent(p)?;
    let x = u.nodes();
    let mut total = Quadrature::ZERO;
    let mut add = |slope: f64, lo: f64, hi: f64| -> Result<()> {
        if slope != 0.0 {
            let w = match v {
                None => Quadrature::exact(hi - lo),
                Some(v) => integrate(v, lo, hi)?,
            };
            total = total + w.scale(slope.abs().powf(p));
        }
        Ok(())
    };
    if u.extension() == Extension::LinearToZeroAtOrigin {
        add(u.values()[0] / x[0], 0.0, x[0])?;
    }
    for i in 0..x.len() - 1 {
        add(u.slope(i), x[i], x[i + 1])?;
    }
    Ok(total)
}

/// Per-cell energy profile `|slope_i|^p (r_{i+1} - r_i)` with `V = 1`.
pub fn lp_energy_profile(u: &GridFunction, p: f64) -> Vec<f64> {
    let x = u.nodes();
    (0..x.len() - 1).map(|i| u.slope(i).abs().powf(p) * (x[i + 1] - x[i])).collect()
}

/// `∫ W|u|^p dr`, including the extension pieces.
pub fn weighted_mass(u: &GridFunction, p: f64, w: &WeightSpec) -> Result<Quadrature> {
    check_exponent(p)?;
    let x = u.nodes();
    let v = u.values();
    let n = x.len();
    let mut total = Quadrature::ZERO;
    match u.extension() {
        Extension::ZeroOutside => {}
        Extension::ConstantOutside => {
            if v[0] != 0.0 {
                total = total + integrate(w, 0.0, x[0])?.scale(v[0].abs().powf(p));
            }
        }
        Extension::LinearToZeroAtOrigin => {
            if v[0] != 0.0 {
                let k = (v[0] / x[0]).abs().powf(p);
                total = total + integrate(&w.mul_power(p), 0.0, x[0])?.scale(k);
            }
        }
    }
    if u.extension() != Extension::ZeroOutside && v[n - 1] != 0.0 {
        total = total + integrate(w, x[n - 1], f64::INFINITY)?.scale(v[n - 1].abs().powf(p));
    }
    for i in 0..n - 1 {
        let (a, b) = (x[i], x[i + 1]);
        let (ua, ub) = (v[i], v[i + 1]);
        if ua == 0.0 && ub == 0.0 {
            continue;
        }
        let s = (ub - ua) / (b - a);
        let g = |r: f64| (ua + s * (r - a)).abs().powf(p);
        if ua * ub < 0.0 {
            let z = a + ua / (ua - ub) * (b - a);
            total = total + integrate_with(w, a, z, g)? + integrate_with(w, z, b, g)?;
        } else {
            total = total + integrate_with(w, a, b, g)?;
        }
        if total.is_divergent() {
            break;
        }
    }
    Ok(total)
}
