//! Running maxima, the discrete stand-in for one-sided essential suprema.

use super::grid::GridFunction;

/// `out[i] = max(xs[0..=i])`.
pub fn prefix_max(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut m = f64::NEG_INFINITY;
    for &x in xs {
        m = m.max(x);
        out.push(m);
    }
    out
}

/// `out[i] = max(xs[i..])`.
pub fn suffix_max(xs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; xs.len()];
    let mut m = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate().rev() {
        m = m.max(x);
        out[i] = m;
    }
    out
}

/// Node-wise running maximum from the left.
pub fn prefix_sup(f: &GridFunction) -> GridFunction {
    GridFunction::from_parts(f.grid().clone(), prefix_max(f.values()), f.extension())
}

/// Node-wise running maximum from the right.
pub fn suffix_sup(f: &GridFunction) -> GridFunction {
    GridFunction::from_parts(f.grid().clone(), suffix_max(f.values()), f.extension())
}
