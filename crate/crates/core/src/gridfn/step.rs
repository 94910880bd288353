use super::grid::{Extension, GridFunction};
use crate::error::{input, Error, Result};

/// Piecewise-constant function on `(0, ∞)`.
///
/// `values[i]` holds on `[breaks[i], breaks[i+1])`, the last value holds on
/// `[breaks[K], ∞)`, and the function is zero on `(0, breaks[0])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != values.len() {
            return input("a step function needs matching, nonempty breaks and values");
        }
        if !(breaks[0] >= 0.0) {
            return input("first break must be nonnegative");
        }
        for i in 0..breaks.len() {
            if !breaks[i].is_finite() || !values[i].is_finite() {
                return input(format!("entry {i} is not finite"));
            }
            if i > 0 && !(breaks[i - 1] < breaks[i]) {
                return input(format!("breaks are not strictly increasing at index {i}"));
            }
        }
        Ok(StepFunction { breaks, values })
    }

    pub fn zero() -> Self {
        StepFunction { breaks: vec![0.0], values: vec![0.0] }
    }

    /// The indicator of `(lo, hi)` scaled by `c`.
    pub fn indicator(lo: f64, hi: f64, c: f64) -> Result<Self> {
        if lo == 0.0 {
            Self::new(vec![0.0, hi], vec![c, 0.0])
        } else {
            Self::new(vec![0.0, lo, hi], vec![0.0, c, 0.0])
        }
    }

    /// Step function with `values[i]` on the cell `(r_i, r_{i+1})` of a grid,
    /// zero outside.
    pub fn on_cells(nodes: &[f64], values: &[f64]) -> Result<Self> {
        if nodes.len() != values.len() + 1 {
            return input("need one value per cell");
        }
        let mut b = nodes.to_vec();
        let mut v = values.to_vec();
        v.push(0.0);
        if b[0] > 0.0 {
            b.insert(0, 0.0);
            v.insert(0, 0.0);
        }
        Self::new(b, v)
    }

    /// Piecewise-constant shadow of `|f|`: each cell carries the mean of the
    /// absolute endpoint values. The outside pieces follow the extension.
    pub fn shadow(f: &GridFunction) -> Self {
        let x = f.nodes();
        let v = f.values();
        let n = x.len();
        let mut breaks = vec![0.0];
        let mut values = vec![match f.extension() {
            Extension::ZeroOutside => 0.0,
            Extension::ConstantOutside => v[0].abs(),
            Extension::LinearToZeroAtOrigin => 0.5 * v[0].abs(),
        }];
        for i in 0..n - 1 {
            breaks.push(x[i]);
            values.push(0.5 * (v[i].abs() + v[i + 1].abs()));
        }
        breaks.push(x[n - 1]);
        values.push(match f.extension() {
            Extension::ZeroOutside => 0.0,
            _ => v[n - 1].abs(),
        });
        StepFunction { breaks, values }
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn abs(&self) -> Self {
        StepFunction { breaks: self.breaks.clone(), values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn scale(&self, t: f64) -> Self {
        StepFunction { breaks: self.breaks.clone(), values: self.values.iter().map(|v| v * t).collect() }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let i = self.breaks.partition_point(|&b| b <= r);
        if i == 0 {
            0.0
        } else {
            self.values[i - 1]
        }
    }

    /// Finite cells as `(lo, hi, value)`, the tail excluded.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let lead = (self.breaks[0] > 0.0).then_some((0.0, self.breaks[0], 0.0));
        lead.into_iter().chain(
            self.breaks.windows(2).zip(&self.values).map(|(w, &v)| (w[0], w[1], v)),
        )
    }

    /// `∫_0^r f` for every break, i.e. the values of the piecewise-linear
    /// primitive at the breaks.
    pub fn primitive_at_breaks(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.breaks.len());
        let mut acc = 0.0;
        out.push(0.0);
        for (w, &v) in self.breaks.windows(2).zip(&self.values) {
            acc += v * (w[1] - w[0]);
            out.push(acc);
        }
        out
    }

    /// `∫_0^r f`.
    pub fn primitive(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &b) in self.breaks.iter().enumerate() {
            if b >= r {
                break;
            }
            let end = self.breaks.get(i + 1).copied().unwrap_or(f64::INFINITY).min(r);
            acc += self.values[i] * (end - b);
        }
        acc
    }

    /// `∫_0^∞ |f|^p`; infinite when the tail is nonzero.
    pub fn lp_norm_p(&self, p: f64) -> f64 {
        if self.tail() != 0.0 {
            return f64::INFINITY;
        }
        self.cells().map(|(a, b, v)| v.abs().powf(p) * (b - a)).sum()
    }

    /// `∫_0^∞ f·g`, with `0·∞ = 0` and `+∞` when a tail product is positive.
    pub fn pairing(&self, g: &StepFunction) -> f64 {
        let mut pts: Vec<f64> = self.breaks.iter().chain(g.breaks.iter()).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut acc = 0.0;
        for w in pts.windows(2) {
            let fv = self.eval(w[0]);
            let gv = g.eval(w[0]);
            if fv != 0.0 && gv != 0.0 {
                acc += fv * gv * (w[1] - w[0]);
            }
        }
        let tail = self.tail() * g.tail();
        if tail != 0.0 {
            return f64::INFINITY * tail.signum();
        }
        acc
    }

    /// Parses the same two-column CSV as grid functions: each row gives a
    /// break and the value from that break on.
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let mut breaks = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("row {}: expected 2 columns", line + 2)));
            }
            let parse = |s: &str| {
                crate::real::parse(s).ok_or_else(|| Error::Parse(format!("row {}: not a number: {s:?}", line + 2)))
            };
            breaks.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        Self::new(breaks, values)
    }

    pub fn read_csv_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (b, v) in self.breaks.iter().zip(&self.values) {
            out.push_str(&format!("{b:?},{v:?}\n"));
        }
        out
    }
}
