use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Strictly increasing positive radii, at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    nodes: Vec<f64>,
}

impl LogGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return input("a grid needs at least two nodes");
        }
        for (i, &r) in nodes.iter().enumerate() {
            if !(r > 0.0) || !r.is_finite() {
                return input(format!("node {i} = {r} is not a finite positive radius"));
            }
            if i > 0 && !(nodes[i - 1] < r) {
                return input(format!("nodes are not strictly increasing at index {i}"));
            }
        }
        Ok(LogGrid { nodes })
    }

    /// `n` geometrically spaced nodes from `lo` to `hi` inclusive.
    pub fn geometric(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
            return input(format!("bad geometric grid ({lo}, {hi}, {n})"));
        }
        let q = (hi / lo).ln() / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| lo * (q * i as f64).exp()).collect();
        nodes[0] = lo;
        nodes[n - 1] = hi;
        Self::new(nodes)
    }

    /// Geometric grid with about `per_decade` nodes per factor of ten.
    pub fn per_decade(lo: f64, hi: f64, per_decade: usize) -> Result<Self> {
        let decades = (hi / lo).log10().max(0.0);
        let n = ((decades * per_decade as f64).ceil() as usize + 1).max(2);
        Self::geometric(lo, hi, n)
    }

    /// Adds `extra` radii (positive, finite) to the node set.
    pub fn refined(&self, extra: &[f64]) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.extend(extra.iter().copied().filter(|r| *r > 0.0 && r.is_finite()));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        LogGrid { nodes }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
}

/// How a grid function continues outside `[r_1, r_N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    /// Zero on `(0, r_1)` and `(r_N, ∞)`; jumps at the ends are not charged
    /// to any energy.
    ZeroOutside,
    /// `u(r_1)` on `(0, r_1)` and `u(r_N)` on `(r_N, ∞)`.
    ConstantOutside,
    /// Linear from `0` at the origin up to `u(r_1)`, constant `u(r_N)` beyond.
    LinearToZeroAtOrigin,
}

impl std::str::FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero-outside" => Ok(Extension::ZeroOutside),
            "constant-outside" => Ok(Extension::ConstantOutside),
            "linear-to-zero-at-origin" => Ok(Extension::LinearToZeroAtOrigin),
            _ => input(format!("unknown extension {s:?}")),
        }
    }
}

/// Piecewise-linear function on a [`LogGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: LogGrid,
    values: Vec<f64>,
    extension: Extension,
}

impl GridFunction {
    pub fn new(grid: LogGrid, values: Vec<f64>, extension: Extension) -> Result<Self> {
        if values.len() != grid.len() {
            return input(format!("{} values for {} nodes", values.len(), grid.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return input(format!("value at node {i} is not finite"));
        }
        Ok(GridFunction { grid, values, extension })
    }

    pub(crate) fn from_parts(grid: LogGrid, values: Vec<f64>, extension: Extension) -> Self {
        GridFunction { grid, values, extension }
    }

    pub fn from_fn(grid: LogGrid, extension: Extension, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, extension)
    }

    pub fn grid(&self) -> &LogGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values, self.extension)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scale(&self, t: f64) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * t).collect(),
            extension: self.extension,
        }
    }

    /// Value at `r > 0`, including the extension.
    pub fn eval(&self, r: f64) -> f64 {
        let x = self.grid.nodes();
        let n = x.len();
        if r < x[0] {
            return match self.extension {
                Extension::ZeroOutside => 0.0,
                Extension::ConstantOutside => self.values[0],
                Extension::LinearToZeroAtOrigin => self.values[0] * (r / x[0]),
            };
        }
        if r > x[n - 1] {
            return match self.extension {
                Extension::ZeroOutside => 0.0,
                _ => self.values[n - 1],
            };
        }
        let i = x.partition_point(|&v| v <= r).clamp(1, n - 1) - 1;
        let t = (r - x[i]) / (x[i + 1] - x[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    /// Slope on cell `i`, i.e. on `[r_i, r_{i+1}]`.
    pub fn slope(&self, i: usize) -> f64 {
        let x = self.grid.nodes();
        (self.values[i + 1] - self.values[i]) / (x[i + 1] - x[i])
    }

    /// Whether the function tends to zero at the origin.
    pub fn vanishes_at_origin(&self) -> bool {
        self.extension == Extension::LinearToZeroAtOrigin || self.values[0] == 0.0
    }

    /// Reads a two-column `r,value` CSV with header.
    pub fn read_csv<R: std::io::Read>(reader: R, extension: Extension) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("row {}: expected 2 columns, found {}", line + 2, rec.len())));
            }
            let parse = |s: &str| {
                crate::real::parse(s).ok_or_else(|| Error::Parse(format!("row {}: not a number: {s:?}", line + 2)))
            };
            nodes.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        Self::new(LogGrid::new(nodes)?, values, extension)
    }

    pub fn read_csv_path(path: impl AsRef<std::path::Path>, extension: Extension) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, extension)
    }

    /// CSV text with shortest round-trip number formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            out.push_str(&format!("{r:?},{v:?}\n"));
        }
        out
    }
}
