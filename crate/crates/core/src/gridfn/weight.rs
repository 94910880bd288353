//! Piecewise power-log weights `W(r) = Σ c·r^a·|ln r|^b` on a tiling of `(0, ∞)`.

use serde::{Deserialize, Serialize};

use super::grid::{Extension, GridFunction, LogGrid};
use crate::error::{input, Error, Result};
use crate::real;

/// One power-log monomial `c·r^a·|ln r|^b`.
///
/// `c = +inf` is allowed internally (the reciprocal power of a vanishing
/// segment); user input is restricted to finite `c >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "real")]
    pub c: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

impl Term {
    pub fn new(c: f64, a: f64, b: f64) -> Self {
        Term { c, a, b }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let mut v = self.c * r.powf(self.a);
        if self.b != 0.0 {
            v *= r.ln().abs().powf(self.b);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<Term>,
}

impl Segment {
    /// Zero-coefficient terms are dropped.
    pub fn new(lo: f64, hi: f64, mut terms: Vec<Term>) -> Self {
        terms.retain(|t| t.c != 0.0);
        Segment { lo, hi, terms }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.c == 0.0)
    }

    fn contains_one(&self) -> bool {
        self.lo < 1.0 && 1.0 < self.hi
    }
}

/// A nonnegative weight on `(0, ∞)` given segment-wise in power-log form.
///
/// Segments are stored sorted and tile `(0, ∞)` exactly. Evaluation at a
/// shared endpoint uses the segment on the left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct WeightSpec {
    segments: Vec<Segment>,
}

impl WeightSpec {
    /// Validated constructor for user-supplied segments.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let spec = Self::from_segments(segments)?;
        for s in &spec.segments {
            for t in &s.terms {
                if !(t.c >= 0.0) || !t.c.is_finite() {
                    return input(format!("coefficient {} must be finite and nonnegative", t.c));
                }
                if !t.a.is_finite() || !t.b.is_finite() {
                    return input("exponents must be finite");
                }
                if t.b < 0.0 && s.contains_one() && t.c > 0.0 {
                    return input(format!(
                        "segment ({}, {}) contains r = 1 and has negative log exponent {}",
                        s.lo, s.hi, t.b
                    ));
                }
            }
        }
        Ok(spec)
    }

    /// Checks the tiling only; coefficients may be `+inf`.
    pub(crate) fn from_segments(mut segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return input("weight needs at least one segment");
        }
        segments.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        for s in &mut segments {
            s.terms.retain(|t| t.c != 0.0);
        }
        if segments[0].lo != 0.0 {
            return input("first segment must start at 0");
        }
        if segments.last().map(|s| s.hi) != Some(f64::INFINITY) {
            return input("last segment must extend to inf");
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.lo < s.hi) || s.lo.is_nan() {
                return input(format!("segment {i} has lo >= hi"));
            }
            if i + 1 < segments.len() && s.hi != segments[i + 1].lo {
                return input(format!(
                    "segments do not tile (0, inf): gap or overlap at {}",
                    s.hi
                ));
            }
        }
        Ok(WeightSpec { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn zero() -> Self {
        Self::power(0.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::power(c, 0.0)
    }

    /// `c·r^a` on all of `(0, ∞)`.
    pub fn power(c: f64, a: f64) -> Self {
        Self::power_log(c, a, 0.0)
    }

    pub fn power_log(c: f64, a: f64, b: f64) -> Self {
        WeightSpec {
            segments: vec![Segment::new(0.0, f64::INFINITY, vec![Term::new(c, a, b)])],
        }
    }

    /// The indicator of `(lo, hi)`.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::piecewise(vec![(lo, hi, vec![Term::new(1.0, 0.0, 0.0)])])
    }

    /// Builds a weight from possibly non-adjacent pieces; uncovered parts of
    /// `(0, ∞)` are filled with zero.
    pub fn piecewise(mut pieces: Vec<(f64, f64, Vec<Term>)>) -> Result<Self> {
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut segments = Vec::new();
        let mut at = 0.0;
        for (lo, hi, terms) in pieces {
            if lo < at {
                return input(format!("pieces overlap at {lo}"));
            }
            if lo > at {
                segments.push(Segment::new(at, lo, Vec::new()));
            }
            segments.push(Segment::new(lo, hi, terms));
            at = hi;
        }
        if at < f64::INFINITY {
            segments.push(Segment::new(at, f64::INFINITY, Vec::new()));
        }
        Self::new(segments)
    }

    /// `W·1_(lo, hi)`.
    pub fn restricted(&self, lo: f64, hi: f64) -> Self {
        let mut segments = Vec::new();
        if lo > 0.0 {
            segments.push(Segment::new(0.0, lo, Vec::new()));
        }
        for s in &self.segments {
            let a = s.lo.max(lo);
            let b = s.hi.min(hi);
            if a < b {
                segments.push(Segment::new(a, b, s.terms.clone()));
            }
        }
        if hi < f64::INFINITY {
            segments.push(Segment::new(hi, f64::INFINITY, Vec::new()));
        }
        WeightSpec { segments }
    }

    pub fn scale(&self, t: f64) -> Self {
        self.map_terms(|x| Term::new(if x.c == 0.0 { 0.0 } else { x.c * t }, x.a, x.b))
    }

    /// `r^k·W(r)`.
    pub fn mul_power(&self, k: f64) -> Self {
        self.map_terms(|x| Term::new(x.c, x.a + k, x.b))
    }

    pub(crate) fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Self {
        WeightSpec {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.lo, s.hi, s.terms.iter().map(&f).collect()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.segments.iter().all(Segment::is_zero)
    }

    /// Interior segment endpoints, i.e. the finite positive places where the
    /// weight may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.lo).collect()
    }

    /// Breakpoints plus `r = 1` when a log factor is active there.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = self.breakpoints();
        let log_at_one = self
            .segments
            .iter()
            .any(|s| s.lo <= 1.0 && 1.0 <= s.hi && s.terms.iter().any(|t| t.b != 0.0 && t.c != 0.0));
        if log_at_one && !out.contains(&1.0) {
            out.push(1.0);
            out.sort_by(f64::total_cmp);
        }
        out
    }

    /// Smallest and largest radius where the weight is not identically zero.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.segments.iter().find(|s| !s.is_zero())?;
        let last = self.segments.iter().rev().find(|s| !s.is_zero())?;
        Some((first.lo, last.hi))
    }

    pub fn segment_at(&self, r: f64) -> &Segment {
        let i = self.segments.partition_point(|s| s.hi < r);
        &self.segments[i.min(self.segments.len() - 1)]
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.segment_at(r).eval(r)
    }

    pub fn sample(&self, grid: &LogGrid) -> GridFunction {
        let values = grid.nodes().iter().map(|&r| self.eval(r)).collect();
        GridFunction::from_parts(grid.clone(), values, Extension::ZeroOutside)
    }

    /// `W^{-1/(p-1)}` segment by segment. A vanishing segment becomes `+inf`.
    pub fn power_of_inverse(&self, p: f64) -> Result<Self> {
        crate::error::check_exponent(p)?;
        let k = -1.0 / (p - 1.0);
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let live: Vec<&Term> = s.terms.iter().filter(|t| t.c != 0.0).collect();
            let term = match live.as_slice() {
                [] => Term::new(f64::INFINITY, 0.0, 0.0),
                [t] => Term::new(t.c.powf(k), t.a * k, t.b * k),
                _ => {
                    return Err(Error::Input(format!(
                        "segment ({}, {}) has several terms; its reciprocal power is not power-log",
                        s.lo, s.hi
                    )))
                }
            };
            segments.push(Segment::new(s.lo, s.hi, vec![term]));
        }
        Ok(WeightSpec { segments })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("weight serialization cannot fail")
    }

    pub fn read_json(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    segments: Vec<RawSegment>,
}

#[derive(Serialize, Deserialize)]
struct RawSegment {
    #[serde(with = "real")]
    lo: f64,
    #[serde(with = "real")]
    hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "real::option")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<Term>>,
}

impl TryFrom<RawSpec> for WeightSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let mut segments = Vec::with_capacity(raw.segments.len());
        for s in raw.segments {
            let terms = match (s.terms, s.c) {
                (Some(_), Some(_)) => return input("segment has both \"c\" and \"terms\""),
                (Some(terms), None) => terms,
                (None, Some(c)) => vec![Term::new(c, s.a.unwrap_or(0.0), s.b.unwrap_or(0.0))],
                (None, None) => Vec::new(),
            };
            segments.push(Segment::new(s.lo, s.hi, terms));
        }
        WeightSpec::new(segments)
    }
}

impl From<WeightSpec> for RawSpec {
    fn from(w: WeightSpec) -> RawSpec {
        let segments = w
            .segments
            .into_iter()
            .map(|s| {
                if let [t] = s.terms.as_slice() {
                    RawSegment { lo: s.lo, hi: s.hi, c: Some(t.c), a: Some(t.a), b: Some(t.b), terms: None }
                } else if s.terms.is_empty() {
                    RawSegment { lo: s.lo, hi: s.hi, c: Some(0.0), a: Some(0.0), b: Some(0.0), terms: None }
                } else {
                    RawSegment { lo: s.lo, hi: s.hi, c: None, a: None, b: None, terms: Some(s.terms) }
                }
            })
            .collect();
        RawSpec { segments }
    }
}
