use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hardylab::constants::{self, Anchor, ConstantVariant, Interval, Kind};
use hardylab::duality::{self, DualityFunctional, ExtremizerFamily, Family};
use hardylab::gridfn::{Extension, GridFunction, StepFunction, WeightSpec};
use hardylab::schrodinger::{self, CertifyOptions, PruferOptions, RadialPotential};
use hardylab::sharp::{self, EstimatorConfig};
use hardylab::{error::check_exponent, hardy, transform};

use crate::Failure;

#[derive(Parser)]
#[command(name = "hardylab", version, about = "Improved and weighted Hardy inequalities on the half-line")]
pub struct Cli {
    /// Report wall_time_ms as 0 so that repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Both sides of the classical, improved and one-sided Hardy inequalities.
    Verify(VerifyArgs),
    /// Muckenhoupt-type constants B̄ and B̲ for a weight pair.
    Constants(ConstantsArgs),
    /// Discrete estimate of the best constant, bracketed by the B-constants.
    Sharp(SharpArgs),
    /// Evaluate a duality functional on a step function.
    Duality(DualityArgs),
    /// Changes of variables: half-line inversion, φ-substitution, log map.
    Transform(TransformArgs),
    /// Negative-eigenvalue counts and a finiteness certificate for -Δ - Q.
    Spectrum(SpectrumArgs),
    /// Decreasing rearrangement of a step function.
    Rearrange(RearrangeArgs),
}

#[derive(Args)]
pub struct VerifyArgs {
    /// CSV with header `r,value`.
    #[arg(long)]
    u: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value = "linear-to-zero-at-origin")]
    extension: String,
    /// Weight W; adds the doubly weighted report.
    #[arg(long, alias = "w")]
    weights: Option<PathBuf>,
    /// Weight V (default 1); needs --weights.
    #[arg(long)]
    v: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Overline,
    Underline,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnchorArg {
    Origin,
    Infinity,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntervalArg {
    Full,
    OriginInterval,
    TailInterval,
}

#[derive(Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    v: PathBuf,
    #[arg(long)]
    w: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "origin")]
    anchor: AnchorArg,
    #[arg(long, value_enum, default_value = "full")]
    interval: IntervalArg,
    /// Endpoint R of the interval variants.
    #[arg(long = "interval-R")]
    interval_r: Option<f64>,
    /// Boundary offset for the variants anchored at R.
    #[arg(long = "M")]
    m: Option<f64>,
}

#[derive(Args)]
pub struct SharpArgs {
    #[arg(long)]
    v: PathBuf,
    #[arg(long)]
    w: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long = "L", default_value_t = 1e6)]
    l: f64,
    #[arg(long, default_value_t = 4000)]
    n: usize,
    #[arg(long, default_value_t = 20000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
pub struct DualityArgs {
    /// Step-function CSV: each row is a break and the value from it on.
    #[arg(long)]
    g: PathBuf,
    /// mu_lower, mu_upper, nu_upper or nu_lower.
    #[arg(long)]
    family: String,
    /// The functional's parameter (α or β).
    #[arg(long, alias = "beta")]
    alpha: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    Invert,
    Substitute,
    Logmap,
}

#[derive(Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    op: TransformOp,
    #[arg(long)]
    v: Option<PathBuf>,
    #[arg(long)]
    w: PathBuf,
    #[arg(long)]
    u: Option<PathBuf>,
    #[arg(long, default_value = "linear-to-zero-at-origin")]
    extension: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Inner radius of the log map; must exceed 1.
    #[arg(long = "R")]
    r: Option<f64>,
    /// Also write the transformed function as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Radial potential Q as a weight spec.
    #[arg(long)]
    q: PathBuf,
    #[arg(long)]
    dim: u32,
    #[arg(long, default_value_t = 8)]
    lmax: u32,
    /// Comma-separated truncation radii.
    #[arg(long, default_value = "1e2,1e3,1e4", value_delimiter = ',')]
    ladder: Vec<f64>,
}

#[derive(Args)]
pub struct RearrangeArgs {
    /// Step-function CSV.
    #[arg(long)]
    f: PathBuf,
    /// Read --f as a piecewise-linear grid function and rearrange its
    /// piecewise-constant shadow.
    #[arg(long)]
    grid: bool,
}

type Outcome = Result<Value, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into(), "input"))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialization cannot fail")
}

fn read_weight(path: &Path) -> Result<WeightSpec, Failure> {
    WeightSpec::read_json(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()), "input"))
}

fn read_grid(path: &Path, extension: &str) -> Result<GridFunction, Failure> {
    let ext: Extension = extension.parse()?;
    GridFunction::read_csv_path(path, ext).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()), "input"))
}

fn read_step(path: &Path) -> Result<StepFunction, Failure> {
    StepFunction::read_csv_path(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()), "input"))
}

fn write_csv(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    if let Some(path) = path {
        std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()), "io"))?;
    }
    Ok(())
}

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Verify(a) => verify(a),
        Command::Constants(a) => constants(a),
        Command::Sharp(a) => sharp(a),
        Command::Duality(a) => duality(a),
        Command::Transform(a) => transform(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Rearrange(a) => rearrange(a),
    }
}

fn verify(a: VerifyArgs) -> Outcome {
    check_exponent(a.p)?;
    let u = read_grid(&a.u, &a.extension)?;
    let mut out = to_value(&hardy::verify(&u, a.p)?);
    match (&a.weights, &a.v) {
        (None, Some(_)) => return usage("--v needs --weights"),
        (None, None) => {}
        (Some(w), v) => {
            let w = read_weight(w)?;
            let v = match v {
                Some(v) => read_weight(v)?,
                None => WeightSpec::constant(1.0),
            };
            let weighted = constants::verify_weighted(&u, a.p, &v, &w)?;
            out["weighted"] = to_value(&weighted);
        }
    }
    Ok(out)
}

fn constants(a: ConstantsArgs) -> Outcome {
    check_exponent(a.p)?;
    let interval = match (a.interval, a.interval_r) {
        (IntervalArg::Full, None) => Interval::Full,
        (IntervalArg::Full, Some(_)) => return usage("--interval-R needs --interval origin-interval or tail-interval"),
        (_, None) => return usage("interval variants need --interval-R"),
        (IntervalArg::OriginInterval, Some(r)) => Interval::OriginInterval { r },
        (IntervalArg::TailInterval, Some(r)) => Interval::TailInterval { r },
    };
    let kind = match a.variant {
        VariantArg::Overline => Kind::Overline,
        VariantArg::Underline => Kind::Underline,
    };
    let anchor = match a.anchor {
        AnchorArg::Origin => Anchor::Origin,
        AnchorArg::Infinity => Anchor::Infinity,
    };
    let variant = ConstantVariant { kind, anchor, interval, m: a.m };
    let v = read_weight(&a.v)?;
    let w = read_weight(&a.w)?;
    Ok(to_value(&constants::constant(&v, &w, a.p, variant)?))
}

fn sharp(a: SharpArgs) -> Outcome {
    check_exponent(a.p)?;
    let cfg = EstimatorConfig { eps: a.eps, l: a.l, n: a.n, p: a.p, max_iter: a.max_iter, tol: a.tol };
    cfg.validate()?;
    let v = read_weight(&a.v)?;
    let w = read_weight(&a.w)?;
    Ok(to_value(&sharp::sandwich(&v, &w, &cfg)?))
}

fn duality(a: DualityArgs) -> Outcome {
    let family: Family = a.family.parse()?;
    let func = DualityFunctional::new(family, a.alpha)?;
    let g = read_step(&a.g)?;
    let eval = duality::evaluate(func, &g)?;
    // the ν functionals are suprema of pairings against an extremizer family
    let check = match family {
        Family::NuUpper => Some(ExtremizerFamily::Lower),
        Family::NuLower => Some(ExtremizerFamily::Upper),
        Family::MuLower | Family::MuUpper => None,
    };
    let extremizer_check = match check {
        Some(fam) => to_value(&duality::duality_gap(&g, fam, a.alpha, g.breaks())?),
        None => Value::Null,
    };
    let mut out = to_value(&eval);
    out["extremizer_check"] = extremizer_check;
    Ok(out)
}

fn transform(a: TransformArgs) -> Outcome {
    match a.op {
        TransformOp::Invert => {
            check_exponent(a.p)?;
            let Some(v) = &a.v else { return usage("invert needs --v") };
            let (vi, wi) = transform::invert_halfline(&read_weight(v)?, &read_weight(&a.w)?, a.p)?;
            Ok(json!({ "v": to_value(&vi), "w": to_value(&wi) }))
        }
        TransformOp::Substitute => {
            check_exponent(a.p)?;
            let Some(v) = &a.v else { return usage("substitute needs --v") };
            let Some(u) = &a.u else { return usage("substitute needs --u") };
            let u = read_grid(u, &a.extension)?;
            let s = transform::substitute(&u, &read_weight(v)?, &read_weight(&a.w)?, a.p)?;
            let csv = s.u_tilde.to_csv();
            write_csv(&a.out, &csv)?;
            let mut out = to_value(&s);
            out["u_tilde_csv"] = Value::String(csv);
            Ok(out)
        }
        TransformOp::Logmap => {
            let Some(u) = &a.u else { return usage("logmap needs --u") };
            let Some(r) = a.r else { return usage("logmap needs --R") };
            let u = read_grid(u, &a.extension)?;
            let m = transform::log_map(&u, &read_weight(&a.w)?, r)?;
            let csv = m.f.to_csv();
            write_csv(&a.out, &csv)?;
            let mut out = to_value(&m);
            out["f_csv"] = Value::String(csv);
            Ok(out)
        }
    }
}

#[derive(Serialize)]
struct SectorRow {
    ell: u32,
    multiplicity: u64,
    counts: Vec<u64>,
    phases: Vec<f64>,
}

fn spectrum(a: SpectrumArgs) -> Outcome {
    if a.ladder.is_empty() || a.ladder.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
        return usage("--ladder radii must be finite and positive");
    }
    let pot = RadialPotential::new(read_weight(&a.q)?, a.dim)?;
    let opts = PruferOptions::default();
    let jobs: Vec<(u32, f64)> = (0..=a.lmax).flat_map(|ell| a.ladder.iter().map(move |&l| (ell, l))).collect();
    let counts: Vec<_> = jobs
        .par_iter()
        .map(|&(ell, l)| schrodinger::count_negative_eigenvalues_radial(&pot, ell, l, &opts))
        .collect::<Result<_, _>>()?;
    let n = a.ladder.len();
    let sectors: Vec<SectorRow> = (0..=a.lmax)
        .map(|ell| {
            let row = &counts[ell as usize * n..(ell as usize + 1) * n];
            SectorRow {
                ell,
                multiplicity: schrodinger::multiplicity(a.dim, ell),
                counts: row.iter().map(|c| c.count).collect(),
                phases: row.iter().map(|c| c.phase).collect(),
            }
        })
        .collect();
    let totals: Vec<u64> =
        (0..n).map(|j| sectors.iter().map(|s| s.multiplicity * s.counts[j]).sum()).collect();
    let cert = schrodinger::certify_finiteness(&pot, &CertifyOptions::default())?;
    Ok(json!({
        "dim": a.dim,
        "ladder": a.ladder,
        "sectors": sectors,
        "totals": totals,
        "certificate": to_value(&cert),
        "assumptions": ["Q_+ is form-bounded (Q_+ in L^p + L^inf); declared by the caller, not checked"],
    }))
}

fn rearrange(a: RearrangeArgs) -> Outcome {
    let f = if a.grid {
        StepFunction::shadow(&read_grid(&a.f, "constant-outside")?)
    } else {
        read_step(&a.f)?
    };
    let r = hardy::decreasing_rearrangement(&f);
    Ok(json!({
        "tail": r.tail,
        "cells": to_value(&r.cells),
        "fstar_csv": r.fstar.to_csv(),
    }))
}
