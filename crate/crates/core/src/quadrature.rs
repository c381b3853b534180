//! Improper-integral quadrature with divergence classification.
//!
//! Finite pieces are integrated with an adaptive 21-point Gauss-Kronrod rule
//! (QUADPACK `qk21` error model). A semi-infinite tail `[s, inf)` is covered by
//! geometrically growing panels `[T_k, T_{k+1}]` with
//! `T_{k+1} - s = growth * (T_k - s)`. The sequence of panel increments decides
//! the outcome:
//!
//! * the running sum passes `divergence_threshold`, or the integrand overflows
//!   inside a tail panel: [`IntegralStatus::Divergent`];
//! * the increments shrink below tolerance for `stagnation_rounds` consecutive
//!   panels and the geometric extrapolation of the remaining tail is within
//!   tolerance: [`IntegralStatus::Finite`];
//! * the panel budget runs out while the increments are still growing:
//!   [`IntegralStatus::Divergent`]; otherwise [`IntegralStatus::Inconclusive`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest panel edge the tail expansion will reach.
const MAX_EDGE: f64 = 1e300;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub truncation_growth_factor: f64,
    pub divergence_threshold: f64,
    pub stagnation_rounds: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            truncation_growth_factor: 2.0,
            divergence_threshold: 1e12,
            stagnation_rounds: 3,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions must be positive");
        }
        if !(self.truncation_growth_factor > 1.0) || !self.truncation_growth_factor.is_finite() {
            return bad("truncation_growth_factor must be a finite value > 1");
        }
        if !(self.divergence_threshold > 1.0) {
            return bad("divergence_threshold must exceed 1");
        }
        if self.stagnation_rounds == 0 {
            return bad("stagnation_rounds must be positive");
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralStatus {
    Finite,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralOutcome {
    pub status: IntegralStatus,
    /// Best estimate; meaningful only for `Finite`, a partial sum otherwise.
    pub value: f64,
    pub error_estimate: f64,
    pub diagnostics: String,
}

impl IntegralOutcome {
    fn finite(value: f64, error_estimate: f64, diagnostics: String) -> Self {
        IntegralOutcome { status: IntegralStatus::Finite, value, error_estimate, diagnostics }
    }

    fn divergent(partial: f64, diagnostics: String) -> Self {
        IntegralOutcome {
            status: IntegralStatus::Divergent,
            value: partial,
            error_estimate: f64::INFINITY,
            diagnostics,
        }
    }

    fn inconclusive(partial: f64, error_estimate: f64, diagnostics: String) -> Self {
        IntegralOutcome {
            status: IntegralStatus::Inconclusive,
            value: partial,
            error_estimate,
            diagnostics,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.status == IntegralStatus::Finite
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailVerdict {
    Divergent,
    FiniteSoFar,
}

/// Integrate `f` over `(lo, hi)`; either end may be infinite.
pub fn integrate<F>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<IntegralOutcome>
where
    F: Fn(f64) -> f64,
{
    integrate_with_breakpoints(f, lo, hi, &[], cfg)
}

/// As [`integrate`], splitting the range at `breaks` where `f` has kinks or jumps.
pub fn integrate_with_breakpoints<F>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralOutcome>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidParameter("NaN integration limit".into()));
    }
    if lo == hi {
        return Ok(IntegralOutcome::finite(0.0, 0.0, "empty range".into()));
    }
    if lo > hi {
        let mut out = integrate_with_breakpoints(f, hi, lo, breaks, cfg)?;
        out.value = -out.value;
        return Ok(out);
    }
    let mut budget = Budget(cfg.max_subdivisions);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let parts = finite_pieces(&f, lo, hi, breaks, cfg, &mut budget)?;
            Ok(close_out(parts, cfg, "finite range"))
        }
        (true, false) => upper_tail(&f, lo, breaks, cfg, &mut budget),
        (false, true) => {
            let reflected: Vec<f64> = breaks.iter().map(|b| -b).collect();
            upper_tail(&|x: f64| f(-x), -hi, &reflected, cfg, &mut budget)
        }
        (false, false) => {
            let split = breaks.iter().copied().find(|b| b.is_finite()).unwrap_or(0.0);
            let right = upper_tail(&f, split, breaks, cfg, &mut budget)?;
            let reflected: Vec<f64> = breaks.iter().map(|b| -b).collect();
            let left = upper_tail(&|x: f64| f(-x), -split, &reflected, cfg, &mut budget)?;
            Ok(combine(left, right, cfg))
        }
    }
}

/// Classify the upper tail `(lo, inf)` of a nonnegative integrand.
pub fn detect_divergence<F>(f: F, lo: f64, cfg: &QuadratureConfig) -> TailVerdict
where
    F: Fn(f64) -> f64,
{
    match integrate(f, lo, f64::INFINITY, cfg) {
        Ok(out) if out.status == IntegralStatus::Divergent => TailVerdict::Divergent,
        _ => TailVerdict::FiniteSoFar,
    }
}

fn combine(a: IntegralOutcome, b: IntegralOutcome, cfg: &QuadratureConfig) -> IntegralOutcome {
    let value = a.value + b.value;
    let diagnostics = format!("left: {}; right: {}", a.diagnostics, b.diagnostics);
    use IntegralStatus::*;
    match (a.status, b.status) {
        (Divergent, _) | (_, Divergent) => IntegralOutcome::divergent(value, diagnostics),
        (Finite, Finite) => {
            let err = a.error_estimate + b.error_estimate;
            if err <= cfg.target(value) {
                IntegralOutcome::finite(value, err, diagnostics)
            } else {
                IntegralOutcome::inconclusive(value, err, diagnostics)
            }
        }
        _ => IntegralOutcome::inconclusive(value, a.error_estimate + b.error_estimate, diagnostics),
    }
}

struct Budget(usize);

impl Budget {
    fn take(&mut self) -> bool {
        if self.0 == 0 {
            false
        } else {
            self.0 -= 1;
            true
        }
    }
}

/// Integrand fault at a quadrature node.
#[derive(Debug, Clone, Copy)]
struct Fault {
    x: f64,
    value: f64,
}

impl From<Fault> for Error {
    fn from(f: Fault) -> Self {
        Error::NonFiniteIntegrand { x: f.x, value: f.value }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    value: f64,
    error: f64,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> std::result::Result<f64, Fault> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Fault { x, value: v })
    }
}

/// One 21-point Gauss-Kronrod panel with the QUADPACK error heuristic.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> std::result::Result<Segment, Fault> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = eval(f, center - dx)?;
        let hi = eval(f, center + dx)?;
        f1[j] = lo;
        f2[j] = hi;
        let sum = lo + hi;
        res_k += WGK[j] * sum;
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * sum;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Global adaptive bisection on a finite segment.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    budget: &mut Budget,
) -> std::result::Result<Piece, Fault> {
    let first = gk21(f, a, b)?;
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);
    loop {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let worst = match heap.peek() {
            Some(s) => *s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        // segment can no longer be split in floating point
        if !(worst.a < mid && mid < worst.b) || !budget.take() {
            break;
        }
        heap.pop();
        let left = gk21(f, worst.a, mid)?;
        let right = gk21(f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let total: f64 = heap.iter().map(|s| s.value).sum();
    let err: f64 = heap.iter().map(|s| s.error).sum();
    Ok(Piece { value: total, error: err })
}

fn finite_pieces<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
    budget: &mut Budget,
) -> Result<Vec<Piece>> {
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(hi);
    let share = (edges.len() - 1) as f64;
    let mut out = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let piece = adaptive(f, w[0], w[1], cfg.abs_tol / share, cfg.rel_tol * 0.5, budget)?;
        out.push(piece);
    }
    Ok(out)
}

fn close_out(parts: Vec<Piece>, cfg: &QuadratureConfig, what: &str) -> IntegralOutcome {
    let value: f64 = parts.iter().map(|p| p.value).sum();
    let err: f64 = parts.iter().map(|p| p.error).sum();
    if err <= cfg.target(value) {
        return IntegralOutcome::finite(value, err, format!("{what}: converged"));
    }
    IntegralOutcome::inconclusive(
        value,
        err,
        format!("{what}: tolerance not met (error estimate {err:e})"),
    )
}

fn upper_tail<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
    budget: &mut Budget,
) -> Result<IntegralOutcome> {
    // finite head up to the last breakpoint
    let start = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo)
        .fold(lo, f64::max);
    let mut partial = 0.0;
    let mut err = 0.0;
    if start > lo {
        for p in finite_pieces(f, lo, start, breaks, cfg, budget)? {
            partial += p.value;
            err += p.error;
        }
    }

    let width = start.abs().max(1.0);
    let mut edge = start + width;
    let p = adaptive(f, start, edge, cfg.abs_tol * 0.1, cfg.rel_tol * 0.1, budget)?;
    partial += p.value;
    err += p.error;

    let g = cfg.truncation_growth_factor;
    let mut prev: Option<f64> = None;
    let mut calm = 0usize;
    let mut grow = 0usize;
    let mut rounds = 0usize;
    loop {
        if partial.abs() > cfg.divergence_threshold {
            return Ok(IntegralOutcome::divergent(
                partial,
                format!("partial integral {partial:e} exceeds threshold at T = {edge:e}"),
            ));
        }
        let next = start + (edge - start) * g;
        if !next.is_finite() || next > MAX_EDGE || !budget.take() {
            break;
        }
        let target = cfg.target(partial);
        let inc = match adaptive(f, edge, next, target * 0.02, cfg.rel_tol * 0.02, budget) {
            Ok(p) => p,
            Err(fault) if fault.value.is_infinite() => {
                return Ok(IntegralOutcome::divergent(
                    partial,
                    format!("integrand overflows at x = {:e}", fault.x),
                ));
            }
            Err(fault) => return Err(fault.into()),
        };
        rounds += 1;
        partial += inc.value;
        err += inc.error;
        let tol = cfg.target(partial);
        let step = inc.value.abs();
        if let Some(p) = prev {
            let p = p.abs();
            if step > p && step > tol {
                grow += 1;
            } else {
                grow = 0;
            }
            if step <= tol && (step < p || step == 0.0) {
                calm += 1;
            } else {
                calm = 0;
            }
            if calm >= cfg.stagnation_rounds {
                let tail = if step == 0.0 {
                    0.0
                } else {
                    let r = step / p;
                    step * r / (1.0 - r)
                };
                if tail <= tol {
                    let total_err = err + tail;
                    let diag = format!("tail settled after {rounds} panels at T = {next:e}");
                    return Ok(if total_err <= cfg.target(partial) {
                        IntegralOutcome::finite(partial, total_err, diag)
                    } else {
                        IntegralOutcome::inconclusive(
                            partial,
                            total_err,
                            format!("{diag}; tolerance not met (error estimate {total_err:e})"),
                        )
                    });
                }
            }
        }
        prev = Some(inc.value);
        edge = next;
    }
    if partial.abs() > cfg.divergence_threshold {
        return Ok(IntegralOutcome::divergent(
            partial,
            format!("partial integral {partial:e} exceeds threshold"),
        ));
    }
    if grow >= cfg.stagnation_rounds {
        Ok(IntegralOutcome::divergent(
            partial,
            format!("panel increments still growing after {rounds} panels"),
        ))
    } else {
        Ok(IntegralOutcome::inconclusive(
            partial,
            err,
            format!("tail did not settle within {rounds} panels (T = {edge:e})"),
        ))
    }
}
