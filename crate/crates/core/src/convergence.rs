//! Convergence diagnostics for sequences of MGFs.
//!
//! For an indexed family `F_n` with declared limit `F`, MGF convergence on an
//! interval `(a, b)` holds exactly when
//!
//! * (a) `sup_n M_n(t) < inf` for every `t` in `(a, b)`, and
//! * (b) `F_n` converges weakly to `F`, and the MGF of `F` exists on `(a, b)`.
//!
//! Everything here works from a finite index set, so each verdict is graded
//! evidence rather than proof. Weak convergence to a continuous limit is
//! uniform, which makes the sup-distance between CDFs on a dense grid a usable
//! surrogate.

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{DeclaredLimit, DistributionFamily, DistributionModel, FamilyTag};
use crate::error::{Error, Result};
use crate::mgf::{self, Interval, MgfStatus, MgfValue, TransformedCdf};
use crate::quadrature::QuadratureConfig;

/// Log-spaced default index set.
pub const DEFAULT_N_SET: [u64; 10] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000];

/// Number of interior `t` points in the default grid.
pub const DEFAULT_T_POINTS: usize = 9;

pub const FINITE_EVIDENCE_NOTE: &str = "evidence over a finite n set, not a proof";

/// Probe points for the degenerate family, clear of every atom at `-n`.
const DRIFT_PROBES: [f64; 3] = [-0.5, 0.5, 1.5];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPolicy {
    /// Points in each of the asinh-spaced and geometric sweeps.
    pub points: usize,
    /// `k / quantile_points` quantiles of each model are added when available.
    pub quantile_points: usize,
    /// Sweeps are clipped to `[-span, span]`.
    pub span: f64,
    /// Smallest magnitude covered by the geometric sweep.
    pub min_magnitude: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy { points: 4000, quantile_points: 200, span: 1e8, min_magnitude: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabConfig {
    pub quadrature: QuadratureConfig,
    pub grid: GridPolicy,
    /// Sup-distance that must be undercut at the largest `n` for condition (b).
    pub weak_tol: f64,
    /// `max_t |M_n(t) - M(t)|` that must be undercut at the largest `n`.
    pub mgf_tol: f64,
    /// Condition (a) holds when the last value is at most `growth_margin` times the median.
    pub growth_margin: f64,
    /// Condition (a) fails when the last value exceeds `growth_factor` times the first
    /// and the last three values increase.
    pub growth_factor: f64,
    /// Values above this count as unbounded.
    pub unbounded_threshold: f64,
    /// Relative slack allowed when checking that sup-distances are nonincreasing.
    pub monotone_slack: f64,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            quadrature: QuadratureConfig::default(),
            grid: GridPolicy::default(),
            weak_tol: 1e-2,
            mgf_tol: 1e-2,
            growth_margin: 2.0,
            growth_factor: 10.0,
            unbounded_threshold: 1e12,
            monotone_slack: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Conjunction: any violation wins, then any inconclusive part.
    fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Satisfied, Satisfied) => Satisfied,
            _ => Inconclusive,
        }
    }
}

/// Column-labelled table of supporting values, all rendered as text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl EvidenceTable {
    fn new(columns: &[&str]) -> Self {
        EvidenceTable { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionVerdict {
    pub status: Verdict,
    pub evidence: EvidenceTable,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupDistance {
    pub value: f64,
    pub arg_x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Consistency {
    ConsistentWithTheorem1,
    ContradictionFlagged,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MgfCell {
    pub n: u64,
    pub t: f64,
    pub mgf: MgfValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCell {
    pub t: f64,
    pub mgf: MgfValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceRow {
    pub n: u64,
    pub sup_distance: f64,
    pub arg_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub interval: Interval,
    pub t_grid: Vec<f64>,
    pub n_set: Vec<u64>,
    pub mgf_table: Vec<MgfCell>,
    pub limit_mgf: Vec<LimitCell>,
    pub sup_distance_by_n: Vec<DistanceRow>,
    pub condition_a: ConditionVerdict,
    pub condition_b: ConditionVerdict,
    pub mgf_convergence: ConditionVerdict,
    pub consistency: Consistency,
    pub discrepancies: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn sorted_dedup(mut xs: Vec<f64>) -> Vec<f64> {
    xs.retain(|x| x.is_finite());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Evaluation grid for comparing two CDFs: asinh and geometric sweeps over the
/// joint support, model kinks with their immediate neighbours, and quantiles.
pub fn comparison_grid(a: &DistributionModel, b: &DistributionModel, policy: &GridPolicy) -> Vec<f64> {
    let (alo, ahi) = a.support();
    let (blo, bhi) = b.support();
    let lo = alo.min(blo).max(-policy.span);
    let hi = ahi.max(bhi).min(policy.span);
    let mut xs = Vec::with_capacity(3 * policy.points + 2 * policy.quantile_points + 16);
    let m = policy.points.max(2);

    let (ulo, uhi) = (lo.asinh(), hi.asinh());
    for k in 0..m {
        xs.push((ulo + (uhi - ulo) * k as f64 / (m - 1) as f64).sinh());
    }
    let geometric = |from: f64, to: f64, out: &mut Vec<f64>| {
        let (l0, l1) = (from.ln(), to.ln());
        for k in 0..m {
            out.push((l0 + (l1 - l0) * k as f64 / (m - 1) as f64).exp());
        }
    };
    if hi > 0.0 {
        let from = lo.max(policy.min_magnitude);
        if from < hi {
            geometric(from, hi, &mut xs);
        }
    }
    if lo < 0.0 {
        let from = (-hi).max(policy.min_magnitude);
        if from < -lo {
            let mut neg = Vec::new();
            geometric(from, -lo, &mut neg);
            xs.extend(neg.into_iter().map(|x| -x));
        }
    }
    for model in [a, b] {
        for k in model.kinks() {
            let eps = 1e-12 * k.abs().max(1.0);
            xs.extend([k - eps, k, k + eps]);
        }
        if model.has_quantile() && policy.quantile_points > 1 {
            for k in 1..policy.quantile_points {
                if let Ok(q) = model.quantile(k as f64 / policy.quantile_points as f64) {
                    xs.push(q);
                }
            }
        }
    }
    sorted_dedup(xs)
}

fn sup_over<F: Fn(f64) -> f64>(grid: &[f64], gap: F) -> SupDistance {
    let mut best = SupDistance { value: 0.0, arg_x: grid.first().copied().unwrap_or(0.0) };
    for &x in grid {
        let d = gap(x);
        if d > best.value {
            best = SupDistance { value: d, arg_x: x };
        }
    }
    best
}

/// `sup_x |F_a(x) - F_b(x)|` over [`comparison_grid`], with left limits
/// included so atoms are seen from both sides.
pub fn sup_distance(a: &DistributionModel, b: &DistributionModel, policy: &GridPolicy) -> SupDistance {
    let grid = comparison_grid(a, b, policy);
    sup_over(&grid, |x| {
        let right = (a.cdf(x) - b.cdf(x)).abs();
        let left = (a.cdf_left(x) - b.cdf_left(x)).abs();
        right.max(left)
    })
}

fn members(family: &DistributionFamily, n_set: &[u64]) -> Result<Vec<(u64, DistributionModel)>> {
    if n_set.is_empty() {
        return Err(Error::InvalidParameter("n set is empty".into()));
    }
    n_set.iter().map(|&n| family.member(n).map(|m| (n, m))).collect()
}

fn mgf_sequence(family: &DistributionFamily, t: f64, n_set: &[u64], quad: &QuadratureConfig) -> Result<Vec<(u64, MgfValue)>> {
    members(family, n_set)?
        .into_par_iter()
        .map(|(n, m)| mgf::evaluate(&m, t, quad).map(|v| (n, v)).map_err(|e| e.at_index(n)))
        .collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn shows_growth(values: &[f64], cfg: &LabConfig) -> bool {
    let k = values.len();
    if k < 3 {
        return false;
    }
    let rising = values[k - 3] < values[k - 2] && values[k - 2] < values[k - 1];
    rising && values[k - 1] > cfg.growth_factor * values[0]
}

/// Boundedness verdict for one `t` from an already evaluated sequence.
fn boundedness(seq: &[(u64, MgfValue)], cfg: &LabConfig) -> (Verdict, String) {
    let divergent: Vec<u64> = seq.iter().filter(|(_, v)| v.is_divergent()).map(|(n, _)| *n).collect();
    if !divergent.is_empty() {
        return (Verdict::Violated, format!("M_n(t) is infinite for n in {divergent:?}"));
    }
    if seq.iter().any(|(_, v)| v.status == MgfStatus::Inconclusive) {
        return (Verdict::Inconclusive, "some M_n(t) could not be resolved".into());
    }
    let values: Vec<f64> = seq.iter().map(|(_, v)| v.value).collect();
    if let Some(big) = values.iter().find(|v| **v > cfg.unbounded_threshold) {
        return (Verdict::Violated, format!("M_n(t) = {big:e} exceeds the unbounded threshold"));
    }
    if shows_growth(&values, cfg) {
        return (Verdict::Violated, "M_n(t) grows across the n set".into());
    }
    let last = *values.last().unwrap();
    if last <= median(&values) * cfg.growth_margin {
        (Verdict::Satisfied, "M_n(t) finite with no growth trend".into())
    } else {
        (Verdict::Inconclusive, "M_n(t) finite but trending upward".into())
    }
}

fn boundedness_verdict(by_t: &[(f64, Vec<(u64, MgfValue)>)], cfg: &LabConfig) -> ConditionVerdict {
    let mut evidence = EvidenceTable::new(&["t", "n", "status", "value", "error_estimate"]);
    let mut status = Verdict::Satisfied;
    let mut notes = Vec::new();
    for (t, seq) in by_t {
        for (n, v) in seq {
            evidence.push(vec![
                num(*t),
                n.to_string(),
                v.status.as_str().into(),
                num(v.value),
                num(v.error_estimate),
            ]);
        }
        let (verdict, why) = boundedness(seq, cfg);
        if verdict != Verdict::Satisfied {
            notes.push(format!("t = {t}: {why}"));
        }
        status = status.and(verdict);
    }
    let mut note = FINITE_EVIDENCE_NOTE.to_string();
    for n in notes {
        note.push_str("; ");
        note.push_str(&n);
    }
    ConditionVerdict { status, evidence, note }
}

/// Condition (a) at a single `t`.
pub fn check_condition_a(
    family: &DistributionFamily,
    t: f64,
    n_set: &[u64],
    cfg: &LabConfig,
) -> Result<ConditionVerdict> {
    let seq = mgf_sequence(family, t, n_set, &cfg.quadrature)?;
    Ok(boundedness_verdict(&[(t, seq)], cfg))
}

fn distance_rows(
    family: &DistributionFamily,
    limit: &DistributionModel,
    n_set: &[u64],
    cfg: &LabConfig,
) -> Result<Vec<DistanceRow>> {
    Ok(members(family, n_set)?
        .into_par_iter()
        .map(|(n, m)| {
            let d = sup_distance(&m, limit, &cfg.grid);
            DistanceRow { n, sup_distance: d.value, arg_x: d.arg_x }
        })
        .collect())
}

fn nonincreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
}

fn weak_limit_verdict(
    family: &DistributionFamily,
    interval: &Interval,
    n_set: &[u64],
    tol: f64,
    cfg: &LabConfig,
) -> Result<(ConditionVerdict, Vec<DistanceRow>)> {
    let limit = match family.declared_limit() {
        DeclaredLimit::Proper(m) => m.clone(),
        DeclaredLimit::NoProperLimit { reason } => {
            let mut evidence = EvidenceTable::new(&["n", "x", "F_n(x)"]);
            for (n, m) in members(family, n_set)? {
                for x in DRIFT_PROBES {
                    evidence.push(vec![n.to_string(), num(x), num(m.cdf(x))]);
                }
            }
            let note = format!("no proper limit distribution: {reason}; {FINITE_EVIDENCE_NOTE}");
            return Ok((ConditionVerdict { status: Verdict::Violated, evidence, note }, Vec::new()));
        }
    };

    let rows = distance_rows(family, &limit, n_set, cfg)?;
    let existence = mgf::existence_scan(&limit, &interval.interior_grid(DEFAULT_T_POINTS), &cfg.quadrature)?;

    let mut evidence = EvidenceTable::new(&["quantity", "index", "value", "detail"]);
    for r in &rows {
        evidence.push(vec!["sup_distance".into(), r.n.to_string(), num(r.sup_distance), num(r.arg_x)]);
    }
    for (t, v) in &existence {
        evidence.push(vec!["limit_mgf".into(), num(*t), num(v.value), v.status.as_str().into()]);
    }

    let d: Vec<f64> = rows.iter().map(|r| r.sup_distance).collect();
    let first = d[0];
    let last = *d.last().unwrap();
    let decreasing = nonincreasing(&d, cfg.monotone_slack);
    let limit_exists = existence.iter().all(|(_, v)| v.is_finite());
    let limit_diverges = existence.iter().any(|(_, v)| v.is_divergent());

    let (status, why) = if limit_diverges {
        (Verdict::Violated, "MGF of the declared limit is infinite inside the interval".to_string())
    } else if decreasing && last < tol && limit_exists {
        (Verdict::Satisfied, format!("sup-distance falls to {last:e} < {tol:e}"))
    } else if last >= tol && last > 0.5 * first {
        (Verdict::Violated, format!("sup-distance plateaus at {last:e} >= {tol:e}"))
    } else {
        (Verdict::Inconclusive, format!("sup-distance {last:e} not yet below {tol:e}"))
    };
    let note = format!("{why}; {FINITE_EVIDENCE_NOTE}");
    Ok((ConditionVerdict { status, evidence, note }, rows))
}

/// Condition (b): weak convergence to the declared limit, whose MGF must exist
/// across `interval`.
pub fn check_condition_b(
    family: &DistributionFamily,
    interval: &Interval,
    n_set: &[u64],
    tol: f64,
    cfg: &LabConfig,
) -> Result<ConditionVerdict> {
    weak_limit_verdict(family, interval, n_set, tol, cfg).map(|(v, _)| v)
}

fn mgf_convergence_verdict(
    family: &DistributionFamily,
    by_t: &[(f64, Vec<(u64, MgfValue)>)],
    limit: &[LimitCell],
    n_set: &[u64],
    cfg: &LabConfig,
) -> ConditionVerdict {
    let mut evidence = EvidenceTable::new(&["n", "max_abs_gap", "arg_t"]);
    let any_divergent = by_t.iter().any(|(_, s)| s.iter().any(|(_, v)| v.is_divergent()));
    let any_unresolved = by_t
        .iter()
        .any(|(_, s)| s.iter().any(|(_, v)| v.status == MgfStatus::Inconclusive));
    let verdict = |status, why: String| ConditionVerdict {
        status,
        evidence: EvidenceTable::new(&[]),
        note: format!("{why}; {FINITE_EVIDENCE_NOTE}"),
    };

    if limit.is_empty() {
        // no declared M(t): ask whether the sequence itself runs away
        let mut ev = EvidenceTable::new(&["t", "n", "value"]);
        let mut runaway = any_divergent;
        for (t, seq) in by_t {
            let values: Vec<f64> = seq.iter().map(|(_, v)| v.value).collect();
            for (n, v) in seq {
                ev.push(vec![num(*t), n.to_string(), num(v.value)]);
            }
            runaway |= shows_growth(&values, cfg) || values.iter().any(|v| *v > cfg.unbounded_threshold);
        }
        let mut out = if runaway {
            verdict(Verdict::Violated, format!("{}: M_n(t) diverges and no limiting MGF exists", family.id()))
        } else {
            verdict(Verdict::Inconclusive, "no declared limit to compare against".into())
        };
        out.evidence = ev;
        return out;
    }

    let mut gaps = Vec::with_capacity(n_set.len());
    for (k, &n) in n_set.iter().enumerate() {
        let mut worst = (0.0f64, by_t[0].0);
        for ((t, seq), lim) in by_t.iter().zip(limit) {
            let v = &seq[k].1;
            let gap = if v.is_finite() && lim.mgf.is_finite() {
                (v.value - lim.mgf.value).abs()
            } else {
                f64::INFINITY
            };
            if gap > worst.0 || gap.is_infinite() {
                worst = (gap, *t);
            }
        }
        evidence.push(vec![n.to_string(), num(worst.0), num(worst.1)]);
        gaps.push(worst.0);
    }
    let last = *gaps.last().unwrap();
    let decreasing = gaps.windows(2).all(|w| w[1] <= w[0]);
    let limit_diverges = limit.iter().any(|c| c.mgf.is_divergent());

    let mut out = if any_divergent || limit_diverges {
        verdict(Verdict::Violated, "an MGF in the comparison is infinite".into())
    } else if any_unresolved || limit.iter().any(|c| !c.mgf.is_finite()) {
        verdict(Verdict::Inconclusive, "some MGF values could not be resolved".into())
    } else if decreasing && last < cfg.mgf_tol {
        verdict(Verdict::Satisfied, format!("max |M_n - M| falls to {last:e} < {:e}", cfg.mgf_tol))
    } else if last >= cfg.mgf_tol && last > 0.5 * gaps[0] {
        verdict(Verdict::Violated, format!("max |M_n - M| stays at {last:e}"))
    } else {
        verdict(Verdict::Inconclusive, format!("max |M_n - M| = {last:e}, not settled"))
    };
    out.evidence = evidence;
    out
}

fn consistency(a: Verdict, b: Verdict, mgf_conv: Verdict) -> Consistency {
    let conditions = a.and(b);
    let disagree = matches!(
        (conditions, mgf_conv),
        (Verdict::Satisfied, Verdict::Violated) | (Verdict::Violated, Verdict::Satisfied)
    );
    if disagree {
        Consistency::ContradictionFlagged
    } else {
        Consistency::ConsistentWithTheorem1
    }
}

fn discrepancies_for(family: &DistributionFamily) -> Vec<String> {
    match family.tag() {
        Some(FamilyTag::CltExponential) => vec![
            "a limit of exp(-t^2/2) has the wrong sign; the standard normal MGF exp(t^2/2) is the comparison target".into(),
        ],
        Some(FamilyTag::ParetoToFrechet) => vec![
            "boundedness of M_n(t) on (a, 0] is sometimes labelled condition (b); it is reported here as condition (a)".into(),
        ],
        _ => Vec::new(),
    }
}

/// Full consistency report: both conditions and the MGF convergence they are
/// claimed to be equivalent to.
pub fn theorem1_report(
    family: &DistributionFamily,
    interval: &Interval,
    t_grid: &[f64],
    n_set: &[u64],
    cfg: &LabConfig,
) -> Result<ConvergenceReport> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("t grid is empty".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !interval.contains(**t)) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} lies outside ({}, {})",
            interval.a, interval.b
        )));
    }
    let models = members(family, n_set)?;

    let cells: Vec<MgfCell> = t_grid
        .iter()
        .flat_map(|&t| models.iter().map(move |(n, m)| (t, *n, m)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(t, n, m)| {
            mgf::evaluate(m, t, &cfg.quadrature)
                .map(|mgf| MgfCell { n, t, mgf })
                .map_err(|e| e.at_index(n))
        })
        .collect::<Result<_>>()?;

    let by_t: Vec<(f64, Vec<(u64, MgfValue)>)> = t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let seq = cells[i * n_set.len()..(i + 1) * n_set.len()]
                .iter()
                .map(|c| (c.n, c.mgf.clone()))
                .collect();
            (t, seq)
        })
        .collect();

    let limit_mgf: Vec<LimitCell> = match family.declared_limit().model() {
        Some(limit) => t_grid
            .par_iter()
            .map(|&t| mgf::evaluate(limit, t, &cfg.quadrature).map(|mgf| LimitCell { t, mgf }))
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };

    let condition_a = boundedness_verdict(&by_t, cfg);
    let (condition_b, sup_distance_by_n) = weak_limit_verdict(family, interval, n_set, cfg.weak_tol, cfg)?;
    let mgf_convergence = mgf_convergence_verdict(family, &by_t, &limit_mgf, n_set, cfg);
    let consistency = consistency(condition_a.status, condition_b.status, mgf_convergence.status);

    // sorted (n, t) order for output
    let mut mgf_table = cells;
    mgf_table.sort_by(|x, y| x.n.cmp(&y.n).then(x.t.total_cmp(&y.t)));

    Ok(ConvergenceReport {
        family: family.id().to_string(),
        interval: *interval,
        t_grid: t_grid.to_vec(),
        n_set: n_set.to_vec(),
        mgf_table,
        limit_mgf,
        sup_distance_by_n,
        condition_a,
        condition_b,
        mgf_convergence,
        consistency,
        discrepancies: discrepancies_for(family),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Row {
    pub n: u64,
    /// `sup_x |G_n(t, x) - G(t, x)|`.
    pub sup_distance: f64,
    pub arg_x: f64,
    /// `int_0^inf (1 - G_n(t, x)) dx`.
    pub tail_integral: MgfValue,
    pub density_route: MgfValue,
    pub route_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Table {
    pub family: String,
    pub t: f64,
    pub rows: Vec<Theorem2Row>,
    pub limit_tail_integral: MgfValue,
    pub limit_density_route: MgfValue,
}

fn direct_route(m: &DistributionModel, t: f64, quad: &QuadratureConfig) -> Result<MgfValue> {
    if m.has_density() {
        mgf::mgf_via_density(m, t, quad)
    } else {
        mgf::closed_form(m, t).ok_or_else(|| Error::DensityRequired(m.id()))
    }
}

/// Uniform convergence of the transformed CDFs `G_n(t, .)` and the tail
/// integral of `1 - G_n` against the direct MGF, per `n`.
pub fn theorem2_demo(
    family: &DistributionFamily,
    t: f64,
    n_set: &[u64],
    cfg: &LabConfig,
) -> Result<Theorem2Table> {
    if t == 0.0 || t.is_nan() {
        return Err(Error::ZeroT);
    }
    let limit = match family.declared_limit() {
        DeclaredLimit::Proper(m) if m.is_continuous() => m.clone(),
        DeclaredLimit::Proper(m) => {
            return Err(Error::Discontinuous(format!("declared limit {} has atoms", m.id())))
        }
        DeclaredLimit::NoProperLimit { reason } => {
            return Err(Error::Discontinuous(format!("no continuous limit: {reason}")))
        }
    };
    let models = members(family, n_set)?;
    if let Some((_, m)) = models.iter().find(|(_, m)| !m.is_continuous()) {
        return Err(Error::Discontinuous(format!(
            "member {} has atoms; uniform convergence of G_n needs continuous members",
            m.id()
        )));
    }
    let g_limit = TransformedCdf::new(limit.clone(), t)?;
    let quad = &cfg.quadrature;

    let rows = models
        .into_par_iter()
        .map(|(n, m)| {
            let g_n = TransformedCdf::new(m.clone(), t)?;
            let xs: Vec<f64> = comparison_grid(&m, &limit, &cfg.grid)
                .into_iter()
                .map(|y| (t * y).exp())
                .filter(|x| x.is_finite() && *x > 0.0)
                .collect();
            let d = sup_over(&xs, |x| (g_n.cdf(x) - g_limit.cdf(x)).abs());
            let tail_integral = mgf::mgf_via_tail(&m, t, quad).map_err(|e| e.at_index(n))?;
            let density_route = direct_route(&m, t, quad).map_err(|e| e.at_index(n))?;
            let route_gap = (tail_integral.value - density_route.value).abs();
            Ok(Theorem2Row { n, sup_distance: d.value, arg_x: d.arg_x, tail_integral, density_route, route_gap })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Theorem2Table {
        family: family.id().to_string(),
        t,
        rows,
        limit_tail_integral: mgf::mgf_via_tail(&limit, t, quad)?,
        limit_density_route: direct_route(&limit, t, quad)?,
    })
}
