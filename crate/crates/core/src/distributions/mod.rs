//! Distribution models and indexed families.
//!
//! A [`DistributionModel`] is an immutable distribution function `F` together
//! with its support and, where one exists, a density and a quantile. A
//! [`DistributionFamily`] is an indexed sequence `n -> F_n` carrying a declared
//! candidate weak limit.

mod tabulated;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::montecarlo;

pub use tabulated::{LoadReport, TabulatedCdf};

/// Default number of standardized sums backing the empirical CDF of a
/// CLT family member.
pub const DEFAULT_CLT_ECDF_DRAWS: usize = 400_000;

/// Default seed for families whose CDF queries are answered empirically.
pub const DEFAULT_FAMILY_SEED: u64 = 0x5EED_2008;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuity {
    Continuous,
    Discrete,
    Mixed,
}

/// Built-in family tag plus its parameter record.
#[derive(Debug, Clone)]
pub enum ModelKind {
    /// Standard Fréchet, `F(x) = exp(-1/x)` on `x > 0`.
    Frechet,
    /// `F_n(x) = (1 - 1/(n x))^n` on `x > 1/n`; Pareto on `(1, inf)` at `n = 1`.
    ParetoSeq { n: u64 },
    /// `X = e^Z` with `Z` standard normal.
    Lognormal,
    /// Uniform on `(0, 1)`.
    Uniform,
    /// Unit exponential.
    Exponential,
    /// Standard normal.
    Normal,
    /// Point mass with a right-continuous step CDF.
    PointMass { at: f64 },
    /// `Y_n = (S_n - n) / sqrt(n)` for `S_n` a sum of `n` unit exponentials.
    CltExponential { n: u64, seed: u64, ecdf_draws: usize },
    /// Linearly interpolated CDF read from a file.
    Tabulated(Arc<TabulatedCdf>),
}

#[derive(Debug, Clone)]
pub struct DistributionModel {
    kind: ModelKind,
    support_lo: f64,
    support_hi: f64,
    continuity: Continuity,
    // sorted standardized sums, generated on first CDF query (CLT members only)
    ecdf: Option<Arc<OnceLock<Vec<f64>>>>,
}

/// Standard Fréchet CDF.
pub fn frechet_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// CDF of the `n`-th member of the Pareto-to-Fréchet sequence.
pub fn pareto_seq_cdf(n: u64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidIndex(n));
    }
    Ok(pareto_cdf_unchecked(n, x))
}

fn pareto_cdf_unchecked(n: u64, x: f64) -> f64 {
    let nf = n as f64;
    if x <= 1.0 / nf {
        0.0
    } else {
        (nf * (-1.0 / (nf * x)).ln_1p()).exp()
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_quantile(u: f64) -> f64 {
    let x = Normal::standard().inverse_cdf(u);
    if !x.is_finite() {
        return x;
    }
    // one Halley step polishes the estimate to full precision
    let err = if u < 0.5 { std_normal_cdf(x) - u } else { (1.0 - u) - std_normal_cdf(-x) };
    let pdf = (-0.5 * x * x - LN_SQRT_2PI).exp();
    let step = err / pdf;
    x - step / (1.0 + 0.5 * x * step)
}

impl DistributionModel {
    fn with_kind(kind: ModelKind, lo: f64, hi: f64, continuity: Continuity) -> Self {
        DistributionModel { kind, support_lo: lo, support_hi: hi, continuity, ecdf: None }
    }

    pub fn frechet() -> Self {
        Self::with_kind(ModelKind::Frechet, 0.0, f64::INFINITY, Continuity::Continuous)
    }

    pub fn pareto_seq(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIndex(n));
        }
        Ok(Self::with_kind(
            ModelKind::ParetoSeq { n },
            1.0 / n as f64,
            f64::INFINITY,
            Continuity::Continuous,
        ))
    }

    pub fn lognormal() -> Self {
        Self::with_kind(ModelKind::Lognormal, 0.0, f64::INFINITY, Continuity::Continuous)
    }

    pub fn uniform() -> Self {
        Self::with_kind(ModelKind::Uniform, 0.0, 1.0, Continuity::Continuous)
    }

    pub fn exponential() -> Self {
        Self::with_kind(ModelKind::Exponential, 0.0, f64::INFINITY, Continuity::Continuous)
    }

    pub fn normal() -> Self {
        Self::with_kind(
            ModelKind::Normal,
            f64::NEG_INFINITY,
            f64::INFINITY,
            Continuity::Continuous,
        )
    }

    /// Point mass at `at`. The support collapses to the single atom, so here
    /// `support_lo == support_hi`.
    pub fn point_mass(at: f64) -> Result<Self> {
        if !at.is_finite() {
            return Err(Error::InvalidParameter(format!("point mass location {at}")));
        }
        Ok(Self::with_kind(ModelKind::PointMass { at }, at, at, Continuity::Discrete))
    }

    pub fn clt_exponential(n: u64, seed: u64, ecdf_draws: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIndex(n));
        }
        if ecdf_draws == 0 {
            return Err(Error::InvalidParameter("ecdf_draws must be positive".into()));
        }
        let mut model = Self::with_kind(
            ModelKind::CltExponential { n, seed, ecdf_draws },
            -(n as f64).sqrt(),
            f64::INFINITY,
            Continuity::Continuous,
        );
        model.ecdf = Some(Arc::new(OnceLock::new()));
        Ok(model)
    }

    pub fn tabulated(table: TabulatedCdf) -> Self {
        let (lo, hi) = table.support();
        Self::with_kind(ModelKind::Tabulated(Arc::new(table)), lo, hi, Continuity::Continuous)
    }

    /// Look up a built-in model by name: `frechet`, `lognormal`, `uniform`,
    /// `exponential`, `normal`, `pareto:<n>`, `point:<x>`, `clt:<n>`.
    pub fn by_name(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownModel(name.to_string());
        match name {
            "frechet" => return Ok(Self::frechet()),
            "lognormal" => return Ok(Self::lognormal()),
            "uniform" => return Ok(Self::uniform()),
            "exponential" => return Ok(Self::exponential()),
            "normal" => return Ok(Self::normal()),
            _ => {}
        }
        let (head, arg) = name.split_once(':').ok_or_else(unknown)?;
        match head {
            "pareto" => Self::pareto_seq(arg.parse().map_err(|_| unknown())?),
            "point" => Self::point_mass(arg.parse().map_err(|_| unknown())?),
            "clt" => Self::clt_exponential(
                arg.parse().map_err(|_| unknown())?,
                DEFAULT_FAMILY_SEED,
                DEFAULT_CLT_ECDF_DRAWS,
            ),
            _ => Err(unknown()),
        }
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support_lo, self.support_hi)
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    pub fn is_continuous(&self) -> bool {
        self.continuity == Continuity::Continuous
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match &self.kind {
            ModelKind::Frechet => "frechet".into(),
            ModelKind::ParetoSeq { n } => format!("pareto:{n}"),
            ModelKind::Lognormal => "lognormal".into(),
            ModelKind::Uniform => "uniform".into(),
            ModelKind::Exponential => "exponential".into(),
            ModelKind::Normal => "normal".into(),
            ModelKind::PointMass { at } => format!("point:{at}"),
            ModelKind::CltExponential { n, .. } => format!("clt:{n}"),
            ModelKind::Tabulated(t) => format!("tabulated:{}", t.source()),
        }
    }

    /// `F(x) = P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match &self.kind {
            ModelKind::Frechet => frechet_cdf(x),
            ModelKind::ParetoSeq { n } => pareto_cdf_unchecked(*n, x),
            ModelKind::Lognormal => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_cdf(x.ln())
                }
            }
            ModelKind::Uniform => x.clamp(0.0, 1.0),
            ModelKind::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            ModelKind::Normal => std_normal_cdf(x),
            ModelKind::PointMass { at } => {
                if x >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            ModelKind::CltExponential { .. } => {
                let draws = self.ecdf_draws();
                draws.partition_point(|&d| d <= x) as f64 / draws.len() as f64
            }
            ModelKind::Tabulated(t) => t.cdf(x),
        }
    }

    /// Left limit `F(x-) = P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match &self.kind {
            ModelKind::PointMass { at } => {
                if x > *at {
                    1.0
                } else {
                    0.0
                }
            }
            ModelKind::CltExponential { .. } => {
                let draws = self.ecdf_draws();
                draws.partition_point(|&d| d < x) as f64 / draws.len() as f64
            }
            _ => self.cdf(x),
        }
    }

    /// `1 - F(x)`, computed without cancellation where a closed form allows.
    pub fn survival(&self, x: f64) -> f64 {
        match &self.kind {
            ModelKind::Frechet => {
                if x <= 0.0 {
                    1.0
                } else {
                    -(-1.0 / x).exp_m1()
                }
            }
            ModelKind::ParetoSeq { n } => {
                let nf = *n as f64;
                if x <= 1.0 / nf {
                    1.0
                } else {
                    -(nf * (-1.0 / (nf * x)).ln_1p()).exp_m1()
                }
            }
            ModelKind::Lognormal => {
                if x <= 0.0 {
                    1.0
                } else {
                    std_normal_cdf(-x.ln())
                }
            }
            ModelKind::Exponential => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x).exp()
                }
            }
            ModelKind::Normal => std_normal_cdf(-x),
            _ => 1.0 - self.cdf(x),
        }
    }

    pub fn has_density(&self) -> bool {
        matches!(
            self.kind,
            ModelKind::Frechet
                | ModelKind::ParetoSeq { .. }
                | ModelKind::Lognormal
                | ModelKind::Uniform
                | ModelKind::Exponential
                | ModelKind::Normal
        )
    }

    /// Natural log of the density, `-inf` off the support, `None` when the
    /// model carries no density.
    pub fn log_density(&self, x: f64) -> Option<f64> {
        let outside = f64::NEG_INFINITY;
        let v = match &self.kind {
            ModelKind::Frechet => {
                if x <= 0.0 {
                    outside
                } else {
                    -2.0 * x.ln() - 1.0 / x
                }
            }
            // zero on (0, 1/n]: the density formula only holds past the support edge
            ModelKind::ParetoSeq { n } => {
                let nf = *n as f64;
                if x <= 1.0 / nf {
                    outside
                } else {
                    -2.0 * x.ln() + (nf - 1.0) * (-1.0 / (nf * x)).ln_1p()
                }
            }
            ModelKind::Lognormal => {
                if x <= 0.0 {
                    outside
                } else {
                    let l = x.ln();
                    -l - LN_SQRT_2PI - 0.5 * l * l
                }
            }
            ModelKind::Uniform => {
                if (0.0..=1.0).contains(&x) {
                    0.0
                } else {
                    outside
                }
            }
            ModelKind::Exponential => {
                if x < 0.0 {
                    outside
                } else {
                    -x
                }
            }
            ModelKind::Normal => -0.5 * x * x - LN_SQRT_2PI,
            _ => return None,
        };
        Some(v)
    }

    pub fn density(&self, x: f64) -> Option<f64> {
        self.log_density(x).map(f64::exp)
    }

    pub fn has_quantile(&self) -> bool {
        !matches!(
            self.kind,
            ModelKind::PointMass { .. } | ModelKind::CltExponential { .. }
        )
    }

    /// Inverse CDF on `0 < u < 1`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::ProbabilityOutOfRange(u));
        }
        let x = match &self.kind {
            ModelKind::Frechet => -1.0 / u.ln(),
            ModelKind::ParetoSeq { n } => {
                let nf = *n as f64;
                1.0 / (nf * -(u.ln() / nf).exp_m1())
            }
            ModelKind::Lognormal => std_normal_quantile(u).exp(),
            ModelKind::Uniform => u,
            ModelKind::Exponential => -(-u).ln_1p(),
            ModelKind::Normal => std_normal_quantile(u),
            ModelKind::Tabulated(t) => t.quantile(u),
            ModelKind::PointMass { .. } | ModelKind::CltExponential { .. } => {
                return Err(Error::NoQuantile(self.id()))
            }
        };
        Ok(x)
    }

    /// Abscissae where the CDF is not smooth: finite support edges, atoms and
    /// interpolation knots.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match &self.kind {
            ModelKind::Tabulated(t) => out.extend_from_slice(t.xs()),
            _ => {
                for v in [self.support_lo, self.support_hi] {
                    if v.is_finite() {
                        out.push(v);
                    }
                }
            }
        }
        out.dedup();
        out
    }

    fn ecdf_draws(&self) -> &[f64] {
        let (n, seed, count) = match self.kind {
            ModelKind::CltExponential { n, seed, ecdf_draws } => (n, seed, ecdf_draws),
            _ => unreachable!("empirical CDF requested for a non-CLT model"),
        };
        let cell = self.ecdf.as_ref().expect("CLT model carries an ecdf cell");
        cell.get_or_init(|| {
            let mut draws = montecarlo::standardized_exponential_sums(n, count, seed, n);
            draws.sort_by(f64::total_cmp);
            draws
        })
    }
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// What a family declares as its weak limit.
#[derive(Debug, Clone)]
pub enum DeclaredLimit {
    Proper(DistributionModel),
    /// Sentinel for sequences without a proper limiting distribution.
    NoProperLimit { reason: String },
}

impl DeclaredLimit {
    pub fn model(&self) -> Option<&DistributionModel> {
        match self {
            DeclaredLimit::Proper(m) => Some(m),
            DeclaredLimit::NoProperLimit { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    ParetoToFrechet,
    DegenerateDrift,
    CltExponential,
}

impl std::str::FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pareto_to_frechet" => Ok(FamilyTag::ParetoToFrechet),
            "degenerate_drift" => Ok(FamilyTag::DegenerateDrift),
            "clt_exponential" => Ok(FamilyTag::CltExponential),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl FamilyTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyTag::ParetoToFrechet => "pareto_to_frechet",
            FamilyTag::DegenerateDrift => "degenerate_drift",
            FamilyTag::CltExponential => "clt_exponential",
        }
    }
}

/// Parameter record for [`make_family`].
#[derive(Debug, Clone)]
pub struct FamilyParams {
    pub index_set: Vec<u64>,
    pub seed: u64,
    pub ecdf_draws: usize,
}

impl Default for FamilyParams {
    fn default() -> Self {
        FamilyParams {
            index_set: crate::convergence::DEFAULT_N_SET.to_vec(),
            seed: DEFAULT_FAMILY_SEED,
            ecdf_draws: DEFAULT_CLT_ECDF_DRAWS,
        }
    }
}

#[derive(Debug, Clone)]
enum MemberRule {
    Tagged(FamilyTag),
    Constant(DistributionModel),
}

#[derive(Debug, Clone)]
pub struct DistributionFamily {
    id: String,
    index_set: Vec<u64>,
    rule: MemberRule,
    declared_limit: DeclaredLimit,
    seed: u64,
    ecdf_draws: usize,
}

/// Build one of the built-in indexed families.
pub fn make_family(tag: FamilyTag, params: &FamilyParams) -> Result<DistributionFamily> {
    validate_index_set(&params.index_set)?;
    if params.ecdf_draws == 0 {
        return Err(Error::InvalidParameter("ecdf_draws must be positive".into()));
    }
    let declared_limit = match tag {
        FamilyTag::ParetoToFrechet => DeclaredLimit::Proper(DistributionModel::frechet()),
        FamilyTag::DegenerateDrift => DeclaredLimit::NoProperLimit {
            reason: "point mass at -n escapes to -infinity; F_n(x) -> 1 for every x".into(),
        },
        FamilyTag::CltExponential => DeclaredLimit::Proper(DistributionModel::normal()),
    };
    Ok(DistributionFamily {
        id: tag.as_str().to_string(),
        index_set: params.index_set.clone(),
        rule: MemberRule::Tagged(tag),
        declared_limit,
        seed: params.seed,
        ecdf_draws: params.ecdf_draws,
    })
}

fn validate_index_set(index_set: &[u64]) -> Result<()> {
    if index_set.is_empty() {
        return Err(Error::InvalidParameter("index set is empty".into()));
    }
    if let Some(&n) = index_set.iter().find(|&&n| n == 0) {
        return Err(Error::InvalidIndex(n));
    }
    Ok(())
}

impl DistributionFamily {
    /// Every member is `model`; the declared limit is `model` as well.
    pub fn constant(model: DistributionModel, index_set: Vec<u64>) -> Result<Self> {
        validate_index_set(&index_set)?;
        Ok(DistributionFamily {
            id: format!("constant:{}", model.id()),
            index_set,
            rule: MemberRule::Constant(model.clone()),
            declared_limit: DeclaredLimit::Proper(model),
            seed: DEFAULT_FAMILY_SEED,
            ecdf_draws: DEFAULT_CLT_ECDF_DRAWS,
        })
    }

    /// Replace the declared limit, e.g. to probe a deliberately wrong candidate.
    pub fn with_limit(mut self, limit: DeclaredLimit) -> Self {
        self.declared_limit = limit;
        self
    }

    pub fn with_index_set(mut self, index_set: Vec<u64>) -> Result<Self> {
        validate_index_set(&index_set)?;
        self.index_set = index_set;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tag(&self) -> Option<FamilyTag> {
        match self.rule {
            MemberRule::Tagged(tag) => Some(tag),
            MemberRule::Constant(_) => None,
        }
    }

    pub fn index_set(&self) -> &[u64] {
        &self.index_set
    }

    pub fn declared_limit(&self) -> &DeclaredLimit {
        &self.declared_limit
    }

    pub fn member(&self, n: u64) -> Result<DistributionModel> {
        if n == 0 {
            return Err(Error::InvalidIndex(n));
        }
        match &self.rule {
            MemberRule::Constant(m) => Ok(m.clone()),
            MemberRule::Tagged(FamilyTag::ParetoToFrechet) => DistributionModel::pareto_seq(n),
            MemberRule::Tagged(FamilyTag::DegenerateDrift) => {
                DistributionModel::point_mass(-(n as f64))
            }
            MemberRule::Tagged(FamilyTag::CltExponential) => {
                DistributionModel::clt_exponential(n, self.seed, self.ecdf_draws)
            }
        }
    }
}

/// Closed-form MGF of the standardized sum of `n` unit exponentials:
/// `e^{-t sqrt(n)} (1 - t/sqrt(n))^{-n}` for `t < sqrt(n)`, infinite beyond.
pub fn clt_exponential_mgf(n: u64, t: f64) -> Result<crate::mgf::MgfValue> {
    use crate::mgf::{MgfRoute, MgfValue};
    if n == 0 {
        return Err(Error::InvalidIndex(n));
    }
    let rn = (n as f64).sqrt();
    if t >= rn {
        return Ok(MgfValue::divergent(MgfRoute::ClosedForm));
    }
    // log form keeps large n stable
    let log_m = -t * rn - (n as f64) * (-t / rn).ln_1p();
    Ok(MgfValue::finite(log_m.exp(), 0.0, MgfRoute::ClosedForm))
}

/// Standard normal MGF `e^{t^2/2}`, the limit of [`clt_exponential_mgf`].
pub fn normal_mgf(t: f64) -> f64 {
    (0.5 * t * t).exp()
}
