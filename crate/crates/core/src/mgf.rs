//! Moment generating functions `M(t) = E[e^{tX}]`.
//!
//! Two independent numerical routes are provided:
//!
//! * the density route integrates `f(x) e^{tx}` over the support;
//! * the tail route integrates `1 - G(t, x)` over `x > 0`, where
//!   `G(t, x) = P(e^{tX} <= x)` is the CDF of the transformed variable.
//!
//! For `t > 0`, `G(t, x) = F(ln(x)/t)`. For `t < 0` the inequality flips under
//! division by `t`, so `G(t, x) = 1 - F(ln(x)/t -)` with `F(y-)` the left limit.
//! `t = 0` is never integrated: `M(0) = 1` is returned directly by
//! [`evaluate`] and [`existence_scan`].

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{clt_exponential_mgf, DistributionModel, ModelKind};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breakpoints, IntegralOutcome, IntegralStatus, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MgfStatus {
    Finite,
    Divergent,
    Inconclusive,
}

impl MgfStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MgfStatus::Finite => "finite",
            MgfStatus::Divergent => "divergent",
            MgfStatus::Inconclusive => "inconclusive",
        }
    }
}

impl From<IntegralStatus> for MgfStatus {
    fn from(s: IntegralStatus) -> Self {
        match s {
            IntegralStatus::Finite => MgfStatus::Finite,
            IntegralStatus::Divergent => MgfStatus::Divergent,
            IntegralStatus::Inconclusive => MgfStatus::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MgfRoute {
    Density,
    Tail,
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MgfValue {
    pub status: MgfStatus,
    /// `+inf` for divergent values, the last partial sum for inconclusive ones.
    pub value: f64,
    pub error_estimate: f64,
    pub route: MgfRoute,
}

impl MgfValue {
    pub fn finite(value: f64, error_estimate: f64, route: MgfRoute) -> Self {
        MgfValue { status: MgfStatus::Finite, value, error_estimate, route }
    }

    pub fn divergent(route: MgfRoute) -> Self {
        MgfValue {
            status: MgfStatus::Divergent,
            value: f64::INFINITY,
            error_estimate: f64::INFINITY,
            route,
        }
    }

    fn from_outcome(out: IntegralOutcome, route: MgfRoute) -> Self {
        let status = MgfStatus::from(out.status);
        match status {
            MgfStatus::Divergent => MgfValue::divergent(route),
            _ => MgfValue { status, value: out.value, error_estimate: out.error_estimate, route },
        }
    }

    pub fn is_finite(&self) -> bool {
        self.status == MgfStatus::Finite
    }

    pub fn is_divergent(&self) -> bool {
        self.status == MgfStatus::Divergent
    }
}

/// Open interval `(a, b)` of `t` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a < t && t < self.b
    }

    /// `count` equispaced interior points.
    pub fn interior_grid(&self, count: usize) -> Vec<f64> {
        let step = (self.b - self.a) / (count as f64 + 1.0);
        (1..=count).map(|k| self.a + step * k as f64).collect()
    }
}

/// `G(t, x) = P(e^{tX} <= x)` for a fixed nonzero `t`.
#[derive(Debug, Clone)]
pub struct TransformedCdf {
    base: DistributionModel,
    t: f64,
}

impl TransformedCdf {
    pub fn new(base: DistributionModel, t: f64) -> Result<Self> {
        if t == 0.0 || t.is_nan() {
            return Err(Error::ZeroT);
        }
        Ok(TransformedCdf { base, t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn base(&self) -> &DistributionModel {
        &self.base
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.complement(x)
    }

    /// `1 - G(t, x)`, evaluated without cancellation.
    pub fn complement(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let y = x.ln() / self.t;
        if self.t > 0.0 {
            self.base.survival(y)
        } else {
            self.base.cdf_left(y)
        }
    }

    /// `x`-range outside which `1 - G` is identically 0, plus the images of
    /// the base model's kinks.
    fn domain(&self) -> (f64, Vec<f64>) {
        let (lo, hi) = self.base.support();
        let edge = if self.t < 0.0 { lo } else { hi };
        let upper = (self.t * edge).exp();
        let upper = if upper.is_nan() { f64::INFINITY } else { upper };
        let mut breaks: Vec<f64> = self
            .base
            .kinks()
            .iter()
            .map(|k| (self.t * k).exp())
            .filter(|b| b.is_finite() && *b > 0.0 && *b < upper)
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        (upper, breaks)
    }
}

/// `G(t, x)` for a single point.
pub fn transformed_cdf(model: &DistributionModel, t: f64, x: f64) -> Result<f64> {
    Ok(TransformedCdf::new(model.clone(), t)?.cdf(x))
}

/// `M(t)` by quadrature of `f(x) e^{tx}` over the support.
pub fn mgf_via_density(model: &DistributionModel, t: f64, cfg: &QuadratureConfig) -> Result<MgfValue> {
    if !model.has_density() {
        return Err(Error::DensityRequired(model.id()));
    }
    let (lo, hi) = model.support();
    let integrand = |x: f64| match model.log_density(x) {
        Some(ld) => (ld + t * x).exp(),
        None => 0.0,
    };
    let breaks = model.kinks();
    let out = integrate_with_breakpoints(integrand, lo, hi, &breaks, cfg).map_err(|e| e.at_t(t))?;
    Ok(MgfValue::from_outcome(out, MgfRoute::Density))
}

/// `M(t)` by the tail-integral formula `E[Y] = int_0^inf (1 - G(t, x)) dx`.
pub fn mgf_via_tail(model: &DistributionModel, t: f64, cfg: &QuadratureConfig) -> Result<MgfValue> {
    let g = TransformedCdf::new(model.clone(), t)?;
    let (upper, breaks) = g.domain();
    let out = integrate_with_breakpoints(|x| g.complement(x), 0.0, upper, &breaks, cfg)
        .map_err(|e| e.at_t(t))?;
    Ok(MgfValue::from_outcome(out, MgfRoute::Tail))
}

/// Exact MGF where one is known in closed form.
pub fn closed_form(model: &DistributionModel, t: f64) -> Option<MgfValue> {
    let v = match model.kind() {
        ModelKind::PointMass { at } => (t * at).exp(),
        ModelKind::CltExponential { n, .. } => return clt_exponential_mgf(*n, t).ok(),
        ModelKind::Normal => (0.5 * t * t).exp(),
        ModelKind::Exponential => {
            if t >= 1.0 {
                return Some(MgfValue::divergent(MgfRoute::ClosedForm));
            }
            1.0 / (1.0 - t)
        }
        ModelKind::Uniform => {
            if t == 0.0 {
                1.0
            } else {
                t.exp_m1() / t
            }
        }
        _ => return None,
    };
    Some(MgfValue::finite(v, 0.0, MgfRoute::ClosedForm))
}

/// Route used when a caller just wants `M(t)`: density when the model has one,
/// the closed form for models whose CDF is only known empirically, the tail
/// formula otherwise.
pub fn preferred_route(model: &DistributionModel) -> MgfRoute {
    if model.has_density() {
        MgfRoute::Density
    } else if matches!(model.kind(), ModelKind::CltExponential { .. }) {
        MgfRoute::ClosedForm
    } else {
        MgfRoute::Tail
    }
}

/// `M(t)` by the preferred route, with `M(0) = 1` answered directly.
pub fn evaluate(model: &DistributionModel, t: f64, cfg: &QuadratureConfig) -> Result<MgfValue> {
    let route = preferred_route(model);
    if t == 0.0 {
        return Ok(MgfValue::finite(1.0, 0.0, route));
    }
    match route {
        MgfRoute::Density => mgf_via_density(model, t, cfg),
        MgfRoute::ClosedForm => closed_form(model, t).ok_or_else(|| Error::DensityRequired(model.id())),
        _ => mgf_via_tail(model, t, cfg),
    }
}

/// Classify `M(t)` over a sorted grid of `t` values.
pub fn existence_scan(
    model: &DistributionModel,
    t_grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<(f64, MgfValue)>> {
    if t_grid.is_empty() {
        return Err(Error::InvalidParameter("t grid is empty".into()));
    }
    if t_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter("t grid must be sorted".into()));
    }
    t_grid
        .par_iter()
        .map(|&t| evaluate(model, t, cfg).map(|v| (t, v)).map_err(|e| match e {
            Error::AtT { .. } => e,
            other => other.at_t(t),
        }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BESSEL_2K1_2: f64 = 0.279_731_763_633_044_85;
    // e^{-1} - E_1(1)
    const PARETO1_AT_MINUS1: f64 = 0.148_495_506_775_922_05;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn density_route_examples() {
        let f = DistributionModel::frechet();
        let m0 = mgf_via_density(&f, 0.0, &cfg()).unwrap();
        assert!(m0.is_finite() && (m0.value - 1.0).abs() < 1e-8, "{m0:?}");
        let m = mgf_via_density(&f, -1.0, &cfg()).unwrap();
        assert!(m.is_finite() && (m.value - BESSEL_2K1_2).abs() < 1e-6, "{m:?}");
        assert!(mgf_via_density(&f, 0.1, &cfg()).unwrap().is_divergent());
        let p1 = DistributionModel::pareto_seq(1).unwrap();
        let m = mgf_via_density(&p1, -1.0, &cfg()).unwrap();
        assert!((m.value - PARETO1_AT_MINUS1).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn density_route_requires_density() {
        let d = DistributionModel::point_mass(1.0).unwrap();
        assert!(matches!(mgf_via_density(&d, -1.0, &cfg()), Err(Error::DensityRequired(_))));
    }

    #[test]
    fn transformed_cdf_examples() {
        let f = DistributionModel::frechet();
        let n = DistributionModel::normal();
        assert_eq!(transformed_cdf(&n, 2.0, 1.0).unwrap(), n.cdf(0.0));
        let e = std::f64::consts::E;
        assert!((transformed_cdf(&f, 1.0, e).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let v = transformed_cdf(&f, -1.0, 0.5).unwrap();
        assert!((v - 0.763_709_911_655_477_3).abs() < 1e-12, "{v}");
        assert_eq!(transformed_cdf(&f, 1.0, -3.0).unwrap(), 0.0);
        assert_eq!(transformed_cdf(&f, 0.0, 1.0), Err(Error::ZeroT));
    }

    #[test]
    fn transformed_cdf_of_point_mass_uses_left_limit() {
        // X = 2, t = -1: e^{tX} = e^{-2}, so G jumps from 0 to 1 at x = e^{-2}
        let d = DistributionModel::point_mass(2.0).unwrap();
        let x0 = (-2.0f64).exp();
        assert_eq!(transformed_cdf(&d, -1.0, x0).unwrap(), 1.0);
        assert_eq!(transformed_cdf(&d, -1.0, x0 * 0.999).unwrap(), 0.0);
    }

    #[test]
    fn tail_route_examples() {
        let f = DistributionModel::frechet();
        let tail = mgf_via_tail(&f, -1.0, &cfg()).unwrap();
        let dens = mgf_via_density(&f, -1.0, &cfg()).unwrap();
        assert!((tail.value - BESSEL_2K1_2).abs() < 1e-6, "{tail:?}");
        assert!((tail.value - dens.value).abs() < 1e-6);

        let u = DistributionModel::uniform();
        let m = mgf_via_tail(&u, 1.0, &cfg()).unwrap();
        assert!((m.value - (std::f64::consts::E - 1.0)).abs() < 1e-8, "{m:?}");
        let m = mgf_via_tail(&u, -1.0, &cfg()).unwrap();
        assert!((m.value - (1.0 - (-1.0f64).exp())).abs() < 1e-8, "{m:?}");
        assert_eq!(mgf_via_tail(&u, 0.0, &cfg()), Err(Error::ZeroT));
    }

    #[test]
    fn tail_route_on_point_mass() {
        let d = DistributionModel::point_mass(-3.0).unwrap();
        let m = mgf_via_tail(&d, -0.5, &cfg()).unwrap();
        assert!((m.value - 1.5f64.exp()).abs() < 1e-8 * 1.5f64.exp(), "{m:?}");
    }

    #[test]
    fn existence_scan_examples() {
        let classes = |model: &DistributionModel, grid: &[f64]| -> Vec<MgfStatus> {
            existence_scan(model, grid, &cfg()).unwrap().into_iter().map(|(_, v)| v.status).collect()
        };
        use MgfStatus::*;
        assert_eq!(
            classes(&DistributionModel::frechet(), &[-2.0, -1.0, -0.5, 0.1, 1.0]),
            vec![Finite, Finite, Finite, Divergent, Divergent]
        );
        assert_eq!(classes(&DistributionModel::lognormal(), &[-1.0, 0.5]), vec![Finite, Divergent]);
        assert_eq!(classes(&DistributionModel::uniform(), &[-5.0, 5.0]), vec![Finite, Finite]);
        assert!(existence_scan(&DistributionModel::uniform(), &[], &cfg()).is_err());
        assert!(existence_scan(&DistributionModel::uniform(), &[1.0, -1.0], &cfg()).is_err());
    }

    #[test]
    fn zero_is_answered_directly() {
        for m in [DistributionModel::frechet(), DistributionModel::point_mass(4.0).unwrap()] {
            let v = evaluate(&m, 0.0, &cfg()).unwrap();
            assert_eq!(v.value, 1.0);
            assert_eq!(v.error_estimate, 0.0);
        }
    }

    #[test]
    fn clt_member_uses_closed_form() {
        let m = DistributionModel::clt_exponential(100, 1, 10).unwrap();
        let v = evaluate(&m, 0.5, &cfg()).unwrap();
        assert_eq!(v.route, MgfRoute::ClosedForm);
        assert_eq!(v.value, clt_exponential_mgf(100, 0.5).unwrap().value);
    }

    #[test]
    fn interval_grid() {
        let i = Interval::new(-1.0, 0.0).unwrap();
        let g = i.interior_grid(9);
        assert_eq!(g.len(), 9);
        assert!((g[0] + 0.9).abs() < 1e-15 && (g[8] + 0.1).abs() < 1e-15);
        assert!(Interval::new(0.0, 0.0).is_err());
    }
}
