use mgf_core::convergence::{sup_distance, GridPolicy};
use mgf_core::distributions::DistributionModel;
use mgf_core::mgf::{self, MgfStatus};
use mgf_core::montecarlo::{empirical_cdf_distance, empirical_mgf, sample};
use mgf_core::quadrature::{integrate, IntegralStatus, QuadratureConfig};
use proptest::prelude::*;

const BESSEL_2K1_2: f64 = 0.279_731_763_633_044_85;
const PARETO1_AT_MINUS1: f64 = 0.148_495_506_775_922_05;

fn continuous_models() -> Vec<DistributionModel> {
    vec![
        DistributionModel::frechet(),
        DistributionModel::pareto_seq(1).unwrap(),
        DistributionModel::pareto_seq(10).unwrap(),
        DistributionModel::pareto_seq(1000).unwrap(),
        DistributionModel::lognormal(),
        DistributionModel::uniform(),
        DistributionModel::exponential(),
        DistributionModel::normal(),
    ]
}

fn all_models() -> Vec<DistributionModel> {
    let mut v = continuous_models();
    v.push(DistributionModel::point_mass(-3.0).unwrap());
    v.push(DistributionModel::clt_exponential(16, 3, 20_000).unwrap());
    v
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cdf_is_monotone_on_sorted_grids(lo in -50.0f64..5.0, width in 0.1f64..1e4) {
        let grid: Vec<f64> = (0..10_000).map(|k| lo + width * k as f64 / 9_999.0).collect();
        for m in all_models() {
            let mut prev = 0.0;
            for &x in &grid {
                let f = m.cdf(x);
                prop_assert!((0.0..=1.0).contains(&f), "{} cdf({x}) = {f}", m);
                prop_assert!(f >= prev, "{} not monotone at {x}", m);
                prev = f;
            }
        }
    }

    #[test]
    fn quantile_round_trip(u in 0.001f64..0.999) {
        for m in continuous_models() {
            let x = m.quantile(u).unwrap();
            prop_assert!((m.cdf(x) - u).abs() < 1e-10 * u, "{} u={u}", m);
        }
    }

    #[test]
    fn quadrature_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let f = |x: f64| x.powi(-2) * (-1.0 / x - x).exp();
        let g = |x: f64| (-x).exp();
        let c = cfg();
        let fi = integrate(f, 0.0, f64::INFINITY, &c).unwrap();
        let gi = integrate(g, 0.0, f64::INFINITY, &c).unwrap();
        let hi = integrate(|x| alpha * f(x) + beta * g(x), 0.0, f64::INFINITY, &c).unwrap();
        let bound = 10.0 * fi.error_estimate.max(gi.error_estimate).max(hi.error_estimate);
        prop_assert!((hi.value - (alpha * fi.value + beta * gi.value)).abs() <= bound.max(1e-12));
    }

    #[test]
    fn sup_distance_is_symmetric(i in 0usize..8, j in 0usize..8) {
        let ms = continuous_models();
        let p = GridPolicy { points: 500, ..GridPolicy::default() };
        let ab = sup_distance(&ms[i], &ms[j], &p).value;
        let ba = sup_distance(&ms[j], &ms[i], &p).value;
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(sup_distance(&ms[i], &ms[i], &p).value, 0.0);
    }
}

#[test]
fn densities_integrate_to_one() {
    for m in continuous_models() {
        let v = mgf::mgf_via_density(&m, 0.0, &cfg()).unwrap();
        assert_eq!(v.status, MgfStatus::Finite, "{m}");
        assert!((v.value - 1.0).abs() < 1e-8, "{m}: {}", v.value);
    }
}

#[test]
fn interval_additivity() {
    let f = |x: f64| x.powi(-2) * (-1.0 / x - x).exp();
    let whole = integrate(f, 0.0, f64::INFINITY, &cfg()).unwrap();
    for c in [0.5, 1.0, 10.0] {
        let left = integrate(f, 0.0, c, &cfg()).unwrap();
        let right = integrate(f, c, f64::INFINITY, &cfg()).unwrap();
        let err = whole.error_estimate + left.error_estimate + right.error_estimate;
        assert!((whole.value - left.value - right.value).abs() <= err.max(1e-14), "c = {c}");
    }
}

#[test]
fn error_estimates_are_honest() {
    let golden: [(Box<dyn Fn(f64) -> f64>, f64); 3] = [
        (Box::new(|x: f64| (-x).exp()), 1.0),
        (Box::new(|x: f64| x.powi(-2) * (-1.0 / x).exp()), 1.0),
        (Box::new(|x: f64| x.powi(-2) * (-1.0 / x - x).exp()), BESSEL_2K1_2),
    ];
    for (f, truth) in golden.iter() {
        let out = integrate(f, 0.0, f64::INFINITY, &cfg()).unwrap();
        assert_eq!(out.status, IntegralStatus::Finite);
        assert!((out.value - truth).abs() <= out.error_estimate, "{out:?} vs {truth}");
    }
}

#[test]
fn reciprocal_substitution_agrees() {
    let direct = integrate(|x: f64| x.powi(-2) * (-1.0 / x).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
    // y = 1/x turns the essential zero at 0 into the tail e^{-y}
    let swapped = integrate(|y: f64| (-y).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
    assert!((direct.value - swapped.value).abs() < 1e-8);
}

fn route_pairs() -> Vec<(DistributionModel, Vec<f64>)> {
    vec![
        (DistributionModel::frechet(), vec![-2.0, -1.0, -0.5, -0.1]),
        (DistributionModel::pareto_seq(1).unwrap(), vec![-2.0, -1.0, -0.1]),
        (DistributionModel::pareto_seq(100).unwrap(), vec![-1.0, -0.5]),
        (DistributionModel::lognormal(), vec![-2.0, -1.0, -0.2]),
        (DistributionModel::uniform(), vec![-5.0, -1.0, 1.0, 5.0]),
        (DistributionModel::exponential(), vec![-1.0, 0.5]),
        (DistributionModel::normal(), vec![-1.0, 0.5, 1.5]),
    ]
}

#[test]
fn density_and_tail_routes_agree() {
    for (m, ts) in route_pairs() {
        for t in ts {
            let d = mgf::mgf_via_density(&m, t, &cfg()).unwrap();
            let tl = mgf::mgf_via_tail(&m, t, &cfg()).unwrap();
            if d.is_finite() && tl.is_finite() {
                let bound = d.error_estimate + tl.error_estimate + 1e-7;
                assert!((d.value - tl.value).abs() <= bound, "{m} t={t}: {d:?} vs {tl:?}");
            } else {
                panic!("{m} t={t}: expected both finite, got {d:?} / {tl:?}");
            }
        }
    }
}

#[test]
fn density_route_matches_closed_forms() {
    for (m, ts) in route_pairs() {
        for t in ts {
            if let Some(exact) = mgf::closed_form(&m, t) {
                let d = mgf::mgf_via_density(&m, t, &cfg()).unwrap();
                assert!((d.value - exact.value).abs() < 1e-8 * exact.value.max(1.0), "{m} t={t}");
            }
        }
    }
    let p1 = DistributionModel::pareto_seq(1).unwrap();
    let v = mgf::mgf_via_density(&p1, -1.0, &cfg()).unwrap();
    assert!((v.value - PARETO1_AT_MINUS1).abs() < 1e-9);
}

#[test]
fn nonpositive_support_mgf_is_bounded_monotone_and_convex() {
    let grid: Vec<f64> = (0..=20).map(|k| -4.0 + 0.2 * k as f64).collect();
    for m in [
        DistributionModel::frechet(),
        DistributionModel::pareto_seq(3).unwrap(),
        DistributionModel::lognormal(),
        DistributionModel::uniform(),
    ] {
        let scan = mgf::existence_scan(&m, &grid, &cfg()).unwrap();
        let vals: Vec<f64> = scan.iter().map(|(_, v)| v.value).collect();
        for (t, v) in &scan {
            assert!(v.is_finite(), "{m} t={t}");
            assert!((0.0..=1.0 + 1e-12).contains(&v.value), "{m} t={t}: {}", v.value);
        }
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-12, "{m} not nondecreasing");
        }
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                for k in j + 1..grid.len() {
                    let (t1, t2, t3) = (grid[i], grid[j], grid[k]);
                    let chord = ((t3 - t2) * vals[i] + (t2 - t1) * vals[k]) / (t3 - t1);
                    assert!(vals[j] <= chord + 1e-7, "{m} convexity at {t1},{t2},{t3}");
                }
            }
        }
    }
}

#[test]
fn m_zero_is_one_for_every_model() {
    for m in all_models() {
        let v = mgf::evaluate(&m, 0.0, &cfg()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-8);
    }
}

#[test]
fn monte_carlo_agrees_within_three_sigma() {
    let cases: Vec<(DistributionModel, f64, f64)> = vec![
        (DistributionModel::frechet(), -1.0, BESSEL_2K1_2),
        (DistributionModel::pareto_seq(1).unwrap(), -1.0, PARETO1_AT_MINUS1),
        (DistributionModel::uniform(), 1.0, std::f64::consts::E - 1.0),
        (DistributionModel::exponential(), 0.5, 2.0),
        (DistributionModel::normal(), 0.5, 0.125f64.exp()),
    ];
    for (m, t, truth) in cases {
        let quad = mgf::evaluate(&m, t, &cfg()).unwrap();
        assert!((quad.value - truth).abs() < 1e-8, "{m}");
        let batch = sample(&m, 1_000_000, 20_080_101).unwrap();
        let emp = empirical_mgf(&batch, t).unwrap();
        assert!(
            (emp.estimate - quad.value).abs() <= 3.0 * emp.std_error,
            "{m} t={t}: quad {} mc {} ± {}",
            quad.value,
            emp.estimate,
            emp.std_error
        );
    }
}

#[test]
fn monte_carlo_sampling_examples() {
    let f = DistributionModel::frechet();
    let batch = sample(&f, 1_000_000, 7).unwrap();
    let p = (-1.0f64).exp();
    let hits = batch.draws.iter().filter(|&&d| d <= 1.0).count() as f64 / 1e6;
    assert!((hits - p).abs() <= 3.0 * (p * (1.0 - p) / 1e6).sqrt());
    assert!(empirical_cdf_distance(&batch, &f).unwrap() < 2e-3);
    assert!(empirical_cdf_distance(&batch, &DistributionModel::uniform()).unwrap() > 0.3);
    assert!(batch.draws.iter().all(|&d| d > 0.0));
}
