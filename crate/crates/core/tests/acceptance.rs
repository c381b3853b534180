//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mgf_core::convergence::{
    sup_distance, theorem1_report, theorem2_demo, Consistency, GridPolicy, LabConfig, Verdict,
};
use mgf_core::distributions::{
    clt_exponential_mgf, make_family, normal_mgf, DistributionModel, FamilyParams, FamilyTag,
};
use mgf_core::mgf::{self, Interval, MgfStatus};
use mgf_core::montecarlo::{empirical_mgf, sample};
use mgf_core::quadrature::QuadratureConfig;

// high-precision quadrature oracles
const BESSEL_2K1_2: f64 = 0.279_731_763_633_044_85;
const FRECHET_MGF: [(f64, f64); 3] =
    [(-2.0, 0.139_667_474_015_293), (-1.0, BESSEL_2K1_2), (-0.5, 0.444_342_523_632_236)];
// closed-form oracle: max_t |M_400(t) - e^{t^2/2}| over {-0.5, -0.25, 0.25, 0.5} is 0.00240845
const CLT_BOUND_400: f64 = 2.5e-3;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn frechet_golden() -> Check {
    let v = mgf::mgf_via_density(&DistributionModel::frechet(), -1.0, &QuadratureConfig::default())
        .map_err(err)?;
    ensure(v.status == MgfStatus::Finite, format!("status {:?}", v.status))?;
    ensure((v.value - BESSEL_2K1_2).abs() <= 1e-6, format!("value {}", v.value))?;
    Ok(format!("M(-1) = {} (err est {:e})", v.value, v.error_estimate))
}

fn existence_domain() -> Check {
    let grid = [-2.0, -1.0, -0.5, 0.0, 0.1, 1.0];
    for m in [DistributionModel::frechet(), DistributionModel::lognormal()] {
        let scan = mgf::existence_scan(&m, &grid, &QuadratureConfig::default()).map_err(err)?;
        for (t, v) in scan {
            let want = if t <= 0.0 { MgfStatus::Finite } else { MgfStatus::Divergent };
            ensure(v.status == want, format!("{m} at t={t}: {:?}", v.status))?;
        }
    }
    Ok("finite on t <= 0, divergent at 0.1 and 1 for frechet and lognormal".into())
}

fn pareto_gaps() -> Check {
    let cfg = QuadratureConfig::default();
    let mut worst: f64 = 0.0;
    for (t, limit) in FRECHET_MGF {
        let mut prev = f64::INFINITY;
        for n in [10, 100, 1000] {
            let m = DistributionModel::pareto_seq(n).map_err(err)?;
            let v = mgf::mgf_via_density(&m, t, &cfg).map_err(err)?;
            let gap = (v.value - limit).abs();
            ensure(gap < prev, format!("t={t}: gap {gap} at n={n} not below {prev}"))?;
            prev = gap;
        }
        ensure(prev < 1e-2, format!("t={t}: gap {prev} at n=1000"))?;
        worst = worst.max(prev);
    }
    Ok(format!("gaps decrease; largest at n=1000 is {worst:e}"))
}

fn theorem1_suite() -> Check {
    let cfg = LabConfig::default();
    let params = FamilyParams::default();
    let interval = Interval::new(-1.0, 0.0).map_err(err)?;
    let t_grid = interval.interior_grid(9);

    let pareto = make_family(FamilyTag::ParetoToFrechet, &params).map_err(err)?;
    let r = theorem1_report(&pareto, &interval, &t_grid, &params.index_set, &cfg).map_err(err)?;
    for (name, v) in [("a", &r.condition_a), ("b", &r.condition_b), ("mgf", &r.mgf_convergence)] {
        ensure(v.status == Verdict::Satisfied, format!("pareto {name}: {:?} ({})", v.status, v.note))?;
    }
    ensure(r.consistency == Consistency::ConsistentWithTheorem1, "pareto consistency")?;

    let drift = make_family(FamilyTag::DegenerateDrift, &params).map_err(err)?;
    let r = theorem1_report(&drift, &interval, &t_grid, &params.index_set, &cfg).map_err(err)?;
    ensure(r.condition_a.status == Verdict::Violated, format!("drift a: {:?}", r.condition_a.status))?;
    ensure(
        r.mgf_convergence.status == Verdict::Violated,
        format!("drift mgf: {:?}", r.mgf_convergence.status),
    )?;
    ensure(r.consistency == Consistency::ConsistentWithTheorem1, "drift consistency")?;
    Ok("pareto_to_frechet all satisfied; degenerate_drift (a) and mgf violated; both consistent".into())
}

fn theorem2_suite() -> Check {
    let fam = make_family(FamilyTag::ParetoToFrechet, &FamilyParams::default()).map_err(err)?;
    let tab = theorem2_demo(&fam, -1.0, &[10, 100, 1000], &LabConfig::default()).map_err(err)?;
    for w in tab.rows.windows(2) {
        ensure(
            w[1].sup_distance < w[0].sup_distance,
            format!("sup distance {} at n={} not below {}", w[1].sup_distance, w[1].n, w[0].sup_distance),
        )?;
    }
    let worst = tab.rows.iter().map(|r| r.route_gap).fold(0.0, f64::max);
    ensure(worst < 1e-6, format!("route gap {worst}"))?;
    let sups: Vec<String> = tab.rows.iter().map(|r| format!("{:.3e}", r.sup_distance)).collect();
    Ok(format!("sup |G_n - G| = [{}]; route gap <= {worst:e}", sups.join(", ")))
}

fn clt_example() -> Check {
    let ts = [-0.5, -0.25, 0.25, 0.5];
    let mut prev = f64::INFINITY;
    for n in [25u64, 100, 400] {
        let mut gap: f64 = 0.0;
        for t in ts {
            let m = clt_exponential_mgf(n, t).map_err(err)?;
            gap = gap.max((m.value - normal_mgf(t)).abs());
        }
        ensure(gap < prev, format!("gap {gap} at n={n} not below {prev}"))?;
        prev = gap;
    }
    ensure(prev < CLT_BOUND_400, format!("gap {prev} at n=400"))?;

    let params = FamilyParams { index_set: vec![25, 100, 400], ..FamilyParams::default() };
    let fam = make_family(FamilyTag::CltExponential, &params).map_err(err)?;
    let interval = Interval::new(-1.0, 1.0).map_err(err)?;
    let r = theorem1_report(&fam, &interval, &ts, &params.index_set, &LabConfig::default()).map_err(err)?;
    ensure(!r.discrepancies.is_empty(), "no discrepancy recorded")?;
    Ok(format!("gap at n=400 is {prev:e}; discrepancy: {}", r.discrepancies[0]))
}

fn sup_distance_golden() -> Check {
    let d = sup_distance(
        &DistributionModel::pareto_seq(1).map_err(err)?,
        &DistributionModel::frechet(),
        &GridPolicy::default(),
    );
    ensure((d.value - (-1.0f64).exp()).abs() <= 1e-4, format!("value {}", d.value))?;
    Ok(format!("sup |F_1 - F| = {} at x = {}", d.value, d.arg_x))
}

fn property_suites() -> Check {
    let cfg = QuadratureConfig::default();
    let models = [
        DistributionModel::frechet(),
        DistributionModel::pareto_seq(5).map_err(err)?,
        DistributionModel::lognormal(),
        DistributionModel::uniform(),
        DistributionModel::exponential(),
        DistributionModel::normal(),
    ];

    for m in &models {
        let v = mgf::evaluate(m, 0.0, &cfg).map_err(err)?;
        ensure((v.value - 1.0).abs() < 1e-8, format!("{m}: M(0) = {}", v.value))?;

        let d = mgf::mgf_via_density(m, -0.5, &cfg).map_err(err)?;
        let t = mgf::mgf_via_tail(m, -0.5, &cfg).map_err(err)?;
        let gap = (d.value - t.value).abs();
        ensure(gap <= d.error_estimate + t.error_estimate + 1e-7, format!("{m}: route gap {gap}"))?;

        let mut prev = 0.0;
        for k in 0..10_000 {
            let f = m.cdf(-20.0 + 60.0 * k as f64 / 9_999.0);
            ensure(f >= prev, format!("{m}: cdf not monotone"))?;
            prev = f;
        }
        for k in 1..100 {
            let u = k as f64 / 100.0;
            let x = m.quantile(u).map_err(err)?;
            ensure((m.cdf(x) - u).abs() < 1e-10 * u, format!("{m}: quantile round trip at {u}"))?;
        }
    }

    let grid: Vec<f64> = (0..=16).map(|k| -4.0 + 0.25 * k as f64).collect();
    let scan = mgf::existence_scan(&DistributionModel::frechet(), &grid, &cfg).map_err(err)?;
    for w in scan.windows(3) {
        let (t1, t2, t3) = (w[0].0, w[1].0, w[2].0);
        let chord = ((t3 - t2) * w[0].1.value + (t2 - t1) * w[2].1.value) / (t3 - t1);
        ensure(w[1].1.value <= chord + 1e-7, format!("convexity fails at t={t2}"))?;
    }

    for (m, t, truth) in [
        (DistributionModel::frechet(), -1.0, BESSEL_2K1_2),
        (DistributionModel::uniform(), 1.0, std::f64::consts::E - 1.0),
    ] {
        let batch = sample(&m, 1_000_000, 20_080_101).map_err(err)?;
        let e = empirical_mgf(&batch, t).map_err(err)?;
        ensure(
            (e.estimate - truth).abs() <= 3.0 * e.std_error,
            format!("{m}: mc {} vs {truth} (se {})", e.estimate, e.std_error),
        )?;
    }

    let fam = make_family(FamilyTag::ParetoToFrechet, &FamilyParams::default()).map_err(err)?;
    let interval = Interval::new(-1.0, 0.0).map_err(err)?;
    let lab = LabConfig::default();
    let render = || -> Result<String, String> {
        let r = theorem1_report(&fam, &interval, &[-0.75, -0.5, -0.25], &[1, 10, 100], &lab).map_err(err)?;
        serde_json::to_string(&r).map_err(err)
    };
    ensure(render()? == render()?, "repeated reports differ")?;
    Ok("route equivalence, M(0)=1, convexity, monotone cdf, quantiles, mc 3-sigma, determinism".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, Option<Duration>); 8] = [
        ("frechet mgf golden value", frechet_golden, Some(Duration::from_secs(1))),
        ("existence domain", existence_domain, Some(Duration::from_secs(5))),
        ("pareto mgf gaps", pareto_gaps, Some(Duration::from_secs(30))),
        ("theorem 1 consistency", theorem1_suite, Some(Duration::from_secs(60))),
        ("tail formula and uniform convergence", theorem2_suite, None),
        ("clt example", clt_example, None),
        ("sup distance golden value", sup_distance_golden, None),
        ("property suites", property_suites, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if took > *b => Err(format!("took {took:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
