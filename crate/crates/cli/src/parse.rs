//! Value parsers for grid, n-set, interval and selector arguments.

use std::path::PathBuf;

use mgf_core::distributions::{DistributionModel, FamilyTag};

/// Largest index accepted from `logspace`.
const MAX_INDEX: f64 = 1e15;

#[derive(Debug, Clone)]
pub enum ModelSpec {
    Builtin(DistributionModel),
    Tabulated(PathBuf),
}

pub fn model(s: &str) -> Result<ModelSpec, String> {
    if let Some(path) = s.strip_prefix("tabulated:") {
        if path.is_empty() {
            return Err("unknown model: tabulated needs a path, as in tabulated:cdf.csv".into());
        }
        return Ok(ModelSpec::Tabulated(PathBuf::from(path)));
    }
    DistributionModel::by_name(s).map(ModelSpec::Builtin).map_err(|_| {
        format!(
            "unknown model '{s}'; expected frechet, lognormal, uniform, exponential, normal, \
             pareto:<n>, point:<x>, clt:<n> or tabulated:<path>"
        )
    })
}

pub fn family(s: &str) -> Result<FamilyTag, String> {
    s.parse::<FamilyTag>().map_err(|_| {
        format!("unknown family '{s}'; expected pareto_to_frechet, degenerate_drift or clt_exponential")
    })
}

fn number(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{what}: '{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{what}: '{s}' is not finite"))
    }
}

/// `lo:hi:count`, inclusive endpoints.
pub fn t_grid(s: &str) -> Result<Vec<f64>, String> {
    let bad = || format!("malformed t grid '{s}'; expected lo:hi:count, as in -1:1:5");
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = number(parts[0], "malformed t grid")?;
    let hi = number(parts[1], "malformed t grid")?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(format!("malformed t grid '{s}': count must be positive"));
    }
    if lo > hi || (count == 1 && lo != hi) {
        return Err(format!("malformed t grid '{s}': need lo <= hi, and lo == hi when count is 1"));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count)
        .map(|k| if k == count - 1 { hi } else { lo + step * k as f64 })
        .collect())
}

/// Comma list, or `logspace:lo:hi:count` over base-10 exponents, rounded and deduplicated.
pub fn n_set(s: &str) -> Result<Vec<u64>, String> {
    let mut ns: Vec<u64> = if let Some(rest) = s.strip_prefix("logspace:") {
        let bad = || format!("malformed n set '{s}'; expected logspace:lo:hi:count");
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = number(parts[0], "malformed n set")?;
        let hi = number(parts[1], "malformed n set")?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || lo > hi {
            return Err(format!("malformed n set '{s}': need count > 0 and lo <= hi"));
        }
        let step = if count == 1 { 0.0 } else { (hi - lo) / (count - 1) as f64 };
        (0..count)
            .map(|k| {
                let v = 10f64.powf(lo + step * k as f64).round();
                if (1.0..=MAX_INDEX).contains(&v) {
                    Ok(v as u64)
                } else {
                    Err(format!("malformed n set '{s}': index {v} outside [1, 1e15]"))
                }
            })
            .collect::<Result<_, _>>()?
    } else {
        s.split(',')
            .map(|p| match p.trim().parse::<u64>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(format!("malformed n set '{s}': '{p}' is not a positive integer")),
            })
            .collect::<Result<_, _>>()?
    };
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}

/// `a,b` with `a < b`.
pub fn interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("malformed interval '{s}'; expected a,b as in -1,0"))?;
    let a = number(a, "malformed interval")?;
    let b = number(b, "malformed interval")?;
    if a < b {
        Ok((a, b))
    } else {
        Err(format!("malformed interval '{s}': need a < b"))
    }
}

pub fn positive(s: &str) -> Result<f64, String> {
    let v = number(s, "tolerance")?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive, got {s}"))
    }
}
