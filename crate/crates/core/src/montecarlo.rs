//! Seeded inverse-CDF sampling.
//!
//! Uniforms come from ChaCha8 (`rand_chacha`), seeded with `seed_from_u64` and
//! split into independent substreams with `set_stream`. Each 64-bit output is
//! mapped to `(k + 0.5) * 2^-53` with `k` its top 53 bits, so every uniform
//! lies strictly inside `(0, 1)`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::distributions::{DistributionModel, ModelKind};
use crate::error::{Error, Result};
use crate::mgf::MgfStatus;

/// Largest `exp` argument whose sum over a batch stays finite.
fn exp_cap(count: usize) -> f64 {
    f64::MAX.ln() - (count as f64).ln() - 1.0
}

/// Deterministic uniform stream on the open unit interval.
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        UniformStream { rng }
    }

    pub fn next_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleBatch {
    pub model_id: String,
    pub seed: u64,
    pub stream: u64,
    pub draws: Vec<f64>,
}

impl SampleBatch {
    pub fn count(&self) -> usize {
        self.draws.len()
    }
}

/// `count` draws from `model` on substream 0.
pub fn sample(model: &DistributionModel, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_stream(model, count, seed, 0)
}

pub fn sample_stream(
    model: &DistributionModel,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<SampleBatch> {
    let draws = match model.kind() {
        ModelKind::CltExponential { n, .. } => standardized_exponential_sums(*n, count, seed, stream),
        _ => {
            if !model.has_quantile() {
                return Err(Error::NoQuantile(model.id()));
            }
            let mut us = UniformStream::new(seed, stream);
            (0..count)
                .map(|_| model.quantile(us.next_open01()))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(SampleBatch { model_id: model.id(), seed, stream, draws })
}

/// Draws of `(S_n - n) / sqrt(n)` with `S_n` the sum of `n` unit exponentials,
/// each exponential being the inverse-CDF image `-ln(u)` of one uniform.
pub fn standardized_exponential_sums(n: u64, count: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut us = UniformStream::new(seed, stream);
    let nf = n as f64;
    let rn = nf.sqrt();
    (0..count)
        .map(|_| {
            // -sum ln(u_i) taken as -ln(prod u_i), renormalized before underflow
            let mut acc = 0.0;
            let mut prod = 1.0;
            for _ in 0..n {
                prod *= us.next_open01();
                if prod < 1e-280 {
                    acc -= prod.ln();
                    prod = 1.0;
                }
            }
            acc -= prod.ln();
            (acc - nf) / rn
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMgf {
    pub estimate: f64,
    pub std_error: f64,
    pub status: MgfStatus,
    /// Some `t * draw` exceeded the exponent cap and was clipped.
    pub overflow: bool,
}

/// Sample mean and standard error of `e^{t X}`.
pub fn empirical_mgf(batch: &SampleBatch, t: f64) -> Result<EmpiricalMgf> {
    if batch.draws.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let cap = exp_cap(batch.draws.len());
    let mut overflow = false;
    let values: Vec<f64> = batch
        .draws
        .iter()
        .map(|&x| {
            let e = t * x;
            if e > cap {
                overflow = true;
                cap.exp()
            } else {
                e.exp()
            }
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_error = if values.len() > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(EmpiricalMgf {
        estimate: mean,
        std_error,
        status: if overflow { MgfStatus::Inconclusive } else { MgfStatus::Finite },
        overflow,
    })
}

/// Kolmogorov-Smirnov distance between the batch's empirical CDF and `model`.
pub fn empirical_cdf_distance(batch: &SampleBatch, model: &DistributionModel) -> Result<f64> {
    if batch.draws.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut sorted = batch.draws.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = model.cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}
