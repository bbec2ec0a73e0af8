//! First exit times `τ_D` of Brownian motion: exact one-dimensional laws,
//! a bridge-corrected Euler sampler for planar and spatial domains, and
//! empirical summaries of sampled batches.

mod empirical;
mod euler;
mod law;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::domains::{Domain, StartPoint};
use crate::error::{domain, Error, Result};
use crate::estimate::{EstimateMethod, EstimateWithError, DEFAULT_CHUNK};
use crate::rng::{try_par_samples, SampleRng, StreamId};
use crate::series::SeriesParams;

pub use empirical::{empirical_exit_law, EmpiricalExitLaw, Histogram};
pub use euler::EulerBridgeSampler;
pub(crate) use law::open_unit;
pub use law::{AnalyticExitLaw, IntervalExitLaw};

/// How exit times were generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum Scheme {
    ExactInversion,
    EulerBridge { dt: f64 },
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::ExactInversion => f.write_str("exact-inversion"),
            Scheme::EulerBridge { dt } => write!(f, "euler-bridge(dt={dt})"),
        }
    }
}

/// A sampler of `τ_D` from a fixed start.
#[derive(Debug, Clone, PartialEq)]
pub enum ExitSampler {
    Exact(AnalyticExitLaw),
    Euler(EulerBridgeSampler),
}

impl ExitSampler {
    /// Exact inversion whenever the law is known in closed form, otherwise
    /// the Euler scheme with `dt` (default `1e-4 · R_D²`).
    pub fn auto(d: &Domain, z: &StartPoint, dt: Option<f64>, params: SeriesParams) -> Result<Self> {
        match AnalyticExitLaw::for_domain(d, z, params) {
            Ok(law) => Ok(Self::Exact(law)),
            Err(Error::Capability(_)) => {
                let dt = dt.unwrap_or_else(|| EulerBridgeSampler::default_dt(d));
                Ok(Self::Euler(EulerBridgeSampler::new(d, z, dt)?))
            }
            Err(e) => Err(e),
        }
    }

    /// Always the Euler scheme, whatever the shape.
    pub fn euler(d: &Domain, z: &StartPoint, dt: f64) -> Result<Self> {
        Ok(Self::Euler(EulerBridgeSampler::new(d, z, dt)?))
    }

    pub fn scheme(&self) -> Scheme {
        match self {
            Self::Exact(_) => Scheme::ExactInversion,
            Self::Euler(s) => Scheme::EulerBridge { dt: s.dt() },
        }
    }

    pub fn draw(&self, rng: &mut SampleRng) -> Result<f64> {
        match self {
            Self::Exact(law) => law.sample(rng),
            Self::Euler(s) => Ok(s.sample(rng)),
        }
    }
}

/// Sampled exit times with everything needed to regenerate them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitTimeSampleBatch {
    pub times: Vec<f64>,
    pub domain: Domain,
    pub start: StartPoint,
    pub scheme: Scheme,
    pub seed: StreamId,
}

impl ExitTimeSampleBatch {
    /// Fills a batch; sample `i` uses the generator of index `i` in `seed`.
    pub fn generate(
        sampler: &ExitSampler,
        domain: &Domain,
        start: &StartPoint,
        count: usize,
        seed: StreamId,
    ) -> Result<Self> {
        if count < 1 {
            return crate::error::domain("sample count must be at least 1");
        }
        let times = try_par_samples(seed, count, |rng| sampler.draw(rng))?;
        Ok(Self { times, domain: domain.clone(), start: start.clone(), scheme: sampler.scheme(), seed })
    }

    pub fn mean(&self) -> EstimateWithError {
        EstimateWithError::from_samples(&self.times, EstimateMethod::MonteCarlo, DEFAULT_CHUNK)
    }

    /// Single-column CSV with a commented header describing the batch.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# domain: {}", self.domain);
        let _ = writeln!(out, "# start: {}", self.start);
        let _ = writeln!(out, "# scheme: {}", self.scheme);
        let _ = writeln!(out, "# seed: {} stream: {}", self.seed.master_seed, self.seed.stream);
        out.push_str("exit_time\n");
        for t in &self.times {
            let _ = writeln!(out, "{t}");
        }
        out
    }
}

type Slot = Arc<OnceLock<Result<Arc<ExitTimeSampleBatch>>>>;

/// Memo of generated batches keyed by domain, start, scheme, seed and count.
///
/// Concurrent requests for the same key block on a single generation.
#[derive(Debug, Default)]
pub struct BatchCache {
    slots: Mutex<HashMap<String, Slot>>,
}

impl BatchCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_generate(
        &self,
        sampler: &ExitSampler,
        domain: &Domain,
        start: &StartPoint,
        count: usize,
        seed: StreamId,
    ) -> Result<Arc<ExitTimeSampleBatch>> {
        let key = format!("{domain}|{start}|{}|{}|{}|{count}", sampler.scheme(), seed.master_seed, seed.stream);
        let slot = self.slots.lock().unwrap_or_else(|e| e.into_inner()).entry(key).or_default().clone();
        slot.get_or_init(|| ExitTimeSampleBatch::generate(sampler, domain, start, count, seed).map(Arc::new)).clone()
    }

    pub fn len(&self) -> usize {
        self.slots.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact draws of the exit time of `(a, b)` from `z`.
pub fn sample_exit_interval(
    a: f64,
    b: f64,
    z: f64,
    count: usize,
    seed: StreamId,
    params: SeriesParams,
) -> Result<ExitTimeSampleBatch> {
    let law = IntervalExitLaw::for_interval(a, b, z, params)?;
    let d = Domain::interval(a, b)?;
    let start = StartPoint::new(vec![z]);
    ExitTimeSampleBatch::generate(&ExitSampler::Exact(AnalyticExitLaw::Interval(law)), &d, &start, count, seed)
}

/// Bridge-corrected Euler draws of `τ_D` from `z` with step `dt`.
pub fn sample_exit_domain(
    d: &Domain,
    z: &StartPoint,
    dt: f64,
    count: usize,
    seed: StreamId,
) -> Result<ExitTimeSampleBatch> {
    if count < 1 {
        return domain("sample count must be at least 1");
    }
    ExitTimeSampleBatch::generate(&ExitSampler::euler(d, z, dt)?, d, z, count, seed)
}

/// How [`bm_survival`] evaluates `P_z[τ_D > t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurvivalMethod {
    Analytic,
    MonteCarlo { count: usize, dt: Option<f64>, seed: StreamId },
}

/// `P_z[τ_D > t]`.
pub fn bm_survival(
    d: &Domain,
    z: &StartPoint,
    t: f64,
    method: SurvivalMethod,
    params: SeriesParams,
) -> Result<EstimateWithError> {
    z.require_interior(d)?;
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("time must be nonnegative, got {t}"));
    }
    if t == 0.0 {
        return Ok(EstimateWithError::exact(1.0));
    }
    match method {
        SurvivalMethod::Analytic => {
            let law = AnalyticExitLaw::for_domain(d, z, params)?;
            Ok(EstimateWithError::exact(law.survival(t)?))
        }
        SurvivalMethod::MonteCarlo { count, dt, seed } => {
            if count < 1 {
                return domain("sample count must be at least 1");
            }
            let dt = dt.unwrap_or_else(|| EulerBridgeSampler::default_dt(d));
            let batch = sample_exit_domain(d, z, dt, count, seed)?;
            let hits: Vec<f64> = batch.times.iter().map(|&s| if s > t { 1.0 } else { 0.0 }).collect();
            Ok(EstimateWithError::from_samples(&hits, EstimateMethod::MonteCarlo, DEFAULT_CHUNK))
        }
    }
}
