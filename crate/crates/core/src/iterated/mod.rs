//! Exit times of iterated Brownian motion `Z_t = z + X(Y_t)` and of
//! Brownian-time Brownian motion `Z¹_t = z + X(|Y_t|)`.
//!
//! Conditioning on the outer exit times reduces everything to the inner
//! interval law. With `τ⁻, τ⁺` independent exit times of Brownian motion
//! from `D` started at `z`,
//!
//! ```text
//! P_z[τ_D(Z) > t]  = E[ P_0[η_(−τ⁻, τ⁺) > t] ]
//! P_z[τ_D(Z¹) > t] = E[ P_0[η_(−τ, τ) > t] ]
//! ```
//!
//! and moments follow the same pattern with `E_0[η^p]` in place of the
//! survival.

mod pathwise;
mod phi;
mod quad;
mod rows;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bm_exit::{BatchCache, ExitSampler, ExitTimeSampleBatch};
use crate::domains::{Domain, StartPoint};
use crate::error::{domain, Error, Result};
use crate::estimate::{EstimateMethod, EstimateWithError, DEFAULT_CHUNK};
use crate::rng::StreamId;
use crate::series::{self, SeriesParams};

pub use phi::{phi_moment, TabulatedPhi};
pub use quad::{representation_crosscheck, representation_crosscheck_with, QuadratureSettings, RepresentationCheck};
pub use rows::{rows_to_csv, EstimateRow, Parameter, ROW_HEADER};

/// Which time-changed process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    /// Two independent outer motions `X^±`: outer exit times `(τ⁻, τ⁺)`.
    Ibm,
    /// One outer motion run at `|Y|`: outer exit times `(τ, τ)`.
    Btbm,
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessKind::Ibm => "ibm",
            ProcessKind::Btbm => "btbm",
        })
    }
}

/// A time `t` for survival queries or an order `p` for moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Time(f64),
    Order(f64),
}

/// Domain, interior start, process and target of an iterated exit query.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedQuery {
    domain: Domain,
    start: StartPoint,
    process: ProcessKind,
    target: Target,
}

impl IteratedQuery {
    pub fn at_time(domain: Domain, start: StartPoint, process: ProcessKind, t: f64) -> Result<Self> {
        check_time(t)?;
        start.require_interior(&domain)?;
        Ok(Self { domain, start, process, target: Target::Time(t) })
    }

    pub fn of_order(domain: Domain, start: StartPoint, process: ProcessKind, p: f64) -> Result<Self> {
        check_order(p)?;
        start.require_interior(&domain)?;
        Ok(Self { domain, start, process, target: Target::Order(p) })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn start(&self) -> &StartPoint {
        &self.start
    }

    pub fn process(&self) -> ProcessKind {
        self.process
    }

    pub fn target(&self) -> Target {
        self.target
    }

    fn time(&self) -> Result<f64> {
        match self.target {
            Target::Time(t) => Ok(t),
            Target::Order(p) => domain(format!("query carries moment order {p}, not a time")),
        }
    }

    fn order(&self) -> Result<f64> {
        match self.target {
            Target::Order(p) => Ok(p),
            Target::Time(t) => domain(format!("query carries time {t}, not a moment order")),
        }
    }

    fn require_process(&self, expected: ProcessKind) -> Result<()> {
        if self.process == expected {
            Ok(())
        } else {
            Err(Error::Precondition(format!("expected a {expected} query, got {}", self.process)))
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be finite and nonnegative, got {t}"))
    }
}

fn check_order(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        domain(format!("moment order must be finite and at least 1, got {p}"))
    }
}

/// Sample count, seed, outer Euler step and summation chunk of a
/// sampling estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub count: usize,
    pub seed: StreamId,
    /// Euler step for outer domains without a closed-form law; `None`
    /// selects `1e-4 · R_D²`.
    pub dt: Option<f64>,
    pub chunk: usize,
}

impl Sampling {
    pub fn new(count: usize, seed: StreamId) -> Self {
        Self { count, seed, dt: None, chunk: DEFAULT_CHUNK }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt: Some(dt), ..self }
    }

    pub fn with_chunk(self, chunk: usize) -> Self {
        Self { chunk, ..self }
    }

    /// Same settings on a different stream.
    pub fn reseeded(self, seed: StreamId) -> Self {
        Self { seed, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return domain(format!("sample count must be at least 2, got {}", self.count));
        }
        if self.chunk < 1 {
            return domain("chunk size must be at least 1");
        }
        Ok(())
    }
}

/// Estimator for iterated survival functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IteratedMethod {
    /// Average of the exact inner survival over sampled outer exit times.
    Conditional(Sampling),
    /// Gauss–Legendre integration against closed-form outer densities.
    Quadrature(QuadratureSettings),
    /// Simulated inner paths with bridge-sampled extremes, indicator of
    /// survival; uses no series at all.
    Pathwise { sampling: Sampling, dt_y: f64 },
}

const MINUS: u64 = 0;
const PLUS: u64 = 1;
const INNER: u64 = 2;

/// Outer exit times: `τ⁻` and, for IBM, an independent `τ⁺`.
///
/// `τ⁻` is drawn from substream 0 of the seed and `τ⁺` from substream 1
/// for both processes, so an IBM and a BTBM run on the same seed share
/// their `τ⁻` draws.
#[derive(Debug, Clone)]
pub struct OuterDraws {
    pub minus: Arc<ExitTimeSampleBatch>,
    pub plus: Option<Arc<ExitTimeSampleBatch>>,
}

impl OuterDraws {
    pub fn generate(
        domain: &Domain,
        start: &StartPoint,
        process: ProcessKind,
        sampling: &Sampling,
        params: SeriesParams,
        cache: Option<&BatchCache>,
    ) -> Result<Self> {
        sampling.validate()?;
        let sampler = ExitSampler::auto(domain, start, sampling.dt, params)?;
        let draw = |label| {
            let seed = sampling.seed.substream(label);
            match cache {
                Some(c) => c.get_or_generate(&sampler, domain, start, sampling.count, seed),
                None => ExitTimeSampleBatch::generate(&sampler, domain, start, sampling.count, seed).map(Arc::new),
            }
        };
        let minus = draw(MINUS)?;
        let plus = match process {
            ProcessKind::Ibm => Some(draw(PLUS)?),
            ProcessKind::Btbm => None,
        };
        Ok(Self { minus, plus })
    }

    pub fn len(&self) -> usize {
        self.minus.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(τ⁻_i, τ⁺_i)`, or `(τ_i, τ_i)` for BTBM.
    pub fn pair(&self, i: usize) -> (f64, f64) {
        let a = self.minus.times[i];
        (a, self.plus.as_ref().map_or(a, |p| p.times[i]))
    }

    /// Conditional estimate of `E[g(τ⁻, τ⁺)]`.
    pub fn average<G>(&self, chunk: usize, g: G) -> Result<EstimateWithError>
    where
        G: Fn(f64, f64) -> Result<f64> + Sync + Send,
    {
        let values: Vec<f64> = (0..self.len())
            .into_par_iter()
            .with_min_len(1024)
            .map(|i| {
                let (u, v) = self.pair(i);
                g(u, v)
            })
            .collect::<Result<_>>()?;
        Ok(EstimateWithError::from_samples(&values, EstimateMethod::Conditional, chunk))
    }
}

/// Survival estimates of `τ_D(Z)` or `τ_D(Z¹)` on `t_grid`. Sampling
/// methods reuse one set of draws for the whole grid.
pub fn survival_curve(
    domain: &Domain,
    start: &StartPoint,
    process: ProcessKind,
    t_grid: &[f64],
    method: &IteratedMethod,
    params: &SeriesParams,
    cache: Option<&BatchCache>,
) -> Result<Vec<EstimateWithError>> {
    params.validate()?;
    start.require_interior(domain)?;
    for &t in t_grid {
        check_time(t)?;
    }
    match method {
        IteratedMethod::Conditional(sampling) => {
            let draws = OuterDraws::generate(domain, start, process, sampling, *params, cache)?;
            t_grid.iter().map(|&t| draws.average(sampling.chunk, |u, v| series::survival(u, v, t, params))).collect()
        }
        IteratedMethod::Quadrature(settings) => {
            t_grid.iter().map(|&t| quad::survival(domain, start, process, t, settings, params)).collect()
        }
        IteratedMethod::Pathwise { sampling, dt_y } => {
            let draws = OuterDraws::generate(domain, start, process, sampling, *params, cache)?;
            pathwise::survival_curve(&draws, t_grid, sampling, *dt_y)
        }
    }
}

fn single(q: &IteratedQuery, method: &IteratedMethod, params: &SeriesParams) -> Result<EstimateWithError> {
    let t = q.time()?;
    let mut out = survival_curve(&q.domain, &q.start, q.process, &[t], method, params, None)?;
    Ok(out.remove(0))
}

/// `P_z[τ_D(Z) > t]` for iterated Brownian motion.
pub fn ibm_survival(q: &IteratedQuery, method: &IteratedMethod, params: &SeriesParams) -> Result<EstimateWithError> {
    q.require_process(ProcessKind::Ibm)?;
    single(q, method, params)
}

/// `P_z[τ_D(Z¹) > t]` for Brownian-time Brownian motion.
pub fn btbm_survival(q: &IteratedQuery, method: &IteratedMethod, params: &SeriesParams) -> Result<EstimateWithError> {
    q.require_process(ProcessKind::Btbm)?;
    single(q, method, params)
}

/// `E_z[τ^p]` for each order, from one set of outer draws.
pub fn moment_estimates(
    domain: &Domain,
    start: &StartPoint,
    process: ProcessKind,
    orders: &[f64],
    sampling: &Sampling,
    params: &SeriesParams,
    cache: Option<&BatchCache>,
) -> Result<Vec<EstimateWithError>> {
    params.validate()?;
    start.require_interior(domain)?;
    for &p in orders {
        check_order(p)?;
    }
    let draws = OuterDraws::generate(domain, start, process, sampling, *params, cache)?;
    orders.iter().map(|&p| draws.average(sampling.chunk, |u, v| series::eta_moment(u, v, p, params))).collect()
}

/// `E_z[τ_D(Z)^p]` or `E_z[τ_D(Z¹)^p]` by the conditional estimator.
pub fn iterated_moment(q: &IteratedQuery, sampling: &Sampling, params: &SeriesParams) -> Result<EstimateWithError> {
    let p = q.order()?;
    let mut out = moment_estimates(&q.domain, &q.start, q.process, &[p], sampling, params, None)?;
    Ok(out.remove(0))
}
