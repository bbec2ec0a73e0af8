use std::fmt;

use serde::{Deserialize, Serialize};

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    /// Closed form or series; no sampling.
    Analytic,
    /// Deterministic quadrature; the error is a refinement delta.
    Quadrature,
    /// Plain Monte Carlo average of indicators or samples.
    MonteCarlo,
    /// Monte Carlo average of exact conditional expectations.
    Conditional,
    /// Monte Carlo over simulated inner paths.
    Pathwise,
}

impl EstimateMethod {
    pub fn is_deterministic(&self) -> bool {
        matches!(self, EstimateMethod::Analytic | EstimateMethod::Quadrature)
    }

    pub fn label(&self) -> &'static str {
        match self {
            EstimateMethod::Analytic => "analytic",
            EstimateMethod::Quadrature => "quadrature",
            EstimateMethod::MonteCarlo => "monte-carlo",
            EstimateMethod::Conditional => "conditional",
            EstimateMethod::Pathwise => "pathwise",
        }
    }
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A value with its standard error and sample count.
///
/// For sampling methods `std_error` is the sample standard deviation over
/// `√n_samples`; deterministic methods may report zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub method: EstimateMethod,
}

/// Chunk length used when no layout is configured.
pub const DEFAULT_CHUNK: usize = 4096;

impl EstimateWithError {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, n_samples: 0, method: EstimateMethod::Analytic }
    }

    pub fn deterministic(value: f64, error: f64, method: EstimateMethod) -> Self {
        Self { value, std_error: error, n_samples: 0, method }
    }

    /// Mean and standard error of `samples`. Sums run over fixed chunks of
    /// `chunk` consecutive samples, merged pairwise, so the result depends
    /// only on the sample order and the chunk length.
    pub fn from_samples(samples: &[f64], method: EstimateMethod, chunk: usize) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { value: f64::NAN, std_error: f64::INFINITY, n_samples: 0, method };
        }
        let mean = chunked_sum(samples.iter().copied(), n, chunk) / n as f64;
        let std_error = if n < 2 {
            f64::INFINITY
        } else {
            let ss = chunked_sum(samples.iter().map(|x| (x - mean) * (x - mean)), n, chunk);
            (ss / (n - 1) as f64 / n as f64).sqrt()
        };
        Self { value: mean, std_error, n_samples: n as u64, method }
    }

    /// Root-sum-square of the two standard errors (independent estimates).
    pub fn combined_se(&self, other: &Self) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

/// Sequential sums over chunks of length `chunk`, then a pairwise tree over
/// the chunk sums.
pub fn chunked_sum(values: impl Iterator<Item = f64>, len: usize, chunk: usize) -> f64 {
    let chunk = chunk.max(1);
    let mut partials = Vec::with_capacity(len.div_ceil(chunk));
    let mut acc = 0.0;
    let mut in_chunk = 0;
    for x in values {
        acc += x;
        in_chunk += 1;
        if in_chunk == chunk {
            partials.push(acc);
            acc = 0.0;
            in_chunk = 0;
        }
    }
    if in_chunk > 0 {
        partials.push(acc);
    }
    pairwise(&partials)
}

fn pairwise(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise(&xs[..n / 2]) + pairwise(&xs[n / 2..]),
    }
}
