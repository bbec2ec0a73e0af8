use super::{check_time, OuterDraws, ProcessKind, Sampling};
use crate::bm_exit::BatchCache;
use crate::domains::{Domain, StartPoint};
use crate::error::{Error, Result};
use crate::estimate::EstimateWithError;
use crate::quadrature::{adaptive, GaussLegendre};
use crate::series::{self, SeriesParams};

/// A nondecreasing function given by values on a grid, linear in between
/// and constant outside.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPhi {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedPhi {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let invalid = |m: String| Err(Error::Validation(m));
        if grid.len() < 2 || grid.len() != values.len() {
            return invalid(format!(
                "need at least two grid points and one value per point, got {} and {}",
                grid.len(),
                values.len()
            ));
        }
        if grid.iter().chain(&values).any(|x| !x.is_finite()) {
            return invalid("grid and values must be finite".into());
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("grid must be nonnegative and strictly increasing".into());
        }
        if let Some(k) = (1..values.len()).find(|&k| values[k] < values[k - 1]) {
            return invalid(format!(
                "φ must be nondecreasing; it drops from {} at t={} to {} at t={}",
                values[k - 1],
                grid[k - 1],
                values[k],
                grid[k]
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.grid.partition_point(|&g| g <= t);
        if k == 0 {
            return self.values[0];
        }
        if k == self.grid.len() {
            return self.values[k - 1];
        }
        let (g0, g1) = (self.grid[k - 1], self.grid[k]);
        self.values[k - 1] + (self.values[k] - self.values[k - 1]) * (t - g0) / (g1 - g0)
    }

    /// `E[φ(η)] = φ(t₀) + Σ_k slope_k ∫_{t_k}^{t_{k+1}} P[η > s] ds` for a
    /// nonnegative variable `η` with survival `survival`. Segments are cut
    /// at `scale · 2^j` so each adaptive panel sees the survival's own time
    /// scale.
    pub fn expectation<S>(&self, mut survival: S, scale: f64, abs_tol: f64) -> Result<f64>
    where
        S: FnMut(f64) -> Result<f64>,
    {
        let rule = GaussLegendre::new(15);
        let mut total = self.values[0];
        for k in 1..self.grid.len() {
            let rise = self.values[k] - self.values[k - 1];
            if rise == 0.0 {
                continue;
            }
            let (a, b) = (self.grid[k - 1], self.grid[k]);
            let mut cuts = vec![a];
            cuts.extend((-30..64).map(|j| scale * 2f64.powi(j)).filter(|&c| c > a && c < b));
            cuts.push(b);
            let mut integral = 0.0;
            for w in cuts.windows(2) {
                integral += adaptive(&mut survival, w[0], w[1], abs_tol / cuts.len() as f64, &rule)?;
            }
            total += rise / (b - a) * integral;
        }
        Ok(total)
    }
}

/// `E_z[φ(τ)]` for the IBM or BTBM exit time and a tabulated
/// nondecreasing `φ`, by the conditional estimator.
pub fn phi_moment(
    domain: &Domain,
    start: &StartPoint,
    process: ProcessKind,
    phi: &TabulatedPhi,
    sampling: &Sampling,
    params: &SeriesParams,
    cache: Option<&BatchCache>,
) -> Result<EstimateWithError> {
    params.validate()?;
    start.require_interior(domain)?;
    check_time(phi.grid[phi.grid.len() - 1])?;
    let draws = OuterDraws::generate(domain, start, process, sampling, *params, cache)?;
    draws.average(sampling.chunk, |u, v| phi.expectation(|s| series::survival(u, v, s, params), u * v, 1e-10))
}
