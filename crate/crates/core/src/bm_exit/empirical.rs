use super::ExitTimeSampleBatch;
use crate::error::{domain, Result};

/// Histogram density over contiguous bins.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
}

impl Histogram {
    /// `Σ density · width`; one up to rounding.
    pub fn total_mass(&self) -> f64 {
        self.density.iter().zip(self.edges.windows(2)).map(|(d, w)| d * (w[1] - w[0])).sum()
    }
}

/// Empirical survival on a grid plus a histogram density.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalExitLaw {
    pub grid: Vec<f64>,
    /// Right-continuous `#{τ > t} / n` at each grid point.
    pub survival: Vec<f64>,
    /// Binomial standard error of each survival value.
    pub survival_se: Vec<f64>,
    pub histogram: Histogram,
}

/// Summarizes a batch. The histogram uses the Freedman–Diaconis bin width
/// `2 · IQR · n^{-1/3}` unless `bins` is given.
pub fn empirical_exit_law(batch: &ExitTimeSampleBatch, grid: &[f64], bins: Option<usize>) -> Result<EmpiricalExitLaw> {
    let n = batch.times.len();
    if n == 0 {
        return domain("empty batch");
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|t| !t.is_finite()) {
        return domain("time grid must be finite and strictly increasing");
    }
    let mut sorted = batch.times.clone();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;

    let survival: Vec<f64> = grid
        .iter()
        .map(|&t| {
            let at_or_below = sorted.partition_point(|&x| x <= t);
            (n - at_or_below) as f64 / nf
        })
        .collect();
    let survival_se = survival.iter().map(|s| (s * (1.0 - s) / nf).sqrt()).collect();

    let (lo, hi) = (0.0, sorted[n - 1]);
    let bin_count = bins.unwrap_or_else(|| {
        let q = |p: f64| sorted[((p * (n - 1) as f64).round() as usize).min(n - 1)];
        let width = 2.0 * (q(0.75) - q(0.25)) / nf.cbrt();
        if width > 0.0 {
            ((hi - lo) / width).ceil().clamp(1.0, 100_000.0) as usize
        } else {
            1
        }
    });
    let bin_count = bin_count.max(1);
    let width = (hi - lo) / bin_count as f64;
    let edges: Vec<f64> = (0..=bin_count).map(|i| if i == bin_count { hi } else { lo + i as f64 * width }).collect();
    let mut counts = vec![0usize; bin_count];
    for &x in &sorted {
        let idx = (((x - lo) / width) as usize).min(bin_count - 1);
        counts[idx] += 1;
    }
    let density = counts.iter().zip(edges.windows(2)).map(|(&c, w)| c as f64 / (nf * (w[1] - w[0]))).collect();
    Ok(EmpiricalExitLaw { grid: grid.to_vec(), survival, survival_se, histogram: Histogram { edges, density } })
}
