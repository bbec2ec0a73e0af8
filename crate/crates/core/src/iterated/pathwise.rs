use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{OuterDraws, Sampling, INNER};
use crate::bm_exit::open_unit;
use crate::error::{domain, Result};
use crate::estimate::{EstimateMethod, EstimateWithError};
use crate::rng::SampleRng;

/// Maximum of a Brownian bridge from `a` to `b` over a step of variance `h`.
fn bridge_max(a: f64, b: f64, h: f64, rng: &mut SampleRng) -> f64 {
    let d = b - a;
    0.5 * (a + b + (d * d - 2.0 * h * open_unit(rng).ln()).sqrt())
}

/// Survival indicators of one inner path at every grid time (in
/// `order`), written to `out`.
fn simulate(rng: &mut SampleRng, grid: &[f64], order: &[usize], (minus, plus): (f64, f64), dt_y: f64, out: &mut [f64]) {
    let (mut y, mut sup, mut neg_inf, mut now) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &k in order {
        let target = grid[k];
        while now < target && sup < plus && neg_inf < minus {
            let h = dt_y.min(target - now);
            let g: f64 = rng.sample(StandardNormal);
            let next = y + h.sqrt() * g;
            sup = sup.max(bridge_max(y, next, h, rng));
            neg_inf = neg_inf.max(bridge_max(-y, -next, h, rng));
            y = next;
            now = if h == target - now { target } else { now + h };
        }
        out[k] = if sup < plus && neg_inf < minus { 1.0 } else { 0.0 };
    }
}

pub(super) fn survival_curve(
    draws: &OuterDraws,
    t_grid: &[f64],
    sampling: &Sampling,
    dt_y: f64,
) -> Result<Vec<EstimateWithError>> {
    if !(dt_y > 0.0 && dt_y.is_finite()) {
        return domain(format!("inner time step must be positive, got {dt_y}"));
    }
    let m = t_grid.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| t_grid[a].total_cmp(&t_grid[b]));
    let inner = sampling.seed.substream(INNER);
    let n = draws.len();
    let mut flat = vec![0.0; n * m];
    if m > 0 {
        flat.par_chunks_mut(m).with_min_len(64).enumerate().for_each(|(i, out)| {
            let mut rng = inner.sample_rng(i as u64);
            simulate(&mut rng, t_grid, &order, draws.pair(i), dt_y, out);
        });
    }
    Ok((0..m)
        .map(|k| {
            let column: Vec<f64> = (0..n).map(|i| flat[i * m + k]).collect();
            EstimateWithError::from_samples(&column, EstimateMethod::Pathwise, sampling.chunk)
        })
        .collect())
}
