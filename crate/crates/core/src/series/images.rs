use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

use super::{IntervalExitQuery, Quantity, SeriesParams};
use crate::error::{Error, Result};

/// Upper Gaussian tail `P[N > x]`.
pub(crate) fn upper_tail(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

fn gauss_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Φ(hi) − Φ(lo)` without cancellation when both ends sit in one tail.
pub(crate) fn gauss_mass(lo: f64, hi: f64) -> f64 {
    if lo >= 0.0 {
        upper_tail(lo) - upper_tail(hi)
    } else if hi <= 0.0 {
        upper_tail(-hi) - upper_tail(-lo)
    } else {
        1.0 - upper_tail(-lo) - upper_tail(hi)
    }
}

/// Image terms of block `k` as `(sign, α, β)`: the survival contains
/// `sign · Φ((αu + βv)/√t)`.
fn block_terms(k: i64) -> [(f64, f64, f64); 4] {
    let k2 = 2.0 * k as f64;
    [(1.0, -k2, 1.0 - k2), (-1.0, -1.0 - k2, -k2), (-1.0, 2.0 - k2, 1.0 - k2), (1.0, 1.0 - k2, -k2)]
}

fn block(u: f64, v: f64, t: f64, k: i64, quantity: Quantity) -> f64 {
    let sqrt_t = t.sqrt();
    if quantity == Quantity::Survival {
        let l = u + v;
        let shift = 2.0 * k as f64 * l;
        let direct = gauss_mass((-u - shift) / sqrt_t, (v - shift) / sqrt_t);
        let reflected = gauss_mass((u - shift) / sqrt_t, (v + 2.0 * u - shift) / sqrt_t);
        return direct - reflected;
    }
    block_terms(k)
        .iter()
        .map(|&(sign, alpha, beta)| {
            let x = (alpha * u + beta * v) / sqrt_t;
            let pdf = gauss_pdf(x);
            sign * match quantity {
                Quantity::Survival => unreachable!(),
                Quantity::Density => pdf * x / (2.0 * t),
                Quantity::PartialV => beta * pdf / sqrt_t,
                Quantity::Mixed => -alpha * beta * x * pdf / t,
            }
        })
        .sum()
}

/// Upper bound on the magnitude of every shell `|k| ≥ shell` combined.
///
/// For `|k| ≥ 1` every image argument satisfies
/// `|αu + βv| ≥ (2|k| − 2)L + min(u, v)`; the bound is a few Gaussian tails
/// (or Gaussian densities with their polynomial weights for derivatives)
/// at that distance.
fn tail_bound(u: f64, v: f64, t: f64, shell: i64, quantity: Quantity) -> f64 {
    let x = ((2 * shell - 2) as f64 * (u + v) + u.min(v)) / t.sqrt();
    if x < 1.0 {
        return f64::INFINITY;
    }
    match quantity {
        Quantity::Survival => 16.0 * upper_tail(x),
        _ => {
            let weight = (2 * shell + 2) as f64;
            16.0 * weight * weight * (1.0 + x) * gauss_pdf(x) * (2.0 + 2.0 / t)
        }
    }
}

/// Sums image blocks `k = 0, ±1, ±2, …` until the remaining shells are
/// provably negligible.
pub(super) fn sum(q: &IntervalExitQuery, quantity: Quantity, p: &SeriesParams) -> Result<f64> {
    let (u, v, t) = (q.u(), q.v(), q.t());
    let target = 0.01 * p.abs_tol;
    let mut total = block(u, v, t, 0, quantity);
    let mut bound = f64::INFINITY;
    for k in 1..p.max_terms as i64 {
        bound = tail_bound(u, v, t, k, quantity);
        if k >= 2 && bound < target {
            return Ok(total);
        }
        total += block(u, v, t, k, quantity) + block(u, v, t, -k, quantity);
    }
    Err(Error::Accuracy { achieved: bound, terms: p.max_terms })
}
