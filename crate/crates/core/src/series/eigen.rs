use std::f64::consts::PI;

use super::{IntervalExitQuery, Quantity, SeriesParams};
use crate::error::{Error, Result};

/// Sums the eigenfunction expansion (or its termwise derivative).
///
/// Each term is paired with an upper bound on its magnitude; summation
/// stops once that bound is decreasing and below a fraction of `abs_tol`.
pub(super) fn sum(q: &IntervalExitQuery, quantity: Quantity, p: &SeriesParams) -> Result<f64> {
    let (u, v, t) = (q.u(), q.v(), q.t());
    let l = u + v;
    let l2 = l * l;
    let target = 0.01 * p.abs_tol;

    let mut total = 0.0;
    let mut previous_bound = f64::INFINITY;
    let mut bound = f64::INFINITY;
    for n in 0..p.max_terms {
        let m = (2 * n + 1) as f64;
        let theta = m * PI * u / l;
        let (sin, cos) = theta.sin_cos();
        let lambda = m * m * PI * PI / (2.0 * l2);
        let decay = (-lambda * t).exp();
        let coef = 4.0 / (m * PI);

        let (term, magnitude) = match quantity {
            Quantity::Survival => (coef * sin * decay, coef * decay),
            Quantity::Density => (coef * lambda * sin * decay, coef * lambda * decay),
            Quantity::PartialV => {
                let a = -m * PI * u / l2;
                let b = 2.0 * lambda * t / l;
                (coef * decay * (cos * a + sin * b), coef * decay * (a.abs() + b))
            }
            Quantity::Mixed => {
                // 4 e^{-λt} { sin θ / L⁴ · (π³m³t²/L² − 3πmt + mπuv)
                //           + cos θ / L³ · (m²π²t(v−u)/L² + u − v) }
                let l3 = l2 * l;
                let l4 = l2 * l2;
                let s_poly = PI.powi(3) * m.powi(3) * t * t / l2 - 3.0 * PI * m * t + m * PI * u * v;
                let c_poly = m * m * PI * PI * t * (v - u) / l2 + u - v;
                let term = 4.0 * decay * (sin / l4 * s_poly + cos / l3 * c_poly);
                let mag = 4.0
                    * decay
                    * ((PI.powi(3) * m.powi(3) * t * t / l2 + 3.0 * PI * m * t + m * PI * u * v) / l4
                        + (m * m * PI * PI * t * (v - u).abs() / l2 + (u - v).abs()) / l3);
                (term, mag)
            }
        };
        total += term;
        bound = magnitude;
        if magnitude < target && magnitude <= previous_bound {
            return Ok(total);
        }
        previous_bound = magnitude;
    }
    Err(Error::Accuracy { achieved: bound, terms: p.max_terms })
}
