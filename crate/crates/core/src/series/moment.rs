use std::f64::consts::PI;

use statrs::function::gamma::{gamma, gamma_ur};

use super::{survival, SeriesParams};
use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive, GaussLegendre};

/// Largest integer order handled by the polynomial recursion.
pub(super) const MAX_EXACT_ORDER: u32 = 8;

pub(super) fn validate(u: f64, v: f64, order: f64) -> Result<()> {
    if !(u.is_finite() && v.is_finite() && u > 0.0 && v > 0.0) {
        return domain(format!("interval endpoints must be positive and finite (u={u}, v={v})"));
    }
    if !(order.is_finite() && order >= 1.0) {
        return domain(format!("moment order must be at least 1, got {order}"));
    }
    Ok(())
}

/// Integer moments from the recursion `½ m_k'' = −k m_{k−1}`,
/// `m_k = 0` at both ends, solved on the unit interval and rescaled by
/// Brownian scaling `E η_L^k = L^{2k} E η_1^k`.
pub fn eta_moment_exact(u: f64, v: f64, order: u32) -> Result<f64> {
    validate(u, v, order as f64)?;
    if order > MAX_EXACT_ORDER {
        return domain(format!("exact moments are tabulated up to order {MAX_EXACT_ORDER}"));
    }
    let l = u + v;
    let x = u / l;
    // coefficients in ascending powers
    let mut poly = vec![1.0];
    for k in 1..=order {
        let scale = -2.0 * k as f64;
        let mut next = vec![0.0; poly.len() + 2];
        for (j, c) in poly.iter().enumerate() {
            let jf = j as f64;
            next[j + 2] = scale * c / ((jf + 1.0) * (jf + 2.0));
        }
        // subtract the chord so the value at 1 vanishes
        let at_one: f64 = next.iter().sum();
        next[1] -= at_one;
        poly = next;
    }
    let value = poly.iter().rev().fold(0.0, |acc, c| acc * x + c);
    Ok(l.powi(2 * order as i32) * value)
}

/// `p ∫ t^{p−1} P_0[η > t] dt` for any real `p ≥ 1`.
///
/// The time axis is split at `T0 = regime_ratio · L²`. Beyond `T0` each
/// eigenfunction term integrates in closed form to
/// `A sin θ · Γ(p+1) Q(p, λ T0) / λ^p` (`Q` the regularized upper
/// incomplete gamma). Below `T0` the survival is integrated with adaptive
/// Gauss–Legendre.
pub fn eta_moment_series(u: f64, v: f64, order: f64, p: &SeriesParams) -> Result<f64> {
    validate(u, v, order)?;
    p.validate()?;
    let l = u + v;
    let split = p.regime_ratio * l * l;
    let tol = p.abs_tol.max(1e-14 * split.powf(order));
    let gamma_factor = gamma(order + 1.0);

    let mut tail = 0.0;
    let mut previous = f64::INFINITY;
    let mut converged = false;
    let mut bound = f64::INFINITY;
    for n in 0..p.max_terms {
        let m = (2 * n + 1) as f64;
        let lambda = m * m * PI * PI / (2.0 * l * l);
        let coef = 4.0 / (m * PI);
        let weight = coef * gamma_factor * gamma_ur(order, lambda * split) / lambda.powf(order);
        tail += weight * (m * PI * u / l).sin();
        bound = weight;
        if weight < 0.01 * tol && weight <= previous {
            converged = true;
            break;
        }
        previous = weight;
    }
    if !converged {
        return Err(Error::Accuracy { achieved: bound, terms: p.max_terms });
    }

    let rule = GaussLegendre::new(15);
    let mut integrand = |t: f64| -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        Ok(order * t.powf(order - 1.0) * survival(u, v, t, p)?)
    };
    let head = adaptive(&mut integrand, 0.0, split, 0.5 * tol, &rule)?;
    Ok(head + tail)
}
