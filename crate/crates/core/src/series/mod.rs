//! Exit law of a one-dimensional Brownian motion from an interval `(-u, v)`
//! started at the origin.
//!
//! Every quantity is evaluated in one of two equivalent forms:
//!
//! * the Dirichlet eigenfunction expansion on `(-u, v)`,
//!   `Σ 4/((2n+1)π) · sin((2n+1)πu/L) · exp(-(2n+1)²π²t / (2L²))` with
//!   `L = u + v`, which converges quickly once `t / L²` is moderate, and
//! * the method-of-images sum of Gaussian masses, which converges quickly
//!   for small `t / L²`.
//!
//! [`SeriesParams::regime_ratio`] picks the form. Derivatives are taken
//! termwise inside whichever form is active.

mod eigen;
mod images;
mod moment;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use moment::{eta_moment_exact, eta_moment_series};

/// The triple `(u, v, t)` describing `P_0[η_(-u,v) > t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalExitQuery {
    u: f64,
    v: f64,
    t: f64,
}

impl IntervalExitQuery {
    pub fn new(u: f64, v: f64, t: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite() && t.is_finite()) {
            return domain(format!("non-finite query (u={u}, v={v}, t={t})"));
        }
        if u <= 0.0 || v <= 0.0 {
            return domain(format!("interval endpoints must be positive (u={u}, v={v})"));
        }
        if t < 0.0 {
            return domain(format!("time must be nonnegative (t={t})"));
        }
        Ok(Self { u, v, t })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Interval length `u + v`.
    pub fn length(&self) -> f64 {
        self.u + self.v
    }

    /// The same query with the endpoints swapped.
    pub fn swapped(&self) -> Self {
        Self { u: self.v, v: self.u, t: self.t }
    }

    fn require_positive_time(&self) -> Result<()> {
        if self.t > 0.0 {
            Ok(())
        } else {
            domain("derivative quantities need t > 0")
        }
    }
}

/// Truncation and regime-switch controls shared by every series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeriesParams {
    pub max_terms: usize,
    pub abs_tol: f64,
    /// Threshold on `t / (u+v)²` at and above which the eigenfunction form
    /// is used.
    pub regime_ratio: f64,
}

impl Default for SeriesParams {
    fn default() -> Self {
        Self { max_terms: 1000, abs_tol: 1e-12, regime_ratio: 0.16 }
    }
}

impl SeriesParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::Validation("max_terms must be at least 1".into()));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Validation(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.regime_ratio > 0.0 && self.regime_ratio.is_finite()) {
            return Err(Error::Validation(format!("regime_ratio must be positive, got {}", self.regime_ratio)));
        }
        Ok(())
    }

    /// The form used for `q` under these parameters.
    pub fn form_for(&self, q: &IntervalExitQuery) -> SeriesForm {
        let l = q.length();
        if q.t / (l * l) >= self.regime_ratio {
            SeriesForm::Eigenfunction
        } else {
            SeriesForm::Images
        }
    }
}

/// Which representation of the exit law is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesForm {
    Eigenfunction,
    Images,
}

/// Endpoint with respect to which a partial derivative is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Left distance `u`.
    U,
    /// Right distance `v`.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Quantity {
    Survival,
    Density,
    /// `∂/∂v` of the survival.
    PartialV,
    /// `∂²/∂u∂v` of the survival.
    Mixed,
}

/// Evaluates `quantity` in an explicitly chosen form.
///
/// The survival and its derivatives are symmetric under `u ↔ v` (with the
/// partial switching sides), so every query is canonicalized to `u ≤ v`
/// first; this makes the symmetry exact in floating point.
fn evaluate(q: &IntervalExitQuery, quantity: Quantity, form: SeriesForm, p: &SeriesParams) -> Result<f64> {
    p.validate()?;
    let canonical = if q.u <= q.v || quantity == Quantity::PartialV { *q } else { q.swapped() };
    match form {
        SeriesForm::Eigenfunction => eigen::sum(&canonical, quantity, p),
        SeriesForm::Images => images::sum(&canonical, quantity, p),
    }
}

fn evaluate_active(q: &IntervalExitQuery, quantity: Quantity, p: &SeriesParams) -> Result<f64> {
    evaluate(q, quantity, p.form_for(q), p)
}

/// `P_0[η_(-u,v) > t]`, clamped to `[0, 1]`.
pub fn eta_survival(q: &IntervalExitQuery, p: &SeriesParams) -> Result<f64> {
    if q.t == 0.0 {
        p.validate()?;
        return Ok(1.0);
    }
    Ok(evaluate_active(q, Quantity::Survival, p)?.clamp(0.0, 1.0))
}

/// Survival evaluated in a forced form, without clamping. Used to compare
/// the two forms near the crossover.
pub fn eta_survival_in(q: &IntervalExitQuery, form: SeriesForm, p: &SeriesParams) -> Result<f64> {
    if q.t == 0.0 {
        return Ok(1.0);
    }
    evaluate(q, Quantity::Survival, form, p)
}

/// Density of `η_(-u,v)` at `t`, i.e. `-∂_t P_0[η > t]`.
pub fn eta_density(q: &IntervalExitQuery, p: &SeriesParams) -> Result<f64> {
    q.require_positive_time()?;
    evaluate_active(q, Quantity::Density, p)
}

/// First partial of the survival in `u` or `v`. Nonnegative up to the
/// series tolerance since the survival grows with the interval.
pub fn eta_partial(q: &IntervalExitQuery, side: Side, p: &SeriesParams) -> Result<f64> {
    q.require_positive_time()?;
    match side {
        Side::V => evaluate_active(q, Quantity::PartialV, p),
        Side::U => evaluate_active(&q.swapped(), Quantity::PartialV, p),
    }
}

/// Mixed partial `∂_u ∂_v P_0[η_(-u,v) > t]`. No sign is imposed.
pub fn eta_mixed_partial(q: &IntervalExitQuery, p: &SeriesParams) -> Result<f64> {
    q.require_positive_time()?;
    evaluate_active(q, Quantity::Mixed, p)
}

/// Same as [`eta_mixed_partial`] in a forced form.
pub fn eta_mixed_partial_in(q: &IntervalExitQuery, form: SeriesForm, p: &SeriesParams) -> Result<f64> {
    q.require_positive_time()?;
    evaluate(q, Quantity::Mixed, form, p)
}

/// `E_0[η_(-u,v)^order]` for `order ≥ 1`.
///
/// Integer orders up to [`moment::MAX_EXACT_ORDER`] use the exact
/// polynomial moment recursion; other orders fall back to
/// [`eta_moment_series`].
pub fn eta_moment(u: f64, v: f64, order: f64, p: &SeriesParams) -> Result<f64> {
    moment::validate(u, v, order)?;
    if order.fract() == 0.0 && order <= moment::MAX_EXACT_ORDER as f64 {
        eta_moment_exact(u, v, order as u32)
    } else {
        eta_moment_series(u, v, order, p)
    }
}

/// Convenience wrapper building the query inline.
pub fn survival(u: f64, v: f64, t: f64, p: &SeriesParams) -> Result<f64> {
    eta_survival(&IntervalExitQuery::new(u, v, t)?, p)
}

/// Convenience wrapper building the query inline.
pub fn density(u: f64, v: f64, t: f64, p: &SeriesParams) -> Result<f64> {
    eta_density(&IntervalExitQuery::new(u, v, t)?, p)
}
