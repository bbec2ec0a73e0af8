use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProcessKind;
use crate::bm_exit::AnalyticExitLaw;
use crate::domains::{Domain, Shape, StartPoint};
use crate::error::{domain, Error, Result};
use crate::estimate::{chunked_sum, EstimateMethod, EstimateWithError};
use crate::quadrature::{composite_nodes, graded_panels, GaussLegendre};
use crate::series::{self, eta_mixed_partial, eta_partial, IntervalExitQuery, SeriesParams, Side};

/// Outer integrals are truncated where the outer survival drops to this
/// level; the discarded mass is added to the reported error.
const TAIL_LEVEL: f64 = 1e-10;

/// Gauss–Legendre layout over `(0, T_cut)`: `levels` geometrically graded
/// panels toward zero, `panels` uniform ones on the upper half, `order`
/// nodes per panel. The refinement pass uses four more levels and twice
/// the uniform panels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSettings {
    pub order: usize,
    pub levels: u32,
    pub panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { order: 16, levels: 24, panels: 8 }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(2..=64).contains(&self.order) {
            return domain(format!("quadrature order must be in 2..=64, got {}", self.order));
        }
        if !(1..=48).contains(&self.levels) || self.panels < 1 {
            return domain("quadrature needs 1..=48 graded levels and at least one uniform panel");
        }
        Ok(())
    }

    fn nodes(&self, t_cut: f64, refine: bool) -> Vec<(f64, f64)> {
        let (levels, panels) = if refine { (self.levels + 4, 2 * self.panels) } else { (self.levels, self.panels) };
        composite_nodes(&GaussLegendre::new(self.order), &graded_panels(t_cut, levels, panels))
    }
}

fn analytic_law(d: &Domain, z: &StartPoint, params: &SeriesParams) -> Result<AnalyticExitLaw> {
    AnalyticExitLaw::for_domain(d, z, *params).map_err(|e| match e {
        Error::Capability(m) => Error::Capability(format!("quadrature needs a closed-form outer density: {m}")),
        e => e,
    })
}

/// Weighted values `w_i · g(x_i)`.
fn weighted(nodes: &[(f64, f64)], g: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
    nodes.iter().map(|&(x, w)| Ok(w * g(x)?)).collect()
}

/// `Σ_i Σ_j a_i b_j h(x_i, x_j)` with rows summed in parallel and merged in
/// a fixed order.
fn tensor_sum<H>(xs: &[f64], a: &[f64], b: &[f64], h: H) -> Result<f64>
where
    H: Fn(f64, f64) -> Result<f64> + Sync,
{
    let rows: Vec<f64> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            if a[i] == 0.0 {
                return Ok(0.0);
            }
            let mut acc = 0.0;
            for j in 0..xs.len() {
                if b[j] != 0.0 {
                    acc += b[j] * h(xs[i], xs[j])?;
                }
            }
            Ok(a[i] * acc)
        })
        .collect::<Result<_>>()?;
    Ok(chunked_sum(rows.iter().copied(), rows.len(), 64))
}

pub(super) fn survival(
    d: &Domain,
    z: &StartPoint,
    process: ProcessKind,
    t: f64,
    settings: &QuadratureSettings,
    params: &SeriesParams,
) -> Result<EstimateWithError> {
    settings.validate()?;
    if t == 0.0 {
        return Ok(EstimateWithError::deterministic(1.0, 0.0, EstimateMethod::Quadrature));
    }
    let law = analytic_law(d, z, params)?;
    let t_cut = law.survival_cutoff(TAIL_LEVEL)?;
    let pass = |refine| -> Result<f64> {
        let nodes = settings.nodes(t_cut, refine);
        let xs: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let wf = weighted(&nodes, |x| law.density(x))?;
        match process {
            ProcessKind::Ibm => tensor_sum(&xs, &wf, &wf, |u, v| series::survival(u, v, t, params)),
            ProcessKind::Btbm => {
                let terms: Vec<f64> = xs
                    .iter()
                    .zip(&wf)
                    .map(|(&u, w)| Ok(w * series::survival(u, u, t, params)?))
                    .collect::<Result<_>>()?;
                Ok(chunked_sum(terms.iter().copied(), terms.len(), 64))
            }
        }
    };
    let coarse = pass(false)?;
    let fine = pass(true)?;
    let tail = match process {
        ProcessKind::Ibm => 2.0 * TAIL_LEVEL,
        ProcessKind::Btbm => TAIL_LEVEL,
    };
    Ok(EstimateWithError::deterministic(fine.clamp(0.0, 1.0), (fine - coarse).abs() + tail, EstimateMethod::Quadrature))
}

/// The four integral representations of the IBM survival on an interval.
///
/// With `f` the outer exit density and `G` the outer survival,
///
/// ```text
/// double_density = ∫∫ P_0[η_(−u,v) > t] f(u) f(v)
/// partial_v      = ∫∫ ∂_v P_0[η_(−u,v) > t] f(u) G(v)
/// partial_u      = ∫∫ ∂_u P_0[η_(−u,v) > t] G(u) f(v)
/// mixed          = ∫∫ ∂_u ∂_v P_0[η_(−u,v) > t] G(u) G(v)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepresentationCheck {
    pub t: f64,
    pub double_density: f64,
    pub partial_v: f64,
    pub partial_u: f64,
    pub mixed: f64,
    /// Largest pairwise difference among the four values.
    pub max_discrepancy: f64,
    /// Refinement delta of the double-density value.
    pub quadrature_error: f64,
}

impl RepresentationCheck {
    pub fn values(&self) -> [f64; 4] {
        [self.double_density, self.partial_v, self.partial_u, self.mixed]
    }

    fn from_values(t: f64, v: [f64; 4], quadrature_error: f64) -> Self {
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            t,
            double_density: v[0],
            partial_v: v[1],
            partial_u: v[2],
            mixed: v[3],
            max_discrepancy: hi - lo,
            quadrature_error,
        }
    }
}

/// [`representation_crosscheck_with`] using default settings.
pub fn representation_crosscheck(
    d: &Domain,
    z: &StartPoint,
    t: f64,
    params: &SeriesParams,
) -> Result<RepresentationCheck> {
    representation_crosscheck_with(d, z, t, &QuadratureSettings::default(), params)
}

/// Evaluates all four representations of `P_z[τ_D(Z) > t]` for an
/// interval `D`.
pub fn representation_crosscheck_with(
    d: &Domain,
    z: &StartPoint,
    t: f64,
    settings: &QuadratureSettings,
    params: &SeriesParams,
) -> Result<RepresentationCheck> {
    if !matches!(d.shape(), Shape::Interval { .. }) {
        return Err(Error::Capability(format!("representation cross-check needs an interval, got a {}", d.kind())));
    }
    settings.validate()?;
    params.validate()?;
    super::check_time(t)?;
    z.require_interior(d)?;
    if t == 0.0 {
        return Ok(RepresentationCheck::from_values(0.0, [1.0; 4], 0.0));
    }
    let double = survival(d, z, ProcessKind::Ibm, t, settings, params)?;

    let law = analytic_law(d, z, params)?;
    let nodes = settings.nodes(law.survival_cutoff(TAIL_LEVEL)?, true);
    let xs: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let wf = weighted(&nodes, |x| law.density(x))?;
    let wg = weighted(&nodes, |x| law.survival(x))?;
    let q = |u, v| IntervalExitQuery::new(u, v, t);
    let partial_v = tensor_sum(&xs, &wf, &wg, |u, v| eta_partial(&q(u, v)?, Side::V, params))?;
    let partial_u = tensor_sum(&xs, &wg, &wf, |u, v| eta_partial(&q(u, v)?, Side::U, params))?;
    let mixed = tensor_sum(&xs, &wg, &wg, |u, v| eta_mixed_partial(&q(u, v)?, params))?;
    Ok(RepresentationCheck::from_values(t, [double.value, partial_v, partial_u, mixed], double.std_error))
}
