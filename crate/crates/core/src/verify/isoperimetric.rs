use super::{judge, CheckSettings, Comparison, VerificationReport};
use crate::bm_exit::BatchCache;
use crate::domains::{Domain, StartPoint, Symmetrization};
use crate::error::{domain, Result};
use crate::estimate::EstimateWithError;
use crate::iterated::{moment_estimates, survival_curve, IteratedMethod, Parameter, ProcessKind, Sampling};
use crate::rng::StreamId;
use crate::series::SeriesParams;

const RHS: u64 = 0x5248_5300;
const LHS: u64 = 0x4c48_5300;
const CONFIRM: u64 = 0xc0_4f11;

#[derive(Clone, Copy)]
enum Quantity<'a> {
    Survival(&'a [f64]),
    Moments(&'a [f64]),
}

impl Quantity<'_> {
    fn parameters(&self) -> Vec<Parameter> {
        match self {
            Quantity::Survival(ts) => ts.iter().map(|&t| Parameter::Time(t)).collect(),
            Quantity::Moments(ps) => ps.iter().map(|&p| Parameter::Order(p)).collect(),
        }
    }
}

struct Setup<'a> {
    process: ProcessKind,
    settings: &'a CheckSettings,
    params: &'a SeriesParams,
    cache: Option<&'a BatchCache>,
}

impl Setup<'_> {
    fn sampling(&self, seed: StreamId, factor: usize) -> Sampling {
        Sampling { count: self.settings.count * factor, seed, dt: self.settings.dt, chunk: self.settings.chunk }
    }

    fn estimate(&self, d: &Domain, z: &StartPoint, q: Quantity, sampling: Sampling) -> Result<Vec<EstimateWithError>> {
        match q {
            Quantity::Survival(ts) => {
                survival_curve(d, z, self.process, ts, &IteratedMethod::Conditional(sampling), self.params, self.cache)
            }
            Quantity::Moments(ps) => moment_estimates(d, z, self.process, ps, &sampling, self.params, self.cache),
        }
    }
}

/// The comparison domain, after checking that the comparison is admissible.
/// Every shipped shape is convex, so only the volume, dimension and
/// diameter requirements can fail; those surface as precondition errors.
fn comparison_domain(d: &Domain, comparison: Symmetrization) -> Result<Domain> {
    d.symmetrize(comparison)
}

fn run(
    name: &str,
    d: &Domain,
    comparison: Symmetrization,
    z_grid: &[StartPoint],
    q: Quantity,
    setup: Setup,
) -> Result<VerificationReport> {
    setup.settings.validate()?;
    if z_grid.is_empty() {
        return domain("start grid must not be empty");
    }
    let star = comparison_domain(d, comparison)?;
    let origin = StartPoint::origin(star.dimension());
    for z in z_grid {
        z.require_interior(d)?;
    }
    let base = setup.settings.seed;
    let rhs = setup.estimate(&star, &origin, q, setup.sampling(base.substream(RHS), 1))?;
    let confirm_base = base.substream(CONFIRM);
    let mut rhs_confirm: Option<Vec<EstimateWithError>> = None;
    let params = q.parameters();
    let k = setup.settings.k;
    let mut records = Vec::with_capacity(z_grid.len() * params.len());
    for (i, z) in z_grid.iter().enumerate() {
        let lhs = setup.estimate(d, z, q, setup.sampling(base.substream(LHS + i as u64), 1))?;
        let mut lhs_confirm: Option<Vec<EstimateWithError>> = None;
        for (j, &parameter) in params.iter().enumerate() {
            let record = judge(Some(z.clone()), parameter, Comparison::new(lhs[j], rhs[j]), k, || {
                let factor = setup.settings.confirm_factor;
                if rhs_confirm.is_none() {
                    rhs_confirm =
                        Some(setup.estimate(&star, &origin, q, setup.sampling(confirm_base.substream(RHS), factor))?);
                }
                if lhs_confirm.is_none() {
                    let seed = confirm_base.substream(LHS + i as u64);
                    lhs_confirm = Some(setup.estimate(d, z, q, setup.sampling(seed, factor))?);
                }
                let (l, r) = (lhs_confirm.as_ref().unwrap(), rhs_confirm.as_ref().unwrap());
                Ok(Comparison::new(l[j], r[j]))
            })?;
            records.push(record);
        }
    }
    Ok(VerificationReport { check: format!("{name} {} {d} vs {comparison}", setup.process), k, records })
}

/// Checks `P_z[τ_D > t] ≤ P_0[τ_{D_*} > t]` for the IBM or BTBM exit time on
/// every `(z, t)`, with `D_*` the chosen comparison domain of `d`.
///
/// Both sides use the conditional estimator with the same count and step;
/// the right side is drawn once from its own stream and shared by all
/// cells, each left side from a stream keyed by its start index.
#[allow(clippy::too_many_arguments)]
pub fn check_isoperimetric(
    d: &Domain,
    process: ProcessKind,
    comparison: Symmetrization,
    z_grid: &[StartPoint],
    t_grid: &[f64],
    settings: &CheckSettings,
    params: &SeriesParams,
    cache: Option<&BatchCache>,
) -> Result<VerificationReport> {
    if t_grid.is_empty() {
        return domain("time grid must not be empty");
    }
    run("survival", d, comparison, z_grid, Quantity::Survival(t_grid), Setup { process, settings, params, cache })
}

/// `E_z[τ_D^p] ≤ E_0[τ_{D_*}^p]` on every `(z, p)`.
#[allow(clippy::too_many_arguments)]
pub fn check_moments(
    d: &Domain,
    process: ProcessKind,
    comparison: Symmetrization,
    z_grid: &[StartPoint],
    p_list: &[f64],
    settings: &CheckSettings,
    params: &SeriesParams,
    cache: Option<&BatchCache>,
) -> Result<VerificationReport> {
    if p_list.is_empty() {
        return domain("moment order list must not be empty");
    }
    run("moment", d, comparison, z_grid, Quantity::Moments(p_list), Setup { process, settings, params, cache })
}
