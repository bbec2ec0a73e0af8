use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{judge, CheckSettings, Comparison, VerificationReport};
use crate::bm_exit::open_unit;
use crate::error::{domain, Error, Result};
use crate::estimate::{EstimateMethod, EstimateWithError};
use crate::iterated::Parameter;
use crate::rng::{SampleRng, StreamId};
use crate::series::{self, SeriesParams};

/// Law of a positive random variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Law {
    PointMass {
        at: f64,
    },
    Exponential {
        rate: f64,
    },
    /// Uniform over the given positive samples.
    Empirical {
        samples: Vec<f64>,
    },
}

impl Law {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        match self {
            Law::PointMass { at } if !(*at > 0.0 && at.is_finite()) => {
                bad(format!("point mass must be positive, got {at}"))
            }
            Law::Exponential { rate } if !(*rate > 0.0 && rate.is_finite()) => {
                bad(format!("exponential rate must be positive, got {rate}"))
            }
            Law::Empirical { samples } if samples.is_empty() => bad("empirical law needs samples".into()),
            Law::Empirical { samples } if samples.iter().any(|x| !(*x > 0.0 && x.is_finite())) => {
                bad("empirical samples must be positive and finite".into())
            }
            _ => Ok(()),
        }
    }

    /// `P[X > t]`.
    pub fn survival(&self, t: f64) -> f64 {
        match self {
            Law::PointMass { at } => {
                if *at > t {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Exponential { rate } => (-rate * t.max(0.0)).exp(),
            Law::Empirical { samples } => samples.iter().filter(|&&x| x > t).count() as f64 / samples.len() as f64,
        }
    }

    fn is_deterministic(&self) -> bool {
        matches!(self, Law::PointMass { .. })
    }

    fn sample(&self, rng: &mut SampleRng) -> f64 {
        match self {
            Law::PointMass { at } => *at,
            Law::Exponential { rate } => -open_unit(rng).ln() / rate,
            Law::Empirical { samples } => {
                let i = ((open_unit(rng) * samples.len() as f64) as usize).min(samples.len() - 1);
                samples[i]
            }
        }
    }
}

/// `P[η(−ξ₁, ξ₂) > t]` with independent copies, or `P[η(−ξ, ξ) > t]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceForm {
    TwoSided,
    Symmetric,
}

/// Two laws with `P[ξ > t] ≤ P[T > t]` and the grid to compare on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DominanceSpec {
    pub xi: Law,
    #[serde(rename = "T")]
    pub big_t: Law,
    pub t_grid: Vec<f64>,
    pub form: DominanceForm,
}

impl DominanceSpec {
    /// Errors naming the first grid time where `ξ` is not dominated.
    pub fn check_precondition(&self) -> Result<()> {
        self.xi.validate()?;
        self.big_t.validate()?;
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return domain("time grid must be nonempty, finite and nonnegative");
        }
        for &t in &self.t_grid {
            let (a, b) = (self.xi.survival(t), self.big_t.survival(t));
            if a > b + 1e-15 {
                return Err(Error::Precondition(format!(
                    "P[ξ > t] = {a} exceeds P[T > t] = {b} at t = {t}; ξ is not dominated by T"
                )));
            }
        }
        Ok(())
    }
}

const XI: u64 = 0x5849;
const BIG_T: u64 = 0x54;
const CONFIRM: u64 = 0xc0_4f11;

fn side(
    law: &Law,
    form: DominanceForm,
    ts: &[f64],
    count: usize,
    seed: StreamId,
    settings: &CheckSettings,
    params: &SeriesParams,
) -> Result<Vec<EstimateWithError>> {
    if law.is_deterministic() {
        let x = law.sample(&mut seed.sample_rng(0));
        return ts.iter().map(|&t| Ok(EstimateWithError::exact(series::survival(x, x, t, params)?))).collect();
    }
    let pairs: Vec<(f64, f64)> = (0..count)
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            let mut rng = seed.sample_rng(i as u64);
            let a = law.sample(&mut rng);
            let b = match form {
                DominanceForm::TwoSided => law.sample(&mut rng),
                DominanceForm::Symmetric => a,
            };
            (a, b)
        })
        .collect();
    ts.iter()
        .map(|&t| {
            let values: Vec<f64> = pairs
                .par_iter()
                .with_min_len(1024)
                .map(|&(a, b)| series::survival(a, b, t, params))
                .collect::<Result<_>>()?;
            Ok(EstimateWithError::from_samples(&values, EstimateMethod::Conditional, settings.chunk))
        })
        .collect()
}

/// Checks `P[η(−ξ₁, ξ₂) > t] ≤ P[η(−T₁, T₂) > t]` (or the symmetric form)
/// on the spec's grid after verifying the dominance precondition.
pub fn check_dominance(
    spec: &DominanceSpec,
    settings: &CheckSettings,
    params: &SeriesParams,
) -> Result<VerificationReport> {
    settings.validate()?;
    params.validate()?;
    spec.check_precondition()?;
    if settings.count < 2 {
        return domain("sample count must be at least 2");
    }
    let base = settings.seed;
    let ts = &spec.t_grid;
    let lhs = side(&spec.xi, spec.form, ts, settings.count, base.substream(XI), settings, params)?;
    let rhs = side(&spec.big_t, spec.form, ts, settings.count, base.substream(BIG_T), settings, params)?;
    let mut records = Vec::with_capacity(ts.len());
    for (j, &t) in ts.iter().enumerate() {
        records.push(judge(None, Parameter::Time(t), Comparison::new(lhs[j], rhs[j]), settings.k, || {
            let n = settings.count * settings.confirm_factor;
            let cb = base.substream(CONFIRM);
            let l = side(&spec.xi, spec.form, &[t], n, cb.substream(XI), settings, params)?;
            let r = side(&spec.big_t, spec.form, &[t], n, cb.substream(BIG_T), settings, params)?;
            Ok(Comparison::new(l[0], r[0]))
        })?);
    }
    let form = match spec.form {
        DominanceForm::TwoSided => "two-sided",
        DominanceForm::Symmetric => "symmetric",
    };
    Ok(VerificationReport { check: format!("dominance {form}"), k: settings.k, records })
}
