use rand::RngCore;

use crate::domains::{Domain, Shape, StartPoint};
use crate::error::{Error, Result};
use crate::rng::SampleRng;
use crate::series::{self, IntervalExitQuery, SeriesParams};

/// Exit law of one-dimensional Brownian motion from `(z − u, z + v)`
/// started at `z`. It is the law of `η_(-u,v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalExitLaw {
    u: f64,
    v: f64,
    params: SeriesParams,
}

/// Uniform draw on the open interval `(0, 1)`.
pub(crate) fn open_unit(rng: &mut SampleRng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl IntervalExitLaw {
    pub fn new(u: f64, v: f64, params: SeriesParams) -> Result<Self> {
        IntervalExitQuery::new(u, v, 0.0)?;
        params.validate()?;
        Ok(Self { u, v, params })
    }

    /// Law for `(a, b)` started at `z`.
    pub fn for_interval(a: f64, b: f64, z: f64, params: SeriesParams) -> Result<Self> {
        if !(a < z && z < b) {
            return Err(Error::Precondition(format!(
                "start {z} must lie strictly inside ({a}, {b}); on the boundary the exit time is 0"
            )));
        }
        Self::new(z - a, b - z, params)
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        series::survival(self.u, self.v, t, &self.params)
    }

    pub fn density(&self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        series::density(self.u, self.v, t, &self.params)
    }

    pub fn mean(&self) -> f64 {
        self.u * self.v
    }

    /// The `t` with `P[τ > t] = s`, for `s ∈ (0, 1)`.
    ///
    /// Brackets geometrically, bisects in log-time until the bracket is
    /// narrow, then runs Newton steps on the density, falling back to
    /// bisection whenever a step leaves the bracket.
    pub fn survival_quantile(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("survival level must lie in (0, 1), got {s}")));
        }
        let scale = (self.u + self.v).powi(2);
        let mut hi = 0.25 * scale;
        while self.survival(hi)? > s {
            hi *= 4.0;
        }
        let mut lo = hi * 1e-3;
        while self.survival(lo)? <= s {
            hi = lo;
            lo *= 1e-3;
        }
        while hi / lo > 1.5 {
            let mid = (lo * hi).sqrt();
            if self.survival(mid)? > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        let mut t = 0.5 * (lo + hi);
        for _ in 0..100 {
            let gap = self.survival(t)? - s;
            if gap.abs() <= 1e-13 {
                return Ok(t);
            }
            if gap > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let f = self.density(t)?;
            let mut next = if f > 0.0 { t + gap / f } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-15 * t {
                return Ok(next);
            }
            t = next;
        }
        let gap = (self.survival(t)? - s).abs();
        if gap <= 1e-10 {
            Ok(t)
        } else {
            Err(Error::Accuracy { achieved: gap, terms: 100 })
        }
    }

    /// One exact draw by inversion of the survival function.
    pub fn sample(&self, rng: &mut SampleRng) -> Result<f64> {
        self.survival_quantile(open_unit(rng))
    }
}

/// Exit laws known in closed form: a single interval law, or the minimum of
/// independent interval laws (axis-aligned boxes).
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticExitLaw {
    Interval(IntervalExitLaw),
    Product(Vec<IntervalExitLaw>),
}

impl AnalyticExitLaw {
    /// Exact law of `τ_D` from `z`, when `D` is an interval, a
    /// one-dimensional ball, a slab or a rectangle.
    pub fn for_domain(d: &Domain, z: &StartPoint, params: SeriesParams) -> Result<Self> {
        z.require_interior(d)?;
        let x = z.coords();
        match d.shape() {
            Shape::Interval { a, b } => Ok(Self::Interval(IntervalExitLaw::for_interval(*a, *b, x[0], params)?)),
            Shape::Ball { center, radius } if center.len() == 1 => {
                Ok(Self::Interval(IntervalExitLaw::for_interval(center[0] - radius, center[0] + radius, x[0], params)?))
            }
            Shape::Slab { half_width, dim } => {
                Ok(Self::Interval(IntervalExitLaw::for_interval(-half_width, *half_width, x[dim - 1], params)?))
            }
            Shape::Rectangle { xmin, xmax, ymin, ymax } => Ok(Self::Product(vec![
                IntervalExitLaw::for_interval(*xmin, *xmax, x[0], params)?,
                IntervalExitLaw::for_interval(*ymin, *ymax, x[1], params)?,
            ])),
            _ => Err(Error::Capability(format!("no closed-form exit law for a {}", d.kind()))),
        }
    }

    fn factors(&self) -> &[IntervalExitLaw] {
        match self {
            Self::Interval(law) => std::slice::from_ref(law),
            Self::Product(laws) => laws,
        }
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        self.factors().iter().try_fold(1.0, |acc, law| Ok(acc * law.survival(t)?))
    }

    /// `f = −S'`; for a product `Σ f_i Π_{j≠i} S_j`.
    pub fn density(&self, t: f64) -> Result<f64> {
        let laws = self.factors();
        let survivals: Vec<f64> = laws.iter().map(|l| l.survival(t)).collect::<Result<_>>()?;
        let mut total = 0.0;
        for (i, law) in laws.iter().enumerate() {
            let others: f64 = survivals.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| s).product();
            total += law.density(t)? * others;
        }
        Ok(total)
    }

    /// Time beyond which the survival is at most `level`.
    pub fn survival_cutoff(&self, level: f64) -> Result<f64> {
        match self {
            Self::Interval(law) => law.survival_quantile(level),
            Self::Product(laws) => {
                // the product is below `level` once any factor is; bisect below that
                let mut hi = f64::INFINITY;
                for law in laws {
                    hi = hi.min(law.survival_quantile(level)?);
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.survival(mid)? > level {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-13 * hi {
                        break;
                    }
                }
                Ok(hi)
            }
        }
    }

    pub fn sample(&self, rng: &mut SampleRng) -> Result<f64> {
        let mut best = f64::INFINITY;
        for law in self.factors() {
            best = best.min(law.sample(rng)?);
        }
        Ok(best)
    }
}
