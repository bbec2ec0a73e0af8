use std::path::PathBuf;

use ibm_exit::bm_exit::AnalyticExitLaw;
use ibm_exit::domains::{Domain, StartPoint, Symmetrization};
use ibm_exit::estimate::DEFAULT_CHUNK;
use ibm_exit::iterated::{ProcessKind, QuadratureSettings};
use ibm_exit::series::SeriesParams;
use ibm_exit::verify::DominanceSpec;
use serde::{Deserialize, Serialize};

use crate::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Survival,
    Moments,
    Verify,
    SignScan,
    Crosscheck,
}

impl Command {
    pub fn label(&self) -> &'static str {
        match self {
            Command::Survival => "survival",
            Command::Moments => "moments",
            Command::Verify => "verify",
            Command::SignScan => "sign-scan",
            Command::Crosscheck => "crosscheck",
        }
    }
}

/// Evaluation grids. Start points are coordinate lists.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<StartPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub u: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    #[default]
    Conditional,
    Quadrature,
    Pathwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub method: MethodKind,
    /// Samples per estimate (per side for verification cells).
    pub count: usize,
    /// Outer Euler step; absent selects `1e-4 · R_D²`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Inner step of the pathwise estimator.
    pub dt_y: f64,
    pub quadrature: QuadratureSettings,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            method: MethodKind::Conditional,
            count: 10_000,
            dt: None,
            dt_y: 1e-3,
            quadrature: QuadratureSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    #[default]
    Survival,
    Moments,
    Dominance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub check: CheckKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Symmetrization>,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_confirm_factor")]
    pub confirm_factor: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dominance: Option<DominanceSpec>,
}

fn default_k() -> f64 {
    3.0
}

fn default_confirm_factor() -> usize {
    4
}

fn default_process() -> ProcessKind {
    ProcessKind::Ibm
}

fn default_domain_id() -> String {
    "domain".into()
}

fn default_chunk() -> usize {
    DEFAULT_CHUNK
}

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default = "default_domain_id")]
    pub domain_id: String,
    #[serde(default = "default_process")]
    pub process: ProcessKind,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub series: SeriesParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default = "default_chunk")]
    pub chunk_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

fn nonempty<T>(field: &str, xs: &[T]) -> Result<(), ConfigError> {
    if xs.is_empty() {
        Err(invalid(field, "must not be empty"))
    } else {
        Ok(())
    }
}

fn finite_nonnegative(field: &str, xs: &[f64]) -> Result<(), ConfigError> {
    match xs.iter().position(|x| !(*x >= 0.0 && x.is_finite())) {
        Some(i) => Err(invalid(&format!("{field}[{i}]"), format!("must be finite and nonnegative, got {}", xs[i]))),
        None => Ok(()),
    }
}

impl ExperimentConfig {
    /// Parses and validates JSON.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config = Self::parse_json(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses JSON without semantic validation, reporting the field path
    /// and position of the first syntax or type error.
    pub fn parse_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let (line, column) = (inner.line(), inner.column());
            // serde_json appends the position, which is reported separately
            let message = inner.to_string();
            let message =
                message.strip_suffix(&format!(" at line {line} column {column}")).unwrap_or(&message).to_string();
            ConfigError::Parse { line, column, field: path, message }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn domain(&self) -> Result<&Domain, ConfigError> {
        self.domain
            .as_ref()
            .ok_or_else(|| invalid("domain", format!("required by the {} command", self.command.label())))
    }

    fn require_seed(&self) -> Result<u64, ConfigError> {
        self.master_seed.ok_or_else(|| {
            invalid("master_seed", format!("required by the stochastic {} command", self.command.label()))
        })
    }

    fn check_starts(&self, d: &Domain) -> Result<(), ConfigError> {
        nonempty("grids.z", &self.grids.z)?;
        for (i, z) in self.grids.z.iter().enumerate() {
            if z.coords().len() != d.dimension() {
                return Err(invalid(
                    &format!("grids.z[{i}]"),
                    format!("has {} coordinates but the domain lives in R^{}", z.coords().len(), d.dimension()),
                ));
            }
            z.require_interior(d).map_err(|e| invalid(&format!("grids.z[{i}]"), e.to_string()))?;
        }
        Ok(())
    }

    fn check_sampling(&self) -> Result<(), ConfigError> {
        if self.estimator.count < 2 {
            return Err(invalid("estimator.count", "must be at least 2"));
        }
        if let Some(dt) = self.estimator.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid("estimator.dt", "must be positive"));
            }
        }
        if !(self.estimator.dt_y > 0.0 && self.estimator.dt_y.is_finite()) {
            return Err(invalid("estimator.dt_y", "must be positive"));
        }
        Ok(())
    }

    /// Whether the command draws random numbers.
    pub fn is_stochastic(&self) -> bool {
        match self.command {
            Command::Survival => self.estimator.method != MethodKind::Quadrature,
            Command::Moments | Command::Verify => true,
            Command::SignScan | Command::Crosscheck => false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.series.validate().map_err(|e| invalid("series", e.to_string()))?;
        self.estimator.quadrature.validate().map_err(|e| invalid("estimator.quadrature", e.to_string()))?;
        if self.chunk_size < 1 {
            return Err(invalid("chunk_size", "must be at least 1"));
        }
        if self.is_stochastic() {
            self.require_seed()?;
            self.check_sampling()?;
        }
        let g = &self.grids;
        match self.command {
            Command::Survival => {
                let d = self.domain()?;
                self.check_starts(d)?;
                nonempty("grids.t", &g.t)?;
                finite_nonnegative("grids.t", &g.t)?;
                if self.estimator.method == MethodKind::Quadrature {
                    AnalyticExitLaw::for_domain(d, &g.z[0], self.series)
                        .map_err(|e| invalid("estimator.method", format!("quadrature unavailable: {e}")))?;
                }
            }
            Command::Moments => {
                self.check_starts(self.domain()?)?;
                nonempty("grids.p", &g.p)?;
                if let Some(i) = g.p.iter().position(|p| !(*p >= 1.0 && p.is_finite())) {
                    return Err(invalid(&format!("grids.p[{i}]"), "moment orders must be finite and at least 1"));
                }
            }
            Command::SignScan => {
                for (name, xs) in [("grids.u", &g.u), ("grids.v", &g.v), ("grids.t", &g.t)] {
                    nonempty(name, xs)?;
                    if let Some(i) = xs.iter().position(|x| !(*x > 0.0 && x.is_finite())) {
                        return Err(invalid(&format!("{name}[{i}]"), "must be positive and finite"));
                    }
                }
            }
            Command::Crosscheck => {
                let d = self.domain()?;
                if d.kind() != "interval" {
                    return Err(invalid("domain", format!("crosscheck needs an interval, got a {}", d.kind())));
                }
                self.check_starts(d)?;
                nonempty("grids.t", &g.t)?;
                finite_nonnegative("grids.t", &g.t)?;
            }
            Command::Verify => {
                let v = self.verify.as_ref().ok_or_else(|| invalid("verify", "required by the verify command"))?;
                if !(v.k > 0.0 && v.k.is_finite()) {
                    return Err(invalid("verify.k", "must be positive"));
                }
                if v.confirm_factor < 1 {
                    return Err(invalid("verify.confirm_factor", "must be at least 1"));
                }
                match v.check {
                    CheckKind::Dominance => {
                        let spec = v
                            .dominance
                            .as_ref()
                            .ok_or_else(|| invalid("verify.dominance", "required by the dominance check"))?;
                        spec.xi.validate().map_err(|e| invalid("verify.dominance.xi", e.to_string()))?;
                        spec.big_t.validate().map_err(|e| invalid("verify.dominance.T", e.to_string()))?;
                        nonempty("verify.dominance.t_grid", &spec.t_grid)?;
                        finite_nonnegative("verify.dominance.t_grid", &spec.t_grid)?;
                    }
                    CheckKind::Survival | CheckKind::Moments => {
                        let d = self.domain()?;
                        self.check_starts(d)?;
                        let comparison =
                            v.comparison.ok_or_else(|| invalid("verify.comparison", "required by this check"))?;
                        d.symmetrize(comparison).map_err(|e| invalid("verify.comparison", e.to_string()))?;
                        if v.check == CheckKind::Survival {
                            nonempty("grids.t", &g.t)?;
                            finite_nonnegative("grids.t", &g.t)?;
                        } else {
                            nonempty("grids.p", &g.p)?;
                            if g.p.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
                                return Err(invalid("grids.p", "moment orders must be finite and at least 1"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
