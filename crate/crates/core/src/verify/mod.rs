//! Statistical checks of exit-time inequalities.
//!
//! Each check compares a left-hand estimate against a right-hand one that
//! should dominate it. A cell is flagged when `rhs − lhs < −k · se`, with
//! `se` the root-sum-square of the two standard errors; a flagged cell is
//! rerun on fresh streams with more samples and the flag is confirmed only
//! if the rerun flags too.

mod dominance;
mod isoperimetric;
mod sign;

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::domains::StartPoint;
use crate::estimate::{EstimateWithError, DEFAULT_CHUNK};
use crate::iterated::Parameter;
use crate::rng::StreamId;

pub use dominance::{check_dominance, DominanceForm, DominanceSpec, Law};
pub use isoperimetric::{check_isoperimetric, check_moments};
pub use sign::{diagonal_monotonicity, sign_scan, SignCell, SignScan};

/// Outcome of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Flag { confirmed: bool },
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Flag { confirmed: false } => "flag-unconfirmed",
            Status::Flag { confirmed: true } => "flag-confirmed",
        })
    }
}

/// Margin and combined standard error of one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub lhs: EstimateWithError,
    pub rhs: EstimateWithError,
    pub margin: f64,
    pub combined_se: f64,
}

impl Comparison {
    pub fn new(lhs: EstimateWithError, rhs: EstimateWithError) -> Self {
        Self { lhs, rhs, margin: rhs.value - lhs.value, combined_se: lhs.combined_se(&rhs) }
    }

    pub fn flagged(&self, k: f64) -> bool {
        self.margin < -k * self.combined_se
    }

    /// Margin in units of the combined standard error.
    pub fn z_score(&self) -> f64 {
        if self.combined_se > 0.0 {
            self.margin / self.combined_se
        } else if self.margin < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }
}

/// One `(z, t)` or `(z, p)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub z: Option<StartPoint>,
    pub parameter: Parameter,
    pub comparison: Comparison,
    pub status: Status,
    /// The rerun of a flagged cell.
    pub confirmation: Option<Comparison>,
}

/// Shared settings of the sampling checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSettings {
    /// Samples per side and cell.
    pub count: usize,
    /// Flag threshold in combined standard errors.
    pub k: f64,
    pub seed: StreamId,
    /// Euler step for domains without a closed-form exit law.
    pub dt: Option<f64>,
    pub chunk: usize,
    /// Sample multiplier of the confirmation rerun.
    pub confirm_factor: usize,
}

impl CheckSettings {
    pub fn new(count: usize, master_seed: u64) -> Self {
        Self { count, k: 3.0, seed: StreamId::new(master_seed, 0), dt: None, chunk: DEFAULT_CHUNK, confirm_factor: 4 }
    }

    fn validate(&self) -> crate::Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return crate::error::domain(format!("flag threshold k must be positive, got {}", self.k));
        }
        if self.confirm_factor < 1 {
            return crate::error::domain("confirmation factor must be at least 1");
        }
        Ok(())
    }
}

/// Records of one check plus the threshold they were judged by.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub k: f64,
    pub records: Vec<CheckRecord>,
}

/// Counts and the worst cell of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub cells: usize,
    pub passed: usize,
    pub unconfirmed_flags: usize,
    pub confirmed_flags: usize,
    /// Index and margin of the record with the lowest margin z-score.
    pub worst: Option<(usize, f64)>,
}

pub const REPORT_HEADER: &str = "check,z,t,p,lhs,lhs_se,rhs,rhs_se,margin,combined_se,status,confirm_margin,confirm_se";

impl VerificationReport {
    pub fn summary(&self) -> Summary {
        let count = |s: Status| self.records.iter().filter(|r| r.status == s).count();
        let worst = self
            .records
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.comparison.z_score().total_cmp(&b.1.comparison.z_score()))
            .map(|(i, r)| (i, r.comparison.margin));
        Summary {
            cells: self.records.len(),
            passed: count(Status::Pass),
            unconfirmed_flags: count(Status::Flag { confirmed: false }),
            confirmed_flags: count(Status::Flag { confirmed: true }),
            worst,
        }
    }

    pub fn has_confirmed_flag(&self) -> bool {
        self.records.iter().any(|r| r.status == Status::Flag { confirmed: true })
    }

    /// One row per record under [`REPORT_HEADER`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.records {
            let z = r.z.as_ref().map(|z| z.to_string()).unwrap_or_default();
            let (t, p) = match r.parameter {
                Parameter::Time(t) => (t.to_string(), String::new()),
                Parameter::Order(p) => (String::new(), p.to_string()),
            };
            let c = &r.comparison;
            let (cm, cs) =
                r.confirmation.map(|c| (c.margin.to_string(), c.combined_se.to_string())).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{z},{t},{p},{},{},{},{},{},{},{},{cm},{cs}",
                self.check,
                c.lhs.value,
                c.lhs.std_error,
                c.rhs.value,
                c.rhs.std_error,
                c.margin,
                c.combined_se,
                r.status
            );
        }
        out
    }

    /// Human-readable summary block.
    pub fn summary_text(&self) -> String {
        let s = self.summary();
        let mut out = String::new();
        let _ = writeln!(out, "check: {}", self.check);
        let _ = writeln!(
            out,
            "cells: {}  pass: {}  unconfirmed flags: {}  confirmed flags: {}  (k = {})",
            s.cells, s.passed, s.unconfirmed_flags, s.confirmed_flags, self.k
        );
        if let Some((i, margin)) = s.worst {
            let r = &self.records[i];
            let at = match r.parameter {
                Parameter::Time(t) => format!("t={t}"),
                Parameter::Order(p) => format!("p={p}"),
            };
            let z = r.z.as_ref().map(|z| format!("z={z} ")).unwrap_or_default();
            let _ = writeln!(out, "worst margin: {margin:.6} at {z}{at} ({:.2} SE)", r.comparison.z_score());
        }
        out
    }
}

/// Builds a record, running `confirm` only for flagged cells.
fn judge<F>(
    z: Option<StartPoint>,
    parameter: Parameter,
    c: Comparison,
    k: f64,
    confirm: F,
) -> crate::Result<CheckRecord>
where
    F: FnOnce() -> crate::Result<Comparison>,
{
    if !c.flagged(k) {
        return Ok(CheckRecord { z, parameter, comparison: c, status: Status::Pass, confirmation: None });
    }
    let rerun = confirm()?;
    Ok(CheckRecord {
        z,
        parameter,
        comparison: c,
        status: Status::Flag { confirmed: rerun.flagged(k) },
        confirmation: Some(rerun),
    })
}
