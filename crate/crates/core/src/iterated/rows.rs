use std::fmt::Write as _;

use serde::Serialize;

use super::ProcessKind;
use crate::domains::StartPoint;
use crate::estimate::EstimateWithError;
use crate::rng::StreamId;

/// What a row is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    Time(f64),
    Order(f64),
}

/// One exported estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub domain_id: String,
    pub process: ProcessKind,
    pub z: StartPoint,
    pub parameter: Parameter,
    pub estimate: EstimateWithError,
    /// `None` for deterministic estimates.
    pub seed: Option<StreamId>,
}

pub const ROW_HEADER: &str = "domain_id,process,z,t,p,value,std_error,n,method,seed";

/// Renders rows under [`ROW_HEADER`]. Exactly one of the `t` and `p`
/// cells is filled; the seed is `master/stream` or empty.
pub fn rows_to_csv(rows: &[EstimateRow]) -> String {
    let mut out = String::from(ROW_HEADER);
    out.push('\n');
    for r in rows {
        let (t, p) = match r.parameter {
            Parameter::Time(t) => (t.to_string(), String::new()),
            Parameter::Order(p) => (String::new(), p.to_string()),
        };
        let seed = r.seed.map(|s| format!("{}/{}", s.master_seed, s.stream)).unwrap_or_default();
        let e = &r.estimate;
        let _ = writeln!(
            out,
            "{},{},{},{t},{p},{},{},{},{},{seed}",
            r.domain_id, r.process, r.z, e.value, e.std_error, e.n_samples, e.method
        );
    }
    out
}
